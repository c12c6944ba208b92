from .cli import main
from .commands import cmd_correct, cmd_evaluate, cmd_fertility, cmd_validate, evaluate_system
from .config import RunConfig, load_config, parse_config
from .report import cmd_report, merge_reports
