import re
import sys
from importlib import resources
from pathlib import Path

import pytest
import yaml

sys.path.insert(0, str(Path(__file__).parent))

from indic_gec.corpus import LANGUAGES, Language, Script  # noqa: E402
from indic_gec.mockserver import MockChatServer  # noqa: E402

TOY_DIR = Path(str(resources.files("indic_gec") / "data" / "toy"))
TOY_LANGS = ("tam", "mal", "hi", "bn", "tel")


@pytest.fixture
def toy_dir():
    return TOY_DIR


@pytest.fixture
def hindi():
    return LANGUAGES["hi"]


@pytest.fixture
def toy_lang():
    return Language("toy", "Toy", Script.OTHER)


@pytest.fixture
def mock_server():
    with MockChatServer() as srv:
        yield srv


def write_run_config(tmp_path, server_url, *, systems=None, langs=TOY_LANGS, extra=None):
    """A config over the bundled toy corpora, pointing the 'mock' provider at ``server_url``."""
    doc = {
        "schema_version": 1,
        "seed": 7,
        "paths": {"data_dir": str(TOY_DIR), "output_dir": str(tmp_path / "out")},
        "providers": [{"name": "mock", "base_url": server_url, "auth_env_var": "MOCK_GEC_KEY",
                       "dialect": "openai", "rpm_limit": None}],
        "languages": [{"code": c, "splits": {"train": f"{c}/train.tsv", "test": f"{c}/test.tsv"}} for c in langs],
        "systems": systems if systems is not None else [
            {"name": "echo-zs", "provider": "mock", "model": "echo", "template": "gpt-zs"},
            {"name": "echo-fs", "provider": "mock", "model": "echo", "template": "gemini-fs",
             "exemplars": {"mode": "random_seeded", "k": 3}},
        ],
        "correct": {"parallelism": 4, "retry": {"max_attempts": 3, "base_delay": 0.01}},
        "metrics": {"bertscore": True, "embedding": {"kind": "hashing", "dim": 64}},
        "fertility": {"tokenizers": [str(TOY_DIR / "toy_bpe.json"), str(TOY_DIR / "word_per_token.json")]},
    }
    if extra:
        doc.update(extra)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(doc, allow_unicode=True), encoding="utf-8")
    return path


# One PASS/FAIL line per acceptance criterion, printed after the run.

_criteria: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
        _criteria[str(num)] = (title, status)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    natural = lambda n: (int(re.match(r"\d+", n).group()), n)  # noqa: E731
    for num in sorted(_criteria, key=natural):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num:>3} {status:<4} {title}")
