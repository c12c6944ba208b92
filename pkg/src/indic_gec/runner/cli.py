"""Command-line entry point: ``indic-gec <command> --config run.yaml``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..bpe import TokenizerSpecError, dump_spec, spec_from_hf_tokenizer_json, spec_from_tiktoken
from ..corpus import CorpusFormatError
from ..prompting import ConfigurationError, PromptError
from .commands import EvaluationError, cmd_correct, cmd_evaluate, cmd_fertility, cmd_validate
from .config import load_config
from .report import ReportMergeError, cmd_report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=Path, help="run config (YAML or JSON)")
    common.add_argument("--out", type=Path, help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="exemplar sampling seed (overrides the config)")
    common.add_argument("--parallelism", type=int, help="max in-flight requests (overrides the config)")
    common.add_argument("--quiet", "-q", action="store_true", help="only print errors")

    ap = argparse.ArgumentParser(prog="indic-gec", description="Prompt-based Indic GEC harness.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="load every configured split and print counts")
    sub.add_parser("correct", parents=[common], help="run every system over the evaluation split")
    ev = sub.add_parser("evaluate", parents=[common], help="score hypothesis files")
    ev.add_argument("hypotheses", nargs="*", type=Path,
                    help="<lang>__<system>.tsv files (default: all under <out>/hypotheses)")
    sub.add_parser("fertility", parents=[common], help="tokens-per-word for each configured tokenizer")
    rp = sub.add_parser("report", parents=[common], help="merge evaluation/fertility outputs into one report")
    rp.add_argument("inputs", nargs="*", type=Path,
                    help="evaluation.json / fertility.json files (default: those under <out>)")
    cv = sub.add_parser("convert-tokenizer", parents=[common],
                        help="write a tokenizer spec JSON from a .tiktoken or tokenizer.json file")
    src = cv.add_mutually_exclusive_group(required=True)
    src.add_argument("--tiktoken", type=Path)
    src.add_argument("--hf-json", type=Path)
    cv.add_argument("--name", required=True)
    cv.add_argument("--output", "-o", type=Path, required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    echo = (lambda *a, **k: None) if args.quiet else print

    try:
        if args.command == "convert-tokenizer":
            spec = (spec_from_tiktoken(args.tiktoken, args.name) if args.tiktoken
                    else spec_from_hf_tokenizer_json(args.hf_json, args.name))
            dump_spec(spec, args.output)
            echo(f"wrote {args.output} ({len(spec.vocab)} vocab, {len(spec.merges)} merges)")
            return 0

        if args.config is None:
            if args.command == "report" and args.inputs and args.out:
                return cmd_report(args.inputs, args.out, echo)
            print("error: --config is required", file=sys.stderr)
            return 2
        cfg = load_config(args.config).with_overrides(output_dir=args.out, seed=args.seed,
                                                      parallelism=args.parallelism)
        if args.command == "validate":
            return cmd_validate(cfg, echo)
        if args.command == "correct":
            return cmd_correct(cfg, echo)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.hypotheses, echo)
        if args.command == "fertility":
            return cmd_fertility(cfg, echo)
        if args.command == "report":
            inputs = args.inputs or [p for p in (cfg.output_dir / "eval" / "evaluation.json",
                                                 cfg.output_dir / "fertility" / "fertility.json") if p.exists()]
            return cmd_report(inputs, cfg.output_dir / "report", echo)
    except (ConfigurationError, CorpusFormatError, EvaluationError, ReportMergeError, PromptError,
            TokenizerSpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
