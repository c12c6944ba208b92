"""The validate / correct / evaluate / fertility steps of a run.

Each step reads the config, writes its artifacts under the output directory
and returns a process exit code. Artifacts that must be reproducible (the
evaluation JSON) keep wall-clock times in a separate ``run_metadata.json``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from ..bpe import FertilityReport, TokenizerSpecError, fertility, load_spec
from ..corpus import Corpus, CorpusFormatError, Split, identity_subset, stats
from ..metrics import GLEU_VARIANT, extract_edits, f_beta_counts, gleu_corpus, identity_compliance
from ..metrics.edits import edit_counts
from ..metrics.embeddings import EmbeddingUnavailable, make_embedder, sentence_bertscore
from ..prompting import (
    BatchAborted,
    ChatClient,
    ExemplarSet,
    Provenance,
    ResponseCache,
    correct_corpus,
    select_exemplars,
)
from ..tokenization import word_tokenize
from .config import SCHEMA_VERSION, RunConfig, SystemConfig
from .report import evaluation_csv, evaluation_markdown, fertility_csv, fertility_markdown

logger = logging.getLogger(__name__)

WORD_TOKENIZER = "whitespace split, edge punctuation (Unicode P*, danda) detached per grapheme"
F_BETA_ALIGNMENT = "weighted Levenshtein over word tokens, contiguous non-matches merged; exact span+replacement match"
FERTILITY_WORDS = "word tokens excluding punctuation-only tokens"
DECODING_NOTE = "decoding parameters are harness defaults (temperature 0.0, max tokens 4x input codepoints)"


class EvaluationError(RuntimeError):
    pass


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# Hypothesis files: UTF-8 TSV (id, source, hypothesis), no header.


def write_hypotheses(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for row in rows:
            writer.writerow(row)


def read_hypotheses(path: Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for n, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if len(row) != 3:
                raise EvaluationError(f"{path}: row {n}: expected 3 fields (id, source, hypothesis), got {len(row)}")
            out[row[0]] = row[2]
    return out


def hypothesis_path(cfg: RunConfig, lang: str, system: str) -> Path:
    return cfg.output_dir / "hypotheses" / f"{lang}__{system}.tsv"


# validate


def cmd_validate(cfg: RunConfig, echo=print) -> int:
    problems = cfg.missing_paths()
    rows = []
    for ld in cfg.languages:
        for split in ld.splits:
            try:
                corpus = ld.load(split)
            except (CorpusFormatError, OSError, ValueError) as exc:
                problems.append(f"{ld.language.code}/{split.value}: {exc}")
                continue
            st = stats(corpus)
            rows.append({"language": ld.language.code, "split": split.value, "pairs": st.n_pairs,
                         "identity": st.n_identity, "mean_source_codepoints": st.mean_source_codepoints,
                         "mean_source_words": st.mean_source_words})
    for lang in dict.fromkeys(r["language"] for r in rows):
        echo(f"[{lang}]")
        echo(f"{'split':<8}{'pairs':>8}{'identity':>10}")
        for r in rows:
            if r["language"] == lang:
                echo(f"{r['split']:<8}{r['pairs']:>8}{r['identity']:>10}")
    for p in problems:
        echo(f"ERROR {p}")
    _write_json(cfg.output_dir / "validate.json", {"schema_version": SCHEMA_VERSION, "splits": rows,
                                                   "problems": problems})
    return 1 if problems else 0


# correct


def _exemplars(cfg: RunConfig, sysc: SystemConfig, ld) -> ExemplarSet | None:
    ex = sysc.exemplars
    if ex is None:
        return None
    train = ld.load(Split.TRAIN)
    if ex.mode is Provenance.RANDOM_SEEDED:
        return select_exemplars(train, ex.k, ex.mode, cfg.seed)
    return select_exemplars(train, ex.k, ex.mode, ex.curated_path(cfg.data_dir, ld.language.code))


def cmd_correct(cfg: RunConfig, echo=print) -> int:
    # every credential is checked before the first request goes out
    clients = {s.provider: ChatClient(cfg.provider(s.provider)) for s in cfg.systems}
    cache = ResponseCache(cfg.response_cache_dir)
    status = 0
    try:
        for sysc in cfg.systems:
            client = clients[sysc.provider]
            for ld in cfg.languages:
                lang = ld.language.code
                corpus = ld.load(cfg.eval_split)
                exemplars = _exemplars(cfg, sysc, ld)
                manifest = {
                    "language": lang,
                    "system": sysc.name,
                    "provider": sysc.provider,
                    "model": sysc.model,
                    "template": sysc.template.name,
                    "template_digest": sysc.template.digest,
                    "temperature": sysc.temperature,
                    "seed": cfg.seed,
                    "exemplars": None if exemplars is None else {
                        "provenance": exemplars.provenance.value, "seed": exemplars.seed, "k": exemplars.k,
                        "pairs": [list(p) for p in exemplars.exemplars]},
                }
                calls_before = client.n_requests
                out = hypothesis_path(cfg, lang, sysc.name)
                try:
                    result = correct_corpus(corpus, sysc.template, exemplars, client, cache, cfg.parallelism,
                                            model_id=sysc.model, temperature=sysc.temperature, retry=cfg.retry,
                                            failure_threshold=cfg.failure_threshold)
                except BatchAborted as exc:
                    partial = dict(manifest, error=str(exc), failures=exc.result.failures,
                                   completed={k: v.normalized_text for k, v in exc.result.responses.items()},
                                   cache_keys={k: v.cache_key for k, v in exc.result.responses.items()})
                    _write_json(out.with_suffix(".partial.json"), partial)
                    echo(f"ERROR {lang}/{sysc.name}: {exc}; partial results in {out.with_suffix('.partial.json')}")
                    status = 1
                    continue
                write_hypotheses(out, [(p.id, p.source, result.responses[p.id].normalized_text)
                                       for p in corpus.pairs if p.id in result.responses])
                manifest["cache_keys"] = {k: v.cache_key for k, v in result.responses.items()}
                manifest["failures"] = result.failures
                _write_json(out.with_suffix(".manifest.json"), manifest)
                echo(f"{lang}/{sysc.name}: {len(result.responses)} hypotheses, "
                     f"{len(result.failures)} failures, {client.n_requests - calls_before} requests -> {out}")
    finally:
        for c in clients.values():
            c.close()
    return status


# evaluate


def evaluate_system(corpus: Corpus, hyps: dict[str, str], *, gleu=True, f05=True, embedder=None) -> dict:
    """Scores for one system on one corpus; percentages are x100, compliance is a rate."""
    missing = [p.id for p in corpus.pairs if p.id not in hyps]
    if missing:
        raise EvaluationError(f"{corpus.language.code}: no hypothesis for {len(missing)} ids, e.g. {missing[:3]}")
    lang = corpus.language
    triples = []
    tp = fp = fn = 0
    bert = []
    for p in corpus.pairs:
        s = word_tokenize(p.source, lang).tokens
        h = word_tokenize(hyps[p.id], lang).tokens
        r = word_tokenize(p.reference, lang).tokens
        triples.append((s, h, r))
        if f05:
            a, b, c = edit_counts(extract_edits(s, h), extract_edits(s, r))
            tp, fp, fn = tp + a, fp + b, fn + c
        if embedder is not None:
            bert.append(sentence_bertscore(embedder, hyps[p.id], p.reference).f1)
    comp = identity_compliance(identity_subset(corpus), hyps)
    row = {
        "n_pairs": len(corpus),
        "n_identity": comp.n_pairs,
        "n_unchanged_identity": comp.n_unchanged,
        "identity_compliance": comp.rate,
        "identity_compliance_vacuous": comp.vacuous,
        "gleu": None,
        "f05": None,
        "bertscore_f1": None,
    }
    if gleu:
        g = gleu_corpus(triples)
        row["gleu"] = 100.0 * g.score
        row["gleu_brevity_penalty"] = g.brevity_penalty
        row["gleu_precisions"] = list(g.per_n_precision)
    if f05:
        fs = f_beta_counts(tp, fp, fn, 0.5)
        row.update(f05=100.0 * fs.f_beta, tp=tp, fp=fp, fn=fn, precision=fs.precision, recall=fs.recall)
    if embedder is not None:
        row["bertscore_f1"] = 100.0 * sum(bert) / len(bert)
    return row


def _discover_hypotheses(cfg: RunConfig) -> list[Path]:
    d = cfg.output_dir / "hypotheses"
    return sorted(d.glob("*__*.tsv")) if d.is_dir() else []


def cmd_evaluate(cfg: RunConfig, hypothesis_files=(), echo=print) -> int:
    files = [Path(f) for f in hypothesis_files] or _discover_hypotheses(cfg)
    if not files:
        raise EvaluationError(f"no hypothesis files given or found under {cfg.output_dir / 'hypotheses'}")
    langs = {ld.language.code: ld for ld in cfg.languages}
    embedder = None
    if cfg.bertscore:
        try:
            embedder = make_embedder(cfg.embedding)
        except EmbeddingUnavailable as exc:
            raise EvaluationError(f"BERTScore is enabled but the embedding provider is unavailable: {exc}") from exc

    results = []
    systems = {}
    for f in files:
        lang, _, system = f.stem.partition("__")
        if lang not in langs or not system:
            raise EvaluationError(f"{f}: file name must be <language>__<system>.tsv for a configured language")
        corpus = langs[lang].load(cfg.eval_split)
        row = evaluate_system(corpus, read_hypotheses(f), gleu=cfg.gleu, f05=cfg.f05, embedder=embedder)
        manifest_path = f.with_suffix(".manifest.json")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8")) if manifest_path.exists() else {}
        keys = sorted(manifest.get("cache_keys", {}).values())
        row.update(
            language=lang,
            system=system,
            hypothesis_sha256=hashlib.sha256(f.read_bytes()).hexdigest(),
            cache_digests=keys,
        )
        results.append(row)
        if manifest:
            systems[system] = {k: manifest.get(k) for k in ("provider", "model", "template", "template_digest",
                                                           "temperature")}
            systems[system]["exemplars"] = None if manifest.get("exemplars") is None else {
                k: manifest["exemplars"][k] for k in ("provenance", "seed", "k")}
        else:
            systems.setdefault(system, None)
        echo(f"{lang}/{system}: GLEU {_fmt(row['gleu'])}  F0.5 {_fmt(row['f05'])}  "
             f"BERTScore {_fmt(row['bertscore_f1'])}  compliance {row['identity_compliance']:.2f}")

    results.sort(key=lambda r: (r["language"], r["system"]))
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "evaluation",
        "metadata": {
            "gleu_variant": GLEU_VARIANT,
            "word_tokenizer": WORD_TOKENIZER,
            "f_beta": {"beta": 0.5, "alignment": F_BETA_ALIGNMENT, "averaging": "micro (summed tp/fp/fn)"},
            "bertscore": {"embedding_provider": embedder.name, "aggregation": "mean sentence F1",
                          "rescaled": False} if embedder else None,
            "eval_split": cfg.eval_split.value,
            "seed": cfg.seed,
            "decoding_note": DECODING_NOTE,
            "systems": systems,
        },
        "results": results,
    }
    out = cfg.output_dir / "eval"
    _write_json(out / "evaluation.json", report)
    _write_json(out / "run_metadata.json", {"evaluated_at": _now(), "files": [str(f) for f in files]})
    (out / "evaluation.csv").write_text(evaluation_csv(report), encoding="utf-8")
    (out / "evaluation.md").write_text(evaluation_markdown(report), encoding="utf-8")
    return 0


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.2f}"


# fertility


def cmd_fertility(cfg: RunConfig, echo=print) -> int:
    specs = []
    errors = {}
    for p in cfg.fertility_tokenizers:
        try:
            specs.append(load_spec(p))
        except (OSError, TokenizerSpecError) as exc:
            errors[str(p)] = str(exc)
            echo(f"ERROR {p}: {exc}")
    rows: list[FertilityReport] = []
    for ld in cfg.languages:
        corpus = ld.load(cfg.fertility_split)
        for spec in specs:
            try:
                rows.append(fertility(spec, corpus, cfg.fertility_side))
            except (TokenizerSpecError, ValueError) as exc:
                errors[f"{spec.name}/{ld.language.code}"] = str(exc)
                echo(f"ERROR {spec.name} on {ld.language.code}: {exc}")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "fertility",
        "metadata": {"word_definition": FERTILITY_WORDS, "split": cfg.fertility_split.value,
                     "side": cfg.fertility_side.value},
        "rows": [{"language": r.language.code, "script": r.language.script.value, "tokenizer": r.tokenizer_name,
                  "n_words": r.n_words, "n_tokens": r.n_subword_tokens, "fertility": r.fertility} for r in rows],
        "errors": errors,
    }
    out = cfg.output_dir / "fertility"
    _write_json(out / "fertility.json", doc)
    (out / "fertility.csv").write_text(fertility_csv(doc["rows"]), encoding="utf-8")
    (out / "fertility.md").write_text(fertility_markdown(doc["rows"], doc["metadata"]), encoding="utf-8")
    for r in doc["rows"]:
        echo(f"{r['language']:<6}{r['tokenizer']:<24}{r['n_words']:>8}{r['n_tokens']:>8}{r['fertility']:>8.2f}")
    return 1 if errors else 0
