"""Markdown / CSV / JSON renderings of evaluation and fertility results.

Scores are shown x100 at two decimals; JSON keeps full precision so every
number can be recomputed from the persisted hypotheses.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..corpus import LANGUAGES
from .config import SCHEMA_VERSION

METRICS = (("gleu", "GLEU"), ("f05", "F0.5"), ("bertscore_f1", "BERTScore"))
# metadata that must agree before results can share a table
_MERGE_KEYS = ("gleu_variant", "word_tokenizer", "f_beta", "bertscore", "eval_split")


class ReportMergeError(ValueError):
    pass


def _d2(v) -> str:
    return "" if v is None else f"{v:.2f}"


def _lang_order(codes) -> list[str]:
    known = list(LANGUAGES)
    return sorted(set(codes), key=lambda c: (known.index(c) if c in known else len(known), c))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def evaluation_csv(report: dict) -> str:
    rows = [
        [r["language"], r["system"], _d2(r["gleu"]), _d2(r["f05"]), _d2(r["bertscore_f1"]),
         _d2(100 * r["identity_compliance"]), r["n_pairs"], r["n_identity"]]
        for r in report["results"]
    ]
    return _csv(rows, ["language", "system", "gleu", "f05", "bertscore_f1", "identity_compliance",
                       "n_pairs", "n_identity"])


def evaluation_markdown(report: dict) -> str:
    return render_markdown(merge_reports([report]))


def fertility_csv(rows) -> str:
    return _csv([[r["language"], r["tokenizer"], r["n_words"], r["n_tokens"], f"{r['fertility']:.2f}"]
                 for r in rows], ["language", "tokenizer", "n_words", "n_tokens", "fertility"])


def fertility_markdown(rows, metadata=None) -> str:
    if not rows:
        return "_No fertility rows._\n"
    toks = list(dict.fromkeys(r["tokenizer"] for r in rows))
    by = {(r["language"], r["tokenizer"]): r for r in rows}
    lines = ["| Language | Script | " + " | ".join(toks) + " |", "|---|---|" + "---|" * len(toks)]
    for lang in _lang_order(r["language"] for r in rows):
        vals = {t: by[(lang, t)]["fertility"] for t in toks if (lang, t) in by}
        low = min(vals.values()) if vals else None
        script = next(r["script"] for r in rows if r["language"] == lang)
        cells = []
        for t in toks:
            if t not in vals:
                cells.append("-")
            else:
                cell = f"{vals[t]:.2f}"
                cells.append(f"**{cell}**" if len(vals) > 1 and vals[t] == low else cell)
        lines.append(f"| {lang.upper()} | {script} | " + " | ".join(cells) + " |")
    if metadata:
        lines.append("")
        lines.append(f"Fertility = subword tokens / words ({metadata.get('word_definition')}), "
                     f"{metadata.get('side')} side of the {metadata.get('split')} split. Lower is better.")
    return "\n".join(lines) + "\n"


def merge_reports(docs) -> dict:
    """Combine evaluation and fertility documents into one report document."""
    evals = [d for d in docs if d.get("kind") == "evaluation"]
    ferts = [d for d in docs if d.get("kind") == "fertility"]
    if not evals and not ferts:
        raise ReportMergeError("nothing to report: no evaluation or fertility outputs given")
    for d in docs:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ReportMergeError(f"unsupported schema_version {d.get('schema_version')}")

    metadata = {}
    systems = {}
    results = {}
    for d in evals:
        md = d["metadata"]
        for key in _MERGE_KEYS:
            if key in metadata and metadata[key] != md.get(key):
                raise ReportMergeError(f"refusing to merge: conflicting {key} ({metadata[key]!r} vs {md.get(key)!r})")
            metadata[key] = md.get(key)
        for name, info in (md.get("systems") or {}).items():
            if systems.get(name) not in (None, info) and info is not None:
                raise ReportMergeError(f"refusing to merge: system {name!r} described differently across inputs")
            systems[name] = info if info is not None else systems.get(name)
        for r in d["results"]:
            key = (r["language"], r["system"])
            if key in results:
                raise ReportMergeError(f"duplicate result for {key[0]}/{key[1]}")
            results[key] = r

    langs = _lang_order(k[0] for k in results)
    sys_order = list(dict.fromkeys(k[1] for k in results))
    best = {}
    for lang in langs:
        for m, _ in METRICS:
            vals = [results[(lang, s)][m] for s in sys_order if (lang, s) in results]
            vals = [v for v in vals if v is not None]
            if vals:
                best[(lang, m)] = max(vals)

    table = []
    for s in sys_order:
        for lang in langs:
            r = results.get((lang, s))
            if r is None:
                continue
            table.append({
                "system": s,
                "language": lang,
                **{m: r[m] for m, _ in METRICS},
                "best": {m: r[m] is not None and r[m] == best.get((lang, m)) for m, _ in METRICS},
            })
    compliance = [
        {"system": s, "language": lang, "identity_compliance": results[(lang, s)]["identity_compliance"],
         "n_unchanged": results[(lang, s)]["n_unchanged_identity"], "n_identity": results[(lang, s)]["n_identity"],
         "vacuous": results[(lang, s)]["identity_compliance_vacuous"]}
        for s in sys_order for lang in langs if (lang, s) in results
    ]
    fert_rows = []
    fert_meta = None
    for d in ferts:
        if fert_meta is not None and fert_meta != d["metadata"]:
            raise ReportMergeError("refusing to merge: fertility inputs used different settings")
        fert_meta = d["metadata"]
        fert_rows.extend(d["rows"])
    metadata["systems"] = systems
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "report",
        "metadata": metadata,
        "languages": langs,
        "systems": sys_order,
        "table": table,
        "compliance": compliance,
        "fertility": {"metadata": fert_meta, "rows": fert_rows} if ferts else None,
    }


def render_markdown(rep: dict) -> str:
    langs, systems = rep["languages"], rep["systems"]
    cells = {(t["language"], t["system"]): t for t in rep["table"]}
    out = []
    if langs:
        out.append("## Scores (x100)")
        out.append("")
        header = ["System"] + [f"{lang.upper()} {label}" for lang in langs for _, label in METRICS]
        out.append("| " + " | ".join(header) + " |")
        out.append("|---" * len(header) + "|")
        for s in systems:
            row = [s]
            for lang in langs:
                t = cells.get((lang, s))
                for m, _ in METRICS:
                    if t is None or t[m] is None:
                        row.append("-")
                    else:
                        v = _d2(t[m])
                        row.append(f"**{v}**" if t["best"][m] else v)
            out.append("| " + " | ".join(row) + " |")
        out.append("")
        out.append("Bold marks the best system per language and metric.")
        md = rep["metadata"]
        out.append(f"GLEU variant: `{md.get('gleu_variant')}`.")
        if md.get("bertscore"):
            out.append(f"BERTScore embeddings: `{md['bertscore']['embedding_provider']}` (no rescaling).")
        out.append("")
        out.append("## Identity compliance")
        out.append("")
        out.append("Share of no-correction-needed pairs returned unchanged (x100).")
        out.append("")
        out.append("| System | Language | Unchanged | Identity pairs | Compliance |")
        out.append("|---|---|---|---|---|")
        for c in rep["compliance"]:
            note = " (vacuous)" if c["vacuous"] else ""
            out.append(f"| {c['system']} | {c['language'].upper()} | {c['n_unchanged']} | {c['n_identity']} | "
                       f"{_d2(100 * c['identity_compliance'])}{note} |")
        out.append("")
    if rep.get("fertility"):
        out.append("## Tokenizer fertility")
        out.append("")
        out.append(fertility_markdown(rep["fertility"]["rows"], rep["fertility"]["metadata"]))
    return "\n".join(out).rstrip() + "\n"


def report_csv(rep: dict) -> str:
    rows = []
    for t in rep["table"]:
        for m, _ in METRICS:
            if t[m] is not None:
                rows.append([t["language"], t["system"], m, _d2(t[m]), int(t["best"][m])])
    for c in rep["compliance"]:
        rows.append([c["language"], c["system"], "identity_compliance", _d2(100 * c["identity_compliance"]), ""])
    if rep.get("fertility"):
        for r in rep["fertility"]["rows"]:
            rows.append([r["language"], r["tokenizer"], "fertility", f"{r['fertility']:.2f}", ""])
    return _csv(rows, ["language", "system", "metric", "value", "best"])


def cmd_report(inputs, out_dir, echo=print) -> int:
    docs = [json.loads(Path(p).read_text(encoding="utf-8")) for p in inputs]
    rep = merge_reports(docs)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(rep, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    md = render_markdown(rep)
    (out_dir / "report.md").write_text(md, encoding="utf-8")
    (out_dir / "report.csv").write_text(report_csv(rep), encoding="utf-8")
    echo(md)
    return 0
