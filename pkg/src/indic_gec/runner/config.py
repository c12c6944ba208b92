"""Run configuration: a YAML (or JSON) document describing data, systems and metrics.

Relative paths resolve against the directory holding the config file.
Credentials never appear here; each provider names the environment
variable that holds its key.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from ..bpe import Side
from ..corpus import (
    Corpus,
    FileFormat,
    Language,
    LANGUAGES,
    Script,
    Split,
    load_src_tgt,
    load_two_column,
)
from ..prompting import PromptTemplate, Provenance, ProviderPreset, RetryPolicy, get_template, load_providers
from ..prompting.client import ConfigurationError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LanguageData:
    language: Language
    format: str  # "tsv", "csv" or "src_tgt"
    splits: dict  # Split -> Path, or Split -> (src Path, tgt Path)
    has_header: bool = False
    nfc: bool = False

    def files(self, split: Split) -> list[Path]:
        entry = self.splits[split]
        return list(entry) if isinstance(entry, tuple) else [entry]

    def load(self, split: Split | str) -> Corpus:
        split = Split(split)
        if split not in self.splits:
            raise ConfigurationError(f"{self.language.code}: no {split.value} split configured")
        entry = self.splits[split]
        if self.format == "src_tgt":
            return load_src_tgt(entry[0], entry[1], self.language, split, nfc=self.nfc)
        return load_two_column(entry, self.language, split, FileFormat(self.format),
                               has_header=self.has_header, nfc=self.nfc)


@dataclass(frozen=True)
class ExemplarSpec:
    mode: Provenance
    k: int
    path: str | None = None  # may contain "{lang}"

    def curated_path(self, base: Path, lang: str) -> Path:
        return base / self.path.replace("{lang}", lang)


@dataclass(frozen=True)
class SystemConfig:
    name: str
    provider: str
    model: str
    template: PromptTemplate
    exemplars: ExemplarSpec | None = None
    temperature: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    base_dir: Path
    languages: tuple[LanguageData, ...]
    systems: tuple[SystemConfig, ...] = ()
    eval_split: Split = Split.TEST
    data_dir: Path = Path(".")
    cache_dir: Path | None = None  # default: <output_dir>/cache
    output_dir: Path = Path("out")
    seed: int = 0
    providers: dict = field(default_factory=dict)
    parallelism: int = 1
    failure_threshold: float = 0.0
    retry: RetryPolicy = RetryPolicy()
    gleu: bool = True
    f05: bool = True
    bertscore: bool = False
    embedding: dict = field(default_factory=lambda: {"kind": "hashing"})
    fertility_tokenizers: tuple[Path, ...] = ()
    fertility_split: Split = Split.TEST
    fertility_side: Side = Side.SOURCE

    @property
    def response_cache_dir(self) -> Path:
        return self.cache_dir if self.cache_dir is not None else self.output_dir / "cache"

    def with_overrides(self, *, output_dir=None, seed=None, parallelism=None) -> RunConfig:
        changes = {}
        if output_dir is not None:
            changes["output_dir"] = Path(output_dir)
        if seed is not None:
            changes["seed"] = seed
        if parallelism is not None:
            changes["parallelism"] = parallelism
        return replace(self, **changes)

    def provider(self, name: str) -> ProviderPreset:
        try:
            return self.providers[name]
        except KeyError:
            raise ConfigurationError(f"unknown provider {name!r}; known: {sorted(self.providers)}") from None

    def missing_paths(self) -> list[str]:
        """Human-readable problems for every referenced file that does not exist."""
        problems = []
        for ld in self.languages:
            for split in ld.splits:
                for p in ld.files(split):
                    if not p.is_file():
                        problems.append(f"{ld.language.code}/{split.value}: missing file {p}")
        for sysc in self.systems:
            ex = sysc.exemplars
            if ex is not None and ex.mode is Provenance.CURATED:
                for ld in self.languages:
                    p = ex.curated_path(self.data_dir, ld.language.code)
                    if not p.is_file():
                        problems.append(f"system {sysc.name}: missing curated exemplar file {p}")
        for p in self.fertility_tokenizers:
            if not p.is_file():
                problems.append(f"fertility: missing tokenizer spec {p}")
        return problems


def _language(entry: dict) -> Language:
    code = entry["code"]
    known = LANGUAGES.get(code)
    return Language(
        code,
        entry.get("name", known.display_name if known else code),
        Script(entry.get("script", known.script if known else Script.OTHER)),
    )


def _template(value) -> PromptTemplate:
    if isinstance(value, str):
        return get_template(value)
    return PromptTemplate(**value)


def parse_config(doc: dict, base_dir: Path) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a mapping")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported config schema_version {version}")
    paths = doc.get("paths", {})
    data_dir = (base_dir / paths.get("data_dir", ".")).resolve()

    languages = []
    seen = set()
    for entry in doc.get("languages", []):
        lang = _language(entry)
        if lang.code in seen:
            raise ConfigurationError(f"language {lang.code!r} listed twice")
        seen.add(lang.code)
        fmt = entry.get("format", "tsv")
        if fmt not in ("tsv", "csv", "src_tgt"):
            raise ConfigurationError(f"{lang.code}: unknown format {fmt!r}")
        splits = {}
        for name, value in entry.get("splits", {}).items():
            split = Split(name)
            if fmt == "src_tgt":
                splits[split] = (data_dir / value["src"], data_dir / value["tgt"])
            else:
                splits[split] = data_dir / value
        languages.append(LanguageData(lang, fmt, splits, entry.get("has_header", False), entry.get("nfc", False)))
    if not languages:
        raise ConfigurationError("config lists no languages")

    providers_file = doc.get("providers_file")
    providers = load_providers(base_dir / providers_file if providers_file else None, doc.get("providers", []))

    systems = []
    for s in doc.get("systems", []):
        ex = s.get("exemplars")
        exemplars = None
        if ex:
            exemplars = ExemplarSpec(Provenance(ex["mode"]), int(ex.get("k", 10)), ex.get("path"))
            if exemplars.mode is Provenance.CURATED and not exemplars.path:
                raise ConfigurationError(f"system {s['name']}: curated exemplars need a path")
        sysc = SystemConfig(s["name"], s["provider"], s["model"], _template(s["template"]), exemplars,
                            float(s.get("temperature", 0.0)))
        if sysc.provider not in providers:
            raise ConfigurationError(f"system {sysc.name}: unknown provider {sysc.provider!r}")
        systems.append(sysc)
    if len({s.name for s in systems}) != len(systems):
        raise ConfigurationError("system names must be unique")

    correct = doc.get("correct", {})
    metrics = doc.get("metrics", {})
    fert = doc.get("fertility", {})
    return RunConfig(
        base_dir=base_dir,
        languages=tuple(languages),
        systems=tuple(systems),
        eval_split=Split(doc.get("eval_split", "test")),
        data_dir=data_dir,
        cache_dir=(base_dir / paths["cache_dir"]).resolve() if paths.get("cache_dir") else None,
        output_dir=(base_dir / paths.get("output_dir", "out")).resolve(),
        seed=int(doc.get("seed", 0)),
        providers=providers,
        parallelism=int(correct.get("parallelism", 1)),
        failure_threshold=float(correct.get("failure_threshold", 0.0)),
        retry=RetryPolicy(**correct.get("retry", {})),
        gleu=bool(metrics.get("gleu", True)),
        f05=bool(metrics.get("f05", True)),
        bertscore=bool(metrics.get("bertscore", False)),
        embedding=dict(metrics.get("embedding", {"kind": "hashing"})),
        fertility_tokenizers=tuple((base_dir / p).resolve() for p in fert.get("tokenizers", [])),
        fertility_split=Split(fert.get("split", "test")),
        fertility_side=Side(fert.get("side", "source")),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    try:
        return parse_config(doc, path.parent.resolve())
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{path}: {type(exc).__name__}: {exc}") from None
