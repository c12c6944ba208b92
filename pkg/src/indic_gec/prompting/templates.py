"""Prompt templates, exemplar selection and message rendering."""

from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import dataclass

from ..corpus import Corpus, FileFormat, Language, Split, load_two_column


class Style(str, enum.Enum):
    ZERO_SHOT = "zero_shot"
    FEW_SHOT = "few_shot"


class Provenance(str, enum.Enum):
    CURATED = "curated"
    RANDOM_SEEDED = "random_seeded"


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    """A system prompt with ``{language}`` and, for few-shot use, ``{k}`` placeholders.

    Few-shot templates must end with ``exemplar_intro``, the sentence that
    announces the worked examples that follow.
    """

    name: str
    system_text: str
    style: Style
    exemplar_intro: str = ""

    def __post_init__(self):
        object.__setattr__(self, "style", Style(self.style))
        if not self.system_text.strip():
            raise PromptError(f"template {self.name!r} has an empty system text")
        if self.style is Style.FEW_SHOT:
            if not self.exemplar_intro.strip() or not self.system_text.rstrip().endswith(self.exemplar_intro.strip()):
                raise PromptError(f"few-shot template {self.name!r} must end with its exemplar introduction")

    def system_prompt(self, language: Language, k: int = 0) -> str:
        return self.system_text.replace("{language}", language.display_name).replace("{k}", str(k))

    @property
    def digest(self) -> str:
        doc = json.dumps([self.name, self.system_text, self.style.value], ensure_ascii=False)
        return hashlib.sha256(doc.encode("utf-8")).hexdigest()[:16]


_GEMINI_INTRO = "Below are {k} random sentences for your reference."
GEMINI_FEW_SHOT_TEXT = (
    "You are a {language} Grammatical Error Correction assistant, in low resource settings. "
    "Your task is to accurately identify and correct grammatical errors in the given {language} sentence. "
    "Correct all types of grammatical errors:\n"
    "Verb usage: Correct conjugation, tense, aspect, and agreement with the subject.,\n"
    "Pronouns: Usage of proper personal, possessive, and reflexive pronouns.,\n"
    "Prepositions: Correct use of postpositions or prepositions in context.,\n"
    "Fix spelling mistakes, diacritic marks (matras), and punctuation errors.,\n"
    "Gender and number agreement: Ensure adjectives, nouns, and verbs match in gender "
    "(masculine/feminine) and number (singular/plural).,\n"
    "The output should be ONLY the CORRECTED sentence, without any extra text or explanation. "
    "If the input is already correct, return it unchanged. "
    "Please ensure the corrections follow the rules and preserve the intended meaning.\n"
    + _GEMINI_INTRO
)

GPT_MINIMAL_TEXT = (
    "You are a Grammatical Error Correction (GEC) assistant for low-resource Indian languages.\n"
    "Your job: correct only grammar, spelling, spacing, matras/diacritics, punctuation, and light word-form errors.\n"
    "Do NOT translate. Preserve the meaning, script, and style of the input language.\n"
    "Return ONLY the corrected sentence with no quotes, no labels, no extra text.\n"
    "If the input is already correct, return it unchanged."
)
_GPT_INTRO = "Below are {k} example corrections for your reference."

PRESETS = {
    t.name: t
    for t in (
        PromptTemplate("gemini-fs", GEMINI_FEW_SHOT_TEXT, Style.FEW_SHOT, _GEMINI_INTRO),
        PromptTemplate("gemini-zs", GEMINI_FEW_SHOT_TEXT[: -len(_GEMINI_INTRO) - 1], Style.ZERO_SHOT),
        PromptTemplate("gpt-zs", GPT_MINIMAL_TEXT, Style.ZERO_SHOT),
        PromptTemplate("gpt-fs", GPT_MINIMAL_TEXT + "\n" + _GPT_INTRO, Style.FEW_SHOT, _GPT_INTRO),
    )
}


def get_template(name: str) -> PromptTemplate:
    try:
        return PRESETS[name]
    except KeyError:
        raise PromptError(f"unknown template {name!r}; presets: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class ExemplarSet:
    exemplars: tuple[tuple[str, str], ...]
    provenance: Provenance
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "exemplars", tuple((x, y) for x, y in self.exemplars))
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @property
    def k(self) -> int:
        return len(self.exemplars)


def select_exemplars(train: Corpus, k: int, mode: Provenance | str, seed_or_path=None) -> ExemplarSet:
    """Pick ``k`` in-context examples from a training split.

    ``random_seeded`` samples without replacement with ``random.Random(seed)``;
    ``curated`` reads a two-column TSV of exactly ``k`` pairs in file order.
    """
    mode = Provenance(mode)
    if k < 1:
        raise PromptError("k must be at least 1")
    if mode is Provenance.RANDOM_SEEDED:
        if train.split is not Split.TRAIN:
            raise PromptError(f"exemplars must come from a train split, got {train.split.value}")
        if len(train) < k:
            raise PromptError(f"cannot draw {k} exemplars from {len(train)} training pairs")
        seed = int(seed_or_path)
        picked = random.Random(seed).sample(range(len(train)), k)
        return ExemplarSet(tuple((train.pairs[i].source, train.pairs[i].reference) for i in picked), mode, seed)
    curated = load_two_column(seed_or_path, train.language, Split.TRAIN, FileFormat.TSV)
    if len(curated) != k:
        raise PromptError(f"{seed_or_path}: curated file has {len(curated)} pairs, expected {k}")
    return ExemplarSet(tuple((p.source, p.reference) for p in curated.pairs), mode)


@dataclass(frozen=True)
class PromptBundle:
    messages: tuple[tuple[str, str], ...]
    model_id: str
    temperature: float = 0.0
    max_output_tokens: int = 256

    def request_doc(self) -> dict:
        return {
            "model_id": self.model_id,
            "messages": [list(m) for m in self.messages],
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
        }

    def cache_key(self) -> str:
        canon = json.dumps(self.request_doc(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def render(
    template: PromptTemplate,
    language: Language,
    exemplars: ExemplarSet | None,
    input_sentence: str,
    *,
    model_id: str = "",
    temperature: float = 0.0,
    max_output_tokens: int | None = None,
) -> PromptBundle:
    """System message, then one user/assistant turn per exemplar, then the input verbatim."""
    if template.style is Style.FEW_SHOT:
        if exemplars is None or exemplars.k == 0:
            raise PromptError(f"few-shot template {template.name!r} needs a nonempty exemplar set")
    elif exemplars is not None:
        raise PromptError(f"zero-shot template {template.name!r} takes no exemplars")
    k = exemplars.k if exemplars else 0
    messages = [("system", template.system_prompt(language, k))]
    for x, y in exemplars.exemplars if exemplars else ():
        messages.append(("user", x))
        messages.append(("assistant", y))
    messages.append(("user", input_sentence))
    if max_output_tokens is None:
        max_output_tokens = 4 * len(input_sentence)
    return PromptBundle(tuple(messages), model_id, temperature, max_output_tokens)
