from .bertscore import BertScoreResult, bertscore
from .compliance import ComplianceResult, identity_compliance
from .edits import EditSet, EditSpan, FScoreResult, apply_edits, extract_edits, f_beta, f_beta_counts
from .gleu import VARIANT as GLEU_VARIANT
from .gleu import GleuResult, gleu_corpus, gleu_sentence

__all__ = [
    "BertScoreResult",
    "ComplianceResult",
    "EditSet",
    "EditSpan",
    "FScoreResult",
    "GLEU_VARIANT",
    "GleuResult",
    "apply_edits",
    "bertscore",
    "extract_edits",
    "f_beta",
    "f_beta_counts",
    "gleu_corpus",
    "gleu_sentence",
    "identity_compliance",
]
