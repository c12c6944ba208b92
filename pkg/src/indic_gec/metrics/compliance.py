"""Instruction compliance on pairs that need no correction."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import Corpus


@dataclass(frozen=True)
class ComplianceResult:
    rate: float
    n_pairs: int
    n_unchanged: int
    vacuous: bool = False


def identity_compliance(subset: Corpus, outputs: dict[str, str]) -> ComplianceResult:
    """Fraction of identity pairs the system returned unchanged (after whitespace trim).

    An empty subset is vacuously compliant: rate 1.0 with ``vacuous`` set.
    """
    unchanged = 0
    for p in subset.pairs:
        if p.id not in outputs:
            raise KeyError(f"no output for pair {p.id!r}")
        unchanged += outputs[p.id].strip() == p.source.strip()
    n = len(subset.pairs)
    if n == 0:
        return ComplianceResult(1.0, 0, 0, vacuous=True)
    return ComplianceResult(unchanged / n, n, unchanged)
