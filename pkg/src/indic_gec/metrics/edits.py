"""Edit extraction by weighted alignment, and edit-level F-beta scoring."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

_EPS = 1e-9


@dataclass(frozen=True)
class EditSpan:
    src_start: int
    src_end: int
    replacement: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if not 0 <= self.src_start <= self.src_end:
            raise ValueError(f"bad span [{self.src_start}, {self.src_end})")
        if self.src_start == self.src_end and not self.replacement:
            raise ValueError("an edit must delete, insert or replace something")

    @property
    def key(self):
        return (self.src_start, self.src_end, self.replacement)


@dataclass(frozen=True)
class EditSet:
    edits: tuple[EditSpan, ...]
    source_length: int
    cost: float = 0.0

    def __post_init__(self):
        edits = tuple(sorted(self.edits, key=lambda e: (e.src_start, e.src_end)))
        object.__setattr__(self, "edits", edits)
        prev_end = 0
        for e in edits:
            if e.src_start < prev_end or e.src_end > self.source_length:
                raise ValueError(f"edit {e} overlaps a neighbour or exceeds the source")
            prev_end = e.src_end

    def __len__(self):
        return len(self.edits)

    def __iter__(self):
        return iter(self.edits)


@dataclass(frozen=True)
class FScoreResult:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_beta: float
    beta: float


def char_overlap(a: str, b: str) -> float:
    """Dice coefficient over character multisets, in [0, 1]."""
    if not a and not b:
        return 1.0
    common = sum((Counter(a) & Counter(b)).values())
    return 2.0 * common / (len(a) + len(b))


def substitution_cost(a: str, b: str) -> float:
    # the overlap term only breaks ties; it never outweighs a whole edit
    return 1.0 + (1.0 - char_overlap(a, b)) / 10.0


def extract_edits(source, target) -> EditSet:
    """Minimal-cost alignment of two token sequences, merged into edit spans.

    Ties prefer a substitution over delete plus insert, and place edits at
    the earliest source position.
    """
    src, tgt = tuple(source), tuple(target)
    n, m = len(src), len(tgt)
    dist = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = float(i)
    for j in range(1, m + 1):
        dist[0][j] = float(j)
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        s = src[i - 1]
        for j in range(1, m + 1):
            t = tgt[j - 1]
            diag = prev[j - 1] + (0.0 if s == t else substitution_cost(s, t))
            row[j] = min(diag, prev[j] + 1.0, row[j - 1] + 1.0)

    # backtrace from the end; taking the diagonal first pushes gaps leftwards
    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0:
            same = src[i - 1] == tgt[j - 1]
            step = 0.0 if same else substitution_cost(src[i - 1], tgt[j - 1])
            if abs(dist[i - 1][j - 1] + step - here) < _EPS:
                ops.append(("M" if same else "S", i - 1, tgt[j - 1], step))
                i, j = i - 1, j - 1
                continue
        if i > 0 and abs(dist[i - 1][j] + 1.0 - here) < _EPS:
            ops.append(("D", i - 1, None, 1.0))
            i -= 1
            continue
        ops.append(("I", i, tgt[j - 1], 1.0))
        j -= 1
    ops.reverse()

    edits = []
    cost = 0.0
    run_start = None
    run_end = 0
    repl: list[str] = []
    for kind, pos, tok, step in ops:
        cost += step
        if kind == "M":
            if run_start is not None:
                edits.append(EditSpan(run_start, run_end, tuple(repl)))
                run_start, repl = None, []
            continue
        if run_start is None:
            run_start = pos
            run_end = pos
        if kind in ("S", "D"):
            run_end = pos + 1
        if tok is not None:
            repl.append(tok)
    if run_start is not None:
        edits.append(EditSpan(run_start, run_end, tuple(repl)))
    return EditSet(tuple(edits), n, cost)


def apply_edits(source, edits: EditSet) -> list[str]:
    out = list(source)
    if len(out) != edits.source_length:
        raise ValueError(f"edit set was built for {edits.source_length} tokens, got {len(out)}")
    for e in reversed(edits.edits):
        out[e.src_start:e.src_end] = e.replacement
    return out


def f_beta_counts(tp: int, fp: int, fn: int, beta: float = 0.5) -> FScoreResult:
    if beta <= 0:
        raise ValueError("beta must be positive")
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    b2 = beta * beta
    f = (1 + b2) * p * r / (b2 * p + r) if p + r > 0 else 0.0
    return FScoreResult(tp, fp, fn, p, r, f, beta)


def edit_counts(hyp_edits: EditSet, gold_edits: EditSet) -> tuple[int, int, int]:
    if hyp_edits.source_length != gold_edits.source_length:
        raise ValueError(
            f"edit sets disagree on source length ({hyp_edits.source_length} vs {gold_edits.source_length})"
        )
    hyp = Counter(e.key for e in hyp_edits)
    gold = Counter(e.key for e in gold_edits)
    tp = sum((hyp & gold).values())
    return tp, sum(hyp.values()) - tp, sum(gold.values()) - tp


def f_beta(hyp_edits: EditSet, gold_edits: EditSet, beta: float = 0.5) -> FScoreResult:
    return f_beta_counts(*edit_counts(hyp_edits, gold_edits), beta=beta)
