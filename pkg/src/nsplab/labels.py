"""Next-symbol-prediction labels.

For a prefix ``p`` of a string, the label row is ``(continuation, membership)``
where ``continuation[i]`` says whether ``p + alphabet[i]`` can still be
completed to an accepted string and ``membership`` says whether ``p`` itself
is accepted.  A string of length n gets n + 1 rows, one per prefix length.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .dfa import Dfa, co_reachable
from .errors import EmptySampleError, ShapeMismatchError


@dataclass(frozen=True)
class NspLabels:
    rows: tuple

    def __post_init__(self):
        rows = tuple((tuple(int(b) for b in cont), int(m)) for cont, m in self.rows)
        if not rows:
            raise ValueError("NspLabels needs at least the empty-prefix row")
        width = len(rows[0][0])
        for cont, m in rows:
            if len(cont) != width:
                raise ValueError("continuation vectors must all have the same width")
            if m not in (0, 1) or any(b not in (0, 1) for b in cont):
                raise ValueError("labels must be bits")
        object.__setattr__(self, "rows", rows)

    @property
    def horizon(self) -> int:
        return len(self.rows) - 1

    @property
    def width(self) -> int:
        return len(self.rows[0][0])

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, n):
        return self.rows[n]

    def flat(self) -> tuple:
        """Bits in row order, each row as continuations then membership."""
        out = []
        for cont, m in self.rows:
            out.extend(cont)
            out.append(m)
        return tuple(out)

    @classmethod
    def from_flat(cls, bits: Sequence[int], width: int) -> "NspLabels":
        if len(bits) % (width + 1):
            raise ShapeMismatchError(f"{len(bits)} bits is not a multiple of {width + 1}")
        rows = []
        for i in range(0, len(bits), width + 1):
            rows.append((bits[i:i + width], bits[i + width]))
        return cls(rows)

    def to_json(self) -> list:
        return [[list(cont), m] for cont, m in self.rows]

    @classmethod
    def from_json(cls, rows) -> "NspLabels":
        return cls([(cont, m) for cont, m in rows])


@dataclass(frozen=True)
class NspExample:
    x: str
    labels: NspLabels

    def __post_init__(self):
        if self.labels.horizon != len(self.x):
            raise ShapeMismatchError(
                f"labels cover {self.labels.horizon} symbols but x has {len(self.x)}"
            )

    def to_record(self) -> dict:
        return {"x": self.x, "rows": self.labels.to_json()}

    @classmethod
    def from_record(cls, rec: dict) -> "NspExample":
        return cls(rec["x"], NspLabels.from_json(rec["rows"]))


@dataclass(frozen=True)
class NspSample:
    examples: tuple
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)


Predictor = Callable[[str], NspLabels]


@lru_cache(maxsize=512)
def continuation_table(dfa: Dfa) -> tuple:
    """Per-state continuation vectors, computed once per DFA."""
    live = co_reachable(dfa)
    return tuple(tuple(int(t in live) for t in row) for row in dfa.transitions)


def continuation_vector(dfa: Dfa, state: int) -> tuple:
    dfa.check_state(state)
    return continuation_table(dfa)[state]


def continuation_bit(dfa: Dfa, x: str, sigma: str) -> int:
    i = dfa.symbol_index(sigma)
    return continuation_table(dfa)[dfa.run(x)][i]


def nsp_label_vector(dfa: Dfa, x: str) -> NspLabels:
    table = continuation_table(dfa)
    accepting = dfa.accepting
    q = dfa.start
    rows = [(table[q], int(q in accepting))]
    for sym in x:
        q = dfa.transitions[q][dfa.symbol_index(sym)]
        rows.append((table[q], int(q in accepting)))
    return NspLabels(rows)


def labeler(hypothesis: Union[Dfa, Predictor]) -> Predictor:
    """Turn a DFA or an arbitrary predictor into a predictor."""
    if isinstance(hypothesis, Dfa):
        return lambda x: nsp_label_vector(hypothesis, x)
    return hypothesis


def nsp_err(predicted: NspLabels, truth: NspLabels) -> int:
    """0 if every label agrees, 1 otherwise."""
    if predicted.horizon != truth.horizon or predicted.width != truth.width:
        raise ShapeMismatchError(
            f"cannot compare labels of shape ({predicted.horizon + 1}, {predicted.width}) "
            f"and ({truth.horizon + 1}, {truth.width})"
        )
    return int(predicted.rows != truth.rows)


def empirical_nsp_loss(hypothesis: Union[Dfa, Predictor], sample: NspSample,
                       target: Optional[Dfa] = None) -> Fraction:
    """Fraction of sample strings on which the hypothesis gets any label wrong.

    Hypothesis labels are always recomputed.  Ground truth comes from the
    sample's stored labels, or from ``target`` when one is given.
    """
    if not len(sample):
        raise EmptySampleError("cannot estimate loss on an empty sample")
    predict = labeler(hypothesis)
    wrong = 0
    for ex in sample:
        truth = nsp_label_vector(target, ex.x) if target is not None else ex.labels
        wrong += nsp_err(predict(ex.x), truth)
    return Fraction(wrong, len(sample))


def brute_force_phi(dfa: Dfa, x: str, sigma: str, max_suffix: int) -> int:
    """Continuation bit by forward exhaustive search over suffixes.

    Explores every suffix s with |s| <= max_suffix, one length at a time.
    Suffixes that land in the same state share every future, so each length
    keeps the set of states reached instead of the strings themselves.  The
    answer is exact once max_suffix >= state_count - 1.
    """
    frontier = {dfa.run(x + sigma)}
    seen = set()
    for _ in range(max_suffix + 1):
        if frontier & dfa.accepting:
            return 1
        key = frozenset(frontier)
        if key in seen:
            return 0
        seen.add(key)
        frontier = {t for q in frontier for t in dfa.transitions[q]}
    return 0


def dfa_digest(dfa: Dfa) -> str:
    return hashlib.sha256(dfa.to_json().encode()).hexdigest()


def write_dataset(sample: NspSample, fh) -> None:
    """Write a JSONL dataset: one provenance header line, then one line per example."""
    fh.write(json.dumps({"provenance": sample.provenance}, sort_keys=True) + "\n")
    for ex in sample:
        fh.write(json.dumps(ex.to_record(), separators=(",", ":")) + "\n")


def read_dataset(fh) -> NspSample:
    provenance = {}
    examples = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        if "provenance" in rec:
            if examples or provenance:
                raise ValueError(f"line {lineno}: provenance header must come first")
            provenance = rec["provenance"]
            continue
        examples.append(NspExample.from_record(rec))
    return NspSample(examples, provenance)


def random_label_agreement(truths: Sequence[NspLabels], seed: int) -> tuple:
    """Agreement rates of coin-flip predictors against the given truths.

    Returns ``(nsp_rate, classification_rate)``: the fraction of truths
    matched exactly by a uniformly random label vector of the same shape,
    and the fraction of final membership bits matched by a random bit.
    """
    if not truths:
        raise EmptySampleError("no truths to compare against")
    shape = (len(truths[0].rows), truths[0].width + 1)
    truth = np.array([t.flat() for t in truths], dtype=np.uint8)
    if truth.shape[1] != shape[0] * shape[1]:
        raise ShapeMismatchError("all truths must share one shape")
    rng = np.random.default_rng(seed)
    guesses = rng.integers(0, 2, size=truth.shape, dtype=np.uint8)
    nsp_rate = float(np.mean(np.all(guesses == truth, axis=1)))
    coin = rng.integers(0, 2, size=len(truths), dtype=np.uint8)
    cls_rate = float(np.mean(coin == truth[:, -1]))
    return nsp_rate, cls_rate
