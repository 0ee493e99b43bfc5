"""Turning ordinary labelled examples into positive NSP examples and back.

A labelled pair ``(u, y)`` with ``y = A(u)`` becomes the positive string
``u + "1"`` of the padded automaton, whose full label vector depends on
``(u, y)`` only.  Conversely, any NSP predictor yields a classifier by
reading its continuation bit for ``0`` after the first N symbols; whenever
the predictor gets a padded example fully right, that classifier is right
on ``u``.  :func:`run_reduction` measures both errors end to end.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import jsonschema

from .dfa import BINARY, Dfa, evaluate, load_dfa, random_adfa, strings
from .errors import EmptyLanguageError, EmptySupportError, NotPositiveError, ShapeMismatchError
from . import learners
from .labels import NspExample, NspLabels, NspSample, dfa_digest, nsp_err, nsp_label_vector
from .padding import Monomial, formula_nsp_labels, monomial_to_adfa, pad_adfa

KINDS = ("uniform", "uniform-positive", "path-weighted", "explicit")
EXHAUSTIVE_LIMIT = 14


@dataclass(frozen=True)
class LabeledExample:
    u: str
    y: int

    def __post_init__(self):
        if self.y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.y!r}")


@dataclass(frozen=True)
class DistributionSpec:
    """A distribution over strings of length ``n``.

    kinds:
      ``uniform``           every string in {0,1}^n equally likely
      ``uniform-positive``  uniform over the target's accepted length-n strings
      ``path-weighted``     walk from the start, picking uniformly among the
                            symbols that can still reach acceptance
      ``explicit``          uniform over ``support`` (repeats add weight)
    """

    kind: str
    n: int
    seed: int = 0
    support: tuple = ()
    target: Optional[Dfa] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "support", tuple(self.support))
        if self.kind == "explicit":
            for u in self.support:
                if len(u) != self.n:
                    raise ValueError(f"support string {u!r} does not have length {self.n}")

    def with_seed(self, seed: int) -> "DistributionSpec":
        return DistributionSpec(self.kind, self.n, seed, self.support, self.target)

    def describe(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "seed": self.seed}
        if self.kind == "explicit":
            d["support"] = list(self.support)
        if self.target is not None:
            d["target"] = dfa_digest(self.target)
        return d


def count_accepting(dfa: Dfa, length: int) -> list:
    """``counts[k][q]``: number of length-k strings leading from q to acceptance."""
    counts = [[int(q in dfa.accepting) for q in range(dfa.state_count)]]
    for _ in range(length):
        prev = counts[-1]
        counts.append([sum(prev[t] for t in row) for row in dfa.transitions])
    return counts


class Sampler:
    """Draws strings from a DistributionSpec; the stream is fixed by the seed."""

    def __init__(self, spec: DistributionSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        if spec.kind in ("uniform-positive", "path-weighted"):
            if spec.target is None:
                raise ValueError(f"{spec.kind} sampling needs a target DFA")
            self.counts = count_accepting(spec.target, spec.n)
            if self.counts[spec.n][spec.target.start] == 0:
                raise EmptySupportError(f"target accepts no string of length {spec.n}")
        elif spec.kind == "explicit" and not spec.support:
            raise EmptySupportError("explicit distribution with empty support")

    def draw_one(self) -> str:
        spec, rng = self.spec, self.rng
        if spec.kind == "uniform":
            return "".join(rng.choice(BINARY) for _ in range(spec.n))
        if spec.kind == "explicit":
            return rng.choice(spec.support)
        dfa = spec.target
        q = dfa.start
        out = []
        for k in range(spec.n, 0, -1):
            weights = [self.counts[k - 1][t] for t in dfa.transitions[q]]
            if spec.kind == "uniform-positive":
                r = rng.randrange(sum(weights))
                i = 0
                while r >= weights[i]:
                    r -= weights[i]
                    i += 1
            else:
                i = rng.choice([i for i, w in enumerate(weights) if w])
            out.append(dfa.alphabet[i])
            q = dfa.transitions[q][i]
        return "".join(out)

    def draw(self, m: int) -> list:
        return [self.draw_one() for _ in range(m)]

    def probabilities(self) -> dict:
        """Exact probability of every string in the support."""
        spec = self.spec
        if spec.kind == "uniform":
            p = Fraction(1, 2 ** spec.n)
            return {u: p for u in strings(BINARY, spec.n)}
        if spec.kind == "explicit":
            probs = {}
            for u in spec.support:
                probs[u] = probs.get(u, 0) + Fraction(1, len(spec.support))
            return probs
        dfa = spec.target
        probs = {}
        stack = [("", dfa.start, Fraction(1))]
        while stack:
            prefix, q, p = stack.pop()
            k = spec.n - len(prefix)
            if k == 0:
                probs[prefix] = p
                continue
            weights = [self.counts[k - 1][t] for t in dfa.transitions[q]]
            live = sum(1 for w in weights if w)
            for i, w in enumerate(weights):
                if not w:
                    continue
                step = Fraction(w, sum(weights)) if spec.kind == "uniform-positive" else Fraction(1, live)
                stack.append((prefix + dfa.alphabet[i], dfa.transitions[q][i], p * step))
        return dict(sorted(probs.items()))


class LiftedSampler:
    """Samples ``u + "1"`` with ``u`` drawn from the wrapped distribution."""

    def __init__(self, base: Sampler):
        self.base = base

    def draw_one(self) -> str:
        return self.base.draw_one() + "1"

    def draw(self, m: int) -> list:
        return [self.draw_one() for _ in range(m)]

    def probabilities(self) -> dict:
        return {u + "1": p for u, p in self.base.probabilities().items()}


def lift_distribution(d: DistributionSpec) -> LiftedSampler:
    return LiftedSampler(Sampler(d))


def lift_example(ex: LabeledExample) -> NspExample:
    """Positive NSP example for ``u + "1"``, built from ``(u, y)`` without the target."""
    return NspExample(ex.u + "1", formula_nsp_labels(ex.u, ex.y))


def sample_positive(target: Dfa, d: DistributionSpec, m: int) -> NspSample:
    """Draw ``m`` positive strings of ``target`` and label them."""
    if not count_accepting(target, d.n)[d.n][target.start]:
        raise EmptyLanguageError(f"target accepts no string of length {d.n}")
    if d.kind == "uniform":
        raise ValueError("uniform over {0,1}^n is not supported on positives; use uniform-positive")
    if d.kind == "explicit":
        for u in d.support:
            if not target.accepts(u):
                raise NotPositiveError(f"{u!r} is not in the target language")
    elif d.target is None or d.target != target:
        d = DistributionSpec(d.kind, d.n, d.seed, d.support, target)
    xs = Sampler(d).draw(m)
    examples = [NspExample(x, nsp_label_vector(target, x)) for x in xs]
    provenance = {"target": dfa_digest(target), "distribution": d.describe(), "seed": d.seed, "m": m}
    return NspSample(examples, provenance)


def _classifier_bit(pred: NspLabels, n: int) -> int:
    if pred.horizon != n + 1:
        raise ShapeMismatchError(f"predictor returned {pred.horizon + 1} rows for a string of length {n + 1}")
    return pred.rows[n][0][0]


def extract_classifier(hyp: Callable[[str], NspLabels]) -> Callable[[str], int]:
    """h(u) := the predicted continuation bit for '0' after reading u, on input u + '1'."""

    def h(u: str) -> int:
        return _classifier_bit(hyp(u + "1"), len(u))

    return h


@dataclass
class ReductionReport:
    nsp_error_estimate: Fraction
    classification_error_estimate: Fraction
    sample_size: int
    domination_holds: bool
    eval_size: int = 0
    exhaustive: bool = False
    pointwise_violations: int = 0
    train_nsp_loss: Optional[Fraction] = None
    learner: str = ""

    def to_dict(self) -> dict:
        def frac(f):
            return None if f is None else {"value": str(f), "float": float(f)}

        return {
            "nsp_error_estimate": frac(self.nsp_error_estimate),
            "classification_error_estimate": frac(self.classification_error_estimate),
            "sample_size": self.sample_size,
            "domination_holds": self.domination_holds,
            "eval_size": self.eval_size,
            "exhaustive": self.exhaustive,
            "pointwise_violations": self.pointwise_violations,
            "train_nsp_loss": frac(self.train_nsp_loss),
            "learner": self.learner,
        }


def run_reduction(target: Dfa, n: int, d: DistributionSpec, m: int, learner: Callable,
                  eval_size: Optional[int] = None) -> ReductionReport:
    """Train an NSP learner on lifted examples and score the extracted classifier.

    ``learner`` maps an NspSample to a predictor (or to anything with a
    ``predictor`` attribute).  Evaluation is exact over the whole support of
    ``d`` when n <= 14; otherwise a fresh sample of ``max(10**4, 10 * m)``
    strings is drawn from a stream seeded with ``d.seed + 1``.
    """
    if d.n != n:
        raise ValueError(f"distribution is over length {d.n}, target over {n}")
    train_us = Sampler(d).draw(m)
    train = NspSample(
        [lift_example(LabeledExample(u, evaluate(target, u))) for u in train_us],
        {"target": dfa_digest(target), "distribution": d.describe(), "m": m, "lifted": True},
    )
    out = learner(train)
    predictor = getattr(out, "predictor", out)
    description = getattr(out, "description", getattr(learner, "__name__", type(learner).__name__))

    train_wrong = sum(nsp_err(predictor(ex.x), ex.labels) for ex in train) if m else 0

    if n <= EXHAUSTIVE_LIMIT and eval_size is None:
        points = Sampler(d).probabilities().items()
        exhaustive = True
    else:
        size = eval_size if eval_size is not None else max(10 ** 4, 10 * m)
        w = Fraction(1, size)
        points = [(u, w) for u in Sampler(d.with_seed(d.seed + 1)).draw(size)]
        exhaustive = False

    nsp_error = Fraction(0)
    cls_error = Fraction(0)
    violations = 0
    count = 0
    for u, w in points:
        y = evaluate(target, u)
        pred = predictor(u + "1")
        e_nsp = nsp_err(pred, formula_nsp_labels(u, y))
        e_cls = int(_classifier_bit(pred, n) != y)
        violations += e_cls > e_nsp
        nsp_error += w * e_nsp
        cls_error += w * e_cls
        count += 1

    return ReductionReport(
        nsp_error_estimate=nsp_error,
        classification_error_estimate=cls_error,
        sample_size=m,
        domination_holds=cls_error <= nsp_error and violations == 0,
        eval_size=count,
        exhaustive=exhaustive,
        pointwise_violations=violations,
        train_nsp_loss=Fraction(train_wrong, m) if m else None,
        learner=description,
    )


def constant_learner(sample: NspSample) -> Callable[[str], NspLabels]:
    """Ignores the data: every row of every prediction is ([1, 1], 0)."""
    return lambda x: NspLabels([((1, 1), 0)] * (len(x) + 1))


def oracle_learner(target: Dfa, n: int) -> Callable:
    """A learner that already knows the answer: the padded target's exact labeler."""
    padded = pad_adfa(target, n).dfa

    def learn(sample: NspSample):
        return lambda x: nsp_label_vector(padded, x)

    learn.__name__ = "oracle"
    return learn


def make_learner(name: str, params: Optional[dict] = None, target: Optional[Dfa] = None,
                 n: Optional[int] = None) -> Callable:
    """Learner factory used by configuration files and the CLI."""
    params = dict(params or {})
    if name == "conjunction":
        return learners.conjunction_learner
    if name == "prefix-tree":
        return learners.prefix_tree_learn
    if name == "state-merge":
        max_states = int(params.get("max_states", 64))
        seed = int(params.get("seed", 0))
        return lambda sample: learners.state_merge_learn(sample, max_states, seed)
    if name == "constant":
        return constant_learner
    if name == "oracle":
        if target is None or n is None:
            raise ValueError("the oracle learner needs the target and n")
        return oracle_learner(target, n)
    raise ValueError(f"unknown learner {name!r}")


CONFIG_SCHEMA = {
    "type": "object",
    "required": ["target", "N", "distribution", "m", "learner"],
    "additionalProperties": False,
    "properties": {
        "target": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["generate"],
                    "properties": {
                        "generate": {
                            "type": "object",
                            "required": ["max_states"],
                            "additionalProperties": False,
                            "properties": {
                                "max_states": {"type": "integer", "minimum": 1},
                                "seed": {"type": "integer"},
                            },
                        }
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["monomial"],
                    "properties": {"monomial": {"type": "string"}},
                },
            ]
        },
        "N": {"type": "integer", "minimum": 0},
        "m": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "eval_size": {"type": "integer", "minimum": 1},
        "distribution": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(KINDS)},
                "seed": {"type": "integer"},
                "support": {"type": "array", "items": {"type": "string"}},
            },
        },
        "learner": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "required": ["name"],
                    "properties": {
                        "name": {"type": "string"},
                        "max_states": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer"},
                    },
                },
            ]
        },
    },
}


def validate_config(config) -> None:
    """Raise jsonschema.ValidationError if ``config`` is malformed."""
    jsonschema.validate(config, CONFIG_SCHEMA)


def resolve_target(spec, n: int, base_dir=None) -> Dfa:
    if isinstance(spec, str):
        path = spec if base_dir is None or os.path.isabs(spec) else os.path.join(base_dir, spec)
        return load_dfa(path)
    if "generate" in spec:
        g = spec["generate"]
        return random_adfa(n, g["max_states"], g.get("seed", 0))
    return monomial_to_adfa(Monomial.parse(spec["monomial"], n), n)


def run_config(config: dict, base_dir=None) -> ReductionReport:
    """Run one reduction experiment described by a config mapping."""
    validate_config(config)
    n = config["N"]
    seed = config.get("seed", 0)
    target = resolve_target(config["target"], n, base_dir)
    dist = config["distribution"]
    d = DistributionSpec(dist["kind"], n, dist.get("seed", seed), tuple(dist.get("support", ())),
                         target=target)
    lconf = config["learner"]
    if isinstance(lconf, str):
        lconf = {"name": lconf}
    params = {k: v for k, v in lconf.items() if k != "name"}
    learner = make_learner(lconf["name"], params, target=target, n=n)
    return run_reduction(target, n, d, config["m"], learner, config.get("eval_size"))
