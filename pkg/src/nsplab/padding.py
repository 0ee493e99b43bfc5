"""One-bit padding of fixed-length languages and of Boolean formulas.

Given a DFA ``A`` accepting only length-N binary strings, :func:`pad_adfa`
builds ``A+`` over length N+1 with ``u.b`` accepted iff ``A(u) = 1 or b = 1``.
Every prefix shorter than N then carries the labels ``([1, 1], 0)`` and a
length-N prefix ``u`` carries ``([A(u), 1], 0)``: the continuation bit for
``0`` after N symbols is the only label that depends on ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Union

from .dfa import BINARY, Dfa, depth_map, empty_dfa, minimize
from .errors import BudgetExceededError, ShapeMismatchError
from .labels import NspLabels, continuation_table

DEFAULT_VERIFY_BUDGET = 14


def _require_binary(dfa: Dfa) -> None:
    if dfa.alphabet != BINARY:
        raise ValueError(f"padding is defined over the alphabet ('0', '1'), got {dfa.alphabet!r}")


@dataclass(frozen=True)
class PaddedDfa:
    """A padded automaton plus the bookkeeping needed to address its parts.

    ``source_states`` maps ids of the padded DFA back to states of the
    *minimized* input; ``chain`` lists the filler states for depths 1..N.
    """

    dfa: Dfa
    source_states: dict
    chain: tuple
    final: int
    horizon: int
    fresh_start: Optional[int] = None

    @property
    def n(self) -> int:
        return self.horizon - 1

    def to_dict(self) -> dict:
        d = self.dfa.to_dict()
        d["padding"] = {
            "chain": list(self.chain),
            "final": self.final,
            "horizon": self.horizon,
            "source": {str(k): v for k, v in sorted(self.source_states.items())},
        }
        if self.fresh_start is not None:
            d["padding"]["fresh_start"] = self.fresh_start
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PaddedDfa":
        meta = d["padding"]
        return cls(
            dfa=Dfa.from_dict(d),
            source_states={int(k): v for k, v in meta["source"].items()},
            chain=tuple(meta["chain"]),
            final=meta["final"],
            horizon=meta["horizon"],
            fresh_start=meta.get("fresh_start"),
        )


def pad_adfa(a: Dfa, n: int) -> PaddedDfa:
    """Build the padded automaton for a DFA accepting a subset of {0,1}^n.

    The input is minimized first so that every live state has a unique depth.
    Original state ids are kept, the chain is appended after them, then the
    accepting final state; the dead state is reused.  For the empty language
    a fresh start state is added last.
    """
    _require_binary(a)
    m = minimize(a)
    depth = depth_map(m, n)

    base = m.state_count
    dead = m.dead
    extra = 0
    if dead is None:
        # cannot happen for a minimal fixed-length DFA, kept for safety
        dead = base
        extra = 1
    chain = tuple(range(base + extra, base + extra + n))
    final = base + extra + n
    empty = m.start not in depth
    fresh = final + 1 if empty else None
    count = final + 1 + (1 if empty else 0)

    transitions = [[dead, dead] for _ in range(count)]

    def wire(q, d, targets):
        if d < n:
            # dead edges fall into the chain at the next depth
            transitions[q] = [chain[d] if t == dead else t for t in targets]
        else:
            transitions[q] = [final if q in m.accepting else dead, final]

    for q, d in depth.depth.items():
        wire(q, d, m.transitions[q])
    if empty:
        wire(fresh, 0, [dead, dead])

    for i in range(n - 1):
        transitions[chain[i]] = [chain[i + 1], chain[i + 1]]
    if n:
        transitions[chain[-1]] = [dead, final]

    start = fresh if empty else m.start
    dfa = Dfa(BINARY, transitions, start, {final}, dead=dead)
    return PaddedDfa(
        dfa=dfa,
        source_states={q: q for q in range(base)},
        chain=chain,
        final=final,
        horizon=n + 1,
        fresh_start=fresh,
    )


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: Optional[str] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "counterexample": self.counterexample, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks],
                "notes": list(self.notes)}


def verify_padding(a: Dfa, p: PaddedDfa, budget: int = DEFAULT_VERIFY_BUDGET) -> VerificationReport:
    """Check the padded automaton against the input by exhaustive enumeration.

    Walks every binary string of length <= N + 1 once, tracking the state
    of both automata, and checks:

    * ``membership``: ``p(u.b) == A(u) or b`` for every u in {0,1}^N;
    * ``prefix-labels``: every prefix shorter than N has labels (1, 1, 0);
    * ``depth-n-labels``: every u in {0,1}^N has labels (A(u), 1, 0);
    * ``state-budget``: |p| <= |minimize(A)| + N + 1, plus one for the
      empty language.

    Each failed check reports the first counterexample in lexicographic order.
    """
    n = p.horizon - 1
    if n > budget:
        raise BudgetExceededError(f"N = {n} exceeds the enumeration budget {budget}")
    _require_binary(a)
    pd = p.dfa
    cont = continuation_table(pd)
    acc = pd.accepting

    first = {"membership": None, "prefix-labels": None, "depth-n-labels": None}

    def note(name, x):
        if first[name] is None:
            first[name] = x

    # iterative DFS in lexicographic order; stack holds (string, state in A, state in p)
    stack = [("", a.start, pd.start)]
    while stack:
        y, qa, qp = stack.pop()
        labels = (cont[qp][0], cont[qp][1], int(qp in acc))
        if len(y) < n:
            if labels != (1, 1, 0):
                note("prefix-labels", y)
            for s in (1, 0):
                stack.append((y + BINARY[s], a.transitions[qa][s], pd.transitions[qp][s]))
        else:
            au = int(qa in a.accepting)
            if labels != (au, 1, 0):
                note("depth-n-labels", y)
            for s in (0, 1):
                got = int(pd.transitions[qp][s] in acc)
                if got != int(au or s):
                    note("membership", y + BINARY[s])

    report = VerificationReport()
    report.checks.append(CheckResult("membership", first["membership"] is None, first["membership"]))
    report.checks.append(CheckResult("prefix-labels", first["prefix-labels"] is None, first["prefix-labels"]))
    report.checks.append(CheckResult("depth-n-labels", first["depth-n-labels"] is None, first["depth-n-labels"]))

    m = minimize(a)
    empty = not m.accepting
    limit = m.state_count + n + 1 + (1 if empty else 0)
    report.checks.append(CheckResult(
        "state-budget", pd.state_count <= limit,
        detail=f"{pd.state_count} states, limit {limit}",
    ))
    if empty:
        report.notes.append("empty input language: a fresh start state was added")
    return report


@dataclass(frozen=True)
class Monomial:
    """A conjunction of literals over variables z_1..z_n (1-based indices)."""

    n_vars: int
    positive: frozenset = frozenset()
    negative: frozenset = frozenset()
    unsatisfiable: bool = False

    def __post_init__(self):
        pos = frozenset(self.positive)
        neg = frozenset(self.negative)
        for i in pos | neg:
            if not 1 <= i <= self.n_vars:
                raise ValueError(f"variable index {i} outside 1..{self.n_vars}")
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)
        if pos & neg:
            object.__setattr__(self, "unsatisfiable", True)

    def __call__(self, u) -> int:
        return eval_monomial(self, u)

    def __str__(self):
        lits = [(i, "+") for i in self.positive] + [(i, "-") for i in self.negative]
        return ",".join(f"{sign}{i}" for i, sign in sorted(lits))

    @classmethod
    def parse(cls, text: str, n_vars: int) -> "Monomial":
        """Parse ``"+2,-4"`` (z2 and not z4).  The empty string is the empty conjunction."""
        pos, neg = set(), set()
        for tok in filter(None, (t.strip() for t in text.split(","))):
            if tok[0] not in "+-" or not tok[1:].isdigit():
                raise ValueError(f"bad literal {tok!r}; expected +i or -i")
            (pos if tok[0] == "+" else neg).add(int(tok[1:]))
        return cls(n_vars, frozenset(pos), frozenset(neg))


def _bits(u) -> list:
    return [int(b) for b in u]


def eval_monomial(m: Monomial, u) -> int:
    bits = _bits(u)
    if len(bits) != m.n_vars:
        raise ShapeMismatchError(f"assignment has {len(bits)} values, monomial has {m.n_vars} variables")
    if m.unsatisfiable:
        return 0
    return int(all(bits[i - 1] == 1 for i in m.positive) and all(bits[i - 1] == 0 for i in m.negative))


@dataclass(frozen=True)
class PaddedFormula:
    """``base(z_1..z_N) or z_{N+1}``."""

    base: Union[Monomial, Callable]
    n_vars: int

    def __call__(self, z) -> int:
        bits = _bits(z)
        if len(bits) != self.n_vars:
            raise ShapeMismatchError(f"expected {self.n_vars} values, got {len(bits)}")
        return int(bool(self.base(bits[:-1])) or bits[-1] == 1)


def pad_formula(m: Union[Monomial, Callable], n_vars: Optional[int] = None) -> PaddedFormula:
    """Pad a monomial, or any callable over ``n_vars`` bits, by one variable."""
    if n_vars is None:
        n_vars = m.n_vars
    return PaddedFormula(m, n_vars + 1)


def formula_nsp_labels(u, y: int) -> NspLabels:
    """Labels of ``x = u.1`` under a padded target, computed from ``(u, y)`` alone."""
    n = len(u)
    rows = [((1, 1), 0)] * n
    rows.append(((int(y), 1), 0))
    rows.append(((0, 0), 1))
    return NspLabels(rows)


def monomial_to_adfa(m: Monomial, n: Optional[int] = None) -> Dfa:
    """Minimal DFA accepting the satisfying assignments of ``m`` as strings.

    States 0..N form the chain (state i has read i symbols), N is accepting
    and N + 1 is dead; a literal on z_{i+1} sends the violating symbol at
    state i to the dead state.
    """
    if n is None:
        n = m.n_vars
    if n != m.n_vars:
        raise ShapeMismatchError(f"monomial has {m.n_vars} variables, asked for length {n}")
    if m.unsatisfiable:
        return empty_dfa()
    dead = n + 1
    transitions = []
    for i in range(n):
        var = i + 1
        row = [i + 1, i + 1]
        if var in m.positive:
            row[0] = dead
        if var in m.negative:
            row[1] = dead
        transitions.append(row)
    transitions.append([dead, dead])
    transitions.append([dead, dead])
    return Dfa(BINARY, transitions, 0, {n}, dead=dead)


def all_monomials(n: int):
    """Every satisfiable monomial over n variables (3^n of them)."""
    for choice in product((0, 1, -1), repeat=n):
        pos = frozenset(i + 1 for i, c in enumerate(choice) if c == 1)
        neg = frozenset(i + 1 for i, c in enumerate(choice) if c == -1)
        yield Monomial(n, pos, neg)


def random_monomial(n: int, rng, p_literal: float = 0.5) -> Monomial:
    pos, neg = set(), set()
    for i in range(1, n + 1):
        if rng.random() < p_literal:
            (pos if rng.random() < 0.5 else neg).add(i)
    return Monomial(n, frozenset(pos), frozenset(neg))


def satisfying_assignments(m: Monomial):
    """All satisfying assignments as strings, in lexicographic order."""
    if m.unsatisfiable:
        return
    free = [i for i in range(1, m.n_vars + 1) if i not in m.positive and i not in m.negative]
    for values in product("01", repeat=len(free)):
        bits = ["1" if i in m.positive else "0" for i in range(1, m.n_vars + 1)]
        for i, v in zip(free, values):
            bits[i - 1] = v
        yield "".join(bits)
