"""Deterministic finite automata over a small ordered alphabet.

States are dense integer ids ``0 .. state_count - 1`` and the transition
function is stored total: ``transitions[q][i]`` is the successor of ``q`` on
``alphabet[i]``.  Strings are plain Python ``str`` objects whose characters
are alphabet symbols.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    AlphabetMismatchError,
    InfeasibleBudgetError,
    InvalidStateError,
    NotFixedLengthError,
    SymbolError,
)

BINARY = ("0", "1")


@dataclass(frozen=True)
class Dfa:
    """An immutable complete DFA.

    ``dead`` optionally records the unique non-accepting sink whose language
    is empty.  :func:`minimize` always fills it in when such a state exists.
    """

    alphabet: tuple
    transitions: tuple
    start: int
    accepting: frozenset
    dead: Optional[int] = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", tuple(tuple(row) for row in self.transitions))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.alphabet)})

        n = len(self.transitions)
        k = len(self.alphabet)
        if n == 0:
            raise ValueError("a DFA needs at least one state")
        if len(self._index) != k:
            raise ValueError(f"duplicate symbols in alphabet {self.alphabet!r}")
        for sym in self.alphabet:
            if not isinstance(sym, str) or len(sym) != 1:
                raise ValueError(f"alphabet symbols must be single characters, got {sym!r}")
        if not 0 <= self.start < n:
            raise InvalidStateError(f"start state {self.start} out of range")
        for q, row in enumerate(self.transitions):
            if len(row) != k:
                raise ValueError(f"state {q} has {len(row)} transitions, expected {k}")
            for t in row:
                if not 0 <= t < n:
                    raise InvalidStateError(f"transition target {t} from state {q} out of range")
        for q in self.accepting:
            if not 0 <= q < n:
                raise InvalidStateError(f"accepting state {q} out of range")
        if self.dead is not None:
            if not 0 <= self.dead < n:
                raise InvalidStateError(f"dead state {self.dead} out of range")
            if self.dead in self.accepting:
                raise ValueError("dead state cannot be accepting")
            if any(t != self.dead for t in self.transitions[self.dead]):
                raise ValueError("dead state must loop to itself on every symbol")

    @property
    def state_count(self) -> int:
        return len(self.transitions)

    def __len__(self):
        return len(self.transitions)

    def symbol_index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise SymbolError(f"symbol {symbol!r} not in alphabet {self.alphabet!r}") from None

    def step(self, state: int, symbol: str) -> int:
        return self.transitions[state][self.symbol_index(symbol)]

    def run(self, x: Iterable[str], state: Optional[int] = None) -> int:
        """Return the state reached from ``state`` (default: start) on ``x``."""
        q = self.start if state is None else state
        index = self._index
        table = self.transitions
        for sym in x:
            try:
                q = table[q][index[sym]]
            except KeyError:
                raise SymbolError(f"symbol {sym!r} not in alphabet {self.alphabet!r}") from None
        return q

    def accepts(self, x: Iterable[str]) -> bool:
        return self.run(x) in self.accepting

    def check_state(self, state: int) -> None:
        if not isinstance(state, int) or not 0 <= state < self.state_count:
            raise InvalidStateError(f"state {state!r} not in 0..{self.state_count - 1}")

    def to_dict(self) -> dict:
        d = {
            "alphabet": list(self.alphabet),
            "states": self.state_count,
            "start": self.start,
            "accepting": sorted(self.accepting),
            "transitions": [list(row) for row in self.transitions],
        }
        if self.dead is not None:
            d["dead"] = self.dead
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Dfa":
        try:
            transitions = d["transitions"]
            if int(d["states"]) != len(transitions):
                raise ValueError(f"'states' is {d['states']} but {len(transitions)} rows given")
            dfa = cls(
                alphabet=d["alphabet"],
                transitions=transitions,
                start=int(d["start"]),
                accepting=d["accepting"],
                dead=d.get("dead"),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed DFA record: {exc}") from exc
        if dfa.dead is None:
            dead = find_dead(dfa)
            if dead is not None:
                dfa = dfa.with_dead(dead)
        return dfa

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dfa":
        return cls.from_dict(json.loads(text))

    def with_dead(self, dead: Optional[int]) -> "Dfa":
        return Dfa(self.alphabet, self.transitions, self.start, self.accepting, dead)


@dataclass(frozen=True)
class DepthMap:
    """Depth of every live state of a fixed-length DFA.

    ``depth`` covers exactly the reachable, co-reachable states; the dead
    state (and anything else with an empty residual language) has no depth.
    """

    depth: dict
    horizon: int

    def __getitem__(self, state: int) -> int:
        return self.depth[state]

    def __contains__(self, state) -> bool:
        return state in self.depth

    def layer(self, d: int) -> list:
        return sorted(q for q, dq in self.depth.items() if dq == d)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    counterexample: Optional[str] = None

    def __bool__(self):
        return self.equivalent


def evaluate(dfa: Dfa, x: str) -> int:
    """Membership bit of ``x``."""
    return int(dfa.accepts(x))


def reachable(dfa: Dfa) -> set:
    seen = {dfa.start}
    queue = deque([dfa.start])
    while queue:
        q = queue.popleft()
        for t in dfa.transitions[q]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def co_reachable(dfa: Dfa) -> set:
    """States from which some accepting state can be reached.

    Computed by a breadth-first search over reversed transitions starting
    from the accepting states.
    """
    preds = [[] for _ in range(dfa.state_count)]
    for q, row in enumerate(dfa.transitions):
        for t in row:
            preds[t].append(q)
    live = set(dfa.accepting)
    queue = deque(live)
    while queue:
        q = queue.popleft()
        for p in preds[q]:
            if p not in live:
                live.add(p)
                queue.append(p)
    return live


def find_dead(dfa: Dfa) -> Optional[int]:
    """Lowest-numbered non-accepting sink with an empty language, if any."""
    live = co_reachable(dfa)
    for q, row in enumerate(dfa.transitions):
        if q not in live and all(t == q for t in row):
            return q
    return None


def minimize(dfa: Dfa) -> Dfa:
    """Return the minimal DFA for the same language.

    Unreachable states are dropped, then Moore-style partition refinement
    merges indistinguishable states.  Blocks are numbered by their smallest
    original member, so a DFA that is already minimal with no unreachable
    states comes back unchanged (up to the ``dead`` annotation).
    """
    alive = sorted(reachable(dfa))
    k = len(dfa.alphabet)

    block = {q: int(q in dfa.accepting) for q in alive}
    n_blocks = len(set(block.values()))
    while True:
        signatures = {}
        new_block = {}
        for q in alive:
            sig = (block[q],) + tuple(block[dfa.transitions[q][i]] for i in range(k))
            new_block[q] = signatures.setdefault(sig, len(signatures))
        block = new_block
        if len(signatures) == n_blocks:
            break
        n_blocks = len(signatures)

    # renumber blocks in order of their smallest member
    order = {}
    for q in alive:
        order.setdefault(block[q], len(order))
    rep = {}
    for q in alive:
        rep.setdefault(order[block[q]], q)
    transitions = [
        tuple(order[block[dfa.transitions[rep[b]][i]]] for i in range(k)) for b in range(len(order))
    ]
    accepting = {order[block[q]] for q in alive if q in dfa.accepting}
    result = Dfa(dfa.alphabet, transitions, order[block[dfa.start]], accepting)
    return result.with_dead(find_dead(result))


def canonical(dfa: Dfa) -> Dfa:
    """Relabel reachable states in breadth-first order (alphabet order on ties)."""
    order = {dfa.start: 0}
    queue = deque([dfa.start])
    while queue:
        q = queue.popleft()
        for t in dfa.transitions[q]:
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    inverse = sorted(order, key=order.get)
    transitions = [tuple(order[t] for t in dfa.transitions[q]) for q in inverse]
    accepting = {order[q] for q in inverse if q in dfa.accepting}
    dead = order.get(dfa.dead) if dfa.dead is not None else None
    return Dfa(dfa.alphabet, transitions, 0, accepting, dead)


def isomorphic(a: Dfa, b: Dfa) -> bool:
    """True if the reachable parts of ``a`` and ``b`` are identical up to renaming."""
    ca, cb = canonical(a), canonical(b)
    return (ca.alphabet, ca.transitions, ca.accepting) == (cb.alphabet, cb.transitions, cb.accepting)


def depth_map(dfa: Dfa, horizon: int) -> DepthMap:
    """Assign every live state its unique depth, or fail.

    Raises NotFixedLengthError when some live state is reachable by strings
    of two different lengths, or when an accepting state (or any live state)
    lies at a depth other than what a subset of Sigma^horizon allows.
    """
    live = co_reachable(dfa)
    depth = {}
    if dfa.start in live:
        depth[dfa.start] = 0
    queue = deque(depth)
    while queue:
        q = queue.popleft()
        d = depth[q]
        if d > horizon:
            raise NotFixedLengthError(f"live state {q} at depth {d} > {horizon}")
        for t in dfa.transitions[q]:
            if t not in live:
                continue
            if t not in depth:
                depth[t] = d + 1
                queue.append(t)
            elif depth[t] != d + 1:
                raise NotFixedLengthError(
                    f"state {t} reachable at lengths {depth[t]} and {d + 1}"
                )
    for q in dfa.accepting:
        if q in depth and depth[q] != horizon:
            raise NotFixedLengthError(f"accepting state {q} at depth {depth[q]}, expected {horizon}")
    return DepthMap(depth, horizon)


def is_fixed_length(dfa: Dfa, n: int) -> bool:
    """True iff every accepted string has length exactly ``n``."""
    try:
        depth_map(minimize(dfa), n)
    except NotFixedLengthError:
        return False
    return True


def equivalent(a: Dfa, b: Dfa) -> EquivalenceResult:
    """Compare two DFAs by a breadth-first walk over their product.

    The counterexample, if any, is the shortlex-least string on which the
    two automata disagree.
    """
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(f"{a.alphabet!r} != {b.alphabet!r}")
    start = (a.start, b.start)
    paths = {start: ""}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p, q = pair
        if (p in a.accepting) != (q in b.accepting):
            return EquivalenceResult(False, paths[pair])
        for i, sym in enumerate(a.alphabet):
            nxt = (a.transitions[p][i], b.transitions[q][i])
            if nxt not in paths:
                paths[nxt] = paths[pair] + sym
                queue.append(nxt)
    return EquivalenceResult(True)


def empty_dfa(alphabet: Sequence[str] = BINARY) -> Dfa:
    """The one-state DFA for the empty language."""
    return Dfa(alphabet, [[0] * len(alphabet)], 0, (), dead=0)


def strings(alphabet: Sequence[str], length: int) -> Iterator[str]:
    """All strings of exactly ``length`` symbols, in lexicographic order."""
    if length == 0:
        yield ""
        return
    for prefix in strings(alphabet, length - 1):
        for sym in alphabet:
            yield prefix + sym


def strings_upto(alphabet: Sequence[str], max_length: int) -> Iterator[str]:
    for n in range(max_length + 1):
        yield from strings(alphabet, n)


def random_adfa(n: int, max_states: int, seed: int) -> Dfa:
    """Random minimal DFA accepting a nonempty subset of {0,1}^n.

    Builds a layered DAG, layer i holding the states of depth i, with random
    edges between consecutive layers (or to the dead state), forces one
    accepting path so the language is nonempty, then minimizes.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if max_states < n + 2:
        raise InfeasibleBudgetError(
            f"need at least n + 2 = {n + 2} states for a nonempty length-{n} language, got {max_states}"
        )
    rng = random.Random(seed)

    widths = [1] * (n + 1)
    spare = rng.randint(0, max_states - (n + 2))
    growable = [i for i in range(1, n + 1)]
    while spare and growable:
        i = rng.choice(growable)
        widths[i] += 1
        spare -= 1
        if widths[i] >= 2 ** i:
            growable.remove(i)

    layers = []
    next_id = 0
    for w in widths:
        layers.append(list(range(next_id, next_id + w)))
        next_id += w
    dead = next_id
    count = next_id + 1

    p_dead = rng.uniform(0.1, 0.5)
    transitions = [[dead, dead] for _ in range(count)]
    for i in range(n):
        for q in layers[i]:
            for s in range(2):
                if rng.random() >= p_dead:
                    transitions[q][s] = rng.choice(layers[i + 1])
    accepting = {q for q in layers[n] if rng.random() < 0.5}

    q = layers[0][0]
    for i in range(n):
        s = rng.randrange(2)
        if transitions[q][s] == dead:
            transitions[q][s] = rng.choice(layers[i + 1])
        q = transitions[q][s]
    accepting.add(q)

    return minimize(Dfa(BINARY, transitions, layers[0][0], accepting))


def random_dfa(n_states: int, seed: int, alphabet: Sequence[str] = BINARY,
               accept_prob: float = 0.2) -> Dfa:
    """Uniformly random complete DFA; cycles and unreachable states allowed."""
    rng = random.Random(seed)
    transitions = [[rng.randrange(n_states) for _ in alphabet] for _ in range(n_states)]
    accepting = {q for q in range(n_states) if rng.random() < accept_prob}
    return Dfa(alphabet, transitions, 0, accepting)


def load_dfa(path) -> Dfa:
    with open(path) as f:
        data = json.load(f)
    return Dfa.from_dict(data)
