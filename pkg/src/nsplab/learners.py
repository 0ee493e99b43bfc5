"""Baseline learners for NSP-labelled samples.

None of these come with a success guarantee beyond fitting the training
sample: efficiently learning acyclic DFAs from NSP labels is as hard as
learning them from ordinary labelled examples, which is believed to be
cryptographically hard.  The exception is :func:`learn_conjunction`, which
recovers a monomial exactly from one positive example.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .dfa import BINARY, Dfa, empty_dfa, minimize
from .errors import InconsistentExampleError, LabelConflictError, ShapeMismatchError
from .labels import NspExample, NspLabels, NspSample, labeler, nsp_err, nsp_label_vector
from .padding import Monomial, monomial_to_adfa


@dataclass
class LearnerOutput:
    predictor: Callable[[str], NspLabels]
    description: str
    hypothesis_dfa: Optional[Dfa] = None

    def __call__(self, x: str) -> NspLabels:
        return self.predictor(x)


def learn_conjunction(ex: NspExample, n: int) -> Monomial:
    """Read the target monomial off the continuation bits of one positive example.

    After k symbols, a 0 continuation bit for symbol '0' means z_{k+1} must be
    1, and a 0 bit for '1' means z_{k+1} must be 0.
    """
    rows = ex.labels.rows
    if ex.labels.width != 2:
        raise ShapeMismatchError("conjunction learning needs binary continuation vectors")
    if len(rows) < n + 1:
        raise ShapeMismatchError(f"example covers {len(rows) - 1} symbols, need {n}")
    pos, neg = set(), set()
    for k in range(n):
        (c0, c1), _ = rows[k]
        if not c0 and not c1:
            raise InconsistentExampleError(
                f"prefix {ex.x[:k]!r} has no live continuation; not a positive example of a monomial"
            )
        if not c0:
            pos.add(k + 1)
        if not c1:
            neg.add(k + 1)
    return Monomial(n, frozenset(pos), frozenset(neg))


def conjunction_learner(sample: NspSample) -> LearnerOutput:
    """Keep the literals that every example in the sample supports."""
    if not len(sample):
        dead = empty_dfa()
        return LearnerOutput(lambda x: nsp_label_vector(dead, x), "empty sample: dead DFA", dead)
    n = len(sample.examples[0].x)
    pos = neg = None
    for ex in sample:
        if len(ex.x) != n:
            raise ShapeMismatchError("conjunction learning needs strings of one length")
        mono = learn_conjunction(ex, n)
        pos = mono.positive if pos is None else pos & mono.positive
        neg = mono.negative if neg is None else neg & mono.negative
    mono = Monomial(n, pos, neg)
    dfa = monomial_to_adfa(mono)
    return LearnerOutput(lambda x: nsp_label_vector(dfa, x), f"monomial [{mono}]", dfa)


@dataclass
class TreeNode:
    prefix: str
    membership: Optional[int] = None
    continuation: list = field(default_factory=list)
    children: dict = field(default_factory=dict)

    def row(self):
        return (tuple(self.continuation), self.membership)


@dataclass
class PrefixTree:
    """Observed labels keyed by prefix.  Bits never observed stay ``None``."""

    alphabet: tuple
    nodes: dict = field(default_factory=dict)

    @property
    def root(self) -> TreeNode:
        return self.nodes[""]

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, prefix):
        return prefix in self.nodes

    def __getitem__(self, prefix) -> TreeNode:
        return self.nodes[prefix]

    def node(self, prefix: str) -> TreeNode:
        node = self.nodes.get(prefix)
        if node is None:
            node = TreeNode(prefix, None, [None] * len(self.alphabet))
            self.nodes[prefix] = node
            if prefix:
                self.node(prefix[:-1]).children[prefix[-1]] = prefix
        return node

    def observe(self, prefix: str, continuation, membership) -> None:
        node = self.node(prefix)
        if node.membership is not None and node.membership != membership:
            raise LabelConflictError(prefix, f"membership {node.membership} vs {membership}")
        node.membership = membership
        for i, bit in enumerate(continuation):
            seen = node.continuation[i]
            if seen is not None and seen != bit:
                raise LabelConflictError(
                    prefix, f"continuation for {self.alphabet[i]!r}: {seen} vs {bit}"
                )
            node.continuation[i] = bit

    def shortlex(self) -> list:
        return sorted(self.nodes, key=lambda p: (len(p), p))


def build_prefix_tree(sample: NspSample, alphabet=BINARY) -> PrefixTree:
    """Merge every per-prefix observation of the sample into one tree.

    Raises LabelConflictError when two observations of the same prefix
    disagree, or when a prefix is declared a dead end but some extension of
    it carries a nonzero label.
    """
    tree = PrefixTree(tuple(alphabet))
    tree.node("")
    for ex in sample:
        if ex.labels.width != len(alphabet):
            raise ShapeMismatchError(
                f"labels have {ex.labels.width} continuation bits, alphabet has {len(alphabet)}"
            )
        for n, (cont, m) in enumerate(ex.labels.rows):
            tree.observe(ex.x[:n], cont, m)

    for prefix in tree.shortlex():
        node = tree[prefix]
        for i, sym in enumerate(tree.alphabet):
            child = prefix + sym
            if node.continuation[i] == 0 and child in tree:
                cn = tree[child]
                if cn.membership or any(cn.continuation):
                    raise LabelConflictError(
                        child, f"declared a dead end by {prefix!r} but carries a nonzero label"
                    )
    return tree


class _Merger:
    """Union-find over the live prefix-tree nodes, with determinizing folds."""

    def __init__(self, parent, membership, continuation, children):
        self.parent = parent
        self.membership = membership
        self.continuation = continuation
        self.children = children

    @classmethod
    def from_tree(cls, tree: PrefixTree, ids: dict):
        k = len(ids)
        membership = [None] * k
        continuation = [None] * k
        children = [dict() for _ in range(k)]
        for prefix, i in ids.items():
            node = tree[prefix]
            membership[i] = node.membership
            continuation[i] = list(node.continuation)
            for s, sym in enumerate(tree.alphabet):
                child = node.children.get(sym)
                if child in ids:
                    children[i][s] = ids[child]
        return cls(list(range(k)), membership, continuation, children)

    def copy(self) -> "_Merger":
        return _Merger(list(self.parent), list(self.membership),
                       [list(c) for c in self.continuation], [dict(c) for c in self.children])

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def merge(self, keep: int, other: int) -> bool:
        """Fold ``other`` into ``keep``; False if observed bits clash."""
        stack = [(keep, other)]
        while stack:
            x, y = stack.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            m = _combine(self.membership[x], self.membership[y])
            if m is False:
                return False
            cont = [_combine(a, b) for a, b in zip(self.continuation[x], self.continuation[y])]
            if False in cont:
                return False
            self.parent[y] = x
            self.membership[x] = m
            self.continuation[x] = cont
            for s, cy in self.children[y].items():
                cx = self.children[x].get(s)
                if cx is None:
                    self.children[x][s] = cy
                else:
                    stack.append((cx, cy))
        return True

    def to_dfa(self, alphabet) -> Dfa:
        """Complete the merged tree into a DFA.

        Unobserved transitions whose continuation bit is 1 go to an accepting
        universal state; everything else unobserved goes to the dead state.
        """
        reps = sorted({self.find(i) for i in range(len(self.parent))})
        index = {r: i for i, r in enumerate(reps)}
        top = len(reps)
        dead = top + 1
        k = len(alphabet)
        transitions = []
        for r in reps:
            row = []
            for s in range(k):
                child = self.children[r].get(s)
                if child is not None:
                    row.append(index[self.find(child)])
                elif self.continuation[r][s] == 1:
                    row.append(top)
                else:
                    row.append(dead)
            transitions.append(row)
        transitions.append([top] * k)
        transitions.append([dead] * k)
        accepting = {index[r] for r in reps if self.membership[r] == 1} | {top}
        return Dfa(alphabet, transitions, index[self.find(0)], accepting, dead=dead)


def _combine(a, b):
    # None is unknown; returns False on a clash
    if a is None:
        return b
    if b is None or a == b:
        return a
    return False


def _live_ids(tree: PrefixTree) -> dict:
    """Shortlex ids for nodes not inside a declared dead end."""
    ids = {}
    for prefix in tree.shortlex():
        if prefix:
            parent = tree[prefix[:-1]]
            i = tree.alphabet.index(prefix[-1])
            if prefix[:-1] not in ids or parent.continuation[i] == 0:
                continue
        ids[prefix] = len(ids)
    return ids


def _distinct(sample: NspSample) -> NspSample:
    seen = {}
    for ex in sample:
        seen.setdefault(ex.x, ex)
    return NspSample(seen.values())


def prefix_tree_learn(sample: NspSample, alphabet=BINARY) -> LearnerOutput:
    """The prefix-tree acceptor, completed with a dead state."""
    if not len(sample):
        dead = empty_dfa(alphabet)
        return LearnerOutput(lambda x: nsp_label_vector(dead, x), "empty sample: dead DFA", dead)
    tree = build_prefix_tree(sample, alphabet)
    dfa = minimize(_Merger.from_tree(tree, _live_ids(tree)).to_dfa(tuple(alphabet)))
    return LearnerOutput(
        lambda x: nsp_label_vector(dfa, x),
        f"prefix-tree acceptor ({len(tree)} nodes, {dfa.state_count} states minimized)",
        dfa,
    )


def state_merge_learn(sample: NspSample, max_states: int, seed: int = 0,
                      alphabet=BINARY) -> LearnerOutput:
    """Greedy red/blue state merging that keeps every observed label intact.

    Blue nodes are tried in shortlex order against red states in id order;
    a merge is kept only when the completed hypothesis is NSP-consistent with
    the whole sample.  If the result has more than ``max_states`` states the
    unmerged prefix-tree acceptor is returned instead.  The procedure is
    deterministic; ``seed`` is recorded in the description only.
    """
    if not len(sample):
        dead = empty_dfa(alphabet)
        return LearnerOutput(lambda x: nsp_label_vector(dead, x), "empty sample: dead DFA", dead)
    alphabet = tuple(alphabet)
    tree = build_prefix_tree(sample, alphabet)
    ids = _live_ids(tree)
    check = _distinct(sample)
    merger = _Merger.from_tree(tree, ids)

    red = [0]
    while True:
        red_set = set(red)
        blue = sorted({merger.find(c) for r in red for c in merger.children[r].values()} - red_set)
        if not blue:
            break
        b = blue[0]
        for r in red:
            trial = merger.copy()
            if trial.merge(r, b) and nsp_consistent(trial.to_dfa(alphabet), check):
                merger = trial
                break
        else:
            red.append(b)

    hyp = minimize(merger.to_dfa(alphabet))
    if hyp.state_count <= max_states:
        return LearnerOutput(
            lambda x: nsp_label_vector(hyp, x),
            f"state-merge: {hyp.state_count} states (max_states={max_states}, seed={seed})",
            hyp,
        )
    fallback = prefix_tree_learn(sample, alphabet)
    fallback.description = (
        f"state-merge: merged hypothesis has {hyp.state_count} > {max_states} states; "
        f"fell back to {fallback.description}"
    )
    return fallback


def nsp_consistent(hyp: Union[Dfa, Callable], sample: NspSample) -> bool:
    """True iff the hypothesis reproduces every label of every example."""
    predict = labeler(hyp)
    return all(nsp_err(predict(ex.x), ex.labels) == 0 for ex in sample)
