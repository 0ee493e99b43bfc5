"""Graphviz DOT rendering for DFAs and padded DFAs."""

from __future__ import annotations

from typing import Optional

from .dfa import Dfa


def _quote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def _edges(dfa: Dfa):
    """Group parallel transitions so each (source, target) pair gets one edge."""
    grouped = {}
    for q, row in enumerate(dfa.transitions):
        for i, t in enumerate(row):
            grouped.setdefault((q, t), []).append(dfa.alphabet[i])
    return grouped


def to_dot(dfa: Dfa, padding: Optional[dict] = None, name: str = "dfa") -> str:
    """Render ``dfa``; ``padding`` is the metadata object of a padded DFA.

    The dead state is drawn as a grey dashed box labelled R.  For padded
    automata the chain states are grouped in a blue cluster and the final
    state is labelled q_fin, matching the usual picture of the construction.
    """
    chain = list(padding.get("chain", [])) if padding else []
    final = padding.get("final") if padding else None
    fresh = padding.get("fresh_start") if padding else None

    def label(q):
        if q == dfa.dead:
            return "R"
        if q in chain:
            return f"q'{chain.index(q) + 1}"
        if q == final:
            return "q_fin"
        if q == fresh:
            return "q~0"
        return f"q{q}"

    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in range(dfa.state_count):
        if q in chain:
            continue
        attrs = [f"label={_quote(label(q))}"]
        if q == dfa.dead:
            attrs += ["shape=box", "style=dashed", "color=grey50", "fontcolor=grey50"]
        elif q in dfa.accepting:
            attrs.append("shape=doublecircle")
        else:
            attrs.append("shape=circle")
        if padding is not None and q != dfa.dead:
            attrs.append("color=blue" if q in (final, fresh) else "color=darkgreen")
        lines.append(f"  s{q} [{', '.join(attrs)}];")
    if chain:
        lines.append("  subgraph cluster_chain {")
        lines.append('    label="chain"; color=blue; style=rounded;')
        for q in chain:
            lines.append(f"    s{q} [label={_quote(label(q))}, shape=circle, color=blue];")
        lines.append("  }")
    lines.append(f"  __start -> s{dfa.start};")
    for (q, t), syms in _edges(dfa).items():
        attrs = [f"label={_quote(','.join(syms))}"]
        if t == dfa.dead:
            attrs.append("style=dashed")
        lines.append(f"  s{q} -> s{t} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
