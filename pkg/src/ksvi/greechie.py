"""Greechie orthogonality diagrams as Graphviz DOT."""

from __future__ import annotations

from .errors import UnknownObservable
from .hypergraph import Hypergraph

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
    "#e6550d", "#31a354", "#756bb1", "#636363", "#9c9ede", "#cedb9c", "#e7ba52", "#ad494a",
]


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_greechie_dot(h: Hypergraph, overlay=None) -> str:
    """One node per observable, one colored undirected chain per context.

    With an overlay, value 1 is drawn as a box and value 0 as a circle; an
    observable undefined in some context is dashed, one with contextual
    (differing) values is a diamond.
    """
    shapes: dict[str, tuple[str, str]] = {}
    if overlay is not None:
        for o, c in overlay.values:
            if o not in h.observables or c not in h.contexts:
                raise UnknownObservable(f"overlay entry v({o},{c}) is not in the hypergraph")
        for oid, ctxs in h.contexts_of.items():
            vals = [overlay.get(oid, c) for c in ctxs]
            defined = {v for v in vals if v is not None}
            if defined == {1}:
                shape = "box"
            elif defined == {0}:
                shape = "circle"
            elif defined:
                shape = "diamond"
            else:
                shape = "circle"
            style = "dashed" if None in vals else "solid"
            shapes[oid] = (shape, style)

    lines = ["digraph greechie {", "  edge [arrowhead=none];", "  node [shape=circle];"]
    for oid in h.observables:
        attrs = [f"label={_quote(oid)}"]
        if oid in shapes:
            shape, style = shapes[oid]
            attrs.append(f"shape={shape}")
            attrs.append(f"style={style}")
        lines.append(f"  {_quote(oid)} [{', '.join(attrs)}];")
    for i, ctx in enumerate(h.contexts.values()):
        color = PALETTE[i % len(PALETTE)]
        chain = " -> ".join(_quote(m) for m in ctx.members)
        lines.append(f"  {chain} [color={_quote(color)}, label={_quote(ctx.id)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
