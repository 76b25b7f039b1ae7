"""DOT exports of the three graphical views of one model.

The network view is an undirected graph over the items with one labeled edge
per nonzero coupling.  The common-cause view adds one latent parent per
strictly positive eigenvalue of the shifted coupling matrix; the collider view
adds one observed common effect per positive eigenvalue instead, with arrows
reversed.
"""

from __future__ import annotations

from .core import ModelSpec
from .spectral import to_spectral

VIEWS = ("network", "common-cause", "collider")


def graph_dot(spec: ModelSpec, view: str, extra_shift: float = 0.0) -> str:
    """Render one of the three views as DOT text."""
    if view not in VIEWS:
        raise ValueError(f"unknown view {view!r}; expected one of {VIEWS}")
    n = spec.n
    items = [f"x{i + 1}" for i in range(n)]

    if view == "network":
        lines = ["graph network {"]
        lines.extend(f"  {name};" for name in items)
        sigma = spec.coupling_offdiag()
        for i in range(n):
            for j in range(i + 1, n):
                if sigma[i, j] != 0.0:
                    lines.append(
                        f'  {items[i]} -- {items[j]} [label="{sigma[i, j]:g}"];'
                    )
        lines.append("}")
        return "\n".join(lines) + "\n"

    rank = to_spectral(spec, extra_shift).rank
    if view == "common-cause":
        lines = ["digraph common_cause {"]
        lines.extend(f"  theta{r + 1} [shape=circle];" for r in range(rank))
        lines.extend(f"  {name};" for name in items)
        for r in range(rank):
            lines.extend(f"  theta{r + 1} -> {name};" for name in items)
        lines.append("}")
        return "\n".join(lines) + "\n"

    lines = ["digraph collider {"]
    lines.extend(f"  {name};" for name in items)
    lines.extend(f"  e{r + 1} [shape=box];" for r in range(rank))
    for r in range(rank):
        lines.extend(f"  {name} -> e{r + 1};" for name in items)
    lines.append("}")
    return "\n".join(lines) + "\n"
