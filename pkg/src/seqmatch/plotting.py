"""Draw game trees with matplotlib.

Decision nodes show the offered pair, leaves show the final matching.
The equilibrium path is drawn thick; the equilibrium choice at off-path
nodes is drawn in a darker grey than the alternative.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import MatchingInstance, OfferingOrder  # noqa: E402
from .spe import Action, TreeNode, build_game_tree  # noqa: E402


def _layout(nodes: list[TreeNode]) -> dict[int, tuple[float, float]]:
    by_id = {n.id: n for n in nodes}
    pos: dict[int, tuple[float, float]] = {}
    next_x = [0.0]

    def rec(nid: int, depth: int) -> float:
        n = by_id[nid]
        if n.offer is None:
            x = next_x[0]
            next_x[0] += 1.0
        else:
            xa = rec(n.accept_child, depth + 1)
            xr = rec(n.reject_child, depth + 1)
            x = (xa + xr) / 2
        pos[nid] = (x, -depth)
        return x

    rec(0, 0)
    return pos


def render_tree(
    instance: MatchingInstance,
    order: OfferingOrder,
    path: str | Path,
    title: Optional[str] = None,
    node_cap: int = 2000,
) -> Path:
    """Render the game tree of ``(instance, order)`` to an image file."""
    nodes = build_game_tree(instance, order, node_cap)
    pos = _layout(nodes)
    leaves = sum(1 for n in nodes if n.offer is None)
    depth = max(-y for _, y in pos.values()) if pos else 0
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * leaves), max(3.0, 1.1 * (depth + 1))))
    for n in nodes:
        if n.offer is None:
            continue
        x0, y0 = pos[n.id]
        for child, act, lab in ((n.accept_child, Action.ACCEPT, "A"), (n.reject_child, Action.REJECT, "R")):
            x1, y1 = pos[child]
            chosen = n.spe_action is act
            on_path = chosen and n.on_path
            ax.plot(
                [x0, x1],
                [y0, y1],
                color="black" if chosen else "#bbbbbb",
                linewidth=2.6 if on_path else 1.0,
                zorder=1,
            )
            ax.text((x0 + x1) / 2, (y0 + y1) / 2, lab, fontsize=7, ha="center", va="center",
                    bbox=dict(boxstyle="round,pad=0.1", fc="white", ec="none"))
    for n in nodes:
        x, y = pos[n.id]
        if n.offer is None:
            text = "\n".join(f"{p}{q}" for p, q in n.matching.sorted_pairs(instance)) or "-"
            ax.text(x, y, text, fontsize=6, ha="center", va="top",
                    bbox=dict(boxstyle="square,pad=0.2", fc="#eef" if n.on_path else "white", ec="black",
                              lw=1.5 if n.on_path else 0.5))
        else:
            p, q = n.offer
            ax.text(x, y, f"{p},{q}", fontsize=7, ha="center", va="center",
                    bbox=dict(boxstyle="circle,pad=0.25", fc="#eef" if n.on_path else "white", ec="black"))
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=9)
    out = Path(path)
    fig.subplots_adjust(left=0.02, right=0.98, top=0.92 if title else 0.98, bottom=0.08)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
