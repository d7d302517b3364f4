"""Figures for the CLI's ``--figures`` option; matplotlib is imported on first use."""

from __future__ import annotations

import os
from typing import Dict, List, Optional, Sequence

from .catalog import CheckResult
from .hm_side import StandardUModule
from .standard_module import TOWER, StandardRModule
from .surgery import TriangleReport
from .tor_engine import TorResult


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, directory: str, filename: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, filename)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    _pyplot().close(fig)
    return path


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def plot_r_module(m: StandardRModule, directory: str, hi: Optional[int] = None) -> str:
    """One column per summand, a dot per element, V as vertical steps and Q as slanted arrows."""
    plt = _pyplot()
    hi = m.default_top() if hi is None else hi
    cols = {s.id: i for i, s in enumerate(sorted(m.summands, key=lambda s: (s.kind != TOWER, s.bottom)))}
    roles = {sid: role for role, sid in m.labels}
    fig, ax = plt.subplots(figsize=(1.4 * len(cols) + 2, 6))
    for s in m.summands:
        x = cols[s.id]
        ys = s.degrees(hi)
        ax.plot([x] * len(ys), ys, "o", color="black" if s.kind == TOWER else "tab:red")
        ax.plot([x] * len(ys), ys, "-", color="0.7", zorder=0)
        if s.kind == TOWER:
            ax.annotate("", (x, hi + 2), (x, ys[-1]), arrowprops={"arrowstyle": "->", "color": "0.5"})
    for e in m.q_edges:
        src, tgt = m.by_id[e.source], m.by_id[e.target]
        for y in src.degrees(hi):
            if tgt.contains(y - 1):
                ax.annotate("", (cols[tgt.id], y - 1), (cols[src.id], y), arrowprops={"arrowstyle": "->", "color": "tab:blue", "alpha": 0.6})
    ax.set_xticks(range(len(cols)))
    ax.set_xticklabels([f"{sid}\n{roles.get(sid, '')}" for sid in cols])
    ax.set_ylabel("degree")
    ax.set_title(m.name)
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, directory, f"module_{_safe(m.name)}.png")


def plot_u_module(m: StandardUModule, directory: str, name: str = "hm") -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(1.2 * (len(m.blocks) + 1) + 2, 5))
    top = max([m.tower_bottom] + [b + 2 * (n - 1) for b, n in m.blocks]) + 6
    ys = list(range(m.tower_bottom, top + 1, 2))
    ax.plot([0] * len(ys), ys, "o-", color="black")
    for i, (b, n) in enumerate(m.blocks, start=1):
        ys = [b + 2 * j for j in range(n)]
        ax.plot([i] * n, ys, "o-", color="tab:red")
    ax.set_xticks(range(len(m.blocks) + 1))
    ax.set_xticklabels(["tower"] + [f"F[U]/U^{n}" for _, n in m.blocks])
    ax.set_ylabel("degree")
    ax.set_title(name)
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, directory, f"hm_{_safe(name)}.png")


def plot_tor_table(tor: TorResult, directory: str, name: str = "tor") -> str:
    """Dimension of Tor_h in each internal degree, as an annotated grid."""
    plt = _pyplot()
    table = {h: tor.dims(h) for h in sorted(tor.modules)}
    degrees = list(range(tor.lo, tor.hi + 1))
    fig, ax = plt.subplots(figsize=(3 + 0.8 * len(table), max(4, 0.18 * len(degrees))))
    grid = [[table[h].get(d, 0) for h in table] for d in degrees]
    ax.imshow(grid, aspect="auto", cmap="Greys", origin="lower", extent=(-0.5, len(table) - 0.5, tor.lo - 0.5, tor.hi + 0.5))
    for j, h in enumerate(table):
        for d, n in table[h].items():
            if n:
                ax.text(j, d, str(n), ha="center", va="center", color="tab:orange", fontsize=8)
    ax.set_xticks(range(len(table)))
    ax.set_xticklabels([f"Tor_{h}" for h in table])
    ax.set_ylabel("internal degree")
    ax.set_title(name)
    return _save(fig, directory, f"tor_{_safe(name)}.png")


def plot_triangle_report(rep: TriangleReport, directory: str) -> str:
    plt = _pyplot()
    names = list(rep.checks)
    degrees = sorted({d for v in rep.checks.values() for d in v})
    grid = [[1 if rep.checks[n].get(d, True) else 0 for d in degrees] for n in names]
    fig, ax = plt.subplots(figsize=(max(6, 0.25 * len(degrees)), 0.35 * len(names) + 1.5))
    ax.imshow(grid, aspect="auto", cmap="RdYlGn", vmin=0, vmax=1)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xticks(range(len(degrees)))
    ax.set_xticklabels(degrees, fontsize=6, rotation=90)
    ax.set_xlabel("degree")
    ax.set_title(f"{rep.name}: {'pass' if rep.passed else 'FAIL'}")
    return _save(fig, directory, f"triangle_{_safe(rep.name)}.png")


def plot_check_summary(results: Sequence[CheckResult], directory: str) -> str:
    plt = _pyplot()
    groups: Dict[str, List[bool]] = {}
    for r in results:
        groups.setdefault(r.name.split(":")[0], []).append(r.ok)
    names = sorted(groups)
    ok = [sum(groups[n]) for n in names]
    bad = [len(groups[n]) - o for n, o in zip(names, ok)]
    fig, ax = plt.subplots(figsize=(7, 0.3 * len(names) + 1.5))
    ax.barh(names, ok, color="tab:green", label="pass")
    ax.barh(names, bad, left=ok, color="tab:red", label="fail")
    ax.set_xlabel("checks")
    ax.legend(loc="lower right")
    return _save(fig, directory, "check_all.png")

