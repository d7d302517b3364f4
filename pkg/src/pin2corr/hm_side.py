"""F2[U]-module side: HM-to in standard form, connected sums via Tor over F2[[U]], Gysin bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import (
    GradedModule,
    Operator,
    WindowError,
    gf2_rank,
    homology,
    torsion_blocks,
)
from .standard_module import CorrectionData, StandardRModule, TORSION, to_graded

# tower plus sorted (bottom, length) blocks
Block = Tuple[int, int]


class UModuleError(ValueError):
    pass


@dataclass(frozen=True)
class StandardUModule:
    """HM-to = (U-tower with bottom ``tower_bottom``) + blocks F[U]/U^n with given bottoms."""

    tower_bottom: int
    blocks: Tuple[Block, ...] = ()

    def __post_init__(self):
        for b, n in self.blocks:
            if n < 1:
                raise UModuleError(f"block at {b} has length {n} < 1")
        object.__setattr__(self, "blocks", tuple(sorted(tuple(x) for x in self.blocks)))

    @property
    def lengths(self) -> List[int]:
        return sorted((n for _, n in self.blocks), reverse=True)

    def explicit(self, hi: Optional[int] = None) -> GradedModule:
        """Explicit F[U]-module up to degree ``hi`` (the tower is truncated there)."""
        if hi is None:
            hi = max([self.tower_bottom] + [b + 2 * (n - 1) for b, n in self.blocks]) + 8
        gens: Dict[int, List[Tuple[int, int]]] = {}
        for x in range(self.tower_bottom, hi + 1, 2):
            gens.setdefault(x, []).append((-1, x))
        for i, (b, n) in enumerate(self.blocks):
            for j in range(n):
                if b + 2 * j <= hi:
                    gens.setdefault(b + 2 * j, []).append((i, b + 2 * j))
        index = {d: {g: p for p, g in enumerate(gs)} for d, gs in gens.items()}
        blocks = {}
        for d, gs in gens.items():
            below = index.get(d - 2, {})
            blocks[d] = tuple(1 << below[(s, d - 2)] if (s, d - 2) in below else 0 for s, _ in gs)
        return GradedModule({d: len(g) for d, g in gens.items()}, {"U": Operator(-2, blocks)})


def delta_and_t(m: StandardUModule) -> Tuple[int, int]:
    """(delta, t): half the tower bottom and the longest block length."""
    if m.tower_bottom % 2:
        raise UModuleError(f"tower bottom {m.tower_bottom} is odd; delta would not be an integer")
    return m.tower_bottom // 2, max((n for _, n in m.blocks), default=0)


# ---------------------------------------------------------------------------
# connected sums
#
# Conventions for the hat version used in the Kunneth formula: a to-tower with
# bottom d becomes an F[[U]] tower whose top is d - 1, and a to-block with
# bottom b becomes a block of the same length with bottom b - 1. The Tor output
# is shifted up by one and converted back the same way.


def _to_hat(m: StandardUModule) -> Tuple[int, List[Tuple[int, int]]]:
    """Tower top and (top, length) of every block in the hat convention."""
    return m.tower_bottom - 1, [(b - 1 + 2 * (n - 1), n) for b, n in m.blocks]


def _from_hat(tower_top: int, blocks: Iterable[Tuple[int, int]]) -> StandardUModule:
    return StandardUModule(tower_top + 1, tuple((top - 2 * (n - 1) + 1, n) for top, n in blocks))


def connected_sum_hm(m1: StandardUModule, m2: StandardUModule) -> StandardUModule:
    """HM-to of Y # Y' from the closed-form graded Tor over F2[[U]]."""
    t1, b1 = _to_hat(m1)
    t2, b2 = _to_hat(m2)
    tower = t1 + t2
    out: List[Tuple[int, int]] = []
    out.extend((t1 + top, n) for top, n in b2)
    out.extend((t2 + top, n) for top, n in b1)
    for top1, n in b1:
        for top2, m in b2:
            out.append((top1 + top2, min(n, m)))
            out.append((top1 + top2 - 2 * max(n, m) + 1, min(n, m)))
    # the [1] shift on the whole Tor
    return _from_hat(tower + 1, [(top + 1, n) for top, n in out])


def ungraded_tor_lengths(n: int, m: int) -> List[int]:
    """Block lengths of Tor(F[U]/U^n, F[U]/U^m), gradings forgotten."""
    return [min(n, m), min(n, m)]


def _free_complex(m: StandardUModule) -> Tuple[List[int], Dict[int, List[Tuple[int, int]]]]:
    """Free F[[U]] chain complex with homology the hat version of ``m``.

    Returns generator degrees and the differential as gen -> [(gen', U-power)].
    """
    top, blocks = _to_hat(m)
    degs = [top]
    diff: Dict[int, List[Tuple[int, int]]] = {}
    for btop, n in blocks:
        b = len(degs)
        degs.append(btop)
        degs.append(btop - 2 * n + 1)
        diff[b + 1] = [(b, n)]
    return degs, diff


def oracle_window(m1: StandardUModule, m2: StandardUModule) -> Tuple[int, int]:
    """A degree window wide enough for the brute-force sum of ``m1`` and ``m2``."""
    def span(m):
        lows = [m.tower_bottom] + [b for b, _ in m.blocks]
        highs = [m.tower_bottom] + [b + 2 * (n - 1) for b, n in m.blocks]
        return min(lows), max(highs), max([0] + [n for _, n in m.blocks])

    lo1, hi1, n1 = span(m1)
    lo2, hi2, n2 = span(m2)
    return lo1 + lo2 - 4 * max(n1, n2) - 12, hi1 + hi2 + 8


def connected_sum_hm_oracle(
    m1: StandardUModule, m2: StandardUModule, lo: Optional[int] = None, hi: Optional[int] = None
) -> StandardUModule:
    """Connected sum by brute force: homology of the tensor of free complexes in a window.

    Each F[[U]]-summand is realized by a free complex (a tower is one
    generator; a block of length n is a generator a with d(a) = U^n b). The
    tensor product is built degree by degree, its homology computed with the
    induced U-action and decomposed into cyclic blocks. The tower shows up as
    the one block reaching the window floor; ``lo`` must sit well below every
    genuine block, which the default window from ``oracle_window`` ensures.
    """
    if lo is None or hi is None:
        wlo, whi = oracle_window(m1, m2)
        lo = wlo if lo is None else lo
        hi = whi if hi is None else hi
    g1, d1 = _free_complex(m1)
    g2, d2 = _free_complex(m2)
    pairs = [(i, j) for i in range(len(g1)) for j in range(len(g2))]
    pair_deg = {p: g1[p[0]] + g2[p[1]] for p in pairs}
    floor, ceil = lo - 3, hi + 3
    basis: Dict[int, List[Tuple[Tuple[int, int], int]]] = {}
    for p, dp in pair_deg.items():
        j = 0
        while dp - 2 * j >= floor:
            if dp - 2 * j <= ceil:
                basis.setdefault(dp - 2 * j, []).append((p, j))
            j += 1
    index = {d: {e: k for k, e in enumerate(es)} for d, es in basis.items()}

    def boundary(p, j):
        i1, i2 = p
        terms = []
        for t, u in d1.get(i1, ()):
            terms.append(((t, i2), j + u))
        for t, u in d2.get(i2, ()):
            terms.append(((i1, t), j + u))
        return terms

    dblocks, ublocks = {}, {}
    for d, es in basis.items():
        dcols, ucols = [], []
        below1, below2 = index.get(d - 1, {}), index.get(d - 2, {})
        for p, j in es:
            c = 0
            for e in boundary(p, j):
                if e in below1:
                    c ^= 1 << below1[e]
                elif d - 1 >= floor:
                    raise WindowError("boundary leaves the tensor window")
            dcols.append(c)
            ucols.append(1 << below2[(p, j + 1)] if (p, j + 1) in below2 else 0)
        dblocks[d] = tuple(dcols)
        ublocks[d] = tuple(ucols)
    cx = GradedModule(
        {d: len(es) for d, es in basis.items()},
        {"d": Operator(-1, dblocks), "U": Operator(-2, ublocks)},
    )
    hom = homology(cx, "d", ("U",)).restricted(lo, hi)
    found = torsion_blocks(hom, "U")
    tower = [(b, n) for b, n in found if b < lo + 2]
    rest = [(b, n) for b, n in found if b >= lo + 2]
    if len(tower) != 1:
        raise WindowError(f"expected one truncated tower at the window floor, found {tower}")
    tb, tn = tower[0]
    tower_top = tb + 2 * (tn - 1)
    return _from_hat(tower_top + 1, [(b + 2 * (n - 1) + 1, n) for b, n in rest])


# ---------------------------------------------------------------------------
# Gysin bookkeeping


def _window(hs: StandardRModule, hm: StandardUModule) -> Tuple[int, int]:
    lows = [s.bottom for s in hs.summands] + [hm.tower_bottom] + [b for b, _ in hm.blocks]
    highs = [s.bottom if s.kind != TORSION else s.top() for s in hs.summands]
    highs += [hm.tower_bottom] + [b + 2 * (n - 1) for b, n in hm.blocks]
    return min(lows) - 4, max(highs) + 8


def forced_hm_dims(hs: StandardRModule, lo: int, hi: int) -> Dict[int, int]:
    """dim coker(Q: HS_{d+1} -> HS_d) + dim ker(Q: HS_d -> HS_{d-1}) for d in [lo, hi]."""
    g = to_graded(hs, hi + 9)
    out = {}
    for d in range(lo, hi + 1):
        into = gf2_rank(g.block("Q", d + 1)) if g.dim(d + 1) else 0
        out_rank = gf2_rank(g.block("Q", d)) if g.dim(d) else 0
        out[d] = (g.dim(d) - into) + (g.dim(d) - out_rank)
    return out


def gysin_dimension_check(hs: StandardRModule, hm: StandardUModule, window: Optional[Tuple[int, int]] = None) -> bool:
    """Degreewise dimension identity forced by exactness of the Gysin sequence.

    Also checks that above every reduced class the two sides settle into the
    four-periodic pattern: HS has dimensions 1, 1, 1, 0 and HM alternates.
    """
    lo, hi = window if window is not None else _window(hs, hm)
    forced = forced_hm_dims(hs, lo, hi)
    explicit = hm.explicit(hi + 2)
    if any(explicit.dim(d) != forced[d] for d in range(lo, hi + 1)):
        return False
    g = to_graded(hs, hi + 9)
    start = hi - 7
    hs_row = [g.dim(d) for d in range(start, start + 8)]
    hm_row = [explicit.dim(d) for d in range(start, start + 8)]
    return sorted(hs_row[:4]) == [0, 1, 1, 1] and hs_row[:4] == hs_row[4:] and sorted(hm_row[:2]) == [0, 1] and hm_row[:2] * 4 == hm_row


def gysin_minimal_hm(hs: StandardRModule, window: Optional[Tuple[int, int]] = None) -> StandardUModule:
    """The HM module with the forced dimensions whose blocks are as long as possible.

    Dimensions alone do not fix the U-action; chaining classes two degrees
    apart into one block is the convention adopted here.
    """
    if window is None:
        lows = [s.bottom for s in hs.summands]
        highs = [s.bottom if s.kind != TORSION else s.top() for s in hs.summands]
        window = (min(lows) - 4, max(highs) + 12)
    lo, hi = window
    dims = forced_hm_dims(hs, lo, hi)
    # the tower is the run of occupied degrees, two apart, that reaches the window top
    bottom = hi if dims[hi] else hi - 1
    while bottom - 2 >= lo and dims[bottom - 2] >= 1:
        bottom -= 2
    if bottom - 2 < lo:
        raise WindowError("tower reaches the window floor")
    rest = dict(dims)
    for d in range(bottom, hi + 1, 2):
        rest[d] -= 1
    blocks: List[Block] = []
    for d in range(lo, hi + 1):
        while rest[d] > 0:
            n = 0
            while d + 2 * n <= hi and rest[d + 2 * n] > 0:
                rest[d + 2 * n] -= 1
                n += 1
            blocks.append((d, n))
    return StandardUModule(bottom, tuple(blocks))


# ---------------------------------------------------------------------------
# genus bound


def genus_bound_ratio(c: CorrectionData) -> Optional[Fraction]:
    """(alpha - gamma) / t, or None when t is zero or unknown."""
    if c.t in (None, 0) or c.alpha is None or c.gamma is None:
        return None
    return Fraction(c.alpha - c.gamma, c.t)


def genus_bound_check(c: CorrectionData, genus: Optional[int], constant: Fraction) -> Tuple[bool, Optional[Fraction]]:
    """Whether alpha - gamma <= C * min(t, 2g); also returns the tight ratio (alpha - gamma) / min(t, 2g)."""
    if c.alpha is None or c.gamma is None:
        raise UModuleError("alpha and gamma must be known")
    spread = c.alpha - c.gamma
    caps = [x for x in (c.t, None if genus is None else 2 * genus) if x is not None]
    if not caps:
        raise UModuleError("need t or a genus bound")
    cap = min(caps)
    ratio = Fraction(spread, cap) if cap else None
    return spread <= constant * cap, ratio


def calibrate_constant(data: Sequence[CorrectionData]) -> Fraction:
    """Smallest C with alpha - gamma <= C * t across ``data`` (entries with t = 0 must have alpha = gamma)."""
    best = Fraction(0)
    for c in data:
        if c.t == 0:
            if c.alpha != c.gamma:
                raise UModuleError("t = 0 forces alpha = gamma; no constant can work")
            continue
        r = genus_bound_ratio(c)
        if r is not None and r > best:
            best = r
    return best
