"""Finitely presented graded R-modules, minimal free resolutions and graded Tor over R."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .algebra import (
    DEG_Q,
    DEG_V,
    RVQ,
    Echelon,
    GradedModule,
    GradedVec,
    Operator,
    RingElem,
    WindowError,
    bits,
    dual_module,
    gf2_kernel,
    gf2_rank,
    subquotient,
    torsion_blocks,
)
from .standard_module import (
    INTO,
    ONTO,
    PARTIAL,
    TORSION,
    TOWER,
    CorrectionData,
    QEdge,
    StandardRModule,
    Summand,
    correction_terms,
    grading_shift,
    lspace_module,
    mk_module,
    to_graded,
    validate,
)

# a free-module basis element V^a Q^b g_i, stored as (i, a, b)
Term = Tuple[int, int, int]
FreeElem = FrozenSet[Term]


class TorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class FPModule:
    """Generators with degrees and homogeneous relations sum_g (ring element) * g."""

    name: str
    generators: Tuple[Tuple[str, int], ...]
    relations: Tuple[Tuple[str, int, Tuple[Tuple[str, RingElem], ...]], ...] = ()

    def __post_init__(self):
        gdeg = dict(self.generators)
        if len(gdeg) != len(self.generators):
            raise TorError("duplicate generator ids")
        for rid, rdeg, entries in self.relations:
            for gid, coeff in entries:
                if gid not in gdeg:
                    raise TorError(f"relation {rid} uses unknown generator {gid}")
                if coeff.ring != RVQ:
                    raise TorError(f"relation {rid} has a coefficient outside R")
                if not coeff:
                    continue
                if not coeff.is_homogeneous() or coeff.degree != rdeg - gdeg[gid]:
                    raise TorError(
                        f"relation {rid}: coefficient {coeff} of {gid} has degree "
                        f"{sorted(coeff.degrees())}, needs {rdeg - gdeg[gid]}"
                    )

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.generators)

    @property
    def top(self) -> int:
        return max(self.degrees)

    def relation_elements(self) -> List[Tuple[int, FreeElem]]:
        pos = {g: i for i, (g, _) in enumerate(self.generators)}
        out = []
        for _, rdeg, entries in self.relations:
            terms: set = set()
            for gid, coeff in entries:
                for a, b in coeff.terms:
                    terms ^= {(pos[gid], a, b)}
            out.append((rdeg, frozenset(terms)))
        return out


def free_module(degrees: Sequence[int], name: str = "free") -> FPModule:
    return FPModule(name, tuple((f"g{i}", d) for i, d in enumerate(degrees)))


def mk_dual_presentation(k: int) -> FPModule:
    """Dual of M_k, top degree normalized to 0: generators at 0 and 1-4k, one relation Q f + V^k e."""
    if k < 1:
        raise TorError("k must be positive")
    return FPModule(
        f"M{k}*",
        (("e", 0), ("f", 1 - 4 * k)),
        (("r", -4 * k, (("f", RingElem.monomial(0, 1)), ("e", RingElem.monomial(k, 0)))),),
    )


def quotient_by_q() -> FPModule:
    return FPModule("R/(Q)", (("g", 0),), (("r", -1, (("g", RingElem.monomial(0, 1)),)),))


# ---------------------------------------------------------------------------
# free modules, explicitly


class FreeRModule:
    """Free R-module on generators of given degrees, with a degreewise monomial basis."""

    def __init__(self, degrees: Sequence[int]):
        self.degrees = tuple(degrees)
        self._cache: Dict[int, Tuple[List[Term], Dict[Term, int]]] = {}

    def basis(self, x: int) -> List[Term]:
        return self._basis(x)[0]

    def _basis(self, x: int):
        if x not in self._cache:
            terms = []
            for i, d in enumerate(self.degrees):
                for b in range(3):
                    rem = d - b - x
                    if rem >= 0 and rem % 4 == 0:
                        terms.append((i, rem // 4, b))
            self._cache[x] = (terms, {t: j for j, t in enumerate(terms)})
        return self._cache[x]

    def dim(self, x: int) -> int:
        return len(self.basis(x))

    def vec(self, x: int, elem: FreeElem) -> int:
        index = self._basis(x)[1]
        out = 0
        for t in elem:
            out ^= 1 << index[t]
        return out

    def elem(self, x: int, vec: int) -> FreeElem:
        terms = self.basis(x)
        return frozenset(terms[j] for j in bits(vec))

    def explicit(self, lo: int, hi: int) -> GradedModule:
        """Degrees [lo, hi] with V and Q; targets below ``lo`` are dropped."""
        dims = {x: self.dim(x) for x in range(lo, hi + 1) if self.dim(x)}
        ops = {}
        for name, (da, db) in (("V", (1, 0)), ("Q", (0, 1))):
            blocks = {}
            for x in dims:
                t = x + DEG_V * da + DEG_Q * db
                cols = []
                for i, a, b in self.basis(x):
                    if b + db > 2 or t < lo:
                        cols.append(0)
                    else:
                        cols.append(self.vec(t, frozenset([(i, a + da, b + db)])))
                blocks[x] = tuple(cols)
            ops[name] = Operator(DEG_V * da + DEG_Q * db, blocks)
        return GradedModule(dims, ops)


def mono_times(elem: FreeElem, a: int, b: int) -> FreeElem:
    out: set = set()
    for i, a2, b2 in elem:
        if b + b2 <= 2:
            out ^= {(i, a + a2, b + b2)}
    return frozenset(out)


def _span_at(free: FreeRModule, gens: Sequence[Tuple[int, FreeElem]], x: int) -> List[int]:
    """Vectors spanning the degree-x part of the submodule generated by ``gens``."""
    out = []
    for deg, e in gens:
        for b in range(3):
            rem = deg - b - x
            if rem >= 0 and rem % 4 == 0:
                v = free.vec(x, mono_times(e, rem // 4, b))
                if v:
                    out.append(v)
    return out


def _minimal_generators(free: FreeRModule, subspace_at, lo: int, hi: int) -> List[Tuple[int, FreeElem]]:
    """Homogeneous minimal generators of a submodule given degreewise, from the top down."""
    chosen: List[Tuple[int, FreeElem]] = []
    for x in range(hi, lo - 1, -1):
        ech = Echelon()
        for v in _span_at(free, chosen, x):
            ech.add(v)
        new = []
        for v in subspace_at(x):
            if ech.add(v):
                new.append((x, free.elem(x, v)))
        chosen.extend(new)
    return chosen


@dataclass
class Resolution:
    """F_0 <- F_1 <- ... with ``differentials[n]`` giving d(g) in F_n for each generator g of F_{n+1}."""

    module: FPModule
    frees: List[FreeRModule]
    differentials: List[List[Tuple[int, FreeElem]]]
    lo: int
    hi: int

    @property
    def ranks(self) -> List[int]:
        return [len(f.degrees) for f in self.frees]

    @property
    def generator_degrees(self) -> List[Tuple[int, ...]]:
        return [f.degrees for f in self.frees]

    @property
    def length(self) -> int:
        return len(self.frees) - 1

    def matrix(self, n: int, x: int) -> List[int]:
        """Matrix of d: F_{n+1} -> F_n in degree x."""
        src, tgt = self.frees[n + 1], self.frees[n]
        images = self.differentials[n]
        cols = []
        for i, a, b in src.basis(x):
            cols.append(tgt.vec(x, mono_times(images[i][1], a, b)))
        return cols


def resolve(m: FPModule, length: int, lo: int, hi: Optional[int] = None) -> Resolution:
    """Minimal graded free resolution of ``m``, computed exactly in degrees [lo, hi].

    Generators of syzygies below ``lo`` are not found, so results are exact
    only in degrees at least ``lo``. Stops early once a kernel vanishes there.
    """
    hi = m.top if hi is None else hi
    if hi < m.top:
        raise WindowError(f"window top {hi} is below the top generator {m.top}")
    f0 = FreeRModule(m.degrees)
    rels = m.relation_elements()
    gens = _minimal_generators(f0, lambda x: _span_at(f0, rels, x), lo, hi)
    frees = [f0]
    diffs: List[List[Tuple[int, FreeElem]]] = []
    while gens and len(frees) <= length:
        frees.append(FreeRModule([d for d, _ in gens]))
        diffs.append(gens)
        res = Resolution(m, frees, diffs, lo, hi)
        n = len(diffs) - 1
        top = frees[-1]

        def kernel_at(x, n=n, top=top, res=res):
            if not top.dim(x):
                return []
            return gf2_kernel(res.matrix(n, x))

        gens = _minimal_generators(top, kernel_at, lo, hi)
    if gens and len(frees) > length:
        pass  # truncated at the requested length
    return Resolution(m, frees, diffs, lo, hi)


def resolution_is_exact(res: Resolution) -> bool:
    """d o d = 0 and ker = im at every interior stage in the window."""
    for n in range(len(res.differentials)):
        for x in range(res.lo, res.hi + 1):
            if not res.frees[n + 1].dim(x):
                continue
            cols = res.matrix(n, x)
            if n + 1 < len(res.differentials):
                nxt = res.matrix(n + 1, x) if res.frees[n + 2].dim(x) else []
                if any(_apply(cols, c) for c in nxt):
                    return False
                if len(gf2_kernel(cols)) != gf2_rank(nxt):
                    return False
    return True


def _apply(cols: Sequence[int], vec: int) -> int:
    out = 0
    for j in bits(vec):
        out ^= cols[j]
    return out


# ---------------------------------------------------------------------------
# explicit models of presented modules


def fp_explicit(m: FPModule, lo: int) -> GradedModule:
    """The quotient of ``m`` by everything below ``lo``, with V and Q."""
    free = FreeRModule(m.degrees)
    ambient = free.explicit(lo, m.top)
    rels = m.relation_elements()
    upper = {x: [1 << j for j in range(ambient.dim(x))] for x in ambient.degrees()}
    lower = {x: _span_at(free, rels, x) for x in ambient.degrees()}
    mod, _ = subquotient(ambient, upper, lower)
    return mod


# ---------------------------------------------------------------------------
# Tor


@dataclass
class TorResult:
    """Tor_h as R-modules over the degree window [lo, hi], for h = 0, 1, ...

    Homological degree h here is h + 1 in the other common indexing.
    """

    modules: Dict[int, GradedModule]
    lo: int
    hi: int
    resolution: Resolution

    def table(self) -> Dict[int, GradedVec]:
        return {h: GradedVec.from_dict({d: m.dim(d) for d in m.degrees() if self.lo <= d <= self.hi}) for h, m in self.modules.items()}

    def dims(self, h: int) -> Dict[int, int]:
        return self.table()[h].as_dict() if h in self.modules else {}


def _act_mono(mod: GradedModule, x: int, vec: int, a: int, b: int) -> Tuple[int, int]:
    for _ in range(a):
        vec = mod.act("V", x, vec) if mod.dim(x) else 0
        x += DEG_V
    for _ in range(b):
        vec = mod.act("Q", x, vec) if mod.dim(x) else 0
        x += DEG_Q
    return x, vec


def tor_r(m1: FPModule, m2: FPModule, lo: int, hi: Optional[int] = None, max_h: int = 3) -> TorResult:
    """Tor^R_h(m1, m2) for h <= max_h, exactly, in total degrees [lo, hi]."""
    hi = m1.top + m2.top if hi is None else hi
    res = resolve(m1, max_h + 1, lo - m2.top - 4, max(m1.top, hi - m2.top + 4))
    gen_degs = [d for f in res.frees for d in f.degrees]
    m2_lo = lo - max(gen_degs) - 12
    e2 = fp_explicit(m2, m2_lo)

    def chain(h: int):
        if h >= len(res.frees):
            return None
        degs = res.frees[h].degrees
        dims, offsets = {}, {}
        for x in range(lo - 4, hi + 5):
            off, n = [], 0
            for dg in degs:
                off.append(n)
                n += e2.dim(x - dg)
            offsets[x] = off
            if n:
                dims[x] = n
        ops = {}
        for name, shift in (("V", DEG_V), ("Q", DEG_Q)):
            blocks = {}
            for x in dims:
                cols = []
                for gi, dg in enumerate(degs):
                    y = x - dg
                    for j in range(e2.dim(y)):
                        img = e2.act(name, y, 1 << j) if x + shift >= lo - 4 else 0
                        cols.append(img << offsets[x + shift][gi] if img else 0)
                blocks[x] = tuple(cols)
            ops[name] = Operator(shift, blocks)
        return GradedModule(dims, ops), offsets

    def boundary(h: int, src, tgt) -> Dict[int, List[int]]:
        """Matrix of d: C_h -> C_{h-1} in each degree."""
        smod, soff = src
        tmod, toff = tgt
        images = res.differentials[h - 1]
        degs = res.frees[h].degrees
        out = {}
        for x in smod.degrees():
            cols = []
            for gi, dg in enumerate(degs):
                y = x - dg
                for j in range(e2.dim(y)):
                    c = 0
                    for tj, a, b in images[gi][1]:
                        z, v = _act_mono(e2, y, 1 << j, a, b)
                        if v:
                            c ^= v << toff[x][tj]
                    cols.append(c)
            out[x] = cols
        return out

    chains = {h: chain(h) for h in range(0, max_h + 2)}
    mods = {}
    for h in range(0, max_h + 1):
        if chains[h] is None:
            break
        cmod, _ = chains[h]
        d_out = boundary(h, chains[h], chains[h - 1]) if h >= 1 else {}
        d_in = boundary(h + 1, chains[h + 1], chains[h]) if chains.get(h + 1) is not None else {}
        upper, lower = {}, {}
        for x in cmod.degrees():
            upper[x] = gf2_kernel(d_out[x]) if h >= 1 else [1 << j for j in range(cmod.dim(x))]
            lower[x] = list(d_in.get(x, []))
        tor, _ = subquotient(cmod, upper, lower)
        mods[h] = tor.restricted(lo, hi)
    return TorResult(mods, lo, hi, res)


# ---------------------------------------------------------------------------
# reading towers


def split_towers(mod: GradedModule, floor: int) -> Tuple[List[int], List[Tuple[int, int]]]:
    """Tops of the V-towers (blocks reaching within 4 of ``floor``) and the V-torsion blocks."""
    tops, torsion = [], []
    for b, n in torsion_blocks(mod, "V"):
        if b < floor + 4:
            tops.append(b + 4 * (n - 1))
        else:
            torsion.append((b, n))
    return sorted(tops, reverse=True), sorted(torsion)


def tower_roles(tops: Sequence[int]) -> Dict[str, int]:
    """Assign alpha*, beta*, gamma* to three tower tops in consecutive residues mod 4.

    With e the residue not occupied, alpha* sits in residue e - 1, beta* in
    e - 2 and gamma* in e - 3.
    """
    if len(tops) != 3:
        raise TorError(f"expected three towers, found {len(tops)}")
    residues = {t % 4: t for t in tops}
    empty = [r for r in range(4) if r not in residues]
    if len(empty) != 1:
        raise TorError(f"tower tops {list(tops)} do not occupy three residues mod 4")
    e = empty[0]
    return {
        "alpha": residues[(e - 1) % 4],
        "beta": residues[(e - 2) % 4],
        "gamma": residues[(e - 3) % 4],
    }


def terms_from_dual_tops(tops: Sequence[int], alpha: int = 0) -> Tuple[int, int, int]:
    """(alpha, beta, gamma) from the tower tops of a dual module; alpha itself is supplied."""
    r = tower_roles(tops)
    db = r["beta"] - r["alpha"]
    dg = r["gamma"] - r["alpha"]
    if (db + 1) % 2 or dg % 2:
        raise TorError(f"tower tops {list(tops)} give non-integral correction terms")
    return alpha, alpha + (-db - 1) // 2, alpha + (-dg - 2) // 2


# ---------------------------------------------------------------------------
# simple-type sums and geography


def simple_type_sum(k: int, kp: int) -> CorrectionData:
    """Correction terms of Y_k # Y_k' with k' <= k: (0, -2k, -2(k+k'))."""
    if k < 1 or kp < 1:
        raise TorError("k and k' must be positive")
    if kp > k:
        raise TorError(f"need k' <= k, got k = {k}, k' = {kp}")
    return CorrectionData(0, -2 * k, -2 * (k + kp), delta=0)


def _floor_for(k: int, kp: int) -> int:
    return -8 * (k + kp) - 16


def simple_type_tor(k: int, kp: int, max_h: int = 2) -> TorResult:
    lo = _floor_for(k, kp)
    return tor_r(mk_dual_presentation(k), mk_dual_presentation(kp), lo, 0, max_h=max_h)


def simple_type_sum_from_tor(k: int, kp: int) -> Tuple[int, int, int]:
    tor = simple_type_tor(k, kp, max_h=1)
    tops, _ = split_towers(tor.modules[0], tor.lo)
    return terms_from_dual_tops(tops)


@dataclass(frozen=True)
class Realization:
    a: int
    b: int
    c: int
    k: int
    kp: int
    n: int
    summary: str

    def as_dict(self) -> Dict[str, object]:
        return {"a": self.a, "b": self.b, "c": self.c, "k": self.k, "k_prime": self.kp, "n": self.n, "construction": self.summary}


def geography_sketch(k: int, kp: int) -> StandardRModule:
    """Three towers with the bottoms of Y_k # Y_k' (torsion omitted), Q onto along the chain."""
    if k == 0 and kp == 0:
        return lspace_module(0)
    if kp == 0:
        return mk_module(k)
    return StandardRModule(
        f"sketch(k={k},k'={kp})",
        (
            Summand("a", TOWER, 0),
            Summand("b", TOWER, -4 * k + 1),
            Summand("c", TOWER, -4 * (k + kp) + 2),
        ),
        (QEdge("c", "b", ONTO), QEdge("b", "a", ONTO)),
        (("alpha", "a"), ("beta", "b"), ("gamma", "c")),
    )


def geography_realize(a: int, b: int, c: int) -> Realization:
    """Y_k # Y_k' # (n copies of P-bar, or -n of P) realizing (alpha, beta, gamma) = (a, b, c)."""
    if not a >= b >= c:
        raise TorError(f"need a >= b >= c, got ({a}, {b}, {c})")
    if (a - b) % 2 or (b - c) % 2:
        raise TorError(f"({a}, {b}, {c}) do not share a parity")
    if a - b < b - c:
        raise TorError(f"need a - b >= b - c, got {a - b} < {b - c}")
    k, kp = (a - b) // 2, (b - c) // 2
    parts = []
    if k:
        parts.append(f"Y_{k}")
    if kp:
        parts.append(f"Y_{kp}")
    if a:
        parts.append(f"{abs(a)} x {'Pbar' if a > 0 else 'P'}")
    real = Realization(a, b, c, k, kp, a, " # ".join(parts) or "S3")
    verify_realization(real)
    return real


def verify_realization(r: Realization) -> None:
    if r.k and r.kp:
        base = simple_type_sum(r.k, r.kp).abg
    elif r.k:
        base = correction_terms(mk_module(r.k)).abg
    else:
        base = (0, 0, 0)
    piped = tuple(x + r.n for x in base)
    sketch = grading_shift(geography_sketch(r.k, r.kp), 2 * r.n)
    read = correction_terms(sketch).abg
    if piped != (r.a, r.b, r.c) or read != (r.a, r.b, r.c):
        raise TorError(f"realization {r.summary} gives {piped} / {read}, wanted {(r.a, r.b, r.c)}")


def stacked_sum_structure(ks: Sequence[int]) -> StandardRModule:
    """A module with classes x_i, y_i (i <= N) off the towers: V x_i = y_i, Q x_1 in a tower, Q x_i = y_{i-1}.

    Built on the three-tower sketch for the two largest k. Each pair
    (x_i, y_i) is a torsion block of length 2; y_1 sits one above the gamma
    bottom so that Q^3 vanishes, and x_i = x_{i-1} - 3.
    """
    if not ks:
        raise TorError("need at least one summand")
    if any(k < 1 for k in ks):
        raise TorError("k values must be positive")
    ordered = sorted(ks, reverse=True)
    if len(ordered) == 1:
        return mk_module(ordered[0])
    base = geography_sketch(ordered[0], ordered[1])
    summands = list(base.summands)
    edges = list(base.q_edges)
    gamma = base.labelled("gamma")
    x = gamma.bottom + 5
    prev = gamma.id
    for i in range(1, len(ordered) + 1):
        sid = f"x{i}"
        summands.append(Summand(sid, TORSION, x - 4, 2))
        edges.append(QEdge(sid, prev, INTO if i == 1 else PARTIAL))
        prev = sid
        x -= 3
    return StandardRModule(f"stack{tuple(ordered)}", tuple(summands), tuple(edges), base.labels)


def stacked_relations(m: StandardRModule) -> List[str]:
    """Check the x/y pattern on a module built by ``stacked_sum_structure``; returns violations."""
    problems = validate(m)
    g = to_graded(m)
    index = m.basis_index()
    blocks = sorted((s for s in m.summands if s.id.startswith("x")), key=lambda s: int(s.id[1:]))

    def vec(sid, d):
        return 1 << index[d].index(sid)

    for i, s in enumerate(blocks, start=1):
        xd, yd = s.bottom + 4, s.bottom
        if g.act("V", xd, vec(s.id, xd)) != vec(s.id, yd):
            problems.append(f"V x_{i} != y_{i}")
        qx = g.act("Q", xd, vec(s.id, xd))
        if i == 1:
            towers = {t.id for t in m.summands if t.kind == TOWER}
            ids = index.get(xd - 1, [])
            if not qx or any(ids[j] not in towers for j in bits(qx)):
                problems.append("Q x_1 is not a nonzero tower element")
        else:
            prev = blocks[i - 2]
            if qx != vec(prev.id, prev.bottom):
                problems.append(f"Q x_{i} != y_{i - 1}")
    return problems


# ---------------------------------------------------------------------------
# cross-check of the presentation against the dual of the standard form


def invariant_profile(m: GradedModule, lo: int, hi: int, depth: int = 6) -> Dict[str, Dict[int, int]]:
    """Dimensions and ranks of V^i Q^j (i < depth, j < 3) per degree in [lo, hi]."""
    out: Dict[str, Dict[int, int]] = {"dim": {}}
    for d in range(lo, hi + 1):
        out["dim"][d] = m.dim(d)
        for i in range(depth):
            for j in range(3):
                if i == j == 0:
                    continue
                key = f"V{i}Q{j}"
                if not m.dim(d):
                    out.setdefault(key, {})[d] = 0
                    continue
                cols = [1 << c for c in range(m.dim(d))]
                x = d
                for _ in range(j):
                    cols = [m.act("Q", x, c) for c in cols]
                    x += DEG_Q
                for _ in range(i):
                    cols = [m.act("V", x, c) if m.dim(x) else 0 for c in cols]
                    x += DEG_V
                out.setdefault(key, {})[d] = gf2_rank(cols)
    return out


def mk_dual_matches(k: int) -> bool:
    """The presentation of M_k* agrees with the graded dual of M_k (shifted so its top is 0)."""
    hi = 4 * k + 24
    dual = dual_module(to_graded(mk_module(k), hi)).shifted(-(4 * k - 1))
    lo = -(hi + 4 * k - 1) + 24
    pres = fp_explicit(mk_dual_presentation(k), lo - 40)
    return invariant_profile(dual, lo, 0) == invariant_profile(pres, lo, 0)


def tor1_residue_check(k: int, kp: int) -> Dict[str, object]:
    """Where Tor_1 classes sit relative to the towers of Tor_0.

    A Tor_1 class of internal degree d contributes in total degree d + 1. It
    can only disturb the correction terms if that degree meets a tower
    residue. Also reports which tower tops every class lies strictly below.
    """
    tor = simple_type_tor(k, kp)
    tops, _ = split_towers(tor.modules[0], tor.lo)
    roles = tower_roles(tops)
    occupied = {t % 4 for t in tops}
    degrees = tor.modules[1].degrees()
    return {
        "tor1_degrees": degrees,
        "avoids_tower_residues": all((d + 1) % 4 not in occupied for d in degrees),
        "strictly_below": {r: all(d < t for d in degrees) for r, t in roles.items()},
    }
