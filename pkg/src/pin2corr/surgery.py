"""Closed-form surgery results and the exact-triangle verifier."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import GradedMap, GradedModule, exactness_check, gf2_image, gf2_rank
from .standard_module import (
    ISO,
    TOWER,
    CorrectionData,
    QEdge,
    StandardRModule,
    Summand,
    lspace_module,
    to_graded,
)

PLUS = "+"
MINUS = "-"

# literal: alpha = beta = delta(Y) for the ambient L-space Y
# surgered: alpha = beta = delta(Y') for the surgered manifold
LITERAL = "literal"
SURGERED = "surgered"


class SurgeryError(ValueError):
    pass


def _sign(sign: str) -> str:
    if sign in ("+", "plus", "pos", "positive", 1):
        return PLUS
    if sign in ("-", "minus", "neg", "negative", -1):
        return MINUS
    raise SurgeryError(f"unknown sign {sign!r}")


def _check_module_constraints(terms: Tuple[Optional[int], ...], what: str) -> None:
    known = [x for x in terms if x is not None]
    if known != sorted(known, reverse=True):
        raise SurgeryError(f"{what} would give {terms}, violating alpha >= beta >= gamma")
    if len({x % 2 for x in known}) > 1:
        raise SurgeryError(f"{what} would give {terms}, which do not share a parity")


# ---------------------------------------------------------------------------
# even surgeries


def even_surgery_terms(delta_prime: int, sign: str, ambient_delta: int = 0, reading: str = LITERAL) -> Tuple[int, int, int]:
    """(alpha, beta, gamma) of an even surgery Y' on a knot in an integral L-space Y.

    Positive: alpha = beta = delta(Y) and gamma = delta(Y') or delta(Y') - 1,
    whichever is congruent to delta(Y) mod 2. Negative: beta = gamma = delta(Y)
    and alpha = delta(Y') or delta(Y') + 1 likewise. With delta(Y) even the
    parity test is "delta(Y') even". The ``surgered`` reading puts delta(Y')
    in place of delta(Y) and skips the module-structure check.
    """
    sign = _sign(sign)
    if reading == SURGERED:
        base, ref = delta_prime, 0
    elif reading == LITERAL:
        base, ref = ambient_delta, ambient_delta
    else:
        raise SurgeryError(f"unknown reading {reading!r}")
    same = (delta_prime - ref) % 2 == 0
    if sign == PLUS:
        out = (base, base, delta_prime if same else delta_prime - 1)
    else:
        out = (delta_prime if same else delta_prime + 1, base, base)
    if reading == LITERAL:
        _check_module_constraints(out, f"even {sign} surgery with delta(Y') = {delta_prime}, delta(Y) = {ambient_delta}")
    return out


# ---------------------------------------------------------------------------
# surgery on knots with zero-surgery data


ZERO_KEYS_ARF0 = ("alpha_minus", "beta_minus", "gamma_minus", "alpha_plus", "beta_plus", "gamma_plus")
ZERO_KEYS_ARF1 = ("beta_minus", "gamma_minus", "alpha_plus", "beta_plus")

_MIRROR = {
    "alpha_plus": "gamma_minus",
    "beta_plus": "beta_minus",
    "gamma_plus": "alpha_minus",
    "alpha_minus": "gamma_plus",
    "beta_minus": "beta_plus",
    "gamma_minus": "alpha_plus",
    "delta_plus": "delta_minus",
    "delta_minus": "delta_plus",
}


@dataclass(frozen=True)
class SurgerySpec:
    """1/m surgery on a knot in an integral L-space with the given zero-surgery data."""

    ambient_delta: int
    arf: int
    m: int
    zero_data: Optional[Tuple[Tuple[str, int], ...]] = None

    def __post_init__(self):
        if self.arf not in (0, 1):
            raise SurgeryError("arf must be 0 or 1")
        if self.m == 0:
            raise SurgeryError("m must be nonzero")
        if self.zero_data is not None:
            data = dict(self.zero_data)
            object.__setattr__(self, "zero_data", tuple(sorted(data.items())))
            keys = set(data) - {"delta_plus", "delta_minus"}
            need = set(ZERO_KEYS_ARF0 if self.arf == 0 else ZERO_KEYS_ARF1)
            if keys and keys != need:
                raise SurgeryError(f"Arf {self.arf} zero data needs {sorted(need)}, got {sorted(keys)}")

    @property
    def data(self) -> Dict[str, int]:
        return dict(self.zero_data or ())

    def mirrored(self) -> "SurgerySpec":
        """The mirror problem: -Y_{1/m}(K) = (-Y)_{-1/m}(mirror K)."""
        data = {_MIRROR[k]: -v for k, v in self.data.items()}
        return SurgerySpec(-self.ambient_delta, self.arf, -self.m, tuple(data.items()) if self.zero_data is not None else None)


def minus_terms_check(spec: SurgerySpec) -> bool:
    """beta_- = gamma_- = delta(Y) for zero-surgery data on a knot in an L-space."""
    d = spec.data
    return d.get("beta_minus") == spec.ambient_delta and d.get("gamma_minus") == spec.ambient_delta


def _reverse(t: Tuple[Optional[int], Optional[int], Optional[int]]):
    a, b, c = t
    neg = lambda x: None if x is None else -x
    return (neg(c), neg(b), neg(a))


def odd_surgery_terms(spec: SurgerySpec) -> Tuple[Optional[int], Optional[int], Optional[int]]:
    """Correction terms of Y_{1/m}(K), m odd; ``None`` marks a term the data does not determine."""
    if spec.m % 2 == 0:
        raise SurgeryError("odd_surgery_terms needs odd m")
    if spec.zero_data is None:
        raise SurgeryError("zero-surgery data required")
    if spec.m < 0:
        return _reverse(odd_surgery_terms(spec.mirrored()))
    d = spec.data
    if spec.arf == 0:
        out = (d["alpha_plus"], d["beta_plus"], d["gamma_plus"])
    else:
        out = (d["alpha_plus"], d["beta_plus"], None)
    _check_module_constraints(out, "odd surgery")
    return out


def even_surgery_from_knot(spec: SurgerySpec) -> Tuple[int, int, int]:
    """Even surgery from delta_+ of the knot: delta(Y') = delta_+ or delta_+ - 1, matching delta(Y) mod 2."""
    if spec.m % 2:
        raise SurgeryError("even_surgery_from_knot needs even m")
    if spec.m < 0:
        return _reverse(even_surgery_from_knot(spec.mirrored()))
    d = spec.data
    if "delta_plus" not in d:
        raise SurgeryError("zero data must include delta_plus")
    dp = d["delta_plus"]
    delta_prime = dp if (dp - spec.ambient_delta) % 2 == 0 else dp - 1
    out = (spec.ambient_delta, spec.ambient_delta, delta_prime)
    cross = even_surgery_terms(delta_prime, PLUS, spec.ambient_delta)
    if cross != out:
        raise SurgeryError(f"inconsistent with the even-surgery formula: {out} vs {cross}")
    return out


def surgered_delta(spec: SurgerySpec) -> int:
    """delta(Y_{1/m}(K)) for even m > 0 from delta_+."""
    return even_surgery_from_knot(spec)[2]


def whitehead_double_terms(delta_k: int) -> Tuple[int, int, int]:
    """(0, 0, delta_K or delta_K - 1, whichever is even)."""
    gamma = delta_k if delta_k % 2 == 0 else delta_k - 1
    if gamma > 0:
        raise SurgeryError(f"delta(K) = {delta_k} gives gamma = {gamma} > beta = 0; inconsistent input")
    return (0, 0, gamma)


def order_two_check(delta: int, beta: int) -> bool:
    """delta and beta have the same sign, zero counting as either."""
    return delta * beta >= 0


def order_two_symmetry(beta_pos: int) -> int:
    """beta(S^3_{-1/n}(K)) from beta(S^3_{1/n}(K)) for K of concordance order two."""
    return -beta_pos


def weak_even_surgery_check(c: CorrectionData, beta_prime: int) -> bool:
    """beta(Y') = delta(Y) for even surgery on Y with alpha = beta = gamma = delta."""
    if c.delta is None or not (c.alpha == c.beta == c.gamma == c.delta):
        raise SurgeryError("needs alpha = beta = gamma = delta on the input manifold")
    lower = c.gamma <= beta_prime
    upper = beta_prime <= c.alpha
    return lower and upper


# ---------------------------------------------------------------------------
# triangles


@dataclass
class TriangleData:
    """L --A--> M --B--> R --C--> L, with A of degree -1, plus the data for B o A = Q."""

    name: str
    modules: Tuple[StandardRModule, StandardRModule, StandardRModule]
    a: GradedMap
    b: GradedMap
    c: GradedMap
    b_previous: Optional[GradedMap]
    lo: int
    hi: int
    arf: int
    parity: int
    hm: Optional[Tuple[GradedModule, GradedModule, GradedModule, GradedMap, GradedMap, GradedMap, Dict[int, List[int]]]] = None

    @property
    def interior(self) -> List[int]:
        return list(range(self.lo + 8, self.hi - 7))

    def mutated(self, which: str, d: int, col: int, row: int) -> "TriangleData":
        f = getattr(self, which)
        return replace(self, **{which: f.with_entry_flipped(d, col, row)})


def _tower_map(src: StandardRModule, tgt: StandardRModule, shift: int, rules: Mapping[str, Sequence[str]], hi: int) -> GradedMap:
    """Send the element of summand s in degree x to the sum of the elements of rules[s] in degree x + shift."""
    gs, gt = to_graded(src, hi), to_graded(tgt, hi)
    si, ti = src.basis_index(hi), tgt.basis_index(hi)
    blocks = {}
    for x, ids in si.items():
        cols = []
        tids = ti.get(x + shift, [])
        for sid in ids:
            c = 0
            for t in rules.get(sid, ()):
                if t in tids:
                    c ^= 1 << tids.index(t)
            cols.append(c)
        blocks[x] = tuple(cols)
    return GradedMap(gs, gt, shift, blocks)


def _bar(name: str, residues: Mapping[str, int], lo: int, chain: Sequence[Tuple[str, str]]) -> StandardRModule:
    """Towers starting at the first degree >= lo in each residue: a window onto Laurent towers."""
    summands = tuple(Summand(r, TOWER, lo + (res - lo) % 4) for r, res in residues.items())
    edges = tuple(QEdge(s, t, ISO) for s, t in chain)
    return StandardRModule(name, summands, edges)


_SPHERE_CHAIN = (("gamma", "beta"), ("beta", "alpha"))


def _sphere_bar(name: str, top: int, lo: int) -> StandardRModule:
    return _bar(name, {"gamma": top % 4, "beta": (top - 1) % 4, "alpha": (top - 2) % 4}, lo, _SPHERE_CHAIN)


def bar_triangle_pattern(arf: int, q_parity: int, lo: int = -16, hi: int = 16, top: int = 2) -> TriangleData:
    """Four-periodic bar-version triangle for the given Arf invariant and parity of q.

    ``top`` is the residue of the gamma-tower of the left module.
    """
    if arf not in (0, 1) or q_parity not in (0, 1):
        raise SurgeryError("arf and q_parity must be 0 or 1")
    D = top
    if arf == 0:
        left = _sphere_bar("S_1/q", D, lo)
        mid = _bar(
            "S_0",
            {
                "bottom_gamma": (D - 1) % 4, "bottom_beta": (D - 2) % 4, "bottom_alpha": (D - 3) % 4,
                "top_gamma": D % 4, "top_beta": (D - 1) % 4, "top_alpha": (D - 2) % 4,
            },
            lo,
            (("bottom_gamma", "bottom_beta"), ("bottom_beta", "bottom_alpha"), ("top_gamma", "top_beta"), ("top_beta", "top_alpha")),
        )
        right = _sphere_bar("S_1/(q+1)", D, lo)
        a_first = {"gamma": ["bottom_gamma"], "beta": ["bottom_beta"], "alpha": ["bottom_alpha"]}
        a_second = {"gamma": ["bottom_gamma", "top_beta"], "beta": ["bottom_beta", "top_alpha"], "alpha": ["bottom_alpha"]}
        b_first = {"top_gamma": ["gamma"], "top_beta": ["beta"], "top_alpha": ["alpha"]}
        b_second = dict(b_first, bottom_gamma=["beta"], bottom_beta=["alpha"])
        if q_parity == 0:
            a_rules, b_rules, b_prev_rules = a_first, b_first, b_second
        else:
            a_rules, b_rules, b_prev_rules = a_second, b_second, b_first
        c_rules: Dict[str, List[str]] = {}
    else:
        mid = _bar(
            "S_0",
            {"bottom_gamma": (D - 1) % 4, "bottom_beta": (D - 2) % 4, "top_beta": (D - 3) % 4, "top_alpha": D % 4},
            lo,
            (("bottom_gamma", "bottom_beta"), ("top_beta", "top_alpha")),
        )
        if q_parity == 0:
            left = _sphere_bar("S_1/q", D, lo)
            right = _sphere_bar("S_1/(q+1)", D - 2, lo)
            a_rules = {"gamma": ["bottom_gamma"], "beta": ["bottom_beta"]}
            b_rules = {"top_alpha": ["alpha"], "top_beta": ["beta"]}
            b_prev_rules = {"bottom_gamma": ["beta"], "bottom_beta": ["alpha"]}
        else:
            left = _sphere_bar("S_1/q", D - 2, lo)
            right = _sphere_bar("S_1/(q+1)", D, lo)
            a_rules = {"gamma": ["top_beta"], "beta": ["top_alpha"]}
            b_rules = {"bottom_gamma": ["beta"], "bottom_beta": ["alpha"]}
            b_prev_rules = {"top_alpha": ["alpha"], "top_beta": ["beta"]}
        c_rules = {"gamma": ["alpha"]}
    a = _tower_map(left, mid, -1, a_rules, hi)
    b = _tower_map(mid, right, 0, b_rules, hi)
    c = _tower_map(right, left, 0, c_rules, hi)
    b_prev = _tower_map(mid, left, 0, b_prev_rules, hi)
    return TriangleData(f"bar(arf={arf}, q={'even' if q_parity == 0 else 'odd'})", (left, mid, right), a, b, c, b_prev, lo, hi, arf, q_parity)


def trefoil_triangle(hi: int = 24) -> TriangleData:
    """S^3 -> S_0(trefoil) -> S^3_1(trefoil) in the to-version, with its HM companion."""
    from .standard_module import ZERO_ARF1, zero_surgery_module

    left = replace(lspace_module(0), name="S3")
    mid = zero_surgery_module(ZERO_ARF1, {"bottom_gamma": 1, "bottom_beta": 0, "top_beta": -1, "top_alpha": -2}, "S_0(trefoil)")
    right = replace(lspace_module(-1), name="S^3_1(trefoil)")
    a = _tower_map(left, mid, -1, {"c": ["bottom_gamma"], "b": ["bottom_beta"]}, hi)
    b = _tower_map(mid, right, 0, {"top_alpha": ["a"], "top_beta": ["b"]}, hi)
    c = _tower_map(right, left, 0, {"c": ["a"]}, hi)
    b_prev = _tower_map(mid, left, 0, {"bottom_gamma": ["b"], "bottom_beta": ["a"]}, hi)
    hm = _trefoil_hm(hi)
    return TriangleData("trefoil", (left, mid, right), a, b, c, b_prev, -12, hi, 1, 0, hm)


def _u_tower_module(towers: Mapping[str, int], hi: int):
    from .algebra import Operator

    gens: Dict[int, List[str]] = {}
    for t, b in towers.items():
        for x in range(b, hi + 1, 2):
            gens.setdefault(x, []).append(t)
    blocks = {}
    for x, ids in gens.items():
        below = gens.get(x - 2, [])
        blocks[x] = tuple(1 << below.index(t) if t in below else 0 for t in ids)
    return GradedModule({x: len(v) for x, v in gens.items()}, {"U": Operator(-2, blocks)}), gens


def _u_map(src, tgt, shift: int, rules: Mapping[str, Sequence[str]]) -> GradedMap:
    (gs, si), (gt, ti) = src, tgt
    blocks = {}
    for x, ids in si.items():
        tids = ti.get(x + shift, [])
        cols = []
        for s in ids:
            c = 0
            for t in rules.get(s, ()):
                if t in tids:
                    c ^= 1 << tids.index(t)
            cols.append(c)
        blocks[x] = tuple(cols)
    return GradedMap(gs, gt, shift, blocks)


def _trefoil_hm(hi: int):
    m_inf = _u_tower_module({"t": 0}, hi)
    m_0 = _u_tower_module({"bottom": -1, "top": -2}, hi)
    m_1 = _u_tower_module({"t": -2}, hi)
    a = _u_map(m_inf, m_0, -1, {"t": ["bottom"]})
    b = _u_map(m_0, m_1, 0, {"top": ["t"]})
    c = _u_map(m_1, m_inf, 0, {})
    bottom = {x: [ids.index("bottom")] for x, ids in m_0[1].items() if "bottom" in ids}
    return (m_inf[0], m_0[0], m_1[0], a, b, c, bottom)


@dataclass
class TriangleReport:
    name: str
    checks: Dict[str, Dict[int, bool]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(all(v.values()) for v in self.checks.values())

    def failures(self) -> Dict[str, List[int]]:
        return {k: sorted(d for d, ok in v.items() if not ok) for k, v in self.checks.items() if not all(v.values())}

    def summary(self) -> Dict[str, bool]:
        return {k: all(v.values()) for k, v in self.checks.items()}


def _commutes(f: GradedMap, op: str, degrees: Sequence[int]) -> Dict[int, bool]:
    """f(op x) == op f(x) for x in each degree."""
    s, t = f.source, f.target
    shift = s.ops[op].shift
    out = {}
    for d in degrees:
        ok = True
        for j in range(s.dim(d)):
            v = 1 << j
            lhs = f.apply(d + shift, s.act(op, d, v)) if s.dim(d + shift) else 0
            img = f.apply(d, v)
            rhs = t.act(op, d + f.shift, img) if t.dim(d + f.shift) else 0
            if lhs != rhs:
                ok = False
                break
        out[d] = ok
    return out


def _equals_operator(f: GradedMap, op: str, degrees: Sequence[int]) -> Dict[int, bool]:
    s = f.source
    return {d: all(f.apply(d, 1 << j) == (s.act(op, d, 1 << j)) for j in range(s.dim(d))) for d in degrees}


def verify_triangle(t: TriangleData) -> TriangleReport:
    """Exactness at each corner, R-linearity of the maps, and B o A = Q, per interior degree."""
    rep = TriangleReport(t.name)
    degs = t.interior
    rep.checks["exact_left"] = exactness_check(t.c, t.a, degs)
    rep.checks["exact_middle"] = exactness_check(t.a, t.b, degs)
    rep.checks["exact_right"] = exactness_check(t.b, t.c, degs)
    for name, f in (("A", t.a), ("B", t.b), ("C", t.c)):
        for op in ("V", "Q"):
            rep.checks[f"{name}_{op}_linear"] = _commutes(f, op, degs)
    if t.b_previous is not None:
        for op in ("V", "Q"):
            rep.checks[f"Bprev_{op}_linear"] = _commutes(t.b_previous, op, degs)
        comp = t.a.then(t.b_previous)
        rep.checks["composite_is_Q"] = _equals_operator(comp, "Q", degs)
    if t.hm is not None:
        m_inf, m_0, m_1, a, b, c, bottom = t.hm
        hdegs = [d for d in degs if d >= t.lo + 8]
        rep.checks["hm_exact_left"] = exactness_check(c, a, hdegs)
        rep.checks["hm_exact_middle"] = exactness_check(a, b, hdegs)
        rep.checks["hm_exact_right"] = exactness_check(b, c, hdegs)
        ba = a.then(b)
        rep.checks["hm_BA_zero"] = {d: all(ba.apply(d, 1 << j) == 0 for j in range(m_inf.dim(d))) for d in hdegs}
        img_ok = {}
        for d in hdegs:
            src = d + 1
            image = gf2_image(a.block(src)) if m_inf.dim(src) else []
            want = [1 << i for i in bottom.get(d, [])]
            img_ok[d] = gf2_rank(image) == len(want) == gf2_rank(image + want)
        rep.checks["hm_image_is_bottom_tower"] = img_ok
    return rep


def mutants(t: TriangleData, count: int = 20, seed: int = 0) -> List[Tuple[str, int, int, int]]:
    """Deterministic list of single-entry flips (map, degree, column, row) inside the interior window."""
    import random

    rng = random.Random(seed)
    slots = []
    for which in ("a", "b", "c", "b_previous"):
        f = getattr(t, which)
        if f is None:
            continue
        for d in t.interior:
            n_src, n_tgt = f.source.dim(d), f.target.dim(d + f.shift)
            for col in range(n_src):
                for row in range(n_tgt):
                    slots.append((which, d, col, row))
    rng.shuffle(slots)
    return slots[:count]


def mutation_kill_rate(t: TriangleData, count: int = 20, seed: int = 0) -> Tuple[int, int]:
    """(killed, total) over ``count`` single-entry mutants."""
    ms = mutants(t, count, seed)
    killed = sum(1 for m in ms if not verify_triangle(t.mutated(*m)).passed)
    return killed, len(ms)
