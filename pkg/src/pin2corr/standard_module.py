"""Towers-plus-torsion normal form for HS-to and the correction terms read from it."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .algebra import (
    Echelon,
    GradedModule,
    Operator,
    WindowError,
    check_relations,
)

TOWER = "tower"
TORSION = "torsion"

ISO = "iso"
ONTO = "onto"
INTO = "into"
# neither onto nor injective; constrained only by the module axioms
PARTIAL = "partial"
EDGE_MODES = (ISO, ONTO, INTO, PARTIAL)

SPHERE = "sphere"
ZERO_ARF0 = "zero_arf0"
ZERO_ARF1 = "zero_arf1"
MODULE_KINDS = (SPHERE, ZERO_ARF0, ZERO_ARF1)

SPHERE_ROLES = ("alpha", "beta", "gamma")
ARF0_ROLES = ("bottom_alpha", "bottom_beta", "bottom_gamma", "top_alpha", "top_beta", "top_gamma")
ARF1_ROLES = ("bottom_beta", "bottom_gamma", "top_alpha", "top_beta")
ROLES_BY_KIND = {SPHERE: SPHERE_ROLES, ZERO_ARF0: ARF0_ROLES, ZERO_ARF1: ARF1_ROLES}

# extra room above the highest interesting degree when building explicit models
_HEADROOM = 12


class ModuleError(ValueError):
    """Raised when a module is used in a way its structure does not allow."""


@dataclass(frozen=True, order=True)
class Summand:
    id: str
    kind: str
    bottom: int
    length: Optional[int] = None

    def __post_init__(self):
        if self.kind == TOWER:
            if self.length is not None:
                raise ModuleError(f"tower {self.id} cannot have a length")
        elif self.kind == TORSION:
            if self.length is None or self.length < 1:
                raise ModuleError(f"torsion summand {self.id} needs length >= 1")
        else:
            raise ModuleError(f"unknown summand kind {self.kind!r}")

    def degrees(self, hi: int) -> List[int]:
        if self.kind == TOWER:
            return list(range(self.bottom, hi + 1, 4))
        return [self.bottom + 4 * j for j in range(self.length)]

    def top(self) -> Optional[int]:
        return None if self.kind == TOWER else self.bottom + 4 * (self.length - 1)

    def contains(self, x: int) -> bool:
        if x < self.bottom or (x - self.bottom) % 4:
            return False
        return self.kind == TOWER or x <= self.top()

    def shifted(self, s: int) -> "Summand":
        return replace(self, bottom=self.bottom + s)


@dataclass(frozen=True, order=True)
class QEdge:
    source: str
    target: str
    mode: str

    def __post_init__(self):
        if self.mode not in EDGE_MODES:
            raise ModuleError(f"unknown edge mode {self.mode!r}")


@dataclass(frozen=True)
class StandardRModule:
    """Direct sum of towers V+_d and blocks V_d(k), with Q acting along edges.

    Q sends the element of a source summand in degree x to the element of each
    target summand in degree x - 1 (or to zero where the target has none).
    Summands, edges and labels are kept in canonical sorted order.
    """

    name: str
    summands: Tuple[Summand, ...]
    q_edges: Tuple[QEdge, ...] = ()
    labels: Tuple[Tuple[str, str], ...] = ()
    kind: str = SPHERE
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in MODULE_KINDS:
            raise ModuleError(f"unknown module kind {self.kind!r}")
        object.__setattr__(self, "summands", tuple(sorted(self.summands, key=lambda s: s.id)))
        object.__setattr__(self, "q_edges", tuple(sorted(set(self.q_edges))))
        object.__setattr__(self, "labels", tuple(sorted(self.labels)))

    @property
    def by_id(self) -> Dict[str, Summand]:
        return {s.id: s for s in self.summands}

    @property
    def label_map(self) -> Dict[str, str]:
        return dict(self.labels)

    def labelled(self, role: str) -> Summand:
        try:
            return self.by_id[self.label_map[role]]
        except KeyError:
            raise ModuleError(f"module {self.name} has no {role} tower") from None

    def default_top(self) -> int:
        tops = [s.bottom for s in self.summands] + [s.top() for s in self.summands if s.kind == TORSION]
        return max(tops) + _HEADROOM

    def explicit(self, hi: Optional[int] = None) -> GradedModule:
        return to_graded(self, hi)

    def basis_index(self, hi: Optional[int] = None) -> Dict[int, List[str]]:
        hi = self.default_top() if hi is None else hi
        out: Dict[int, List[str]] = {}
        for s in self.summands:
            for x in s.degrees(hi):
                out.setdefault(x, []).append(s.id)
        return out


def to_graded(m: StandardRModule, hi: Optional[int] = None) -> GradedModule:
    """Explicit model of ``m`` in degrees up to ``hi`` (towers truncated there)."""
    hi = m.default_top() if hi is None else hi
    index = m.basis_index(hi)
    pos = {d: {sid: i for i, sid in enumerate(ids)} for d, ids in index.items()}
    dims = {d: len(ids) for d, ids in index.items()}
    targets: Dict[str, List[str]] = {}
    for e in m.q_edges:
        targets.setdefault(e.source, []).append(e.target)
    v_blocks, q_blocks = {}, {}
    for d, ids in index.items():
        vcols, qcols = [], []
        for sid in ids:
            below = pos.get(d - 4, {})
            vcols.append(1 << below[sid] if sid in below else 0)
            c = 0
            below1 = pos.get(d - 1, {})
            for t in targets.get(sid, ()):
                if t in below1:
                    c ^= 1 << below1[t]
            qcols.append(c)
        v_blocks[d] = tuple(vcols)
        q_blocks[d] = tuple(qcols)
    names = {d: tuple(f"{sid}@{d}" for sid in ids) for d, ids in index.items()}
    return GradedModule(dims, {"V": Operator(-4, v_blocks), "Q": Operator(-1, q_blocks)}, names)


# ---------------------------------------------------------------------------
# correction data


@dataclass(frozen=True)
class CorrectionData:
    """Correction terms in half-grading units; ``None`` marks an unknown value."""

    alpha: Optional[int]
    beta: Optional[int]
    gamma: Optional[int]
    delta: Optional[int] = None
    Delta: Optional[int] = None
    t: Optional[int] = None

    def __post_init__(self):
        known = [x for x in (self.alpha, self.beta, self.gamma) if x is not None]
        if known != sorted(known, reverse=True):
            raise ModuleError(f"correction terms must satisfy alpha >= beta >= gamma: {self.abg}")
        if len({x % 2 for x in known}) > 1:
            raise ModuleError(f"correction terms must share a parity: {self.abg}")
        if self.t is not None and self.t < 0:
            raise ModuleError("t must be non-negative")
        if self.Delta is not None and self.delta is not None and self.Delta not in (self.delta, self.delta - 1):
            raise ModuleError("Delta must be delta or delta - 1")

    @property
    def abg(self) -> Tuple[Optional[int], Optional[int], Optional[int]]:
        return (self.alpha, self.beta, self.gamma)

    @property
    def mu(self) -> Optional[int]:
        for x in self.abg:
            if x is not None:
                return x % 2
        return None

    def as_dict(self) -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "mu": self.mu,
            "Delta": self.Delta,
            "t": self.t,
        }


def _neg(x: Optional[int]) -> Optional[int]:
    return None if x is None else -x


def orientation_reverse(c: CorrectionData) -> CorrectionData:
    """Correction data of the orientation-reversed manifold; Delta is not carried over."""
    return CorrectionData(_neg(c.gamma), _neg(c.beta), _neg(c.alpha), _neg(c.delta), None, c.t)


def dp1_branch(delta: int, mu: int) -> int:
    """The value Delta must take given delta and the Rokhlin bit."""
    return delta if (delta - mu) % 2 == 0 else delta - 1


# ---------------------------------------------------------------------------
# validation


def validate(m: StandardRModule) -> List[str]:
    """All violations of ``m``, including its role labels; an empty list means valid."""
    problems = structural_violations(m)
    if problems:
        return problems
    roles = ROLES_BY_KIND[m.kind]
    labelled = dict(m.labels)
    if sorted(labelled) != sorted(roles):
        problems.append(f"{m.kind} module needs labels {sorted(roles)}, has {sorted(labelled)}")
        return problems
    n_towers = sum(1 for s in m.summands if s.kind == TOWER)
    if n_towers != len(roles):
        problems.append(f"{m.kind} module must have exactly {len(roles)} towers, has {n_towers}")
    if m.kind == SPHERE:
        problems.extend(_sphere_violations(m))
    else:
        problems.extend(_zero_violations(m))
    return problems


def structural_violations(m: StandardRModule) -> List[str]:
    """Reference, edge-mode and module-axiom violations, ignoring role labels."""
    problems: List[str] = []
    ids = [s.id for s in m.summands]
    if len(set(ids)) != len(ids):
        problems.append("duplicate summand ids")
    by_id = m.by_id
    for e in m.q_edges:
        for end in (e.source, e.target):
            if end not in by_id:
                problems.append(f"q-edge {e.source}->{e.target} references missing summand {end}")
    for role, sid in m.labels:
        if sid not in by_id:
            problems.append(f"label {role} references missing summand {sid}")
        elif by_id[sid].kind != TOWER:
            problems.append(f"label {role} must name a tower, {sid} is torsion")
    if problems:
        return problems

    for e in m.q_edges:
        problems.extend(_edge_mode_violations(by_id[e.source], by_id[e.target], e.mode))

    explicit = to_graded(m)
    hi = m.default_top()
    for msg in check_relations(explicit, [d for d in explicit.degrees() if d <= hi - 4]):
        problems.append(msg)
    return problems


def _edge_mode_violations(src: Summand, tgt: Summand, mode: str) -> List[str]:
    tag = f"q-edge {src.id}->{tgt.id} ({mode})"
    if (src.bottom - 1 - tgt.bottom) % 4:
        return [f"{tag}: degrees {src.bottom} and {tgt.bottom} are not compatible with a degree -1 map"]
    out = []
    if tgt.kind == TOWER:
        onto = src.kind == TOWER and src.bottom - 1 <= tgt.bottom
        injective = src.bottom - 1 >= tgt.bottom
    else:
        src_top = float("inf") if src.kind == TOWER else src.top()
        onto = src.bottom - 1 <= tgt.bottom and src_top - 1 >= tgt.top()
        injective = src.kind == TORSION and src.bottom - 1 >= tgt.bottom and src.top() - 1 <= tgt.top()
    if mode in (ONTO, ISO) and not onto:
        out.append(f"{tag}: Q is not onto the target (source bottom {src.bottom}, target bottom {tgt.bottom})")
    if mode in (INTO, ISO) and not injective:
        out.append(f"{tag}: Q is not injective (source bottom {src.bottom}, target bottom {tgt.bottom})")
    return out


def _has_edge(m: StandardRModule, src: str, tgt: str) -> bool:
    return any(e.source == src and e.target == tgt for e in m.q_edges)


def _sphere_violations(m: StandardRModule) -> List[str]:
    out = []
    a = m.labelled("alpha").bottom
    b = m.labelled("beta").bottom
    c = m.labelled("gamma").bottom
    if a % 2 or (b - 1) % 2 or c % 2:
        out.append(f"tower bottoms (a, b, c) = ({a}, {b}, {c}) need a even, b odd, c even")
        return out
    alpha, beta, gamma = a // 2, (b - 1) // 2, (c - 2) // 2
    if not alpha >= beta >= gamma:
        out.append(f"ordering alpha >= beta >= gamma fails: ({alpha}, {beta}, {gamma})")
    if len({alpha % 2, beta % 2, gamma % 2}) > 1:
        out.append(f"alpha, beta, gamma = ({alpha}, {beta}, {gamma}) do not share a parity")
    ga, be, al = (m.label_map[r] for r in ("gamma", "beta", "alpha"))
    for s, t in ((ga, be), (be, al)):
        if not _has_edge(m, s, t):
            out.append(f"missing Q-edge {s}->{t} between labelled towers")
        elif _edge_mode_violations(m.by_id[s], m.by_id[t], ONTO):
            out.append(f"Q does not map {s} onto {t}")
    return out


def _zero_violations(m: StandardRModule) -> List[str]:
    out = []
    lm = m.label_map
    if m.kind == ZERO_ARF0:
        chains = [("bottom_gamma", "bottom_beta"), ("bottom_beta", "bottom_alpha"),
                  ("top_gamma", "top_beta"), ("top_beta", "top_alpha")]
    else:
        chains = [("bottom_gamma", "bottom_beta"), ("top_beta", "top_alpha")]
    for s, t in chains:
        if not _has_edge(m, lm[s], lm[t]):
            out.append(f"missing Q-edge {s}->{t}")
    try:
        zero_surgery_terms(m)
    except ModuleError as exc:
        out.append(str(exc))
    return out


def _require_valid(m: StandardRModule) -> None:
    problems = validate(m)
    if problems:
        raise ModuleError(f"invalid module {m.name}: " + "; ".join(problems))


# ---------------------------------------------------------------------------
# invariants


def correction_terms(m: StandardRModule) -> CorrectionData:
    """(alpha, beta, gamma) from the labelled tower bottoms a = 2alpha, b = 2beta+1, c = 2gamma+2."""
    if m.kind != SPHERE or not m.labels:
        raise ModuleError(f"{m.name} is not a labelled homology-sphere module")
    _require_valid(m)
    a = m.labelled("alpha").bottom
    b = m.labelled("beta").bottom
    c = m.labelled("gamma").bottom
    return CorrectionData(a // 2, (b - 1) // 2, (c - 2) // 2)


def tower_bottoms(m: StandardRModule) -> Tuple[int, int, int]:
    return tuple(m.labelled(r).bottom for r in SPHERE_ROLES)


def grading_shift(m: StandardRModule, s: int) -> StandardRModule:
    """Shift every degree by the even integer ``s`` (the correction terms move by s/2)."""
    if s % 2:
        raise ModuleError(f"grading shifts of spin homology spheres are even, got {s}")
    return replace(
        m,
        name=m.name if s == 0 else f"{m.name}<{s}>",
        summands=tuple(x.shifted(s) for x in m.summands),
    )


def delta_invariant(m: StandardRModule, delta: Optional[int] = None, hi: Optional[int] = None) -> int:
    """Half of (lowest degree of a gamma-tower element outside Im Q, minus 2).

    If ``delta`` is given, the result is checked against the branch formula
    relating it to delta and the Rokhlin bit; a mismatch raises ModuleError.
    """
    _require_valid(m)
    if m.kind != SPHERE:
        raise ModuleError("Delta is defined for homology-sphere modules")
    hi = m.default_top() + 8 if hi is None else hi
    g = to_graded(m, hi)
    gamma = m.labelled("gamma")
    index = m.basis_index(hi)
    found = None
    for x in gamma.degrees(hi - 1):
        pos = index[x].index(gamma.id)
        ech = Echelon()
        for col in g.block("Q", x + 1) if g.dim(x + 1) else ():
            ech.add(col)
        if not ech.contains(1 << pos):
            found = x
            break
    if found is None:
        raise WindowError(f"every gamma-tower element up to degree {hi} lies in Im Q")
    Delta = (found - 2) // 2
    if delta is not None:
        mu = correction_terms(m).mu
        expected = dp1_branch(delta, mu)
        if Delta != expected:
            raise ModuleError(f"Delta = {Delta} but delta = {delta}, mu = {mu} force {expected}")
    return Delta


def lspace_check(m: StandardRModule) -> bool:
    """Whether ``m`` is a grading shift of the S^3 module."""
    if validate(m) or m.kind != SPHERE:
        return False
    if len(m.summands) != 3 or any(s.kind != TOWER for s in m.summands):
        return False
    a, b, c = tower_bottoms(m)
    if not (b == a + 1 and c == a + 2 and a % 4 in (0, 2)):
        return False
    lm = m.label_map
    want = {QEdge(lm["gamma"], lm["beta"], ISO), QEdge(lm["beta"], lm["alpha"], ISO)}
    return {(e.source, e.target) for e in m.q_edges} == {(e.source, e.target) for e in want}


def zero_surgery_terms(m: StandardRModule) -> Dict[str, int]:
    """Bottom (minus) and top (plus) correction terms of a zero-surgery module."""
    if m.kind == SPHERE:
        raise ModuleError("zero-surgery terms need a zero_arf0 or zero_arf1 module")
    roles = ROLES_BY_KIND[m.kind]
    lm = m.label_map
    if sorted(lm) != sorted(roles):
        raise ModuleError(f"{m.kind} needs exactly the labels {sorted(roles)}, got {sorted(lm)}")
    bottoms = {r: m.labelled(r).bottom for r in roles}
    return zero_terms_from_bottoms(bottoms)


_ZERO_OFFSETS = {
    "bottom_alpha": 1,
    "bottom_beta": 0,
    "bottom_gamma": -1,
    "top_alpha": 0,
    "top_beta": -1,
    "top_gamma": -2,
}


def zero_terms_from_bottoms(bottoms: Mapping[str, int]) -> Dict[str, int]:
    out = {}
    for role, x in bottoms.items():
        v = x + _ZERO_OFFSETS[role]
        if v % 2:
            raise ModuleError(f"{role} tower bottom {x} gives a non-integral correction term")
        sign = "minus" if role.startswith("bottom") else "plus"
        out[f"{role.split('_')[1]}_{sign}"] = v // 2
    return out


def rebase_arf0(onsets: Mapping[str, int], bottom_gamma: FrozenSet[str], top_gamma: FrozenSet[str]) -> Dict[str, int]:
    """Zero-surgery terms after changing the splitting of the bar module.

    ``onsets`` gives the lowest degree in which each of the six bar towers of a
    reference splitting survives in HS-to. The new splitting is generated by
    new gamma elements, given as sets of reference towers whose sum they are;
    Q then produces the new beta and alpha generators. The new bottom towers
    are the images of the new bottom summand; the new top towers are read in
    the quotient by them.
    """
    q_next = {"gamma": "beta", "beta": "alpha"}

    def chain(gen: FrozenSet[str]) -> Dict[str, FrozenSet[str]]:
        out = {"gamma": frozenset(gen)}
        cur = frozenset(gen)
        for new in ("beta", "alpha"):
            nxt = set()
            for role in cur:
                side, letter = role.split("_")
                if letter in q_next:
                    nxt ^= {f"{side}_{q_next[letter]}"}
            cur = frozenset(nxt)
            out[new] = cur
        return out

    residues = {r: x % 4 for r, x in onsets.items()}
    new = {}
    for side, gen in (("bottom", bottom_gamma), ("top", top_gamma)):
        for letter, comps in chain(gen).items():
            if not comps:
                raise ModuleError(f"new {side} {letter} generator vanishes")
            if len({residues[c] for c in comps}) != 1:
                raise ModuleError(f"new {side} {letter} generator mixes degrees mod 4")
            new[f"{side}_{letter}"] = comps
    order = sorted(onsets)
    ech = Echelon()
    for comps in new.values():
        if not ech.add(sum(1 << order.index(c) for c in comps)):
            raise ModuleError("the new generators do not form a splitting")

    def alive(comps: FrozenSet[str], x: int) -> int:
        return sum(1 << order.index(c) for c in comps if x >= onsets[c] and (x - onsets[c]) % 4 == 0)

    lo = min(onsets.values())
    hi = max(onsets.values()) + 16
    bottoms = {}
    for role, comps in new.items():
        residue = residues[next(iter(comps))]
        for x in range(lo, hi + 1):
            if x % 4 != residue:
                continue
            vec = alive(comps, x)
            if not vec:
                continue
            if role.startswith("top"):
                span = Echelon()
                for r2, c2 in new.items():
                    if r2.startswith("bottom"):
                        span.add(alive(c2, x))
                if span.contains(vec):
                    continue
            bottoms[role] = x
            break
        else:
            raise WindowError(f"no surviving element found for the new {role} tower")
    return zero_terms_from_bottoms(bottoms)


# ---------------------------------------------------------------------------
# constructors


def s3_module(name: str = "S3") -> StandardRModule:
    """HS-to(S^3) = V+_2 + V+_1 + V+_0 with Q an isomorphism along the chain."""
    return StandardRModule(
        name,
        (Summand("a", TOWER, 0), Summand("b", TOWER, 1), Summand("c", TOWER, 2)),
        (QEdge("c", "b", ISO), QEdge("b", "a", ISO)),
        (("alpha", "a"), ("beta", "b"), ("gamma", "c")),
    )


def lspace_module(delta: int, name: Optional[str] = None) -> StandardRModule:
    m = grading_shift(s3_module(), 2 * delta)
    return replace(m, name=name or f"Lspace(delta={delta})")


def mk_module(k: int, name: Optional[str] = None) -> StandardRModule:
    """V+_0 + V+_{-4k+1} + V+_{-4k+2} + V_{-4k+3}(k): onto, iso, injective Q-pattern."""
    if k < 1:
        raise ModuleError("M_k needs k >= 1")
    return StandardRModule(
        name or f"M{k}",
        (
            Summand("a", TOWER, 0),
            Summand("b", TOWER, -4 * k + 1),
            Summand("c", TOWER, -4 * k + 2),
            Summand("j", TORSION, -4 * k + 3, k),
        ),
        (QEdge("b", "a", ONTO), QEdge("c", "b", ISO), QEdge("j", "c", INTO)),
        (("alpha", "a"), ("beta", "b"), ("gamma", "c")),
    )


def zero_surgery_module(kind: str, bottoms: Mapping[str, int], name: str, extra_edges: Iterable[QEdge] = ()) -> StandardRModule:
    """A zero-surgery module made of labelled towers with the standard Q-chains."""
    roles = ROLES_BY_KIND[kind]
    if sorted(bottoms) != sorted(roles):
        raise ModuleError(f"{kind} needs bottoms for {sorted(roles)}")
    summands = tuple(Summand(r, TOWER, bottoms[r]) for r in roles)
    edges = []
    for side in ("bottom", "top"):
        for s, t in (("gamma", "beta"), ("beta", "alpha")):
            src, tgt = f"{side}_{s}", f"{side}_{t}"
            if src in bottoms and tgt in bottoms:
                mode = ISO if bottoms[src] - 1 == bottoms[tgt] else ONTO
                edges.append(QEdge(src, tgt, mode))
    edges.extend(extra_edges)
    return StandardRModule(name, summands, tuple(edges), tuple((r, r) for r in roles), kind)
