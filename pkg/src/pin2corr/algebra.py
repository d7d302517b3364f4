"""Exact arithmetic over F2[U] and R = F2[[V]][Q]/(Q^3), plus graded F2 linear algebra.

Vectors over F2 are Python ints used as bitsets: bit ``i`` is the coefficient
of the ``i``-th basis vector. A matrix is a list of such ints, one per source
basis vector (its image column).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

FU = "FU"
RVQ = "RVQ"

DEG_U = -2
DEG_V = -4
DEG_Q = -1

#: default cap on the V- (or U-) exponent of truncated power series
DEFAULT_VMAX = 64


class AlgebraError(ValueError):
    """Raised on ring mismatches and malformed linear-algebra input."""


class WindowError(AlgebraError):
    """Raised when a degree window is too small for the requested computation."""


# ---------------------------------------------------------------------------
# ring elements


def _mono_degree(ring: str, mono) -> int:
    if ring == FU:
        return DEG_U * mono
    a, b = mono
    return DEG_V * a + DEG_Q * b


@dataclass(frozen=True)
class RingElem:
    """A homogeneous-or-not element of F2[U] or R, stored as a set of monomials.

    For ``FU`` a monomial is the exponent of U; for ``RVQ`` it is the pair
    ``(V-exponent, Q-exponent)`` with the Q-exponent at most 2.
    """

    ring: str
    terms: frozenset = frozenset()

    def __post_init__(self):
        if self.ring not in (FU, RVQ):
            raise AlgebraError(f"unknown ring {self.ring!r}")
        if self.ring == RVQ:
            terms = frozenset(t for t in self.terms if t[1] <= 2)
            for a, b in terms:
                if a < 0 or b < 0:
                    raise AlgebraError("negative exponent")
            object.__setattr__(self, "terms", terms)
        else:
            for a in self.terms:
                if a < 0:
                    raise AlgebraError("negative exponent")
            object.__setattr__(self, "terms", frozenset(self.terms))

    @classmethod
    def zero(cls, ring: str = RVQ) -> "RingElem":
        return cls(ring, frozenset())

    @classmethod
    def one(cls, ring: str = RVQ) -> "RingElem":
        return cls(ring, frozenset([0 if ring == FU else (0, 0)]))

    @classmethod
    def monomial(cls, v: int = 0, q: int = 0) -> "RingElem":
        return cls(RVQ, frozenset([(v, q)]))

    @classmethod
    def u_power(cls, n: int) -> "RingElem":
        return cls(FU, frozenset([n]))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "RingElem") -> "RingElem":
        _check_same_ring(self, other)
        return RingElem(self.ring, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "RingElem") -> "RingElem":
        return ring_mul(self, other)

    def degrees(self) -> set:
        return {_mono_degree(self.ring, m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) != 1:
            raise AlgebraError(f"{self} is not a nonzero homogeneous element")
        return next(iter(degs))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            parts.append(_mono_str(self.ring, m))
        return "+".join(parts)


def _mono_str(ring: str, m) -> str:
    if ring == FU:
        return "1" if m == 0 else ("U" if m == 1 else f"U^{m}")
    a, b = m
    s = ""
    if a:
        s += "V" if a == 1 else f"V^{a}"
    if b:
        s += "Q" if b == 1 else f"Q^{b}"
    return s or "1"


def _check_same_ring(x: RingElem, y: RingElem) -> None:
    if x.ring != y.ring:
        raise AlgebraError(f"ring mismatch: {x.ring} vs {y.ring}")


def ring_mul(x: RingElem, y: RingElem, vmax: int = DEFAULT_VMAX) -> RingElem:
    """Product in F2[U] or R; Q^3 = 0 and exponents above ``vmax`` are dropped."""
    _check_same_ring(x, y)
    out: set = set()
    for m in x.terms:
        for n in y.terms:
            if x.ring == FU:
                p = m + n
                if p > vmax:
                    continue
            else:
                p = (m[0] + n[0], m[1] + n[1])
                if p[1] > 2 or p[0] > vmax:
                    continue
            out ^= {p}
    return RingElem(x.ring, frozenset(out))


def parse_ring_elem(text: str, ring: str = RVQ) -> RingElem:
    """Parse ``"V^2Q+Q^2"``, ``"1"``, ``"U^3"`` and the like."""
    text = text.replace(" ", "")
    if text in ("", "0"):
        return RingElem.zero(ring)
    terms: set = set()
    for part in text.split("+"):
        if not part:
            raise AlgebraError(f"empty term in {text!r}")
        exps = {"U": 0, "V": 0, "Q": 0}
        i = 0
        if part == "1":
            part = ""
        while i < len(part):
            var = part[i]
            if var not in exps:
                raise AlgebraError(f"bad symbol {var!r} in {text!r}")
            i += 1
            e = 1
            if i < len(part) and part[i] == "^":
                j = i + 1
                while j < len(part) and part[j].isdigit():
                    j += 1
                if j == i + 1:
                    raise AlgebraError(f"missing exponent in {text!r}")
                e = int(part[i + 1:j])
                i = j
            exps[var] += e
        if ring == FU:
            if exps["V"] or exps["Q"]:
                raise AlgebraError(f"{text!r} is not in F[U]")
            mono = exps["U"]
        else:
            if exps["U"]:
                raise AlgebraError(f"{text!r} is not in R")
            mono = (exps["V"], exps["Q"])
        terms ^= {mono}
    return RingElem(ring, frozenset(terms))


# ---------------------------------------------------------------------------
# F2 linear algebra on int bitsets


class Echelon:
    """Incremental reduced basis of a subspace of F2^n with provenance tags.

    Each stored row carries a tag (another bitset) recording which inputs it
    is a combination of; ``reduce`` returns the residue and the accumulated tag.
    """

    def __init__(self) -> None:
        self.rows: Dict[int, Tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: int, tag: int = 0) -> Tuple[int, int]:
        for p in sorted(self.rows, reverse=True):
            if (vec >> p) & 1:
                r, t = self.rows[p]
                vec ^= r
                tag ^= t
        return vec, tag

    def add(self, vec: int, tag: int = 0) -> bool:
        vec, tag = self.reduce(vec, tag)
        if not vec:
            return False
        self.rows[vec.bit_length() - 1] = (vec, tag)
        return True

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0

    def basis(self) -> List[int]:
        return [self.rows[p][0] for p in sorted(self.rows)]


def gf2_rank(vectors: Iterable[int]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


def gf2_kernel(columns: Sequence[int]) -> List[int]:
    """Basis of the kernel of the matrix whose j-th column is ``columns[j]``."""
    ech = Echelon()
    kernel = []
    for j, col in enumerate(columns):
        residue, tag = ech.reduce(col, 1 << j)
        if residue:
            ech.rows[residue.bit_length() - 1] = (residue, tag)
        else:
            kernel.append(tag)
    return kernel


def gf2_image(columns: Sequence[int]) -> List[int]:
    ech = Echelon()
    for c in columns:
        ech.add(c)
    return ech.basis()


def apply_matrix(columns: Sequence[int], vec: int) -> int:
    out = 0
    j = 0
    while vec:
        if vec & 1:
            out ^= columns[j]
        vec >>= 1
        j += 1
    return out


def compose(outer: Sequence[int], inner: Sequence[int]) -> List[int]:
    return [apply_matrix(outer, c) for c in inner]


def span_intersection_dim(a: Sequence[int], b: Sequence[int]) -> int:
    return gf2_rank(a) + gf2_rank(b) - gf2_rank(list(a) + list(b))


def bits(vec: int) -> List[int]:
    out = []
    i = 0
    while vec:
        if vec & 1:
            out.append(i)
        vec >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# graded objects


@dataclass(frozen=True)
class GradedVec:
    """Degree-indexed dimensions, optionally with an eventually 4-periodic upper tail."""

    support: Tuple[Tuple[int, int], ...] = ()
    tail: Optional[Tuple[int, int, Tuple[int, int, int, int]]] = None

    def __post_init__(self):
        for _, n in self.support:
            if n < 0:
                raise AlgebraError("negative dimension")
        if self.tail is not None:
            period, onset, dims = self.tail
            if period != 4 or len(dims) != 4 or min(dims) < 0:
                raise AlgebraError("tail must be 4-periodic with non-negative dims")
            if any(d >= onset for d, _ in self.support):
                raise AlgebraError("finite support must lie below the tail onset")

    @classmethod
    def from_dict(cls, dims: Mapping[int, int], tail=None) -> "GradedVec":
        return cls(tuple(sorted((d, n) for d, n in dims.items() if n)), tail)

    def dim(self, d: int) -> int:
        if self.tail is not None and d >= self.tail[1]:
            return self.tail[2][(d - self.tail[1]) % 4]
        return dict(self.support).get(d, 0)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.support)

    def total(self) -> int:
        if self.tail is not None and any(self.tail[2]):
            raise AlgebraError("infinite-dimensional")
        return sum(n for _, n in self.support)


@dataclass(frozen=True)
class Operator:
    """A degree-homogeneous linear endomorphism: ``blocks[d]`` maps degree d to d + shift."""

    shift: int
    blocks: Mapping[int, Tuple[int, ...]]


@dataclass(frozen=True)
class GradedModule:
    """A graded F2-vector space over a finite degree range with named operators.

    R-modules carry operators ``"V"`` (shift -4) and ``"Q"`` (shift -1);
    F[U]-modules carry ``"U"`` (shift -2); chain complexes carry ``"d"``.
    Degrees outside ``dims`` are zero.
    """

    dims: Mapping[int, int]
    ops: Mapping[str, Operator] = field(default_factory=dict)
    names: Mapping[int, Tuple[str, ...]] = field(default_factory=dict)

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def degrees(self) -> List[int]:
        return sorted(d for d, n in self.dims.items() if n)

    def block(self, op: str, d: int) -> Tuple[int, ...]:
        o = self.ops[op]
        if self.dim(d) == 0:
            return ()
        blk = o.blocks.get(d)
        if blk is None:
            if self.dim(d + o.shift) == 0:
                return (0,) * self.dim(d)
            raise WindowError(f"operator {op} undefined in degree {d}")
        return blk

    def act(self, op: str, d: int, vec: int) -> int:
        return apply_matrix(self.block(op, d), vec)

    def power_block(self, op: str, d: int, n: int) -> List[int]:
        """Matrix of ``op**n`` from degree d."""
        shift = self.ops[op].shift
        cols = [1 << i for i in range(self.dim(d))]
        cur = d
        for _ in range(n):
            cols = [self.act(op, cur, c) for c in cols]
            cur += shift
        return cols

    def graded_vec(self) -> GradedVec:
        return GradedVec.from_dict(self.dims)

    def shifted(self, s: int) -> "GradedModule":
        return GradedModule(
            {d + s: n for d, n in self.dims.items()},
            {k: Operator(o.shift, {d + s: b for d, b in o.blocks.items()}) for k, o in self.ops.items()},
            {d + s: n for d, n in self.names.items()},
        )

    def restricted(self, lo: int, hi: int) -> "GradedModule":
        """Truncate to degrees in [lo, hi]; operators landing outside become partial."""
        keep = {d: n for d, n in self.dims.items() if lo <= d <= hi}
        ops = {}
        for k, o in self.ops.items():
            blocks = {}
            for d, b in o.blocks.items():
                if d in keep:
                    blocks[d] = b if lo <= d + o.shift <= hi else (0,) * keep[d]
            ops[k] = Operator(o.shift, blocks)
        return GradedModule(keep, ops, {d: n for d, n in self.names.items() if d in keep})


def dual_module(m: GradedModule) -> GradedModule:
    """Graded dual: degree d becomes -d and every operator is transposed."""
    dims = {-d: n for d, n in m.dims.items()}
    ops = {}
    for k, o in m.ops.items():
        blocks: Dict[int, List[int]] = {}
        # original block at d: M_d -> M_{d+s}; transpose: M*_{-(d+s)} -> M*_{-d}
        for d, cols in o.blocks.items():
            src = -(d + o.shift)
            n_src = m.dim(d + o.shift)
            t = [0] * n_src
            for j, c in enumerate(cols):
                for i in bits(c):
                    t[i] |= 1 << j
            blocks[src] = t
        for d in dims:
            if d not in blocks:
                blocks[d] = [0] * dims[d]
        ops[k] = Operator(o.shift, {d: tuple(b) for d, b in blocks.items()})
    return GradedModule(dims, ops)


def check_relations(m: GradedModule, degrees: Optional[Iterable[int]] = None) -> List[str]:
    """Module axioms for R-modules (Q^3 = 0, QV = VQ); returns violation messages."""
    problems = []
    if degrees is None:
        degrees = m.degrees()
    for d in degrees:
        if "Q" in m.ops:
            for j, c in enumerate(m.power_block("Q", d, 3)):
                if c:
                    problems.append(f"Q^3 != 0 on basis {j} in degree {d}")
        if "Q" in m.ops and "V" in m.ops:
            qv = [m.act("Q", d - 4, m.act("V", d, 1 << j)) for j in range(m.dim(d))]
            vq = [m.act("V", d - 1, m.act("Q", d, 1 << j)) for j in range(m.dim(d))]
            if qv != vq:
                problems.append(f"QV != VQ in degree {d}")
    return problems


@dataclass(frozen=True)
class GradedMap:
    """A degree-``shift`` linear map; ``blocks[d]`` has one column per source basis vector."""

    source: GradedModule
    target: GradedModule
    shift: int
    blocks: Mapping[int, Tuple[int, ...]]

    def __post_init__(self):
        for d, cols in self.blocks.items():
            if len(cols) != self.source.dim(d):
                raise AlgebraError(f"block in degree {d} has {len(cols)} columns, source dim {self.source.dim(d)}")
            limit = 1 << self.target.dim(d + self.shift)
            for c in cols:
                if c >= limit:
                    raise AlgebraError(f"block in degree {d} exceeds target dimension")

    def block(self, d: int) -> Tuple[int, ...]:
        if self.source.dim(d) == 0:
            return ()
        blk = self.blocks.get(d)
        if blk is None:
            if self.target.dim(d + self.shift) == 0:
                return (0,) * self.source.dim(d)
            raise WindowError(f"map undefined in degree {d}")
        return blk

    def apply(self, d: int, vec: int) -> int:
        return apply_matrix(self.block(d), vec)

    def then(self, other: "GradedMap") -> "GradedMap":
        """The composite ``other o self``."""
        if other.source != self.target:
            raise AlgebraError("maps are not composable")
        blocks = {}
        for d in self.source.degrees():
            blocks[d] = tuple(other.apply(d + self.shift, c) for c in self.block(d))
        return GradedMap(self.source, other.target, self.shift + other.shift, blocks)

    def with_entry_flipped(self, d: int, col: int, row: int) -> "GradedMap":
        blocks = dict(self.blocks)
        cols = list(self.block(d))
        cols[col] ^= 1 << row
        blocks[d] = tuple(cols)
        return GradedMap(self.source, self.target, self.shift, blocks)


def rank_kernel_image(f: GradedMap) -> Dict[int, Tuple[int, List[int], List[int]]]:
    """Per source degree: (rank, kernel basis, image basis), by exact elimination."""
    out = {}
    for d in f.source.degrees():
        cols = f.block(d)
        image = gf2_image(cols)
        kernel = gf2_kernel(cols)
        assert len(image) + len(kernel) == len(cols)
        out[d] = (len(image), kernel, image)
    return out


def exactness_check(f: GradedMap, g: GradedMap, degrees: Optional[Iterable[int]] = None) -> Dict[int, bool]:
    """Per degree of the middle term: whether image(f) == kernel(g) there."""
    if f.target != g.source:
        raise AlgebraError("target of f is not the source of g")
    mid = f.target
    if degrees is None:
        degrees = mid.degrees()
    out = {}
    for d in degrees:
        n = mid.dim(d)
        if n == 0:
            out[d] = True
            continue
        src = d - f.shift
        img = list(f.block(src)) if f.source.dim(src) else []
        gcols = g.block(d)
        zero = all(g.apply(d, v) == 0 for v in img)
        out[d] = zero and gf2_rank(img) == n - gf2_rank(gcols)
    return out


# ---------------------------------------------------------------------------
# subquotients and torsion structure


def subquotient(
    module: GradedModule,
    upper: Mapping[int, Sequence[int]],
    lower: Mapping[int, Sequence[int]],
) -> Tuple[GradedModule, Dict[int, List[int]]]:
    """The graded module upper/lower with induced operators.

    Returns the new module and, per degree, representatives (in the ambient
    basis) of its basis vectors. Raises AlgebraError if an operator does not
    preserve ``upper`` or ``lower`` where its target is inside the window.
    """
    reps: Dict[int, List[int]] = {}
    eches: Dict[int, Echelon] = {}
    for d in sorted(set(upper) | set(lower)):
        ech = Echelon()
        for v in lower.get(d, ()):
            ech.add(v, 0)
        chosen = []
        for v in upper.get(d, ()):
            r, _ = ech.reduce(v)
            if r:
                ech.add(r, 1 << len(chosen))
                chosen.append(r)
        reps[d] = chosen
        eches[d] = ech
    dims = {d: len(r) for d, r in reps.items() if r}
    ops = {}
    for name, o in module.ops.items():
        blocks = {}
        for d, rs in reps.items():
            if not rs:
                continue
            t = d + o.shift
            if module.dim(t) == 0:
                blocks[d] = (0,) * len(rs)
                continue
            if t not in eches:
                # target degree outside the computed window
                continue
            cols = []
            for r in rs:
                img = module.act(name, d, r)
                res, tag = eches[t].reduce(img)
                if res:
                    raise AlgebraError(f"operator {name} does not preserve the subquotient at degree {d}")
                cols.append(tag)
            blocks[d] = tuple(cols)
        ops[name] = Operator(o.shift, blocks)
    return GradedModule(dims, ops), {d: r for d, r in reps.items() if r}


def homology(
    complex_: GradedModule, diff: str = "d", extra_ops: Iterable[str] = ()
) -> GradedModule:
    """Homology of a graded module with differential ``diff``; other operators are inherited."""
    o = complex_.ops[diff]
    upper: Dict[int, List[int]] = {}
    lower: Dict[int, List[int]] = {}
    for d in complex_.degrees():
        blk = complex_.block(diff, d)
        upper[d] = gf2_kernel(blk)
        src = d - o.shift
        lower[d] = list(complex_.block(diff, src)) if complex_.dim(src) else []
    keep = {k: v for k, v in complex_.ops.items() if k in set(extra_ops)}
    mod, _ = subquotient(GradedModule(complex_.dims, keep), upper, lower)
    return mod


def torsion_blocks(m: GradedModule, op: str) -> List[Tuple[int, int]]:
    """Decompose a finite graded module over F2[x] (x acting by ``op``) into cyclic blocks.

    Returns sorted ``(bottom degree, length)`` pairs. The degree of ``op`` must
    be negative; elements at the window edges are treated like any others.
    """
    step = -m.ops[op].shift
    if step <= 0:
        raise AlgebraError("operator must lower degree")
    degs = m.degrees()
    if not degs:
        return []
    top = max(degs)
    out = []
    for d in degs:
        kernel = gf2_kernel(m.block(op, d))
        if not kernel:
            continue
        prev = len(kernel)
        length = 1
        while True:
            src = d + step * length
            if src > top:
                count = 0
            else:
                image = m.power_block(op, src, length) if m.dim(src) else []
                count = span_intersection_dim(kernel, image) if image else 0
            out.extend([(d, length)] * (prev - count))
            if count == 0:
                break
            prev = count
            length += 1
    return sorted(out)
