"""Line-oriented text format for modules, presentations, correction data and triangles.

Every document starts with ``module <kind> <name>``. Blank lines and ``#``
comments (at line start or after whitespace) are ignored. Names are single
tokens. Emission is canonical, so ``parse_module(emit_module(x)) == x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .algebra import AlgebraError, RVQ, parse_ring_elem
from .hm_side import StandardUModule, UModuleError
from .standard_module import (
    MODULE_KINDS,
    ROLES_BY_KIND,
    EDGE_MODES,
    TORSION,
    TOWER,
    CorrectionData,
    ModuleError,
    QEdge,
    StandardRModule,
    Summand,
    structural_violations,
    validate,
)
from .surgery import ZERO_KEYS_ARF0, ZERO_KEYS_ARF1, TriangleData, bar_triangle_pattern, trefoil_triangle
from .tor_engine import FPModule, TorError

UMODULE = "umodule"
FP = "fp"
CORR = "corr"
ZERODATA = "zerodata"
TRIANGLE = "triangle"
DOCUMENT_KINDS = MODULE_KINDS + (UMODULE, FP, CORR, ZERODATA, TRIANGLE)

UNKNOWN = "unknown"
CORR_FIELDS = ("alpha", "beta", "gamma", "delta", "Delta", "t")
MAP_NAMES = ("a", "b", "c", "b_previous")

_COMMENT = re.compile(r"(^|\s)#.*$")
_INT = re.compile(r"-?\d+\Z")


class TextFormatError(ValueError):
    """Syntax error at a line and column (both 1-based)."""

    def __init__(self, line: int, column: int, message: str):
        self.line, self.column, self.message = line, column, message
        super().__init__(f"line {line}, column {column}: {message}")


class SemanticError(ValueError):
    """A well-formed document whose content violates an invariant."""


@dataclass(frozen=True)
class ZeroData:
    """Zero-surgery terms of a knot, as consumed by the surgery rules."""

    name: str
    arf: int
    terms: Tuple[Tuple[str, int], ...]
    ambient_delta: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(dict(self.terms).items())))


@dataclass(frozen=True)
class CorrectionDocument:
    name: str
    corr: CorrectionData


@dataclass(frozen=True)
class TriangleSpec:
    """A named triangle pattern plus single-entry flips applied to its maps."""

    name: str
    pattern: str
    arf: int = 0
    parity: int = 0
    mutations: Tuple[Tuple[str, int, int, int], ...] = ()

    def build(self) -> TriangleData:
        t = trefoil_triangle() if self.pattern == "trefoil" else bar_triangle_pattern(self.arf, self.parity)
        for m in self.mutations:
            t = t.mutated(*m)
        return t


Document = Union[StandardRModule, StandardUModule, FPModule, CorrectionDocument, ZeroData, TriangleSpec]


# ---------------------------------------------------------------------------
# parsing


@dataclass
class _Line:
    number: int
    tokens: List[Tuple[int, str]]

    def word(self, i: int) -> str:
        return self.tokens[i][1]

    def col(self, i: int) -> int:
        return self.tokens[min(i, len(self.tokens) - 1)][0]

    def fail(self, i: int, msg: str) -> TextFormatError:
        return TextFormatError(self.number, self.col(i), msg)

    def arity(self, lo: int, hi: Optional[int] = None) -> None:
        hi = lo if hi is None else hi
        n = len(self.tokens) - 1
        if not lo <= n <= hi:
            want = str(lo) if lo == hi else f"{lo} to {hi}"
            msg = f"{self.word(0)} takes {want} arguments, got {n}"
            if n < lo:
                # point just past the last token, where the missing argument belongs
                start, word = self.tokens[-1]
                raise TextFormatError(self.number, start + len(word), msg)
            raise self.fail(hi + 1, msg)

    def integer(self, i: int, allow_unknown: bool = False) -> Optional[int]:
        w = self.word(i)
        if allow_unknown and w == UNKNOWN:
            return None
        if not _INT.match(w):
            raise self.fail(i, f"expected an integer, got {w!r}")
        return int(w)


def _lines(text: str) -> List[_Line]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = _COMMENT.sub("", raw)
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]
        if toks:
            out.append(_Line(n, toks))
    return out


def parse_module(text: str) -> Document:
    """Parse one document; syntax problems raise TextFormatError, invariant violations SemanticError."""
    lines = _lines(text)
    if not lines:
        raise TextFormatError(1, 1, "empty document")
    head = lines[0]
    if head.word(0) != "module":
        raise head.fail(0, f"expected 'module', got {head.word(0)!r}")
    head.arity(2)
    kind, name = head.word(1), head.word(2)
    if kind not in DOCUMENT_KINDS:
        raise head.fail(1, f"unknown document kind {kind!r}; expected one of {', '.join(DOCUMENT_KINDS)}")
    body = lines[1:]
    if kind in MODULE_KINDS:
        return _parse_r_module(kind, name, body)
    return {UMODULE: _parse_u_module, FP: _parse_fp, CORR: _parse_corr, ZERODATA: _parse_zerodata, TRIANGLE: _parse_triangle}[kind](name, body)


def _unexpected(line: _Line, allowed: Tuple[str, ...]) -> TextFormatError:
    return line.fail(0, f"unexpected keyword {line.word(0)!r}; expected one of {', '.join(allowed)}")


def _parse_r_module(kind: str, name: str, body: List[_Line]) -> StandardRModule:
    summands, edges, labels, notes = [], [], [], []
    for ln in body:
        key = ln.word(0)
        try:
            if key == "summand":
                ln.arity(3, 4)
                if ln.word(2) not in (TOWER, TORSION):
                    raise ln.fail(2, f"summand kind must be {TOWER} or {TORSION}, got {ln.word(2)!r}")
                length = ln.integer(4) if len(ln.tokens) == 5 else None
                summands.append(Summand(ln.word(1), ln.word(2), ln.integer(3), length))
            elif key == "qedge":
                ln.arity(3)
                if ln.word(3) not in EDGE_MODES:
                    raise ln.fail(3, f"edge mode must be one of {', '.join(EDGE_MODES)}, got {ln.word(3)!r}")
                edges.append(QEdge(ln.word(1), ln.word(2), ln.word(3)))
            elif key == "label":
                ln.arity(2)
                if ln.word(1) not in ROLES_BY_KIND[kind]:
                    raise ln.fail(1, f"{kind} modules have no role {ln.word(1)!r}")
                labels.append((ln.word(1), ln.word(2)))
            elif key == "note":
                notes.append(" ".join(w for _, w in ln.tokens[1:]))
            else:
                raise _unexpected(ln, ("summand", "qedge", "label", "note"))
        except ModuleError as exc:
            raise ln.fail(1, str(exc)) from None
    if len({r for r, _ in labels}) != len(labels):
        raise SemanticError("a role is labelled twice")
    m = StandardRModule(name, tuple(summands), tuple(edges), tuple(labels), kind, tuple(notes))
    problems = validate(m) if labels else structural_violations(m)
    if problems:
        raise SemanticError(f"module {name}: " + "; ".join(problems))
    return m


def _parse_u_module(name: str, body: List[_Line]) -> StandardUModule:
    tower, blocks = None, []
    for ln in body:
        if ln.word(0) == "tower":
            ln.arity(1)
            if tower is not None:
                raise ln.fail(0, "second tower line")
            tower = ln.integer(1)
        elif ln.word(0) == "block":
            ln.arity(2)
            blocks.append((ln.integer(1), ln.integer(2)))
        else:
            raise _unexpected(ln, ("tower", "block"))
    if tower is None:
        raise SemanticError(f"umodule {name} has no tower")
    try:
        return StandardUModule(tower, tuple(blocks))
    except UModuleError as exc:
        raise SemanticError(str(exc)) from None


def _parse_fp(name: str, body: List[_Line]) -> FPModule:
    gens, rels = [], []
    for ln in body:
        if ln.word(0) == "generator":
            ln.arity(2)
            gens.append((ln.word(1), ln.integer(2)))
        elif ln.word(0) == "relation":
            if len(ln.tokens) < 4:
                raise ln.fail(len(ln.tokens), "relation needs an id, a degree and at least one term")
            entries = []
            for i in range(3, len(ln.tokens)):
                gid, sep, elem = ln.word(i).partition("=")
                if not sep or not gid:
                    raise ln.fail(i, f"expected <generator>=<ring element>, got {ln.word(i)!r}")
                try:
                    entries.append((gid, parse_ring_elem(elem, RVQ)))
                except AlgebraError as exc:
                    raise ln.fail(i, str(exc)) from None
            rels.append((ln.word(1), ln.integer(2), tuple(entries)))
        else:
            raise _unexpected(ln, ("generator", "relation"))
    try:
        return FPModule(name, tuple(gens), tuple(rels))
    except TorError as exc:
        raise SemanticError(f"presentation {name}: {exc}") from None


def _parse_corr(name: str, body: List[_Line]) -> CorrectionDocument:
    values: Dict[str, Optional[int]] = {}
    for ln in body:
        if ln.word(0) not in CORR_FIELDS:
            raise _unexpected(ln, CORR_FIELDS)
        ln.arity(1)
        if ln.word(0) in values:
            raise ln.fail(0, f"{ln.word(0)} given twice")
        values[ln.word(0)] = ln.integer(1, allow_unknown=True)
    try:
        return CorrectionDocument(name, CorrectionData(**{k: values.get(k) for k in CORR_FIELDS}))
    except ModuleError as exc:
        raise SemanticError(str(exc)) from None


def _parse_zerodata(name: str, body: List[_Line]) -> ZeroData:
    arf, ambient, terms = None, 0, {}
    allowed = set(ZERO_KEYS_ARF0) | {"delta_plus", "delta_minus"}
    for ln in body:
        key = ln.word(0)
        if key == "arf":
            ln.arity(1)
            arf = ln.integer(1)
            if arf not in (0, 1):
                raise ln.fail(1, "arf must be 0 or 1")
        elif key == "ambient_delta":
            ln.arity(1)
            ambient = ln.integer(1)
        elif key == "term":
            ln.arity(2)
            if ln.word(1) not in allowed:
                raise ln.fail(1, f"unknown zero-surgery term {ln.word(1)!r}")
            terms[ln.word(1)] = ln.integer(2)
        else:
            raise _unexpected(ln, ("arf", "ambient_delta", "term"))
    if arf is None:
        raise SemanticError(f"zerodata {name} has no arf line")
    need = set(ZERO_KEYS_ARF0 if arf == 0 else ZERO_KEYS_ARF1)
    have = set(terms) - {"delta_plus", "delta_minus"}
    if have and have != need:
        raise SemanticError(f"Arf {arf} zero data needs terms {sorted(need)}, got {sorted(have)}")
    return ZeroData(name, arf, tuple(terms.items()), ambient)


def _parse_triangle(name: str, body: List[_Line]) -> TriangleSpec:
    pattern, arf, parity, muts = None, 0, 0, []
    for ln in body:
        if ln.word(0) == "pattern":
            if len(ln.tokens) == 2 and ln.word(1) == "trefoil":
                pattern = "trefoil"
            elif len(ln.tokens) == 4 and ln.word(1) == "bar":
                pattern, arf, parity = "bar", ln.integer(2), ln.integer(3)
                if arf not in (0, 1) or parity not in (0, 1):
                    raise ln.fail(2, "bar patterns take an arf bit and a parity bit")
            else:
                raise ln.fail(1, "expected 'pattern trefoil' or 'pattern bar <arf> <parity>'")
        elif ln.word(0) == "mutate":
            ln.arity(4)
            if ln.word(1) not in MAP_NAMES:
                raise ln.fail(1, f"unknown map {ln.word(1)!r}; expected one of {', '.join(MAP_NAMES)}")
            muts.append((ln.word(1), ln.integer(2), ln.integer(3), ln.integer(4)))
        else:
            raise _unexpected(ln, ("pattern", "mutate"))
    if pattern is None:
        raise SemanticError(f"triangle {name} has no pattern line")
    return TriangleSpec(name, pattern, arf, parity, tuple(muts))


# ---------------------------------------------------------------------------
# emission


def _fmt(x: Optional[int]) -> str:
    return UNKNOWN if x is None else str(x)


def _check_token(s: str, what: str) -> str:
    if not s or re.search(r"\s", s) or s.startswith("#"):
        raise SemanticError(f"{what} {s!r} must be a single token not starting with '#'")
    return s


def emit_module(obj: Document, name: str = "hm") -> str:
    """Canonical text of ``obj``; ``name`` is used for F[U]-modules, which carry none."""
    if isinstance(obj, StandardRModule):
        lines = [f"module {obj.kind} {_check_token(obj.name, 'name')}"]
        for s in obj.summands:
            tail = "" if s.length is None else f" {s.length}"
            lines.append(f"summand {_check_token(s.id, 'summand id')} {s.kind} {s.bottom}{tail}")
        lines += [f"qedge {e.source} {e.target} {e.mode}" for e in obj.q_edges]
        lines += [f"label {r} {i}" for r, i in obj.labels]
        for n in obj.notes:
            if _COMMENT.search(n) or "\n" in n:
                raise SemanticError(f"note {n!r} would not survive a round trip")
            lines.append(f"note {n}")
    elif isinstance(obj, StandardUModule):
        lines = [f"module {UMODULE} {_check_token(name, 'name')}", f"tower {obj.tower_bottom}"]
        lines += [f"block {b} {n}" for b, n in obj.blocks]
    elif isinstance(obj, FPModule):
        lines = [f"module {FP} {_check_token(obj.name, 'name')}"]
        lines += [f"generator {g} {d}" for g, d in obj.generators]
        for rid, deg, entries in obj.relations:
            lines.append(f"relation {rid} {deg} " + " ".join(f"{g}={c}" for g, c in entries))
    elif isinstance(obj, CorrectionDocument):
        lines = [f"module {CORR} {_check_token(obj.name, 'name')}"]
        lines += [f"{k} {_fmt(getattr(obj.corr, k))}" for k in CORR_FIELDS]
    elif isinstance(obj, ZeroData):
        lines = [f"module {ZERODATA} {_check_token(obj.name, 'name')}", f"arf {obj.arf}", f"ambient_delta {obj.ambient_delta}"]
        lines += [f"term {k} {v}" for k, v in obj.terms]
    elif isinstance(obj, TriangleSpec):
        lines = [f"module {TRIANGLE} {_check_token(obj.name, 'name')}"]
        lines.append("pattern trefoil" if obj.pattern == "trefoil" else f"pattern bar {obj.arf} {obj.parity}")
        lines += [f"mutate {w} {d} {c} {r}" for w, d, c, r in obj.mutations]
    else:
        raise TypeError(f"cannot emit {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def read_document(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_module(fh.read())
