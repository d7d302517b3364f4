"""Built-in examples and the consistency checks run over them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .hm_side import (
    StandardUModule,
    calibrate_constant,
    connected_sum_hm,
    connected_sum_hm_oracle,
    delta_and_t,
    genus_bound_check,
    gysin_dimension_check,
    gysin_minimal_hm,
)
from .standard_module import (
    SPHERE,
    ZERO_ARF0,
    ZERO_ARF1,
    CorrectionData,
    StandardRModule,
    correction_terms,
    delta_invariant,
    lspace_check,
    lspace_module,
    mk_module,
    rebase_arf0,
    s3_module,
    validate,
    zero_surgery_module,
    zero_surgery_terms,
)
from .surgery import (
    SurgeryError,
    SurgerySpec,
    bar_triangle_pattern,
    even_surgery_from_knot,
    even_surgery_terms,
    minus_terms_check,
    mutation_kill_rate,
    odd_surgery_terms,
    trefoil_triangle,
    verify_triangle,
)
from .tor_engine import (
    geography_realize,
    mk_dual_matches,
    simple_type_sum,
    simple_type_sum_from_tor,
    stacked_relations,
    stacked_sum_structure,
    tor1_residue_check,
)

MAX_K = 4

# flags
LSPACE = "lspace"
SIMPLE_TYPE = "simple_type"
NO_MASSEY = "no_massey"
SOURCE = "source"
STATED = "stated"
DERIVED = "derived"
CANONICAL_BASIS = "canonical_basis"
# symbolic parameters: name -> what it stands for; no check may read a value for them
SYMBOLIC = "symbolic"

T27_ONSETS = {
    "bottom_alpha": -1,
    "bottom_beta": 0,
    "bottom_gamma": 1,
    "top_alpha": -4,
    "top_beta": -3,
    "top_gamma": -2,
}
T27_SECOND_BASIS = {
    "bottom_alpha": -1,
    "bottom_beta": -4,
    "bottom_gamma": -3,
    "top_alpha": 0,
    "top_beta": 1,
    "top_gamma": -2,
}
# new gamma generators of the second splitting, as sums of reference towers
T27_SECOND_GAMMAS = (frozenset({"bottom_gamma", "top_beta"}), frozenset({"top_gamma"}))


@dataclass(frozen=True)
class CatalogEntry:
    """A worked example: whichever of HS, HM, correction data and zero-surgery terms are known."""

    name: str
    description: str
    corr: Optional[CorrectionData] = None
    hs: Optional[StandardRModule] = None
    hm: Optional[StandardUModule] = None
    zero_terms: Optional[Tuple[Tuple[str, int], ...]] = None
    provenance: Tuple[str, ...] = ()
    flags: Tuple[Tuple[str, object], ...] = ()

    @property
    def flag_map(self) -> Dict[str, object]:
        return dict(self.flags)

    @property
    def arf(self) -> Optional[int]:
        if self.hs is None or self.hs.kind == SPHERE:
            return None
        return 0 if self.hs.kind == ZERO_ARF0 else 1

    def as_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"name": self.name, "description": self.description}
        if self.corr is not None:
            out["corr"] = self.corr.as_dict()
        if self.hm is not None:
            out["hm"] = {"tower_bottom": self.hm.tower_bottom, "blocks": [list(b) for b in self.hm.blocks]}
        if self.zero_terms is not None:
            out["zero_terms"] = dict(self.zero_terms)
        out["flags"] = {k: v for k, v in self.flags}
        out["provenance"] = list(self.provenance)
        return out


def _sphere_entry(name, description, hs, hm, corr, provenance, **flags) -> CatalogEntry:
    return CatalogEntry(name, description, corr, hs, hm, None, tuple(provenance), tuple(sorted(flags.items())))


def _zero_entry(name, description, kind, bottoms, provenance, extra=None, **flags) -> CatalogEntry:
    hs = zero_surgery_module(kind, bottoms, name)
    terms = dict(zero_surgery_terms(hs))
    terms.update(extra or {})
    return CatalogEntry(name, description, None, hs, None, tuple(sorted(terms.items())), tuple(provenance), tuple(sorted(flags.items())))


def _y_k(k: int) -> CatalogEntry:
    hs = mk_module(k, name=f"Y_{k}")
    return _sphere_entry(
        f"Y_{k}_simple_type",
        f"-1 surgery on T(2,{8 * k - 1}); HS-to of simple type M_{k}",
        hs,
        gysin_minimal_hm(hs),
        CorrectionData(0, -2 * k, -2 * k, delta=0, Delta=0, t=2 * k),
        [
            "HS-to: stated as M_k plus a summand with no Massey products",
            "HM-to: smallest module allowed by the Gysin identity",
            "zero-surgery torsion F^m_k<-4n> left symbolic",
        ],
        **{SIMPLE_TYPE: k, NO_MASSEY: True, SOURCE: STATED, SYMBOLIC: "m_k"},
    )


def _sum_entry(k: int, kp: int) -> CatalogEntry:
    y, yp = _y_k(k), _y_k(kp)
    hm = connected_sum_hm(y.hm, yp.hm)
    delta, t = delta_and_t(hm)
    base = simple_type_sum(k, kp)
    return _sphere_entry(
        f"Y_{k}#Y_{kp}",
        f"connected sum of the simple-type examples with k = {k}, k' = {kp}",
        None,
        hm,
        CorrectionData(base.alpha, base.beta, base.gamma, delta=delta, t=t),
        ["correction terms: the simple-type sum rule", "HM-to: graded Kunneth formula"],
        **{SOURCE: DERIVED, NO_MASSEY: True},
    )


def _build() -> List[CatalogEntry]:
    entries = [
        _sphere_entry(
            "S3",
            "the three-sphere",
            s3_module(),
            StandardUModule(0),
            CorrectionData(0, 0, 0, delta=0, Delta=0, t=0),
            ["HS-to = V+_2 + V+_1 + V+_0 with Q an isomorphism between consecutive towers"],
            **{LSPACE: True, SOURCE: STATED},
        ),
        _sphere_entry(
            "S3#P",
            "S3 shifted by the Poincare sphere: every correction term moves by -1",
            lspace_module(-1, name="S3#P"),
            StandardUModule(-2),
            CorrectionData(-1, -1, -1, delta=-1, Delta=-1, t=0),
            ["grading shift by -2 of the S3 module"],
            **{LSPACE: True, SOURCE: STATED},
        ),
        _sphere_entry(
            "trefoil_plus1",
            "+1 surgery on the right-handed trefoil",
            lspace_module(-1, name="trefoil_plus1"),
            StandardUModule(-2),
            CorrectionData(-1, -1, -1, delta=-1, Delta=-1, t=0),
            ["alpha, beta from the Arf 1 odd-surgery rule with the trefoil top terms", "the third tower of the trefoil triangle"],
            **{LSPACE: True, SOURCE: DERIVED},
        ),
        _sphere_entry(
            "trefoil_minus1",
            "-1 surgery on the right-handed trefoil, from the mirror problem",
            None,
            None,
            CorrectionData(None, 0, 0),
            ["beta, gamma from the Arf 1 rule applied to the mirror; alpha is not determined"],
            **{SOURCE: DERIVED},
        ),
        _zero_entry(
            "trefoil_zero_surgery",
            "zero surgery on the trefoil (Arf 1): (V+_1 + V+_0) + (V+_-1 + V+_-2)",
            ZERO_ARF1,
            {"bottom_gamma": 1, "bottom_beta": 0, "top_beta": -1, "top_alpha": -2},
            ["tower bottoms stated"],
            **{SOURCE: STATED, CANONICAL_BASIS: True},
        ),
        _zero_entry(
            "S2xS1",
            "zero surgery on the unknot; all zero-surgery terms vanish by normalization",
            ZERO_ARF0,
            {"bottom_alpha": -1, "bottom_beta": 0, "bottom_gamma": 1, "top_alpha": 0, "top_beta": 1, "top_gamma": 2},
            ["normalization"],
            extra={"delta_plus": 0, "delta_minus": 0},
            **{SOURCE: STATED, CANONICAL_BASIS: True},
        ),
        _zero_entry(
            "T27_zero_surgery",
            "zero surgery on T(2,7) in the reference splitting",
            ZERO_ARF0,
            T27_ONSETS,
            ["tower bottoms of the reference splitting"],
            **{SOURCE: STATED, CANONICAL_BASIS: True},
        ),
        _zero_entry(
            "T27_zero_surgery_basis2",
            "zero surgery on T(2,7) in the second splitting",
            ZERO_ARF0,
            T27_SECOND_BASIS,
            [
                "tower bottoms of the second splitting; reproduced by rebasing the reference splitting",
                "the stated value -1 for gamma_- is the top term gamma_+ here",
            ],
            **{SOURCE: STATED},
        ),
    ]
    entries.extend(_y_k(k) for k in range(1, MAX_K + 1))
    entries.extend(_sum_entry(k, kp) for k, kp in ((1, 1), (2, 1), (2, 2)))
    return sorted(entries, key=lambda e: e.name)


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _run(name: str, fn: Callable[[], object]) -> CheckResult:
    """Run ``fn``; True or None passes, False or a string fails, exceptions fail with their message."""
    try:
        res = fn()
    except (ValueError, AssertionError) as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    if res is True or res is None:
        return CheckResult(name, True)
    return CheckResult(name, False, str(res) if res is not False else "check returned false")


def _entry_checks(e: CatalogEntry, params: Mapping[str, int]) -> List[Tuple[str, Callable[[], object]]]:
    # params carries values for symbolic parameters; nothing below may consult it
    del params
    checks: List[Tuple[str, Callable[[], object]]] = []
    if e.hs is not None:
        checks.append(("valid", lambda: validate(e.hs) or True))
    if e.hs is not None and e.hs.kind == SPHERE and e.corr is not None:
        checks.append(("corr", lambda: correction_terms(e.hs).abg == e.corr.abg or f"{correction_terms(e.hs).abg} != {e.corr.abg}"))
        if e.flag_map.get(LSPACE):
            checks.append(("lspace", lambda: lspace_check(e.hs)))
    if e.hm is not None and e.corr is not None and e.corr.delta is not None:
        checks.append(("delta_t", lambda: delta_and_t(e.hm) == (e.corr.delta, e.corr.t) or f"{delta_and_t(e.hm)}"))
    if e.hs is not None and e.hm is not None:
        checks.append(("gysin", lambda: gysin_dimension_check(e.hs, e.hm)))
        checks.append(("dp1", lambda: delta_invariant(e.hs, delta_and_t(e.hm)[0]) == e.corr.Delta))
    if e.zero_terms is not None:
        want = {k: v for k, v in e.zero_terms if not k.startswith("delta")}
        checks.append(("zero_terms", lambda: zero_surgery_terms(e.hs) == want))
    return checks


def entry_checks(e: CatalogEntry) -> List[CheckResult]:
    """All consistency checks of a single entry."""
    out = [_run(f"{e.name}:{n}", fn) for n, fn in _entry_checks(e, {})]
    symbol = e.flag_map.get(SYMBOLIC)
    if symbol:
        runs = [[r.ok for r in (_run(n, fn) for n, fn in _entry_checks(e, {symbol: v}))] for v in (0, 1, 7)]
        out.append(CheckResult(f"{e.name}:independent_of_{symbol}", all(r == runs[0] for r in runs)))
    return out


def load_catalog() -> List[CatalogEntry]:
    """All built-in entries, sorted by name; corrupted data raises AssertionError."""
    entries = _build()
    for e in entries:
        bad = [r for r in entry_checks(e) if not r.ok]
        assert not bad, f"catalog entry {e.name} fails: " + "; ".join(f"{r.name} ({r.detail})" for r in bad)
    return entries


def get_entry(name: str, entries: Optional[Sequence[CatalogEntry]] = None) -> CatalogEntry:
    for e in entries if entries is not None else _build():
        if e.name == name:
            return e
    raise KeyError(name)


# ---------------------------------------------------------------------------
# sums of entries


def sum_correction(entries: Sequence[CatalogEntry]) -> CorrectionData:
    """Correction data of a connected sum of L-spaces and simple-type examples.

    delta adds and t is the maximum whenever every HM-to is known. The three
    terms are known only if each summand is an L-space or of simple type: the
    two largest simple-type parameters k >= k' give (0, -2k, -2(k + k')),
    shifted by the L-space deltas.
    """
    hms = [e.hm for e in entries]
    delta = t = None
    if all(h is not None for h in hms):
        total = hms[0]
        for h in hms[1:]:
            total = connected_sum_hm(total, h)
        delta, t = delta_and_t(total)
    shift, ks = 0, []
    for e in entries:
        f = e.flag_map
        if f.get(LSPACE) and e.corr is not None:
            shift += e.corr.alpha
        elif f.get(SIMPLE_TYPE):
            ks.append(int(f[SIMPLE_TYPE]))
        else:
            return CorrectionData(None, None, None, delta=delta, t=t)
    ks.sort(reverse=True)
    k = ks[0] if ks else 0
    kp = ks[1] if len(ks) > 1 else 0
    return CorrectionData(shift, shift - 2 * k, shift - 2 * (k + kp), delta=delta, t=t)


# ---------------------------------------------------------------------------
# cross-engine consistency


def _even_surgery_agreement() -> object:
    bad = []
    for amb in range(-2, 3):
        for dp in range(-5, 4):
            for m in (2, 4, -2):
                spec = SurgerySpec(amb, 0, m, (("delta_plus", dp), ("delta_minus", dp)))
                try:
                    got = even_surgery_from_knot(spec)
                except SurgeryError:
                    got = None
                if m < 0:
                    continue
                dprime = dp if (dp - amb) % 2 == 0 else dp - 1
                try:
                    direct = even_surgery_terms(dprime, "+", amb)
                except SurgeryError:
                    direct = None
                if got != direct:
                    bad.append((amb, dp, m, got, direct))
    return not bad or f"disagreements: {bad[:3]}"


def _tor_agreement() -> object:
    bad = [(k, kp) for k in range(1, MAX_K + 1) for kp in range(1, k + 1) if simple_type_sum_from_tor(k, kp) != simple_type_sum(k, kp).abg]
    return not bad or f"disagreements at {bad}"


def _tor1_residues() -> object:
    bad = [(k, kp) for k in range(1, MAX_K + 1) for kp in range(1, k + 1) if not tor1_residue_check(k, kp)["avoids_tower_residues"]]
    return not bad or f"Tor_1 meets a tower residue at {bad}"


def _hm_oracle(entries: Sequence[CatalogEntry]) -> object:
    hms = [e.hm for e in entries if e.hm is not None]
    bad = []
    for i, a in enumerate(hms):
        for b in hms[i:]:
            if connected_sum_hm(a, b) != connected_sum_hm_oracle(a, b):
                bad.append((a, b))
    return not bad or f"{len(bad)} disagreements"


def _triangles() -> object:
    ts = [trefoil_triangle()] + [bar_triangle_pattern(a, p) for a in (0, 1) for p in (0, 1)]
    failed = {t.name: verify_triangle(t).failures() for t in ts if not verify_triangle(t).passed}
    return not failed or str(failed)


def _mutations() -> object:
    killed, total = mutation_kill_rate(trefoil_triangle(), 20)
    return killed == total or f"{killed}/{total} mutants killed"


def _geography() -> object:
    for a, b, c in ((0, -2, -4), (2, 0, -2), (-1, -3, -3), (3, -1, -3), (0, 0, 0)):
        geography_realize(a, b, c)
    return True


def _genus_bound(entries: Sequence[CatalogEntry]) -> object:
    data = [e.corr for e in entries if e.corr is not None and e.corr.t]
    c = calibrate_constant(data)
    bad = [d for d in data if not genus_bound_check(d, d.t, c)[0]]
    return not bad or f"constant {c} fails for {bad}"


def _sums(entries: Sequence[CatalogEntry]) -> object:
    by = {e.name: e for e in entries}
    bad = []
    for name, parts in (("Y_1#Y_1", ("Y_1_simple_type",) * 2), ("Y_2#Y_1", ("Y_2_simple_type", "Y_1_simple_type")), ("Y_2#Y_2", ("Y_2_simple_type",) * 2)):
        got = sum_correction([by[p] for p in parts])
        if got != by[name].corr:
            bad.append((name, got))
    s3p = sum_correction([by["S3#P"], by["Y_1_simple_type"]])
    if s3p.abg != (-1, -3, -3) or s3p.delta != -1:
        bad.append(("S3#P#Y_1", s3p))
    return not bad or str(bad)


def _rebase() -> object:
    got = rebase_arf0(T27_ONSETS, *T27_SECOND_GAMMAS)
    want = zero_surgery_terms(zero_surgery_module(ZERO_ARF0, T27_SECOND_BASIS, "t27b2"))
    return got == want or f"{got} != {want}"


def _odd_surgeries(entries: Sequence[CatalogEntry]) -> object:
    by = {e.name: e for e in entries}
    tre = SurgerySpec(0, 1, 1, by["trefoil_zero_surgery"].zero_terms)
    t27 = SurgerySpec(0, 0, 3, tuple((k, v) for k, v in by["T27_zero_surgery_basis2"].zero_terms))
    got = {
        "trefoil_plus1": odd_surgery_terms(tre),
        "trefoil_minus1": odd_surgery_terms(SurgerySpec(0, 1, -1, tre.zero_data)),
        "t27_m3": odd_surgery_terms(t27),
    }
    want = {"trefoil_plus1": (-1, -1, None), "trefoil_minus1": (None, 0, 0), "t27_m3": (0, 0, -2)}
    if got != want:
        return f"{got} != {want}"
    # stored entries may know more than the rule, never something different
    for name in ("trefoil_plus1", "trefoil_minus1"):
        stored = by[name].corr.abg
        if any(g is not None and g != s for g, s in zip(got[name], stored)):
            return f"{name}: rule gives {got[name]}, entry stores {stored}"
    return True


def _minus_terms(entries: Sequence[CatalogEntry]) -> object:
    bad = []
    for e in entries:
        if e.zero_terms is None or not e.flag_map.get(CANONICAL_BASIS):
            continue
        if not minus_terms_check(SurgerySpec(0, e.arf, 1, e.zero_terms)):
            bad.append(e.name)
    return not bad or f"fails for {bad}"


def _stacked() -> object:
    bad = {ks: stacked_relations(stacked_sum_structure(ks)) for ks in ((2, 1, 1), (3, 2, 1), (2, 2, 1, 1))}
    bad = {k: v for k, v in bad.items() if v}
    return not bad or str(bad)


def _round_trips(entries: Sequence[CatalogEntry]) -> object:
    from .textio import emit_module, parse_module

    bad = []
    for e in entries:
        for obj in (e.hs, e.hm):
            if obj is not None and parse_module(emit_module(obj)) != obj:
                bad.append(e.name)
    return not bad or f"round trip fails for {bad}"


def cross_checks(entries: Sequence[CatalogEntry]) -> List[CheckResult]:
    checks = [
        ("even_surgery_vs_delta_plus", _even_surgery_agreement),
        ("simple_type_sum_vs_tor", _tor_agreement),
        ("tor1_avoids_tower_residues", _tor1_residues),
        ("mk_presentation_matches_dual", lambda: all(mk_dual_matches(k) for k in range(1, MAX_K + 1))),
        ("hm_sum_vs_oracle", lambda: _hm_oracle(entries)),
        ("triangles", _triangles),
        ("triangle_mutations", _mutations),
        ("geography", _geography),
        ("genus_bound", lambda: _genus_bound(entries)),
        ("connected_sums", lambda: _sums(entries)),
        ("t27_rebase", _rebase),
        ("odd_surgeries", lambda: _odd_surgeries(entries)),
        ("minus_terms", lambda: _minus_terms(entries)),
        ("stacked_sums", _stacked),
        ("round_trips", lambda: _round_trips(entries)),
    ]
    return [_run(f"cross:{name}", fn) for name, fn in checks]


def check_all() -> List[CheckResult]:
    """Every entry check followed by every cross-engine check, in a fixed order."""
    entries = _build()
    out: List[CheckResult] = []
    for e in entries:
        out.extend(entry_checks(e))
    out.extend(cross_checks(entries))
    return out
