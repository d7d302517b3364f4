"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the bare list of lines, or
``pytest tests/test_acceptance.py -v`` for the same lines inside pytest.
"""

from __future__ import annotations

import io
import itertools
import random
import time

import pytest

from pin2corr.catalog import load_catalog
from pin2corr.cli import main
from pin2corr.hm_side import (
    StandardUModule,
    connected_sum_hm,
    connected_sum_hm_oracle,
    delta_and_t,
    ungraded_tor_lengths,
)
from pin2corr.standard_module import (
    ZERO_ARF0,
    ZERO_ARF1,
    ModuleError,
    delta_invariant,
    dp1_branch,
    correction_terms,
    validate,
    zero_surgery_module,
    zero_surgery_terms,
)
from pin2corr.surgery import (
    SurgeryError,
    bar_triangle_pattern,
    even_surgery_terms,
    mutation_kill_rate,
    order_two_check,
    order_two_symmetry,
    trefoil_triangle,
    verify_triangle,
    whitehead_double_terms,
)
from pin2corr.tor_engine import (
    TorError,
    geography_realize,
    mk_dual_presentation,
    simple_type_sum,
    tor_r,
)


def _report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail and not ok:
        line += f"  [{detail}]"
    print(line)


# ---------------------------------------------------------------------------
# the criteria, each returning (ok, detail)


def criterion_1():
    out = io.StringIO()
    code = main(["--format", "json", "corr", "S3"], out=out)
    import json

    rep = json.loads(out.getvalue())
    got = ((rep["alpha"], rep["beta"], rep["gamma"]), (rep["bottoms"]["a"], rep["bottoms"]["b"], rep["bottoms"]["c"]))
    return code == 0 and got == ((0, 0, 0), (0, 1, 2)), f"exit {code}, got {got}"


# the operation's listed examples, checked as written
EVEN_SURGERY_CASES = {
    (0, "+"): (0, 0, 0),
    (1, "+"): (1, 1, 0),
    (1, "-"): (2, 1, 1),
}


def criterion_2():
    problems = []
    for dp, sign in itertools.product(range(-2, 3), "+-"):
        try:
            a, b, c = even_surgery_terms(dp, sign)
        except SurgeryError as exc:
            problems.append(f"({dp},{sign}) rejected: {exc}")
            continue
        if len({a, b, c}) != 2:
            problems.append(f"({dp},{sign}) -> {(a, b, c)} does not have exactly two equal terms")
        if not (a >= b >= c and a % 2 == b % 2 == c % 2):
            problems.append(f"({dp},{sign}) -> {(a, b, c)} breaks ordering or parity")
    for (dp, sign), want in EVEN_SURGERY_CASES.items():
        try:
            got = even_surgery_terms(dp, sign)
        except SurgeryError as exc:
            got = str(exc)
        if got != want:
            problems.append(f"({dp},{sign}) -> {got}, expected {want}")
    return not problems, "; ".join(problems)


def criterion_3():
    got = {d: whitehead_double_terms(d) for d in (0, -1, -2)}
    want = {0: (0, 0, 0), -1: (0, 0, -2), -2: (0, 0, -2)}
    return got == want, f"{got}"


def _tor_dims_from_closed_form(k, kp, lo, hi):
    """Degreewise dimensions of Tor_0 and Tor_1 of M_k*, M_k'* from the stated summands."""
    towers = (0, 1 - 4 * kp, 2 - 4 * (k + kp))
    blocks0 = ((3 - 4 * (k + kp), k + kp), (2 - 4 * kp, kp), (5 - 4 * (k + kp), kp))
    blocks1 = ((2 - 4 * (k + kp), kp),)
    t0, t1 = {}, {}
    for top in towers:
        for d in range(top, lo - 1, -4):
            if d <= hi:
                t0[d] = t0.get(d, 0) + 1
    for table, blocks in ((t0, blocks0), (t1, blocks1)):
        for bottom, n in blocks:
            for j in range(n):
                d = bottom + 4 * j
                if lo <= d <= hi:
                    table[d] = table.get(d, 0) + 1
    return t0, t1


def criterion_4():
    lo, hi = -24, 8
    tor = tor_r(mk_dual_presentation(1), mk_dual_presentation(1), lo, hi)
    want0, want1 = _tor_dims_from_closed_form(1, 1, lo, hi)
    got0 = {d: n for d, n in tor.dims(0).items() if n}
    got1 = {d: n for d, n in tor.dims(1).items() if n}
    corr = simple_type_sum(1, 1)
    ok = got0 == want0 and got1 == want1 and got1 == {-6: 1}
    ok = ok and (corr.alpha, corr.beta, corr.gamma, corr.delta) == (0, -2, -4, 0)
    return ok, f"Tor_0 {got0} vs {want0}; Tor_1 {got1}; sum {corr.abg}"


def _geography_ok(a, b, c):
    return (a - b) % 2 == 0 and (b - c) % 2 == 0 and a >= b >= c and a - b >= b - c


def criterion_5():
    bad = []
    rng = range(-6, 7)
    for a, b, c in itertools.product(rng, rng, rng):
        if _geography_ok(a, b, c):
            try:
                geography_realize(a, b, c)
            except TorError as exc:
                bad.append(f"{(a, b, c)} not realized: {exc}")
        else:
            try:
                geography_realize(a, b, c)
                bad.append(f"{(a, b, c)} accepted")
            except TorError:
                pass
    return not bad, "; ".join(bad[:5])


def criterion_6():
    bad = []
    for n, m in itertools.product(range(1, 7), repeat=2):
        x = StandardUModule(0, ((1 - 2 * n, n),))
        y = StandardUModule(-2, ((3 - 2 * m, m),))
        if connected_sum_hm(x, y) != connected_sum_hm_oracle(x, y):
            bad.append(f"graded ({n},{m})")
        bx, by = StandardUModule(0, ((1, n),)), StandardUModule(0, ((1, m),))
        s = connected_sum_hm(bx, by)
        # the block-by-block part of the sum, without the tower-times-block copies
        cross = sorted(s.lengths)
        for length in (n, m):
            cross.remove(length)
        if cross != sorted(ungraded_tor_lengths(n, m)) or ungraded_tor_lengths(n, m) != [min(n, m)] * 2:
            bad.append(f"ungraded ({n},{m}): {cross}")
    rand = random.Random(2024)
    for _ in range(100):
        def profile():
            blocks = tuple((rand.randrange(-15, 6, 2), rand.randint(1, 5)) for _ in range(rand.randint(0, 2)))
            return StandardUModule(2 * rand.randint(-3, 3), blocks)

        x, y = profile(), profile()
        dx, tx = delta_and_t(x)
        dy, ty = delta_and_t(y)
        if delta_and_t(connected_sum_hm(x, y)) != (dx + dy, max(tx, ty)):
            bad.append(f"t/delta for {x} # {y}")
    return not bad, "; ".join(bad[:5])


def criterion_7():
    triangles = [trefoil_triangle()] + [bar_triangle_pattern(a, p) for a in (0, 1) for p in (0, 1)]
    failing = [t.name for t in triangles if not verify_triangle(t).passed]
    killed, total = mutation_kill_rate(trefoil_triangle(), 20)
    return not failing and killed == total == 20, f"failing {failing}, killed {killed}/{total}"


def criterion_8():
    bad, seen = [], 0
    for e in load_catalog():
        if e.hs is None or e.hm is None:
            continue
        seen += 1
        delta = delta_and_t(e.hm)[0]
        mu = correction_terms(e.hs).mu
        if delta_invariant(e.hs) != dp1_branch(delta, mu):
            bad.append(e.name)
    return seen >= 6 and not bad, f"{seen} entries, failing {bad}"


def _zero_modules_with_positive_beta_plus():
    """All valid zero-surgery modules with bottoms in a small box and beta_+ > 0."""
    out = []
    rng = range(-3, 6)
    for ta, tb in itertools.product(rng, rng):
        for kind, bottoms in (
            (ZERO_ARF1, {"bottom_beta": 0, "bottom_gamma": 1, "top_alpha": ta, "top_beta": tb}),
            (ZERO_ARF0, {"bottom_alpha": -1, "bottom_beta": 0, "bottom_gamma": 1, "top_alpha": ta, "top_beta": tb, "top_gamma": tb + 1}),
        ):
            try:
                m = zero_surgery_module(kind, bottoms, "z")
                if validate(m):
                    continue
                terms = zero_surgery_terms(m)
            except ModuleError:
                continue
            if terms["beta_plus"] > 0:
                out.append(terms)
    return out


def criterion_9():
    ok = order_two_check(0, 5) and not order_two_check(-1, 2) and order_two_check(-3, -1)
    ok = ok and all(order_two_symmetry(order_two_symmetry(b)) == b for b in range(-10, 11))
    ok = ok and order_two_symmetry(0) == 0 and order_two_symmetry(2) == -2
    data = _zero_modules_with_positive_beta_plus()
    forced = all(t["alpha_plus"] >= t["beta_plus"] > 0 for t in data)
    return ok and forced and len(data) > 0, f"{len(data)} zero modules with beta_+ > 0"


def criterion_10():
    start = time.perf_counter()
    out = io.StringIO()
    code = main(["check-all"], out=out)
    elapsed = time.perf_counter() - start
    failed = [ln for ln in out.getvalue().splitlines() if "\tfalse\t" in ln]
    return code == 0 and elapsed < 10, f"exit {code}, {elapsed:.2f}s, failing {failed[:3]}"


CRITERIA = [
    (1, "S3 baseline through the corr command", criterion_1),
    (2, "even-surgery table", criterion_2),
    (3, "Whitehead double values", criterion_3),
    (4, "Tor of M_1* with itself and the simple-type sum", criterion_4),
    (5, "geography realization and rejection", criterion_5),
    (6, "HM connected sum against the brute-force oracle", criterion_6),
    (7, "triangle law and mutation detection", criterion_7),
    (8, "Delta branch formula on catalog entries", criterion_8),
    (9, "order-two constraint", criterion_9),
    (10, "check-all", criterion_10),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_acceptance(number, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print()
        _report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        _report(number, title, ok, detail)
