import pytest
from dataclasses import replace
from hypothesis import given, strategies as st

from pin2corr.standard_module import CorrectionData
from pin2corr.surgery import (
    SURGERED,
    SurgeryError,
    SurgerySpec,
    bar_triangle_pattern,
    even_surgery_from_knot,
    even_surgery_terms,
    minus_terms_check,
    mutants,
    mutation_kill_rate,
    odd_surgery_terms,
    order_two_check,
    order_two_symmetry,
    trefoil_triangle,
    verify_triangle,
    weak_even_surgery_check,
    whitehead_double_terms,
)


@pytest.mark.parametrize(
    "dp,sign,want",
    [(0, "+", (0, 0, 0)), (1, "+", (0, 0, 0)), (-1, "+", (0, 0, -2)), (-2, "+", (0, 0, -2)),
     (0, "-", (0, 0, 0)), (1, "-", (2, 0, 0)), (2, "-", (2, 0, 0)), (-1, "-", (0, 0, 0))],
)
def test_even_surgery_with_sphere_ambient(dp, sign, want):
    assert even_surgery_terms(dp, sign) == want


@pytest.mark.parametrize("dp,sign", [(2, "+"), (-2, "-")])
def test_even_surgery_rejects_misordered_output(dp, sign):
    with pytest.raises(SurgeryError):
        even_surgery_terms(dp, sign)


def test_surgered_reading_is_available():
    assert even_surgery_terms(1, "+", reading=SURGERED) == (1, 1, 0)
    assert even_surgery_terms(1, "-", reading=SURGERED) == (2, 1, 1)


@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from("+-"))
def test_even_surgery_outputs_share_parity_with_ambient(amb, dp, sign):
    try:
        a, b, c = even_surgery_terms(dp, sign, ambient_delta=amb)
    except SurgeryError:
        return
    assert a >= b >= c
    assert a % 2 == b % 2 == c % 2 == amb % 2


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_plus_and_minus_are_mirror_images(amb, dp):
    try:
        plus = even_surgery_terms(dp, "+", ambient_delta=amb)
    except SurgeryError:
        with pytest.raises(SurgeryError):
            even_surgery_terms(-dp, "-", ambient_delta=-amb)
        return
    a, b, c = even_surgery_terms(-dp, "-", ambient_delta=-amb)
    assert plus == (-c, -b, -a)


def test_unknown_sign():
    with pytest.raises(SurgeryError):
        even_surgery_terms(0, "*")


@pytest.mark.parametrize("dk,want", [(0, (0, 0, 0)), (-1, (0, 0, -2)), (-2, (0, 0, -2)), (-5, (0, 0, -6))])
def test_whitehead(dk, want):
    assert whitehead_double_terms(dk) == want


def test_whitehead_rejects_positive_gamma():
    with pytest.raises(SurgeryError):
        whitehead_double_terms(3)


T27_DATA = {"alpha_minus": 0, "beta_minus": 0, "gamma_minus": 0, "alpha_plus": -2, "beta_plus": -2, "gamma_plus": -2}


def test_odd_surgery_reads_plus_terms():
    spec = SurgerySpec(0, 0, 3, tuple(T27_DATA.items()))
    assert odd_surgery_terms(spec) == (-2, -2, -2)
    assert minus_terms_check(spec)


def test_negative_odd_surgery_mirrors():
    data = {"beta_minus": 0, "gamma_minus": 0, "alpha_plus": -1, "beta_plus": -1}
    assert odd_surgery_terms(SurgerySpec(0, 1, 1, tuple(data.items()))) == (-1, -1, None)
    assert odd_surgery_terms(SurgerySpec(0, 1, -1, tuple(data.items()))) == (None, 0, 0)


def test_spec_rejects_wrong_keys():
    with pytest.raises(SurgeryError):
        SurgerySpec(0, 1, 1, (("alpha_plus", 0),))
    with pytest.raises(SurgeryError):
        SurgerySpec(0, 2, 1)
    with pytest.raises(SurgeryError):
        SurgerySpec(0, 0, 0)


@pytest.mark.parametrize("dp,want", [(0, (0, 0, 0)), (-1, (0, 0, -2)), (-2, (0, 0, -2))])
def test_even_surgery_from_delta_plus(dp, want):
    assert even_surgery_from_knot(SurgerySpec(0, 0, 2, (("delta_plus", dp),))) == want


def test_even_surgery_from_knot_requires_even_m():
    with pytest.raises(SurgeryError):
        even_surgery_from_knot(SurgerySpec(0, 0, 1, (("delta_plus", 0),)))


def test_order_two():
    assert order_two_check(0, -4) and order_two_check(2, 2)
    assert not order_two_check(-2, 2)
    assert order_two_symmetry(order_two_symmetry(6)) == 6


def test_weak_even_surgery_check():
    c = CorrectionData(0, 0, 0, delta=0)
    assert weak_even_surgery_check(c, 0)
    assert not weak_even_surgery_check(c, 2)
    with pytest.raises(SurgeryError):
        weak_even_surgery_check(CorrectionData(0, -2, -2, delta=0), 0)


TRIANGLES = [trefoil_triangle()] + [bar_triangle_pattern(a, p) for a in (0, 1) for p in (0, 1)]


@pytest.mark.parametrize("t", TRIANGLES, ids=lambda t: t.name)
def test_triangles_pass(t):
    rep = verify_triangle(t)
    assert rep.passed, rep.failures()


def test_trefoil_triangle_checks_hm_side():
    rep = verify_triangle(trefoil_triangle())
    assert "hm_image_is_bottom_tower" in rep.checks
    assert "composite_is_Q" in rep.checks


def test_zero_b_previous_breaks_the_composite():
    t = trefoil_triangle()
    zero = replace(t.b_previous, blocks={d: tuple(0 for _ in cols) for d, cols in t.b_previous.blocks.items()})
    rep = verify_triangle(replace(t, b_previous=zero))
    assert not rep.passed
    assert "composite_is_Q" in rep.failures()


def test_mutants_are_deterministic():
    t = trefoil_triangle()
    assert mutants(t, 10, seed=3) == mutants(t, 10, seed=3)


def test_every_mutant_is_detected():
    assert mutation_kill_rate(trefoil_triangle(), 20) == (20, 20)
