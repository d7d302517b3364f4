import pytest
from hypothesis import given, strategies as st

from pin2corr.algebra import (
    FU,
    RVQ,
    AlgebraError,
    Echelon,
    GradedMap,
    GradedModule,
    Operator,
    RingElem,
    check_relations,
    dual_module,
    exactness_check,
    gf2_image,
    gf2_kernel,
    gf2_rank,
    apply_matrix,
    homology,
    parse_ring_elem,
    ring_mul,
    torsion_blocks,
)
from pin2corr.standard_module import mk_module, s3_module, to_graded

monomials = st.tuples(st.integers(0, 5), st.integers(0, 2))
r_elems = st.frozensets(monomials, max_size=5).map(lambda t: RingElem(RVQ, t))
columns = st.lists(st.integers(0, 2**8 - 1), max_size=10)


@given(r_elems)
def test_ring_elem_text_round_trip(x):
    assert parse_ring_elem(str(x)) == x


@given(r_elems, r_elems, r_elems)
def test_ring_is_commutative_associative_distributive(x, y, z):
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(r_elems)
def test_char_two(x):
    assert not (x + x)


def test_q_cubed_vanishes():
    q = RingElem.monomial(0, 1)
    assert not (q * q * q)
    assert q * q == RingElem.monomial(0, 2)


def test_degrees():
    assert RingElem.monomial(2, 1).degree == -9
    assert parse_ring_elem("U^3", FU).degree == -6
    with pytest.raises(AlgebraError):
        (RingElem.monomial(1, 0) + RingElem.monomial(0, 1)).degree


def test_vmax_truncates():
    v = RingElem.monomial(1, 0)
    assert not ring_mul(v, v, vmax=1)


@pytest.mark.parametrize("text", ["V^", "VX", "V++Q", "U"])
def test_bad_ring_text(text):
    with pytest.raises(AlgebraError):
        parse_ring_elem(text)


@given(columns)
def test_rank_nullity(cols):
    kernel = gf2_kernel(cols)
    assert gf2_rank(cols) + len(kernel) == len(cols)
    assert gf2_rank(kernel) == len(kernel)
    for k in kernel:
        assert apply_matrix(cols, k) == 0


@given(columns)
def test_image_spans_columns(cols):
    image = gf2_image(cols)
    ech = Echelon()
    for v in image:
        ech.add(v)
    assert all(ech.contains(c) for c in cols)
    assert len(image) == gf2_rank(cols)


def test_echelon_reports_new_vectors():
    e = Echelon()
    assert e.add(0b101)
    assert e.add(0b011)
    assert not e.add(0b110)


@pytest.mark.parametrize("module", [s3_module(), mk_module(1), mk_module(3)], ids=lambda m: m.name)
def test_dual_is_an_involution(module):
    g = to_graded(module, 20)
    dd = dual_module(dual_module(g))
    assert dd.dims == g.dims
    for op in ("V", "Q"):
        for d in g.degrees():
            assert dd.block(op, d) == g.block(op, d)


def test_explicit_models_satisfy_axioms():
    for k in (1, 2, 3):
        g = to_graded(mk_module(k))
        assert check_relations(g, [d for d in g.degrees() if d < max(g.degrees()) - 4]) == []


def test_check_relations_flags_q_cubed():
    # three-step Q chain in one degree each
    g = GradedModule({3: 1, 2: 1, 1: 1, 0: 1}, {"Q": Operator(-1, {3: (1,), 2: (1,), 1: (1,), 0: (0,)})})
    assert any("Q^3" in p for p in check_relations(g))


def _short_exact():
    a = GradedModule({0: 1})
    b = GradedModule({0: 2})
    c = GradedModule({0: 1})
    f = GradedMap(a, b, 0, {0: (0b01,)})
    g = GradedMap(b, c, 0, {0: (0, 1)})
    return f, g


def test_exactness_of_a_split_sequence():
    f, g = _short_exact()
    assert exactness_check(f, g) == {0: True}


def test_exactness_detects_wrong_image():
    f, g = _short_exact()
    f2 = f.with_entry_flipped(0, 0, 1)
    assert exactness_check(f2, g) == {0: False}


def test_graded_map_rejects_wrong_shapes():
    a, b = GradedModule({0: 1}), GradedModule({0: 1})
    with pytest.raises(AlgebraError):
        GradedMap(a, b, 0, {0: (0b10,)})


def test_homology_of_a_two_term_complex():
    # x in degree 1 maps to y in degree 0; z in degree 0 is a cycle
    cx = GradedModule({1: 1, 0: 2}, {"d": Operator(-1, {1: (0b01,), 0: (0, 0)})})
    h = homology(cx, "d")
    assert h.dims == {0: 1}


@given(st.integers(-10, 10), st.integers(1, 6))
def test_torsion_blocks_of_a_single_block(bottom, n):
    dims = {bottom + 2 * j: 1 for j in range(n)}
    blocks = {bottom + 2 * j: ((1,) if j else (0,)) for j in range(n)}
    g = GradedModule(dims, {"U": Operator(-2, blocks)})
    assert torsion_blocks(g, "U") == [(bottom, n)]
