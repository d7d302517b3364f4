import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pin2corr.catalog import load_catalog
from pin2corr.hm_side import StandardUModule
from pin2corr.standard_module import (
    TORSION,
    ZERO_ARF0,
    ZERO_ARF1,
    CorrectionData,
    ModuleError,
    StandardRModule,
    Summand,
    grading_shift,
    lspace_module,
    mk_module,
    validate,
    zero_surgery_module,
)
from pin2corr.textio import (
    CorrectionDocument,
    SemanticError,
    TextFormatError,
    TriangleSpec,
    ZeroData,
    emit_module,
    parse_module,
    read_document,
)
from pin2corr.tor_engine import mk_dual_presentation

M1_TEXT = """\
module sphere M1
# towers at 0, -3, -2 and one torsion class at -1
summand a tower 0
summand b tower -3
summand c tower -2
summand j torsion -1 1
qedge b a onto
qedge c b iso
qedge j c into   # Q j is the bottom of c
label alpha a
label beta b
label gamma c
"""


def test_m1_text_is_the_built_module():
    assert parse_module(M1_TEXT) == mk_module(1)


def _catalog_documents():
    for e in load_catalog():
        if e.hs is not None:
            yield e.name, e.hs
        if e.hm is not None:
            yield e.name + "_hm", e.hm


@pytest.mark.parametrize("name,doc", list(_catalog_documents()), ids=lambda x: x if isinstance(x, str) else "")
def test_catalog_round_trip(name, doc):
    text = emit_module(doc, name="hm")
    assert parse_module(text) == doc
    assert emit_module(parse_module(text), name="hm") == text


def _valid_zero_modules():
    out = []
    for ta, tb in itertools.product(range(-6, 5), repeat=2):
        for kind, bottoms in (
            (ZERO_ARF1, {"bottom_beta": 0, "bottom_gamma": 1, "top_alpha": ta, "top_beta": tb}),
            (ZERO_ARF0, {"bottom_alpha": -1, "bottom_beta": 0, "bottom_gamma": 1, "top_alpha": ta, "top_beta": tb, "top_gamma": tb + 1}),
        ):
            try:
                m = zero_surgery_module(kind, bottoms, "z")
            except ModuleError:
                continue
            if not validate(m):
                out.append(m)
    return out


VALID_ZERO_MODULES = _valid_zero_modules()

ids = st.text("abcdefghxyz_", min_size=1, max_size=4)


@st.composite
def valid_modules(draw):
    base = draw(st.sampled_from(["lspace", "mk", "zero"]))
    if base == "lspace":
        m = lspace_module(draw(st.integers(-4, 4)))
    elif base == "mk":
        m = grading_shift(mk_module(draw(st.integers(1, 4))), 2 * draw(st.integers(-4, 4)))
    else:
        m = draw(st.sampled_from(VALID_ZERO_MODULES))
    # free-floating torsion and notes do not affect validity
    extra = draw(st.lists(st.tuples(ids, st.integers(-12, 4), st.integers(1, 3)), max_size=2, unique_by=lambda t: t[0]))
    taken = {s.id for s in m.summands}
    summands = m.summands + tuple(Summand("t" + i, TORSION, b, n) for i, b, n in extra if "t" + i not in taken)
    notes = tuple(draw(st.lists(st.sampled_from(["built in a test", "x = 2", "ordering checked"]), max_size=2)))
    name = draw(ids)
    return StandardRModule(name, summands, m.q_edges, m.labels, m.kind, notes)


@settings(max_examples=200, deadline=None)
@given(valid_modules())
def test_random_valid_modules_round_trip(m):
    assert validate(m) == []
    text = emit_module(m)
    assert parse_module(text) == m


@given(st.integers(-6, 6), st.lists(st.tuples(st.integers(-20, 4), st.integers(1, 5)), max_size=3))
def test_umodule_round_trip(bottom, blocks):
    u = StandardUModule(bottom, tuple(blocks))
    assert parse_module(emit_module(u, "u")) == u


def test_other_documents_round_trip():
    docs = [
        mk_dual_presentation(2),
        CorrectionDocument("c", CorrectionData(None, 0, 0, delta=0, Delta=None, t=2)),
        ZeroData("z", 1, (("beta_minus", 0), ("gamma_minus", 0), ("alpha_plus", -1), ("beta_plus", -1))),
        TriangleSpec("t", "bar", 1, 0, (("a", 0, 0, 0),)),
        TriangleSpec("tref", "trefoil"),
    ]
    for d in docs:
        assert parse_module(emit_module(d)) == d


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("", 1, 1),
        ("modul sphere x\n", 1, 1),
        ("module blob x\n", 1, 8),
        ("module sphere x\nsummand a tower zero\n", 2, 17),
        ("module sphere x\n\n  summand a tower\n", 3, 18),
        ("module umodule u\ntower 0\nblock 1\n", 3, 8),
        ("module sphere x\nqedge a b sideways\n", 2, 11),
    ],
)
def test_syntax_errors_carry_positions(text, line, column):
    with pytest.raises(TextFormatError) as info:
        parse_module(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_missing_summand_is_a_semantic_error():
    text = M1_TEXT.replace("qedge c b iso", "qedge c z iso")
    with pytest.raises(SemanticError, match="z"):
        parse_module(text)


def test_invalid_module_is_a_semantic_error():
    text = M1_TEXT.replace("summand b tower -3", "summand b tower -4")
    with pytest.raises(SemanticError):
        parse_module(text)


def test_comment_markers_inside_tokens_are_kept():
    m = parse_module(M1_TEXT + "note see item#3\n")
    assert m.notes == ("see item#3",)


def test_emission_refuses_tokens_that_would_not_survive():
    m = StandardRModule("has space", mk_module(1).summands, mk_module(1).q_edges, mk_module(1).labels)
    with pytest.raises(SemanticError):
        emit_module(m)


def test_read_document(tmp_path):
    p = tmp_path / "m1.txt"
    p.write_text(M1_TEXT)
    assert read_document(str(p)) == mk_module(1)
