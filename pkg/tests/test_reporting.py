import json

import pytest
from hypothesis import given, strategies as st

from pin2corr.reporting import parse_text, render, to_json, to_text

keys = st.text("abcdefgh_", min_size=1, max_size=5)
scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-100, 100),
    st.text("abcxyz -#:=", min_size=1, max_size=8).filter(
        lambda s: s not in ("unknown", "true", "false") and not s.lstrip("-").isdigit()
        and not (s.startswith("[") and s.endswith("]"))
    ),
)
rows = st.lists(st.fixed_dictionaries({"x": scalars, "y": scalars}), max_size=3)
reports = st.recursive(
    st.dictionaries(keys, scalars, min_size=1, max_size=4),
    lambda inner: st.dictionaries(keys, st.one_of(scalars, inner, rows), min_size=1, max_size=4),
    max_leaves=12,
)


def _order_free(d):
    """Tables come after scalars in text, so compare without key order."""
    return json.loads(json.dumps(d, sort_keys=True))


@given(reports)
def test_text_and_json_carry_the_same_data(rep):
    assert _order_free(parse_text(to_text(rep))) == _order_free(json.loads(to_json(rep)))


def test_text_layout():
    rep = {"name": "S3", "alpha": 0, "lspace": True, "gamma": None, "bottoms": {"a": 0}, "rows": [{"h": 0, "dim": 1}]}
    assert to_text(rep) == "name\tS3\nalpha\t0\nlspace\ttrue\ngamma\tunknown\nbottoms.a\t0\n\n[rows]\nh\tdim\n0\t1\n"


def test_rejects_unrenderable_values():
    with pytest.raises(ValueError):
        to_text({"a.b": 1})
    with pytest.raises(ValueError):
        to_text({"s": "tab\there"})
    with pytest.raises(ValueError):
        to_text({"t": [{"a": 1}, {"b": 2}]})
    with pytest.raises(ValueError):
        render({}, "xml")
