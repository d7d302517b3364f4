from dataclasses import replace

import pytest

from pin2corr import catalog as cat
from pin2corr.hm_side import StandardUModule
from pin2corr.standard_module import CorrectionData

ENTRIES = cat.load_catalog()


def test_names_are_sorted_and_unique():
    names = [e.name for e in ENTRIES]
    assert names == sorted(names)
    assert len(set(names)) == len(names)


def test_expected_entries_present():
    names = {e.name for e in ENTRIES}
    for n in ("S3", "S2xS1", "T27_zero_surgery", "T27_zero_surgery_basis2", "Y_1#Y_1", "trefoil_zero_surgery"):
        assert n in names


@pytest.mark.parametrize("e", ENTRIES, ids=lambda e: e.name)
def test_every_entry_is_self_consistent(e):
    assert all(r.ok for r in cat.entry_checks(e))
    assert e.flag_map.get(cat.SOURCE) in (cat.STATED, cat.DERIVED)


def test_corrupted_corr_is_caught():
    e = cat.get_entry("Y_1_simple_type", ENTRIES)
    bad = replace(e, corr=CorrectionData(0, -2, -4, delta=0, Delta=0, t=2))
    assert any(r.name.endswith(":corr") and not r.ok for r in cat.entry_checks(bad))


def test_corrupted_sum_is_caught_by_cross_checks():
    # a sum entry has no HS module, so only the cross-checks can see its gamma
    entries = [replace(e, corr=CorrectionData(0, -2, -2, delta=0, t=2)) if e.name == "Y_1#Y_1" else e for e in ENTRIES]
    by_name = {r.name: r for r in cat.cross_checks(entries)}
    assert not by_name["cross:connected_sums"].ok


def test_corrupted_hm_is_caught():
    e = cat.get_entry("S3", ENTRIES)
    bad = replace(e, hm=StandardUModule(2))
    assert any(r.name.endswith("gysin") and not r.ok for r in cat.entry_checks(bad))


def test_unknown_entry():
    with pytest.raises(KeyError):
        cat.get_entry("nowhere", ENTRIES)


def test_sum_of_simple_types():
    y2, y1 = cat.get_entry("Y_2_simple_type", ENTRIES), cat.get_entry("Y_1_simple_type", ENTRIES)
    c = cat.sum_correction([y1, y2, y1])
    assert c.abg == (0, -4, -6)
    assert (c.delta, c.t) == (0, 4)


def test_sum_with_lspace_shifts_terms():
    c = cat.sum_correction([cat.get_entry("S3#P", ENTRIES), cat.get_entry("Y_1_simple_type", ENTRIES)])
    assert c.abg == (-1, -3, -3)


def test_sum_with_unknown_summand_leaves_terms_unknown():
    c = cat.sum_correction([cat.get_entry("trefoil_minus1", ENTRIES), cat.get_entry("S3", ENTRIES)])
    assert c.abg == (None, None, None)


def test_check_all_passes_in_a_fixed_order():
    first = cat.check_all()
    assert [r.name for r in first] == [r.name for r in cat.check_all()]
    failing = [(r.name, r.detail) for r in first if not r.ok]
    assert failing == []
