import io
import json
import os

import pytest

from pin2corr.cli import main
from pin2corr.hm_side import StandardUModule
from pin2corr.reporting import parse_text
from pin2corr.standard_module import mk_module
from pin2corr.textio import TriangleSpec, ZeroData, emit_module
from pin2corr.tor_engine import mk_dual_presentation


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, filename, obj, **kw):
    p = tmp_path / filename
    p.write_text(emit_module(obj, **kw))
    return str(p)


def test_corr_text_and_json_agree():
    code, text, _ = run("corr", "S3")
    assert code == 0
    code, js, _ = run("--format", "json", "corr", "S3")
    assert code == 0
    assert parse_text(text) == json.loads(js)
    assert "alpha\t0" in text.splitlines()


def test_corr_reads_a_module_file(tmp_path):
    code, out, _ = run("--format", "json", "corr", write(tmp_path, "m2.txt", mk_module(2)))
    rep = json.loads(out)
    assert code == 0
    assert (rep["alpha"], rep["beta"], rep["gamma"], rep["lspace"]) == (0, -4, -4, False)


def test_corr_on_an_hm_file(tmp_path):
    code, out, _ = run("--format", "json", "corr", write(tmp_path, "u.txt", StandardUModule(0, ((-7, 4),)), name="u"))
    assert code == 0
    assert (json.loads(out)["delta"], json.loads(out)["t"]) == (0, 4)


def test_global_flags_after_the_subcommand():
    code, out, _ = run("corr", "S3", "--format", "json")
    assert code == 0 and json.loads(out)["name"] == "S3"


def test_missing_file_is_an_input_error():
    code, _, err = run("corr", "/nonexistent/module.txt")
    assert code == 2 and err


def test_syntax_error_reports_its_position(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("module sphere x\nsummand a tower zero\n")
    code, _, err = run("corr", str(p))
    assert code == 2
    assert "line 2, column 17" in err


def test_usage_errors_exit_two(capsys):
    assert run("bogus")[0] == 2
    assert run("whitehead")[0] == 2
    assert run("--vmax", "0", "whitehead", "--delta-k", "0")[0] == 2


def test_whitehead():
    code, out, _ = run("--format", "json", "whitehead", "--delta-k", "-1")
    rep = json.loads(out)
    assert code == 0 and (rep["alpha"], rep["beta"], rep["gamma"]) == (0, 0, -2)
    assert run("whitehead", "--delta-k", "2")[0] == 2


def test_even_surgery():
    code, out, _ = run("--format", "json", "surgery", "--arf", "0", "--m", "2", "--delta-prime", "-1")
    assert code == 0
    assert [json.loads(out)[k] for k in ("alpha", "beta", "gamma")] == [0, 0, -2]
    assert run("surgery", "--arf", "0", "--m", "2")[0] == 2


def test_odd_surgery_from_zero_data(tmp_path):
    z = ZeroData("tref", 1, (("beta_minus", 0), ("gamma_minus", 0), ("alpha_plus", -1), ("beta_plus", -1)))
    path = write(tmp_path, "z.txt", z)
    code, out, _ = run("--format", "json", "surgery", "--arf", "1", "--m", "-1", "--zero-data", path)
    rep = json.loads(out)
    assert code == 0
    assert (rep["alpha"], rep["beta"], rep["gamma"], rep["minus_terms"]) == (None, 0, 0, True)
    assert run("surgery", "--arf", "0", "--m", "1", "--zero-data", path)[0] == 2


def test_consum_of_catalog_entries():
    code, out, _ = run("--format", "json", "consum", "Y_1_simple_type", "Y_1_simple_type")
    rep = json.loads(out)
    assert code == 0 and rep["oracle_agrees"] is True


def test_tor_from_files(tmp_path):
    a = write(tmp_path, "m1.txt", mk_dual_presentation(1))
    code, out, _ = run("--format", "json", "--window", "-24", "8", "tor", a, a)
    rep = json.loads(out)
    assert code == 0
    assert [r for r in rep["dims"] if r["h"] == 1] == [{"h": 1, "degree": -6, "dim": 1}]
    assert run("--window", "-400", "8", "--vmax", "4", "tor", a, a)[0] == 2
    assert run("tor", a, write(tmp_path, "m.txt", mk_module(1)))[0] == 2


def test_geography():
    code, out, _ = run("--format", "json", "geography", "2", "-2", "-4")
    rep = json.loads(out)
    assert code == 0 and (rep["k"], rep["k_prime"], rep["n"]) == (2, 1, 2)
    assert run("geography", "0", "-2", "-6")[0] == 2


def test_verify_triangle_named_and_file(tmp_path):
    assert run("verify-triangle", "trefoil", "--mutants", "5")[0] == 0
    assert run("verify-triangle", "bar:1:0")[0] == 0
    broken = write(tmp_path, "t.txt", TriangleSpec("broken", "trefoil", mutations=(("b", 0, 0, 0),)))
    code, out, _ = run("verify-triangle", broken)
    assert code == 1
    assert "passed\tfalse" in out


def test_catalog_list_and_show():
    code, out, _ = run("--format", "json", "catalog")
    assert code == 0 and "S3" in [e["name"] for e in json.loads(out)["entries"]]
    code, out, _ = run("--format", "json", "catalog", "show", "Y_1_simple_type")
    assert code == 0 and json.loads(out)["hm"]["blocks"] == [{"bottom": -3, "length": 2}]
    assert run("catalog", "show", "nothing")[0] == 2
    assert run("catalog", "show")[0] == 2


def test_check_all():
    code, out, _ = run("check-all")
    rep = parse_text(out)
    assert code == 0 and rep["failed"] == 0 and rep["total"] == len(rep["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ["corr", "S3"],
        ["consum", "S3", "Y_1_simple_type"],
        ["geography", "0", "-2", "-4"],
        ["verify-triangle", "trefoil"],
        ["check-all"],
    ],
)
def test_figures_are_written(tmp_path, argv):
    figs = tmp_path / "figs"
    code, out, _ = run("--format", "json", "--figures", str(figs), *argv)
    assert code == 0
    path = json.loads(out)["figure"]
    assert os.path.dirname(path) == str(figs)
    with open(path, "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_tor_figure(tmp_path):
    a = write(tmp_path, "m1.txt", mk_dual_presentation(1))
    code, out, _ = run("--format", "json", "--window", "-20", "4", "--figures", str(tmp_path), "tor", a, a)
    assert code == 0 and os.path.exists(json.loads(out)["figure"])
