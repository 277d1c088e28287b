import json
import math

import pytest

from abtqft.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def test_invariant_sphere_both_sides(capsys):
    code, report, _ = run_json(capsys, "invariant", "S3", "--k", "4",
                               "--side", "both", "--json")
    assert code == 0
    assert report["rt"] == pytest.approx([0.5, 0.0])
    assert report["cs"] == pytest.approx([0.5, 0.0])
    assert report["ratio"] == pytest.approx([1.0, 0.0])
    assert report["b1"] == 0


def test_invariant_zero_framing_cs_side(capsys):
    code, report, _ = run_json(capsys, "invariant", "S1xS2", "--k", "2",
                               "--side", "cs", "--json")
    assert code == 0
    assert report["cs"] == pytest.approx([1.0, 0.0])
    assert report["b1"] == 1
    assert "rt" not in report


def test_invariant_vanishing_ratio_skipped(capsys):
    code, report, _ = run_json(capsys, "invariant", "L2_1", "--k", "2",
                               "--side", "both", "--json")
    assert code == 0
    assert abs(complex(*report["rt"])) < 1e-10
    assert abs(complex(*report["cs"])) < 1e-10
    assert report["ratio"] is None
    assert report["ratio_skipped"]


def test_invariant_inline_json(capsys):
    code, report, _ = run_json(capsys, "invariant", '{"L": [[3]]}', "--k", "2",
                               "--side", "rt", "--json")
    assert code == 0
    assert abs(complex(*report["rt"]) - (-1j / math.sqrt(2))) < 1e-10


def test_invariant_unknown_name_is_usage_error(capsys):
    code, out, err = run(capsys, "invariant", "NOPE", "--k", "4")
    assert code == 2
    assert "unknown" in err


def test_invariant_odd_level_is_usage_error(capsys):
    code, _, err = run(capsys, "invariant", "S3", "--k", "3")
    assert code == 2


def test_invariant_cap_exceeded_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("ABTQFT_MAX_ENUM", "2")
    code, _, err = run(capsys, "invariant", "E8", "--k", "4", "--side", "rt")
    assert code == 2
    assert "cap" in err


def test_verify_modular(capsys):
    code, report, _ = run_json(capsys, "verify", "modular", "--kmax", "8",
                               "--json")
    assert code == 0
    assert report["pass"] is True
    assert set(report["levels"]) == {"2", "4", "6", "8"}


def test_verify_kirby_seeded(capsys):
    code, report, _ = run_json(capsys, "verify", "kirby", "--seed", "7",
                               "--cases", "60", "--json")
    assert code == 0
    assert report["pass"] is True
    assert report["max_dev"] < 1e-7


def test_verify_maslov(capsys):
    code, report, _ = run_json(capsys, "verify", "maslov", "--cases", "15",
                               "--seed", "2", "--json")
    assert code == 0 and report["pass"] is True


def test_verify_reciprocity_reports_half_mode_mismatch(capsys):
    code, report, _ = run_json(capsys, "verify", "reciprocity", "--cases",
                               "30", "--seed", "1", "--json")
    assert code == 0
    assert report["pass"] is True
    assert report["paper_half_zero_matrix"]["mismatch_reproduced"] is True
    assert report["paper_half_zero_matrix"]["lhs"] == pytest.approx([2.0, 0.0])
    assert report["paper_half_zero_matrix"]["rhs"] == pytest.approx(
        [math.sqrt(2), 0.0])


def test_verify_equivalence_matches_fixture(capsys):
    code, report, _ = run_json(capsys, "verify", "equivalence", "--cases",
                               "120", "--json")
    assert code == 0
    assert report["fixture_match"] is True
    assert report["max_dev"] < 1e-7


def test_reports_are_byte_identical_for_fixed_seed(capsys):
    _, first, _ = run(capsys, "verify", "kirby", "--seed", "5", "--cases",
                      "40", "--json")
    _, second, _ = run(capsys, "verify", "kirby", "--seed", "5", "--cases",
                       "40", "--json")
    assert first == second


def test_catalog_list_and_show(capsys):
    code, report, _ = run_json(capsys, "catalog", "list", "--json")
    assert code == 0
    names = {e["name"] for e in report["entries"]}
    assert {"S3", "S1xS2", "L2_1", "E8"} <= names
    code, entry, _ = run_json(capsys, "catalog", "show", "S1xS2", "--json")
    assert code == 0
    assert entry["presentation"]["L"] == [[0]]


def test_catalog_show_unknown_is_usage_error(capsys):
    code, _, err = run(capsys, "catalog", "show", "NOPE")
    assert code == 2


def test_phase_table_build_and_show(capsys, tmp_path):
    out = tmp_path / "table.json"
    code, _, _ = run(capsys, "phase-table", "build", "--cases", "60",
                     "--out", str(out))
    assert code == 0
    built = json.loads(out.read_text())
    assert set(built["sigma_mod_8"].values()) == {"0/1"}
    code, shown, _ = run_json(capsys, "phase-table", "show")
    assert code == 0
    assert set(shown["sigma_mod_8"]) == {str(s) for s in range(8)}


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["invariant"])  # missing required --k
    assert exc.value.code == 2
