"""Tests for the command-line front end: exit codes, records and determinism."""

import json

import pytest

from cli import EXIT_DATA, EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main
from schema import dump_record, jet_to_record
from spin7_kit import random_jet


def run(capsys, *argv):
    """Run the CLI with a machine-readable record on stdout; returns (code, record)."""
    code = main([*argv, "--quiet", "--format", "record"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def checks(record):
    return {c["name"]: c for c in record["checks"]}


# ============================================================================
# CONFIGURATION
# ============================================================================

@pytest.mark.parametrize("kwargs", [dict(tol=0), dict(n=20), dict(n=8), dict(backend="quad"),
                                    dict(structures=-1), dict(suite="nope")],
                         ids=["tol", "n-not-multiple", "n-small", "backend", "structures", "suite"])
def test_run_config_validation(kwargs):
    with pytest.raises(UsageError):
        RunConfig(command="verify", **kwargs)


def test_unknown_flag_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == EXIT_USAGE


def test_bad_grid_size_is_a_usage_error(capsys):
    assert main(["grid", "--n", "20", "--quiet"]) == EXIT_USAGE


def test_torsion_needs_an_input(capsys):
    assert main(["torsion", "--quiet"]) == EXIT_USAGE


def test_malformed_input_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2", encoding="utf-8")
    assert main(["torsion", "--input", str(bad), "--quiet"]) == EXIT_DATA


def test_unknown_preset(capsys):
    assert main(["scan", "--preset", "nope", "--quiet"]) == EXIT_DATA


# ============================================================================
# VERIFY
# ============================================================================

def test_verify_passes(capsys):
    code, record = run(capsys, "verify", "--structures", "3")
    assert code == EXIT_OK
    assert record["passed"]
    names = checks(record)
    assert "identity.star_re_omega" in names
    assert "cayley.square" in names
    assert names["hitchin.dual_standard"]["value"] == 0


def test_verify_checks_torsion_classes_by_default(capsys):
    code, record = run(capsys, "verify", "--structures", "2")
    assert code == EXIT_OK
    names = checks(record)
    assert names["torsion_classes.round_trip"]["status"] == "PASS"
    assert names["torsion_classes.round_trip"]["value"] == 0
    assert names["torsion_classes.w1_example"]["value"] == 0
    assert "torsion.dphi_decomposition" not in names


def test_mutated_sign_is_caught(capsys):
    code, record = run(capsys, "verify", "--structures", "2", "--mutate-sign", "re_omega")
    assert code == EXIT_FAIL
    assert checks(record)["identity.star_re_omega"]["status"] == "FAIL"


# ============================================================================
# TORSION
# ============================================================================

def test_parametrized_preset_is_torsion_free(capsys):
    code, record = run(capsys, "torsion", "--preset", "jet_lemma37", "--check")
    assert code == EXIT_OK
    assert record["info"]["nonzero"] == []
    assert all(c["status"] == "PASS" for c in record["checks"])
    assert "constraint.w5" in checks(record)


def test_residual_forms_only_with_full(capsys):
    _, record = run(capsys, "torsion", "--preset", "jet_lemma37")
    assert "residuals" not in record["info"]
    _, record = run(capsys, "torsion", "--preset", "jet_lemma37", "--full")
    assert set(record["info"]["residuals"]) >= {"res_a", "res_b", "res_c", "res_d"}


def test_random_jet_reports_torsion(tmp_path, rng, capsys):
    path = tmp_path / "jet.json"
    dump_record(jet_to_record(random_jet(rng)), path)
    code, record = run(capsys, "torsion", "--input", str(path))
    assert code == EXIT_OK
    assert record["info"]["nonzero"]
    assert not record["passed"]
    code, _ = run(capsys, "torsion", "--input", str(path), "--check")
    assert code == EXIT_FAIL


# ============================================================================
# SCAN AND BETTI
# ============================================================================

def test_del_pezzo_scan(capsys):
    code, record = run(capsys, "scan", "--preset", "dP6", "--check")
    assert code == EXIT_OK
    assert checks(record)["scan.kernel_rank"]["value"] == 3
    assert checks(record)["admissible.massey"]["status"] == "INFO"


def test_kahler_override(capsys):
    code, record = run(capsys, "scan", "--preset", "dP6", "--kahler", "1,0,0,0")
    assert code == EXIT_OK
    assert record["info"]["kahler"] == [1, 0, 0, 0]
    assert checks(record)["scan.kernel_rank"]["value"] == 3


@pytest.mark.parametrize("k", ["2", "3", "6"])
def test_weighted_scan(capsys, k):
    code, record = run(capsys, "scan", "--preset", "wp112k", "--k", k, "--check")
    assert code == EXIT_OK
    assert checks(record)["seifert.canonical_class"]["value"] == 0


def test_cap_betti_numbers(capsys):
    code, record = run(capsys, "betti", "--preset", "cAp", "--p", "5", "--check")
    assert code == EXIT_OK
    assert record["info"]["torus_bundle"] == [1, 0, 3, 9, 5, 0, 0, 0, 0]
    assert checks(record)["betti.b2"]["value"] == 3
    assert checks(record)["betti.b3"]["value"] == 9


def test_records_are_deterministic(capsys):
    first = run(capsys, "scan", "--preset", "wp112k", "--k", "5")
    second = run(capsys, "scan", "--preset", "wp112k", "--k", "5")
    assert first == second


def test_output_file_matches_stdout(tmp_path, capsys):
    out = tmp_path / "betti.json"
    code, record = run(capsys, "betti", "--preset", "cAp", "--output", str(out))
    assert code == EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8")) == record


def test_table_format(capsys):
    assert main(["betti", "--preset", "cAp", "--p", "3", "--quiet"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "BETTI" in out and "CHECKS PASSED" in out


# ============================================================================
# GRID
# ============================================================================

def test_dirac_suite(tmp_path, capsys):
    code, record = run(capsys, "grid", "--suite", "dirac", "--n", "32", "--csv-dir", str(tmp_path))
    assert code == EXIT_OK
    assert abs(checks(record)["grid.dirac_order"]["value"] - 2) <= 0.2
    assert sorted(p.name for p in tmp_path.iterdir()) == ["dirac_f_32.csv", "dirac_g_32.csv", "dirac_gamma_32.csv"]


@pytest.mark.parametrize("suite", ["dd_zero", "dstar_j_d", "torus", "se"])
def test_quick_grid_suites(capsys, suite):
    code, record = run(capsys, "grid", "--suite", suite, "--n", "16", "--check")
    assert code == EXIT_OK
    assert record["passed"]
