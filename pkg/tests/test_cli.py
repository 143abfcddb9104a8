"""Command-line behavior: exit codes, formats, config merging, determinism."""
import json
import os

import jsonschema
import pytest

from rclab.cli import EXIT_FAIL, EXIT_PASS, EXIT_REFUSED, EXIT_USAGE, main

_SCHEMA = json.load(open(os.path.join(os.path.dirname(__file__), os.pardir,
                                      "docs", "report_schema.json")))


def _validate(payload):
    jsonschema.validate(payload, _SCHEMA)


def _run_json(tmp_path, args, name="out.json", expect=EXIT_PASS):
    out = tmp_path / name
    code = main(args + ["--format", "json", "--output", str(out)])
    assert code == expect
    payload = json.loads(out.read_text())
    _validate(payload)
    return payload


# ---------------------------------------------------------------- exit codes

def test_formulas_passes(capsys):
    assert main(["formulas", "--n", "6", "--d", "4", "--e", "1..3"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "formulas" in out and " 11 " in out


def test_verify_singular_passes(capsys):
    code = main(["verify", "--what", "singular", "--n", "2", "--d", "2",
                 "--e", "1", "--trials", "3"])
    assert code == EXIT_PASS
    assert "verdict: PASS" in capsys.readouterr().out


def test_verify_dimension_gate(capsys):
    args = ["verify", "--what", "jacobian", "--n", "3", "--d", "2",
            "--e", "1", "--trials", "2"]
    assert main(args) == EXIT_USAGE
    assert "any-range" in capsys.readouterr().err
    assert main(args + ["--any-range"]) == EXIT_PASS


def test_verify_prime_validation(capsys):
    base = ["verify", "--what", "containment", "--n", "3", "--d", "2",
            "--e", "2", "--trials", "2"]
    assert main(base + ["--prime", "9"]) == EXIT_USAGE      # composite
    assert main(base + ["--prime", "3"]) == EXIT_USAGE      # below d*e
    assert main(base + ["--prime", "67108879"]) == EXIT_USAGE  # above cap


def test_scan_small_range_passes(capsys):
    assert main(["scan", "--n-max", "5"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "violations: 0" in out


def test_oracle_budget_refusal(capsys):
    code = main(["oracle", "--n", "3", "--d", "2", "--e", "1",
                 "--primes", "31", "--budget", "1000"])
    assert code == EXIT_REFUSED
    assert "budget" in capsys.readouterr().err


def test_oracle_tolerance_failure(capsys):
    # the square of one coordinate kills a single row: slope exactly 6,
    # against the expected exponent 5 for independent quadric conditions
    code = main(["oracle", "--n", "3", "--d", "2", "--e", "1",
                 "--primes", "3,5", "--coeffs", "0,0,0,0,0,0,0,0,0,1",
                 "--tolerance", "0.5"])
    assert code == EXIT_FAIL
    assert "NO" in capsys.readouterr().out


def test_oracle_tolerance_pass(capsys):
    code = main(["oracle", "--n", "3", "--d", "1", "--e", "1",
                 "--primes", "3,5", "--coeffs", "1,1,1,1",
                 "--tolerance", "0.5"])
    assert code == EXIT_PASS


def test_missing_required_option(capsys):
    assert main(["formulas", "--n", "6", "--d", "4"]) == EXIT_USAGE
    assert "--e" in capsys.readouterr().err


def test_bad_degree_range(capsys):
    assert main(["formulas", "--n", "6", "--d", "4", "--e", "3..1"]) == EXIT_USAGE
    assert main(["formulas", "--n", "6", "--d", "4", "--e", "0"]) == EXIT_USAGE


def test_oracle_coeff_length_checked(capsys):
    code = main(["oracle", "--n", "3", "--d", "1", "--e", "1",
                 "--primes", "3", "--coeffs", "1,1,1"])
    assert code == EXIT_USAGE


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("rclab ")


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


# ---------------------------------------------------------------- json output

def test_formulas_json_schema(tmp_path):
    payload = _run_json(tmp_path, ["formulas", "--n", "6", "--d", "4", "--e", "1..3"])
    assert payload["command"] == "formulas"
    assert payload["ok"] is True
    assert len(payload["reports"]) == 3
    assert payload["reports"][2]["expected_moduli_dim"] == 11


def test_verify_json_schema(tmp_path):
    payload = _run_json(tmp_path, ["verify", "--what", "marked", "--n", "6",
                                   "--d", "4", "--e", "1", "--trials", "3"])
    assert payload["verdict"] is True
    assert payload["rounds"][0]["trials"][0]["value"] == 1


def test_scan_json_schema(tmp_path):
    payload = _run_json(tmp_path, ["scan", "--n-max", "10"])
    assert payload["ok"] is True and payload["cases_scanned"] > 0


def test_oracle_json_schema(tmp_path):
    payload = _run_json(tmp_path, ["oracle", "--n", "2", "--d", "2", "--e", "1",
                                   "--primes", "3,5", "--samples", "2"])
    assert payload["samples"] == 2
    assert len(payload["counts"]) == 2
    assert payload["expected_exponent"] == 3 * 2 - 3


def test_json_reports_are_byte_identical(tmp_path):
    args = ["verify", "--what", "jacobian", "--n", "4", "--d", "3", "--e", "2",
            "--trials", "3", "--any-range", "--seed", "7",
            "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--output", str(a)]) == EXIT_PASS
    assert main(args + ["--output", str(b)]) == EXIT_PASS
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_the_report(tmp_path):
    base = ["oracle", "--n", "2", "--d", "2", "--e", "1", "--primes", "3,5",
            "--samples", "2", "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(base + ["--seed", "0", "--output", str(a)]) == EXIT_PASS
    assert main(base + ["--seed", "1", "--output", str(b)]) == EXIT_PASS
    assert a.read_bytes() != b.read_bytes()


def test_output_file_silences_stdout(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["scan", "--n-max", "5", "--format", "json", "--output", str(out)])
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith("{")


# ---------------------------------------------------------------- csv output

def test_csv_headers(tmp_path, capsys):
    main(["formulas", "--n", "6", "--d", "4", "--e", "1", "--format", "csv"])
    head = capsys.readouterr().out.splitlines()[0]
    assert head == ("n,d,e,form_space_dim,param_count,obstruction_count,"
                    "ambient_moduli_dim,expected_moduli_dim,expected_fiber_dim,"
                    "threshold_degree,line_singular_conditions,singular_curve_codim,"
                    "smooth_boundary_dim,singular_boundary_dim,multiple_cover_dims,"
                    "excess_base_codim,excess_recursive_codim,excess_closed_codim,ok")

    main(["verify", "--what", "singular", "--n", "2", "--d", "2", "--e", "1",
          "--trials", "2", "--format", "csv"])
    head = capsys.readouterr().out.splitlines()[0]
    assert head == "round,prime,trial,ok,rank,value,expected,invariant_ok,t_marked,chart"

    main(["oracle", "--n", "2", "--d", "2", "--e", "1", "--primes", "3",
          "--samples", "1", "--format", "csv"])
    head = capsys.readouterr().out.splitlines()[0]
    assert head == "prime,count"

    main(["scan", "--n-max", "5", "--format", "csv"])
    head = capsys.readouterr().out.splitlines()[0]
    assert head == "n,d,e,check,value"


def test_csv_rows_per_trial(capsys):
    main(["verify", "--what", "containment", "--n", "3", "--d", "2", "--e", "1",
          "--trials", "4", "--format", "csv"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5  # header + one row per trial
    assert lines[1].startswith("0,10007,0,True,3,3,3,True")


# ---------------------------------------------------------------- config/env

def test_config_file_matches_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\n"
                   "what=jacobian\n"
                   "n=4\n"
                   "d=3\n"
                   "e=2\n"
                   "trials=3\n"
                   "any-range=true\n"
                   "format=json\n")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["verify", "--config", str(cfg), "--output", str(a)]) == EXIT_PASS
    assert main(["verify", "--what", "jacobian", "--n", "4", "--d", "3",
                 "--e", "2", "--trials", "3", "--any-range",
                 "--format", "json", "--output", str(b)]) == EXIT_PASS
    assert a.read_bytes() == b.read_bytes()


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("what=containment\nn=3\nd=2\ne=2\ntrials=2\nformat=json\n")
    payload = _run_json(tmp_path, ["verify", "--config", str(cfg), "--trials", "4"])
    assert payload["trials"] == 4


def test_config_underscores_accepted(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_max=5\n")
    assert main(["scan", "--config", str(cfg)]) == EXIT_PASS


def test_config_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n-max=5\nfrobnicate=1\n")
    assert main(["scan", "--config", str(cfg)]) == EXIT_USAGE
    assert "frobnicate" in capsys.readouterr().err


def test_config_malformed_line_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("this is not a pair\n")
    assert main(["scan", "--config", str(cfg)]) == EXIT_USAGE


def test_config_missing_file_rejected(capsys):
    assert main(["scan", "--config", "/nonexistent/run.cfg"]) == EXIT_USAGE


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("RCL_SEED", "123")
    payload = _run_json(tmp_path, ["scan", "--n-max", "5"])
    assert payload["seed"] == 123
    payload = _run_json(tmp_path, ["scan", "--n-max", "5", "--seed", "9"],
                        name="flag.json")
    assert payload["seed"] == 9


def test_seed_env_must_be_integer(monkeypatch, capsys):
    monkeypatch.setenv("RCL_SEED", "many")
    assert main(["scan", "--n-max", "5"]) == EXIT_USAGE
    assert "RCL_SEED" in capsys.readouterr().err


def test_envelope_fields_everywhere(tmp_path):
    payloads = [
        _run_json(tmp_path, ["formulas", "--n", "6", "--d", "4", "--e", "1"],
                  name="f.json"),
        _run_json(tmp_path, ["scan", "--n-max", "5"], name="s.json"),
        _run_json(tmp_path, ["verify", "--what", "singular", "--n", "2",
                             "--d", "2", "--e", "1", "--trials", "2"],
                  name="v.json"),
        _run_json(tmp_path, ["oracle", "--n", "2", "--d", "2", "--e", "1",
                             "--primes", "3", "--samples", "1"], name="o.json"),
    ]
    for payload in payloads:
        assert payload["tool"] == "rclab"
        assert isinstance(payload["version"], str)
        assert isinstance(payload["seed"], int)
