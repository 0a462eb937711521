import json

import pytest

from charvar.cli import (RunConfig, ConfigError, main, parse_class,
                         parse_target, run_verification, smallest_lambda,
                         generic_pair)
from charvar.counting import ZFull, ZbarCase


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# config


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(primes=(5, 9))
    with pytest.raises(ConfigError):
        RunConfig(primes=(5, 5, 7))
    with pytest.raises(ConfigError):
        RunConfig(threads=0)
    assert RunConfig(primes=(11, 5, 7)).primes == (5, 7, 11)


def test_lambda_policies():
    assert smallest_lambda(5) == 2
    assert smallest_lambda(5, square=True) is None
    assert smallest_lambda(5, square=False) == 2
    assert smallest_lambda(7, square=True) == 2
    assert smallest_lambda(7, square=False) == 3
    assert generic_pair(7, same_class=False) == (2, 3)
    assert generic_pair(7, same_class=True) is None
    assert generic_pair(11, same_class=True) == (2, 7)


# ---------------------------------------------------------------------------
# target parsing


def test_parse_targets():
    make = parse_target("commfiber:j+")
    assert make(5).target.entries() == (1, 1, 0, 1)
    make = parse_target("zbar44=2,3")
    case = make(7)
    assert isinstance(case, ZbarCase) and (case.lam1, case.lam2) == (2, 3)
    make = parse_target("zfull:w2,w4=2")
    spec = make(7)
    assert isinstance(spec, ZFull) and spec.spec2.lam == 2
    make = parse_target("xstratum:X3")
    assert make(7).tag == "X3"
    make = parse_target("dcfiber=2,3,0")
    assert make(7).mu == 3


def test_parse_target_skips_inadmissible_lambda():
    make = parse_target("zbar24=4")
    skip = make(5)            # 4 = -1 mod 5
    assert hasattr(skip, "reason")
    make = parse_target("zbar24")
    skip = make(3)            # no admissible lambda mod 3
    assert hasattr(skip, "reason")


def test_parse_target_errors():
    with pytest.raises(ConfigError):
        parse_target("zbar99")
    with pytest.raises(ConfigError):
        parse_target("zfull:w2")
    with pytest.raises(ConfigError):
        parse_class("w9")


# ---------------------------------------------------------------------------
# subcommands


def test_cmd_blocks_text(capsys):
    code, out, _ = run_cli(capsys, "blocks")
    assert code == 0
    assert "Xbar3" in out and "q^3 + 3q^2" in out
    assert "FAIL" not in out


def test_cmd_blocks_json(capsys):
    code, out, _ = run_cli(capsys, "blocks", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["blocks"]["Xbar2"]["coeffs"] == [0, -3, -2, 1]
    assert all(row["pass"] for row in payload["identities"])


def test_cmd_derive(capsys):
    code, out, _ = run_cli(capsys, "derive", "J+xi")
    assert code == 0
    assert "q^4 + q^3 + 2q^2 + q + 1" in out
    code, out, _ = run_cli(capsys, "derive", "xixi-generic", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["e_moduli"]["coeffs"] == [1, 2, 6, 2, 1]
    assert payload["matches_stated_result"] is True


def test_cmd_derive_unknown_case(capsys):
    code, _, _ = run_cli(capsys, "derive", "nonsense")
    assert code == 2


def test_cmd_count_text(capsys):
    code, out, _ = run_cli(capsys, "count", "zbar23", "--primes", "5,7")
    assert code == 0
    assert "count=2600" in out and "count=16072" in out


def test_cmd_count_skips_without_admissible_lambda(capsys):
    code, out, _ = run_cli(capsys, "count", "zbar24", "--primes", "3,5")
    assert code == 0
    assert "skipped" in out and "count=2560" in out


def test_cmd_count_json_and_csv(capsys):
    code, out, _ = run_cli(capsys, "count", "commfiber:j+",
                           "--primes", "5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["records"][0]["count"] == 60
    assert payload["records"][0]["ms"] is None
    code, out, _ = run_cli(capsys, "count", "commfiber:j+",
                           "--primes", "5,7", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("target,params,p,count")
    assert len(lines) == 3


def test_cmd_count_brute_method(capsys):
    code, out, _ = run_cli(capsys, "count", "commfiber:xi=2",
                           "--primes", "5", "--method", "brute")
    assert code == 0
    assert "count=64" in out


def test_cmd_count_reports_guard_violations_per_prime(capsys):
    # the batch continues past an out-of-range oracle request
    code, out, _ = run_cli(capsys, "count", "zbar22",
                           "--primes", "5,11", "--method", "brute")
    assert code == 0
    assert "count=3840" in out
    assert "oracle out of range" in out


def test_cmd_count_bad_target(capsys):
    code, _, err = run_cli(capsys, "count", "zbar99", "--primes", "5")
    assert code == 2
    assert "error" in err


def test_cmd_count_bad_primes(capsys):
    code, _, err = run_cli(capsys, "count", "zbar22", "--primes", "9")
    assert code == 2


def test_cmd_hodge_default(capsys):
    code, out, _ = run_cli(capsys, "hodge")
    assert code == 0
    assert "solutions: 18" in out


def test_cmd_hodge_no_weight_bound(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--no-weight-bound")
    assert code == 0
    n = int(out.splitlines()[0].split()[1])
    assert n > 18
    assert "warning" in out


def test_cmd_hodge_json(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--format", "json")
    payload = json.loads(out)
    assert payload["n_tables"] == 18
    forced = {(row["k"], row["p"]): row["value"]
              for row in payload["forced_entries"]}
    assert forced[(6, 3)] == 2 and forced[(8, 4)] == 1


def test_cmd_hodge_small_instance(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--epoly", "1", "--poincare", "1",
                           "--dim", "0", "--dump-tables", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["n_tables"] == 1
    assert payload["tables"] == [[[1]]]


def test_cmd_probe(capsys):
    code, out, _ = run_cli(capsys, "probe", "--primes", "5")
    assert code == 0
    assert "union of diagonal fibers = 128" in out
    assert "128" in out and "316" in out


def test_cmd_verify_insufficient_panel(capsys):
    code, _, err = run_cli(capsys, "verify", "blocks", "--primes", "5,7,11")
    assert code == 2
    assert "panel" in err


def test_cmd_verify_blocks_json(capsys):
    code, out, _ = run_cli(capsys, "verify", "blocks", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"schema", "config", "targets", "identities",
                           "probe", "summary"}
    verdicts = {t["id"]: t["verdict"] for t in report["targets"]}
    assert verdicts["X0"] == "match"
    assert verdicts["Xbar2"] == "match"
    assert verdicts["Xbar3"] == "quasi-polynomial"
    assert verdicts["Xbar4lam[qr]"] == "match"
    assert verdicts["Xbar4lam[qnr]"] == "mismatch"
    assert report["summary"]["must_match_failures"] == []
    for t in report["targets"]:
        for rec in t["records"]:
            assert rec["ms"] is None
    # every verdict is from the contract set
    assert set(verdicts.values()) <= {"match", "mismatch", "quasi-polynomial",
                                      "inconsistent", "skipped"}


def test_cmd_verify_is_byte_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "verify", "blocks", "--format", "json")
    code2, out2, _ = run_cli(capsys, "verify", "blocks", "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2


def test_cmd_verify_all_scope_deterministic_and_green(capsys):
    code1, out1, _ = run_cli(capsys, "verify", "all", "--format", "json")
    code2, out2, _ = run_cli(capsys, "verify", "all", "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["summary"]["identity_failures"] == []
    scopes = {t["id"] for t in report["targets"]}
    assert {"X0", "Zbar22", "Z23"} <= scopes


def test_cmd_verify_csv(capsys):
    code, out, _ = run_cli(capsys, "verify", "blocks", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "target,params,p,count,method,ms,verdict"
    # one row per (target, prime)
    assert len(lines) == 1 + 11 * 9


def test_cmd_verify_writes_output_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify", "blocks", "--format", "json",
                           "--output", str(path))
    assert code == 0
    assert out == ""
    report = json.loads(path.read_text())
    assert report["schema"].startswith("charvar-verification-report")


def test_run_verification_cache_dir(tmp_path):
    config = RunConfig(fmt="json", cache_dir=str(tmp_path))
    report = run_verification("blocks", config)
    assert report["summary"]["exit_code"] == 0
    cached = list(tmp_path.glob("fibdist-p*.json"))
    assert len(cached) == len(config.primes)


def test_cmd_usage_error_exit_code(capsys):
    assert main(["verify", "nonsense-scope"]) == 2
    assert main([]) == 2
