import json

import pytest

from padic_stochastic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_example(capsys):
    code, out, _ = run(capsys, "expand", "--prime", "3", "--degree", "2", "--samples", "0,1,4")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    assert report["coefficients"] == ["0", "1", "2"]


def test_missing_prime_is_a_usage_error(capsys):
    code, _, err = run(capsys, "expand", "--degree", "2", "--samples", "0,1,4")
    assert code == 2
    assert "--prime" in err


@pytest.mark.parametrize("argv", [
    ["frobnicate", "--prime", "3"],
    ["expand", "--prime", "4", "--samples", "0,1"],
    ["expand", "--prime", "3", "--precision", "2", "--samples", "0,1"],
    ["expand", "--prime", "3", "--degree", "5", "--samples", "0,1"],
    ["spectral", "--prime", "3", "--payload", '{"matrix": [[1, 1], [0, 1]]}'],
    ["quasimeasure", "--prime", "3", "--payload", '{"kernel": {"kind": "nope"}}'],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"prime": 5, "seed": 4, "payload": {"samples": ["1", "6"]}}))
    code, out, _ = run(capsys, "expand", "--prime", "3", "--config", str(cfg))
    report = json.loads(out)
    assert code == 0
    assert report["prime"] == 5 and report["seeds"] == [4]
    assert report["coefficients"] == ["1", "5"]


def test_config_without_prime_flag(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"prime": 2}))
    assert run(capsys, "expand", "--samples", "3", "--config", str(cfg))[0] == 0


def test_antideriv_telescopes(capsys):
    code, out, _ = run(capsys, "antideriv", "--prime", "3", "--payload", '{"point": "7/2"}')
    report = json.loads(out)
    assert code == 0
    assert report["value"] == report["point"]
    assert report["terms_used"] == 20


def test_spectral_reports(capsys):
    code, out, _ = run(capsys, "spectral", "--prime", "3", "--payload", '{"matrix": [[1, 0, 0], [0, 3, 0], [0, 0, 3]]}')
    report = json.loads(out)
    assert code == 0 and report["reconstructs"]
    assert report["singular_numbers"] == [["1", 1], ["1/3", 2]]
    code, out, _ = run(capsys, "spectral", "--prime", "2", "--payload", '{"action": "integrate", "f": [4, "1/2"]}')
    assert code == 0 and json.loads(out)["norm"] == "2"


@pytest.mark.parametrize("check", ["consistency", "variation", "semigroup"])
def test_quasimeasure_checks(capsys, check):
    code, out, _ = run(capsys, "quasimeasure", "--prime", "3", "--check", check,
                       "--payload", '{"kernel": {"kind": "haar-ball", "depth": 2}}')
    assert code == 0
    assert json.loads(out)["ok"]


def test_unnormalized_kernel_is_a_contract_violation(capsys):
    payload = '{"kernel": {"kind": "weighted", "depth": 1, "table": ["1/2", "1/3"]}}'
    code, out, _ = run(capsys, "quasimeasure", "--prime", "2", "--check", "consistency", "--payload", payload)
    assert code == 1
    assert not json.loads(out)["ok"]


def test_sample_paths_csv(capsys):
    code, out, _ = run(capsys, "sample-paths", "--prime", "2", "--seed", "1,2", "--terms", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "seed,n,node,value"
    assert len(lines) == 1 + 2 * 4


def test_reports_are_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert run(capsys, "ito-check", "--prime", "5", "--seed", "3,4", "--out", str(target),
                   "--payload", '{"h": [1, 0, 2], "c": 1, "a": [0, 1], "E": 2}')[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert all(c["holds"] for c in json.loads(a.read_text())["checks"])


def test_sto_integral(capsys):
    code, out, _ = run(capsys, "sto-integral", "--prime", "3", "--seed", "2", "--payload", '{"E": 1, "t": 10}')
    assert code == 0
    assert json.loads(out)["integrals"][0]["certified"]


def test_sample_paths_rejects_bad_law(capsys):
    assert run(capsys, "sample-paths", "--prime", "3", "--payload", '{"alphas": [1, 9, 1]}')[0] == 2
