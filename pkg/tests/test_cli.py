import json

import pytest
from click.testing import CliRunner

from pnvc.cli import main
from conftest import NET_A_TEXT


@pytest.fixture()
def net_file(tmp_path):
    path = tmp_path / "netA.pn"
    path.write_text(NET_A_TEXT)
    return str(path)


def run(*args, **kw):
    return CliRunner().invoke(main, list(args), **kw)


def test_analyze(net_file):
    res = run("analyze", net_file)
    assert res.exit_code == 0
    assert "k        = 2" in res.output
    assert "k'       = 3" in res.output


def test_analyze_json(net_file):
    res = run("analyze", net_file, "--json")
    body = json.loads(res.output)
    assert body["k"] == 2 and body["k_prime"] == 3


def test_cover_not_covered(net_file):
    res = run("cover", net_file, "--target", "p1:1,p2:1", "--method", "both")
    assert res.exit_code == 0
    assert "verdict = not-covered" in res.output


def test_cover_with_witness(net_file):
    res = run("cover", net_file, "--target", "p3:1", "--json")
    body = json.loads(res.output)
    assert body["verdict"] == "covered" and body["witness"] == ["t1"]
    assert res.exit_code == 0


def test_bounded(net_file):
    res = run("bounded", net_file)
    assert res.exit_code == 0
    assert "verdict  = unbounded" in res.output


def test_mc_true_and_false(net_file):
    res = run("mc", net_file, "--formula", "EF(p3 >= 4)")
    assert res.exit_code == 0 and "verdict = true" in res.output
    res = run("mc", net_file, "--formula", "EF(p1>=1 && p2>=1)")
    assert res.exit_code == 0 and "verdict = false" in res.output


def test_bounds_from_params():
    res = run("bounds", "--m", "2", "--w", "1", "--k-prime", "2", "--r", "1",
              "--i", "1", "--json")
    body = json.loads(res.output)
    assert body["cover_bound"]["recurrence"]["exact"] == "146"
    assert body["constants"] == {"c_prime": 2, "d": 2}


def test_bounds_from_net(net_file):
    res = run("bounds", net_file, "--target", "p3:1")
    assert res.exit_code == 0
    assert "c'=2 d=2" in res.output


def test_gen_deterministic_and_env_seed(monkeypatch):
    a = run("gen", "--places", "3", "--transitions", "3", "--seed", "5")
    b = run("gen", "--places", "3", "--transitions", "3", "--seed", "5")
    assert a.output == b.output and a.exit_code == 0
    monkeypatch.setenv("PNVC_SEED", "5")
    c = run("gen", "--places", "3", "--transitions", "3", "--seed", "99")
    assert c.output == a.output


def test_gen_infeasible_is_usage_error():
    res = run("gen", "--places", "2", "--transitions", "1", "--target-vc", "0")
    assert res.exit_code == 1


def test_missing_file_is_usage_error():
    res = run("analyze", "/nonexistent/file.pn")
    assert res.exit_code == 1


def test_inconclusive_exit_code(net_file):
    # strangle the memory caps so the target stays undecided
    res = run("cover", net_file, "--target", "p3:5", "--method", "forward",
              "--node-cap", "1", "--state-cap", "2")
    assert res.exit_code == 2


def test_propcheck_pass_and_selftest():
    res = run("propcheck", "--suites", "transfer", "--trials", "5", "--seed", "3")
    assert res.exit_code == 0
    assert "pass" in res.output
    res = run("propcheck", "--suites", "transfer", "--trials", "25",
              "--seed", "3", "--self-test")
    assert res.exit_code == 3
    assert "counterexample" in res.output


def test_propcheck_json_deterministic():
    args = ("propcheck", "--suites", "transfer", "--trials", "4", "--seed", "8",
            "--json")
    assert run(*args).output == run(*args).output


def test_config_file_supplies_defaults(tmp_path, net_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"method": "karp-miller", "node_cap": 50}))
    res = run("--config", str(cfg), "bounded", net_file, "--json")
    assert res.exit_code == 0
    assert json.loads(res.output)["method"] == "karp-miller"
    # explicit flags still win over the config file
    res = run("--config", str(cfg), "bounded", net_file, "--method", "both",
              "--json")
    assert json.loads(res.output)["method"] == "both"
