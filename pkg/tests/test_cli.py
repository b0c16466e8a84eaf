import json

import pytest

from qconn import io
from qconn.cli import random_instance, run
from qconn.scales import ALL, is_sigma_connected
from qconn.spaces import FiniteTopSpace, VMetricSpace, flagg_metrize


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_metrize_sierpinski(capsys, fixtures):
    code, out, _ = call(capsys, "metrize", "--in", fixtures / "sierpinski.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["quantale"]["ground"] == ["{}", "{a}", "{a,b}"]
    assert doc["d"][1][0] == [[0, 1, 2]]
    assert doc["d"][0][1] == [[0, 2]]


def test_metrize_writes_out(capsys, fixtures, tmp_path):
    dest = tmp_path / "m.json"
    code, out, _ = call(capsys, "metrize", "--in", fixtures / "sierpinski.json", "--out", dest)
    assert code == 0 and out == ""
    M = io.metric_from_json(io.loads(dest.read_text()))
    assert M.n == 2


def test_connected_verdicts(capsys, fixtures):
    code, out, _ = call(capsys, "connected", "--in", fixtures / "sierpinski.json", "--format", "text")
    assert code == 0 and out.startswith("connected")
    code, out, _ = call(capsys, "connected", "--in", fixtures / "discrete2.json")
    doc = json.loads(out)
    assert code == 1 and doc["connected"] is False and doc["witness"]["type"] == "scale"


def test_uniform_and_sigma(capsys, fixtures):
    code, out, _ = call(capsys, "uniform-connected", "--in", fixtures / "two_point_infinity.json")
    assert code == 1
    code, _, _ = call(capsys, "sigma-connected", "--in", fixtures / "grid5.json", "--system", "bounded:1/2")
    assert code == 0
    code, _, _ = call(capsys, "sigma-connected", "--in", fixtures / "grid5.json", "--system", "bounded:1/4")
    assert code == 1
    code, _, _ = call(capsys, "sigma-connected", "--in", fixtures / "sierpinski.json", "--system", "bounded-exists")
    assert code == 0


def test_sigma_expansion_file(capsys, fixtures, tmp_path):
    alpha = tmp_path / "alpha.json"
    alpha.write_text(io.dumps({"type": "alpha", "table": [["0", "1/2"]]}))
    code, out, _ = call(capsys, "sigma-connected", "--in", fixtures / "grid5.json", "--system", f"expansion:{alpha}")
    assert code == 0 and json.loads(out)["connected"]


def test_walk(capsys, fixtures):
    code, out, _ = call(capsys, "walk", "--in", fixtures / "grid5.json", "--uniform", "1/4", "--variant", "weak", "--from", "0", "--to", "1")
    assert code == 0
    assert json.loads(out)["walk"] == ["0", "1/4", "1/2", "3/4", "1"]
    code, out, _ = call(capsys, "walk", "--in", fixtures / "grid5.json", "--uniform", "1/4", "--from", "0", "--to", "1")
    assert code == 1 and json.loads(out)["walk"] is None


def test_components_with_scale_file(capsys, fixtures, tmp_path):
    scale = tmp_path / "r.json"
    scale.write_text(io.dumps({"type": "scale", "points": ["0", "1/4", "1/2", "3/4", "1"], "radii": ["1/2", "1/8", "1/8", "1/8", "1/8"]}))
    code, out, _ = call(capsys, "components", "--in", fixtures / "grid5.json", "--scale", scale)
    assert code == 0
    assert json.loads(out)["blocks"] == [["0", "1/4"], ["1/2"], ["3/4"], ["1"]]
    code, out, _ = call(capsys, "components", "--in", fixtures / "sierpinski.json", "--canonical")
    assert json.loads(out)["connected"] is True


def test_omega_uniform_value(capsys, fixtures):
    code, out, _ = call(capsys, "components", "--in", fixtures / "discrete2.json", "--uniform", "[]")
    assert code == 0 and json.loads(out)["connected"]
    code, _, err = call(capsys, "components", "--in", fixtures / "discrete2.json", "--uniform", "oops")
    assert code == 2 and "omega" in err


def test_verify_and_laws(capsys):
    code, out, _ = call(capsys, "verify", "--theorem", "metrization", "--corpus", "exhaustive:2")
    doc = json.loads(out)
    assert code == 0 and doc["reports"][0]["instances"] == 5 and doc["reports"][0]["ms"] is None
    assert doc["flags"]["corpus"] == "exhaustive:2"
    code, out, _ = call(capsys, "laws", "--quantale", "omega:1", "--format", "text")
    assert code == 0 and "FAIL" not in out


def test_random_instances(capsys):
    code, a, _ = call(capsys, "random", "--kind", "metric", "--points", 4, "--seed", 9)
    code2, b, _ = call(capsys, "random", "--kind", "metric", "--points", 4, "--seed", 9)
    assert code == code2 == 0 and a == b
    M = io.metric_from_json(json.loads(a))
    assert isinstance(M, VMetricSpace)
    one = random_instance("topology", 1, 0)
    assert isinstance(one, FiniteTopSpace) and one.n == 1
    assert is_sigma_connected(flagg_metrize(one), ALL).connected


@pytest.mark.parametrize("seed", range(10))
def test_repaired_metrics_are_valid(seed):
    M = random_instance("metric", 6, seed)
    q = M.quantale
    for i in range(6):
        for j in range(6):
            for k in range(6):
                assert q.leq(M.d[i][k], q.add(M.d[i][j], M.d[j][k]))


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["connected", "--in", "missing.json"], "cannot read"),
        (["verify", "--theorem", "metrization", "--corpus", "exhaustive:7"], "budget"),
        (["verify", "--theorem", "metrization", "--corpus", "bogus"], "corpus"),
        (["random", "--points", "0"], "points"),
        (["laws", "--quantale", "reals"], "quantale"),
    ],
)
def test_input_errors(capsys, argv, needle):
    code, _, err = call(capsys, *argv)
    assert code == 2 and needle in err


def test_malformed_and_invalid_documents(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert call(capsys, "connected", "--in", bad)[0] == 2
    bad.write_text(json.dumps({"type": "topology", "points": ["a", "b"], "opens": [[], ["a"]]}))
    code, _, err = call(capsys, "connected", "--in", bad)
    assert code == 2 and "whole space" in err
    bad.write_text(json.dumps({"type": "metric", "quantale": {"kind": "ext_rational"}, "points": ["a"], "d": [["1"]]}))
    assert call(capsys, "connected", "--in", bad)[0] == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["connected", "--bogus"])
    assert exc.value.code == 2


def test_scale_choice_is_exclusive(capsys, fixtures):
    code, _, err = call(capsys, "components", "--in", fixtures / "grid5.json", "--canonical", "--uniform", "1")
    assert code == 2 and "exactly one" in err
