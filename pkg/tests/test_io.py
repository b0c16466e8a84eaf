import json
from fractions import Fraction

import pytest

from qconn import io
from qconn.quantale import EXT, OmegaQuantale
from qconn.scales import ExpansionRate, canonical_finest_scale
from qconn.spaces import flagg_metrize, standard_space


def test_topology_round_trip(fixtures):
    text = (fixtures / "sierpinski.json").read_text()
    assert io.dumps(io.topology_to_json(io.topology_from_json(io.loads(text)))) == text


@pytest.mark.parametrize("name", ["grid5.json", "two_point_infinity.json"])
def test_metric_round_trip(fixtures, name):
    text = (fixtures / name).read_text()
    assert io.dumps(io.metric_to_json(io.metric_from_json(io.loads(text)))) == text


def test_flagg_metric_round_trip():
    M = flagg_metrize(standard_space("sierpinski"))
    text = io.dumps(io.metric_to_json(M))
    back = io.metric_from_json(io.loads(text))
    assert back.d == M.d and back.quantale == M.quantale
    assert io.dumps(io.metric_to_json(back)) == text


def test_scale_round_trip():
    M = flagg_metrize(standard_space("sierpinski"))
    R = canonical_finest_scale(M)
    doc = io.scale_to_json(R)
    assert io.scale_from_json(json.loads(io.dumps(doc)), M).radii == R.radii


def test_bad_documents():
    with pytest.raises(io.DocumentError):
        io.loads("{")
    with pytest.raises(io.DocumentError):
        io.topology_from_json({"type": "metric"})
    with pytest.raises(io.DocumentError):
        io.metric_from_json({"type": "metric", "quantale": {"kind": "reals"}, "points": [], "d": []})
    M = standard_space("grid", 2, 1)
    with pytest.raises(io.DocumentError):
        io.scale_from_json({"type": "scale", "points": ["x", "y"], "radii": ["1", "1"]}, M)
    with pytest.raises(io.DocumentError):
        io.scale_from_json({"type": "scale", "points": ["0", "1"], "radii": ["0", "1"]}, M)


def test_alpha_tables():
    pairs = io.alpha_from_json({"type": "alpha", "table": [["1", "1/2"], ["0", "1/4"]]}, EXT)
    assert pairs == [(Fraction(0), Fraction(1, 4)), (Fraction(1), Fraction(1, 2))]
    sigma = ExpansionRate(pairs)
    assert sigma.alpha_of(EXT, Fraction(3, 2)) == Fraction(1, 2)
    q = OmegaQuantale(["u"])
    table = io.alpha_from_json({"type": "alpha", "table": [[[[0]], [[]]]]}, q)
    assert table == {q.zero: q.element([[]])}
