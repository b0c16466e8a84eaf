import pytest

from qconn.laws import check_quantale_laws
from qconn.quantale import EXT, OmegaQuantale


class UnionAddOmega(OmegaQuantale):
    """Addition replaced by meet (union of families): breaks the identity law."""

    def add(self, a, b):
        return self.meet(a, b)


@pytest.mark.parametrize("size", [0, 1, 2])
def test_omega_small_exhaustive(size):
    rep = check_quantale_laws(OmegaQuantale([str(i) for i in range(size)]))
    assert rep.ok, rep.failures
    assert all(r.exhaustive for r in rep.results)


def test_ext_sampled():
    rep = check_quantale_laws(EXT, budget=1000, seed=0)
    assert rep.ok, rep.failures
    assert all(r.cases > 0 for r in rep.results)


def test_corrupted_addition_is_caught():
    rep = check_quantale_laws(UnionAddOmega(["u"]))
    assert not rep.ok
    names = {r.name for r in rep.failures}
    assert any("identity" in n or "distrib" in n for n in names), names
    assert all(r.witness is not None for r in rep.failures)


def test_report_json_shape():
    doc = check_quantale_laws(OmegaQuantale(["u"])).to_json()
    assert doc["ok"] is True
    assert {"law", "passed", "cases", "exhaustive", "witness"} <= set(doc["laws"][0])


def test_deterministic():
    a = check_quantale_laws(EXT, budget=200, seed=7).to_json()
    b = check_quantale_laws(EXT, budget=200, seed=7).to_json()
    assert a == b
