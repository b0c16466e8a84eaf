from fractions import Fraction

import pytest

from qconn.quantale import EXT, INF, OmegaQuantale, QuantaleError
from qconn.scales import (
    ALL,
    BOUNDED_EXISTS,
    STRICT,
    UNIFORM,
    WEAK,
    BoundedBelowFixed,
    ExpansionRate,
    Scale,
    ScaleSystemError,
    ball_of_set,
    canonical_finest_scale,
    constant_scale,
    enumerate_scales,
    find_walk,
    finest_scale,
    is_member_scale,
    is_sigma_connected,
    is_sigma_continuous,
    is_sigma_open,
    is_step,
    r_components,
    scale_balls,
    sigma_clopen_sets,
    sigma_components,
)
from qconn.spaces import VMetricSpace, flagg_metrize, open_ball, standard_space

F = Fraction


def sier():
    return flagg_metrize(standard_space("sierpinski"))


def grid5():
    return standard_space("grid", 5, "1/4")


def test_scale_positivity():
    G = grid5()
    with pytest.raises(QuantaleError):
        Scale(G, (F(1),) * 4 + (F(0),))


def test_steps():
    G = grid5()
    R = constant_scale(G, F(1, 4))
    assert all(is_step(G, R, x, x) for x in range(5))
    assert is_step(G, R, 0, 1, WEAK)
    assert not is_step(G, R, 0, 1, STRICT)
    T = standard_space("two_point_infinity")
    assert not is_step(T, constant_scale(T, F(10**6)), 0, 1)


def test_components():
    D = flagg_metrize(standard_space("discrete", 2))
    assert len(r_components(D, canonical_finest_scale(D)).blocks) == 2
    # a radius above every distance joins the two points
    assert r_components(D, constant_scale(D, D.quantale.top)).connected
    counts = {len(r_components(D, R).blocks) for R in enumerate_scales(D, ALL).scales}
    assert counts == {1, 2}
    S = sier()
    for R in enumerate_scales(S, ALL).scales:
        assert r_components(S, R).connected
    G = grid5()
    assert r_components(G, constant_scale(G, F(1, 4)), WEAK).connected
    assert len(r_components(G, constant_scale(G, F(1, 4)), STRICT).blocks) == 5


def test_find_walk():
    G = grid5()
    R = constant_scale(G, F(1, 4))
    assert find_walk(G, R, 2, 2).points == ("1/2",)
    w = find_walk(G, R, 0, 4, WEAK)
    assert w.points == ("0", "1/4", "1/2", "3/4", "1") and w.steps == 4
    assert find_walk(G, R, 0, 4, STRICT) is None
    T = standard_space("two_point_infinity")
    assert find_walk(T, constant_scale(T, F(7)), 0, 1) is None


def test_walk_is_shortest_and_least():
    G = standard_space("grid", 5, "1/4")
    w = find_walk(G, constant_scale(G, F(1, 2)), 0, 4, WEAK)
    assert w.indices == (0, 2, 4)


def test_ball_of_set():
    M = sier()
    R = canonical_finest_scale(M)
    assert ball_of_set(M, R, 0) == 0
    assert ball_of_set(M, R, 0b01) == 0b01
    assert ball_of_set(M, R, 0b10) == 0b11
    assert ball_of_set(M, R, 0b11) == open_ball(M, 0, R(0)) | open_ball(M, 1, R(1))


def test_membership():
    G = standard_space("grid", 3, "1/2")
    R = Scale(G, (F(1, 4), F(1, 2), F(1, 4)))
    c = constant_scale(G, F(1, 4))
    assert is_member_scale(c, UNIFORM) and is_member_scale(c, BOUNDED_EXISTS)
    assert not is_member_scale(R, UNIFORM)
    assert not is_member_scale(R, BoundedBelowFixed(F(1, 2)))
    assert is_member_scale(R, BoundedBelowFixed(F(1, 4)))
    e = ExpansionRate(lambda v: F(1, 2))
    assert e.contains(constant_scale(G, F(1, 2)))
    assert e.reference_points(constant_scale(G, F(1, 2))) == [0, 1, 2]
    assert not e.contains(R)


def test_bounded_fixed_needs_positive_eps():
    G = grid5()
    with pytest.raises(ScaleSystemError):
        BoundedBelowFixed(F(0)).contains(constant_scale(G, F(1)))
    M = sier()
    with pytest.raises(ScaleSystemError):
        BoundedBelowFixed({EXT: F(1)}).contains(canonical_finest_scale(M))


def test_enumeration_count_omega_ground_one():
    q = OmegaQuantale(["u"])
    z = q.zero
    M = VMetricSpace(q, ["x", "y"], [[z, z], [z, z]])
    positives = [e for e in q.enumerate() if q.well_above(e, q.zero)]
    en = enumerate_scales(M, ALL)
    assert len(en.scales) == len(positives) ** 2 == 9
    assert en.exhaustive


def test_enumeration_uniform_grid():
    G = standard_space("grid", 3, "1/2")
    en = enumerate_scales(G, UNIFORM)
    radii = {R(0) for R in en.scales}
    assert all(len(set(R.radii)) == 1 for R in en.scales)
    assert {F(1, 2), F(1), INF} <= radii
    assert en.exhaustive


def test_enumeration_budget_one_keeps_finest():
    M = sier()
    en = enumerate_scales(M, ALL, budget=1)
    assert len(en.scales) == 1 and not en.exhaustive
    canon = canonical_finest_scale(M)
    assert scale_balls(M, en.scales[0]) == scale_balls(M, canon)


def test_expansion_tables():
    G = standard_space("grid", 3, "1/2")
    steps = ExpansionRate([(F(0), F(1, 4)), (F(1), F(1))])
    assert steps.alpha_of(EXT, F(1, 2)) == F(1, 4)
    assert steps.alpha_of(EXT, INF) == F(1)
    assert enumerate_scales(G, steps, reduce=True).scales
    q = OmegaQuantale(["u"])
    table = {e: q.top for e in q.enumerate()}
    z = q.zero
    M = VMetricSpace(q, ["x", "y"], [[z, z], [z, z]])
    only_top = enumerate_scales(M, ExpansionRate(table)).scales
    assert only_top and all(R.radii == (q.top, q.top) for R in only_top)
    with pytest.raises(ScaleSystemError):
        ExpansionRate({}).alpha_of(q, z)


def test_empty_scale_system_reported():
    class Nothing(type(ALL)):
        name = "nothing"

        def _plans(self, M):
            return []

    with pytest.raises(ScaleSystemError, match="empty scale system"):
        enumerate_scales(grid5(), Nothing())


def test_canonical_scale_balls():
    M = sier()
    assert scale_balls(M, canonical_finest_scale(M)) == (0b01, 0b11)
    for n in (1, 2, 3):
        D = flagg_metrize(standard_space("discrete", n))
        assert scale_balls(D, canonical_finest_scale(D)) == tuple(1 << i for i in range(n))
        I = flagg_metrize(standard_space("indiscrete", n))
        assert scale_balls(I, canonical_finest_scale(I)) == ((1 << n) - 1,) * n
    with pytest.raises(Exception):
        canonical_finest_scale(grid5())


def test_finest_scale_matches_canonical():
    for name, args in (("sierpinski", ()), ("discrete", (3,)), ("indiscrete", (2,))):
        M = flagg_metrize(standard_space(name, *args))
        assert scale_balls(M, finest_scale(M)) == scale_balls(M, canonical_finest_scale(M))


def test_sigma_clopen():
    T = standard_space("two_point_infinity")
    assert sigma_clopen_sets(T, UNIFORM) == [0, 1, 2, 3]
    M = sier()
    assert sigma_clopen_sets(M, ALL) == [0, 3]
    G = grid5()
    assert 0 in sigma_clopen_sets(G, UNIFORM) and G.full in sigma_clopen_sets(G, UNIFORM)
    assert is_sigma_open(M, ALL, 0b01) and not is_sigma_open(M, ALL, 0b10)


def test_sigma_components():
    one = flagg_metrize(standard_space("discrete", 1))
    assert len(sigma_components(one, ALL).blocks) == 1
    T = standard_space("two_point_infinity")
    assert len(sigma_components(T, UNIFORM).blocks) == 2
    M = sier()
    assert sigma_components(M, ALL, fast=False).connected
    assert sigma_components(M, ALL).connected


def test_sigma_connected_grid():
    G = grid5()
    # strict steps with radius just above the spacing connect; uniform scales can be arbitrarily small
    assert not is_sigma_connected(G, UNIFORM).connected
    assert not is_sigma_connected(G, ALL).connected
    assert is_sigma_connected(G, BoundedBelowFixed(F(1, 2))).connected
    v = is_sigma_connected(G, BoundedBelowFixed(F(1, 4)))
    assert not v.connected and v.witness is not None


def test_sigma_continuity():
    M = sier()
    T = standard_space("two_point_infinity")
    for sigma in (ALL, UNIFORM):
        assert is_sigma_continuous([0, 1], M, M, sigma).continuous
        assert is_sigma_continuous([0, 0], M, T, sigma).continuous
    res = is_sigma_continuous([0, 1], M, T, ALL)
    assert not res.continuous and res.witness is not None
    D = flagg_metrize(standard_space("discrete", 2))
    assert is_sigma_continuous([0, 1], D, T, ALL).continuous
