"""Scales, scale systems, steps, walks, and connectedness.

A scale assigns every point a positive radius.  Everything a scale does to a
finite space (steps, walks, components, the ball operator) depends only on the
ball it gives each point, so quantifiers over scales are evaluated over one
representative radius per achievable ball.  Those representatives come from
:func:`qconn.spaces.radius_candidates`.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .quantale import EXT, BudgetError, OmegaQuantale, QuantaleError, big_meet, bits, ext
from .spaces import SpaceError, VMetricSpace, popcount, radius_candidates

__all__ = [
    "STRICT",
    "WEAK",
    "Scale",
    "Walk",
    "ComponentPartition",
    "ScaleEnumeration",
    "Verdict",
    "ContinuityResult",
    "ScaleSystem",
    "All",
    "Uniform",
    "BoundedBelowExists",
    "BoundedBelowFixed",
    "ExpansionRate",
    "ALL",
    "UNIFORM",
    "BOUNDED_EXISTS",
    "is_step",
    "scale_balls",
    "r_components",
    "find_walk",
    "ball_of_set",
    "is_member_scale",
    "enumerate_scales",
    "canonical_finest_scale",
    "finest_scale",
    "constant_scale",
    "sigma_open_witness",
    "is_sigma_open",
    "sigma_clopen_sets",
    "sigma_components",
    "is_sigma_connected",
    "is_sigma_continuous",
    "ScaleSystemError",
    "DEFAULT_BUDGET",
]

log = logging.getLogger(__name__)

STRICT = "strict"
WEAK = "weak"
DEFAULT_BUDGET = 10**6
CLOPEN_SCAN_LIMIT = 20


class ScaleSystemError(ValueError):
    """A scale system cannot be evaluated on the given space."""


def _check_variant(variant: str) -> None:
    if variant not in (STRICT, WEAK):
        raise ValueError(f"step variant must be 'strict' or 'weak', not {variant!r}")


@dataclass(frozen=True, eq=False)
class Scale:
    space: VMetricSpace
    radii: tuple
    name: str = "scale"

    def __post_init__(self):
        q = self.space.quantale
        radii = tuple(self.radii)
        object.__setattr__(self, "radii", radii)
        if len(radii) != self.space.n:
            raise SpaceError("a scale needs one radius per point")
        for r in radii:
            q.check(r)
            if not q.well_above(r, q.zero):
                raise QuantaleError(f"radius {r!r} is not positive")

    def __call__(self, x: int):
        return self.radii[x]

    def restrict(self, S: int, sub: VMetricSpace) -> "Scale":
        return Scale(sub, tuple(self.radii[i] for i in bits(S)), self.name)


def constant_scale(M: VMetricSpace, eps, name: str | None = None) -> Scale:
    return Scale(M, (eps,) * M.n, name or f"uniform:{eps!r}")


@dataclass(frozen=True)
class Walk:
    points: tuple
    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def steps(self) -> int:
        return len(self.indices) - 1


@dataclass(frozen=True)
class ComponentPartition:
    blocks: tuple[int, ...]
    scale_id: str = ""
    exhaustive: bool = True

    def block_of(self, x: int) -> int:
        for b in self.blocks:
            if b >> x & 1:
                return b
        raise SpaceError(f"point {x} not covered")

    def same(self, x: int, y: int) -> bool:
        return bool(self.block_of(x) >> y & 1)

    @property
    def connected(self) -> bool:
        return len(self.blocks) == 1

    def label_blocks(self, space) -> list[list[str]]:
        return [space.labels_of(b) for b in self.blocks]


def _partition_from_labels(labels: Sequence[int], scale_id: str, exhaustive: bool = True) -> ComponentPartition:
    blocks: dict[int, int] = {}
    for x, lab in enumerate(labels):
        blocks[int(lab)] = blocks.get(int(lab), 0) | (1 << x)
    ordered = sorted(blocks.values(), key=lambda b: (b & -b))
    return ComponentPartition(tuple(ordered), scale_id, exhaustive)


@dataclass
class ScaleEnumeration:
    scales: list[Scale]
    exhaustive: bool


@dataclass
class Verdict:
    connected: bool
    witness: Scale | None = None
    exhaustive: bool = True
    rule: str = ""


@dataclass
class ContinuityResult:
    continuous: bool
    witness: Scale | None = None
    exhaustive: bool = True


# --------------------------------------------------------------------------
# balls and steps


def _ball(M: VMetricSpace, x: int, r, variant: str) -> int:
    q = M.quantale
    row = M.d[x]
    if variant == STRICT:
        return sum(1 << y for y in range(M.n) if q.well_above(r, row[y]))
    return sum(1 << y for y in range(M.n) if q.leq(row[y], r))


def scale_balls(M: VMetricSpace, R: Scale, variant: str = STRICT) -> tuple[int, ...]:
    """The ball of every point under ``R``."""
    _check_variant(variant)
    return tuple(_ball(M, x, R.radii[x], variant) for x in range(M.n))


def is_step(M: VMetricSpace, R: Scale, x: int, y: int, variant: str = STRICT) -> bool:
    _check_variant(variant)
    q = M.quantale
    if variant == STRICT:
        return q.well_above(R(x), M.d[x][y]) or q.well_above(R(y), M.d[y][x])
    return q.leq(M.d[x][y], R(x)) or q.leq(M.d[y][x], R(y))


def _labels(balls_batch) -> np.ndarray:
    return _kernels.component_labels(np.asarray(balls_batch, dtype=np.uint64).reshape(len(balls_batch), -1))


def r_components(M: VMetricSpace, R: Scale, variant: str = STRICT) -> ComponentPartition:
    """Equivalence classes of the walk relation of ``R``."""
    if M.n == 0:
        return ComponentPartition((), R.name)
    balls = scale_balls(M, R, variant)
    return _partition_from_labels(_labels([balls])[0], R.name)


def _adjacency(balls: Sequence[int]) -> list[int]:
    n = len(balls)
    adj = list(balls)
    for x in range(n):
        for y in bits(balls[x]):
            adj[y] |= 1 << x
    return adj


def find_walk(M: VMetricSpace, R: Scale, x: int, z: int, variant: str = STRICT) -> Walk | None:
    """A shortest walk from ``x`` to ``z``, lexicographically least by point index."""
    adj = _adjacency(scale_balls(M, R, variant))
    # distances to z, then greedy descent from x
    dist = {z: 0}
    frontier = [z]
    while frontier and x not in dist:
        nxt = []
        for u in frontier:
            for v in bits(adj[u]):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    if x not in dist:
        return None
    path = [x]
    while path[-1] != z:
        u = path[-1]
        path.append(min(v for v in bits(adj[u]) if dist.get(v) == dist[u] - 1))
    return Walk(tuple(M.points[i] for i in path), tuple(path))


def ball_of_set(M: VMetricSpace, R: Scale, S: int) -> int:
    """Points within the ball of some member of ``S`` (strict steps)."""
    out = 0
    for s in bits(S):
        out |= _ball(M, s, R(s), STRICT)
    return out


# --------------------------------------------------------------------------
# scale systems


def _keyed_by_quantale(value) -> bool:
    return isinstance(value, Mapping) and bool(value) and all(
        isinstance(k, (OmegaQuantale, type(EXT))) for k in value
    )


def _per_quantale(value, q, what: str):
    if _keyed_by_quantale(value):
        if q not in value:
            raise ScaleSystemError(f"no {what} given for {q!r}")
        return value[q]
    return value


class ScaleSystem:
    """A family of scales per space.

    Subclasses describe the family through ``_plans``: each plan gives, per
    point, a lower bound on the radius (None for no bound).  ``uniform``
    systems additionally force all radii equal.
    """

    name = "sigma"
    hereditary = True
    uniform = False

    def contains(self, R: Scale) -> bool:
        raise NotImplementedError

    def _plans(self, M: VMetricSpace) -> list[tuple]:
        return [(None,) * M.n]

    def __repr__(self) -> str:
        return self.name


class All(ScaleSystem):
    name = "all"

    def contains(self, R: Scale) -> bool:
        return True


class Uniform(ScaleSystem):
    name = "uniform"
    uniform = True

    def contains(self, R: Scale) -> bool:
        return len(set(R.radii)) <= 1


class BoundedBelowExists(ScaleSystem):
    """Scales bounded below by some positive constant."""

    name = "bounded-exists"

    def contains(self, R: Scale) -> bool:
        q = R.space.quantale
        m = big_meet(q, R.radii)
        if q.well_above(m, q.zero):
            log.debug("bounded-exists: meet of radii %r is positive", m)
            return True
        for eps in radius_candidates(R.space).values:
            if all(q.leq(eps, r) for r in R.radii):
                log.debug("bounded-exists: positive lower bound %r found by search", eps)
                return True
        return False


class BoundedBelowFixed(ScaleSystem):
    """Scales with every radius at least a fixed positive ``eps``.

    ``eps`` is one value or a mapping from quantale to value.
    """

    def __init__(self, eps):
        self.eps = eps

    @property
    def name(self) -> str:
        if _keyed_by_quantale(self.eps):
            return "bounded:{" + ",".join(f"{q!r}={v!r}" for q, v in self.eps.items()) + "}"
        return f"bounded:{self.eps!r}"

    def eps_for(self, q):
        eps = _per_quantale(self.eps, q, "lower bound")
        if not q.contains(eps):
            raise ScaleSystemError(f"lower bound {eps!r} is not an element of {q!r}")
        if not q.well_above(eps, q.zero):
            raise ScaleSystemError(f"lower bound {eps!r} is not positive")
        return eps

    def contains(self, R: Scale) -> bool:
        q = R.space.quantale
        eps = self.eps_for(q)
        return all(q.leq(eps, r) for r in R.radii)

    def _plans(self, M):
        return [(self.eps_for(M.quantale),) * M.n]


class ExpansionRate(ScaleSystem):
    """Scales with a point of reference x such that R(y) >= alpha(d(x, y)) for all y.

    ``alpha`` is one table or a mapping from quantale to table.  A table is a
    callable, a dict from values to values (Omega), or a list of
    ``(threshold, value)`` pairs read as a step function (extended rationals).
    """

    name = "expansion"
    hereditary = False

    def __init__(self, alpha):
        self.alpha = alpha

    def alpha_of(self, q, v):
        table = _per_quantale(self.alpha, q, "expansion rate")
        if callable(table):
            out = table(v)
        elif isinstance(table, Mapping):
            if v not in table:
                raise ScaleSystemError(f"expansion rate undefined at {v!r}")
            out = table[v]
        else:
            out = None
            for t, val in table:
                if ext(t) <= v:
                    out = val
            if out is None:
                raise ScaleSystemError(f"expansion rate undefined at {v!r}")
        if not q.contains(out):
            raise ScaleSystemError(f"expansion rate value {out!r} is not in {q!r}")
        return out

    def reference_points(self, R: Scale) -> list[int]:
        M, q = R.space, R.space.quantale
        return [
            x for x in range(M.n) if all(q.leq(self.alpha_of(q, M.d[x][y]), R(y)) for y in range(M.n))
        ]

    def contains(self, R: Scale) -> bool:
        return bool(self.reference_points(R))

    def _plans(self, M):
        q = M.quantale
        return [tuple(self.alpha_of(q, M.d[x][y]) for y in range(M.n)) for x in range(M.n)]


ALL = All()
UNIFORM = Uniform()
BOUNDED_EXISTS = BoundedBelowExists()


def is_member_scale(R: Scale, sigma: ScaleSystem) -> bool:
    return sigma.contains(R)


# --------------------------------------------------------------------------
# radius options


def _options(M: VMetricSpace, x: int, variant: str, floor, reduce: bool) -> list[tuple]:
    """(radius, ball) pairs for point ``x``; one per distinct ball when reducing."""
    key = ("opts", x, variant, floor, reduce)
    hit = M._cache.get(key)
    if hit is not None:
        return hit
    q = M.quantale
    floors = () if floor is None else (floor,)
    out = []
    seen = set()
    for r in radius_candidates(M, floors, variant).values:
        if floor is not None and not q.leq(floor, r):
            continue
        b = _ball(M, x, r, variant)
        if reduce:
            if b in seen:
                continue
            seen.add(b)
        out.append((r, b))
    M._cache[key] = out
    return out


def _uniform_options(M: VMetricSpace, variant: str, floor, reduce: bool) -> list[tuple]:
    key = ("uopts", variant, floor, reduce)
    hit = M._cache.get(key)
    if hit is not None:
        return hit
    q = M.quantale
    floors = () if floor is None else (floor,)
    out = []
    seen = set()
    for r in radius_candidates(M, floors, variant).values:
        if floor is not None and not q.leq(floor, r):
            continue
        balls = tuple(_ball(M, x, r, variant) for x in range(M.n))
        if reduce:
            if balls in seen:
                continue
            seen.add(balls)
        out.append((r, balls))
    M._cache[key] = out
    return out


def _candidates_complete(M: VMetricSpace, sigma: ScaleSystem, variant: str) -> bool:
    floors = {f for plan in sigma._plans(M) for f in plan if f is not None}
    if not floors:
        return radius_candidates(M, (), variant).complete
    return all(radius_candidates(M, (f,), variant).complete for f in floors)


def _uniform_floor(q, plan):
    floors = [f for f in plan if f is not None]
    if not floors:
        return None
    f = floors[0]
    for g in floors[1:]:
        f = q.join(f, g)
    return f


def _scale_space(M, sigma, variant, reduce):
    """Yield (plan options) where each is a list per point of (radius, ball)."""
    spaces = []
    for plan in sigma._plans(M):
        if sigma.uniform:
            spaces.append(("uniform", _uniform_options(M, variant, _uniform_floor(M.quantale, plan), reduce)))
        else:
            spaces.append(("pointwise", [_options(M, x, variant, plan[x], reduce) for x in range(M.n)]))
    return spaces


def _space_size(kind, opts) -> int:
    if kind == "uniform":
        return len(opts)
    size = 1
    for o in opts:
        size *= len(o)
    return size


def _finest_choice(opts: list[tuple]) -> tuple:
    """Option whose ball sits inside every other one, else the smallest ball."""
    for r, b in opts:
        if all(b & ~c == 0 for _, c in opts):
            return r, b
    return min(opts, key=lambda o: popcount(o[1]))


def _enumerate_raw(M, sigma, variant, budget, reduce, seed, allow_sampling):
    """Return (radii tuples, balls array, exhaustive)."""
    _check_variant(variant)
    spaces = _scale_space(M, sigma, variant, reduce)
    spaces = [(k, o) for k, o in spaces if _space_size(k, o) > 0]
    if not spaces:
        raise ScaleSystemError(f"empty scale system: no {sigma!r} scale exists on this space")
    total = sum(_space_size(k, o) for k, o in spaces)
    complete = _candidates_complete(M, sigma, variant)
    radii, balls = [], []
    seen = set()

    def push(rs, bs):
        if reduce:
            if bs in seen:
                return
            seen.add(bs)
        radii.append(rs)
        balls.append(bs)

    if total <= budget:
        for kind, opts in spaces:
            if kind == "uniform":
                for r, bs in opts:
                    push((r,) * M.n, bs)
            else:
                for combo in itertools.product(*opts):
                    push(tuple(c[0] for c in combo), tuple(c[1] for c in combo))
        exhaustive = complete
    else:
        if not allow_sampling:
            raise BudgetError(f"{total} scales exceed the budget of {budget}")
        kind, opts = spaces[0]
        if kind == "uniform":
            r, bs = min(opts, key=lambda o: sum(map(popcount, o[1])))
            push((r,) * M.n, bs)
        else:
            fin = [_finest_choice(o) for o in opts]
            push(tuple(f[0] for f in fin), tuple(f[1] for f in fin))
        rng = random.Random(seed)
        tries = 0
        while len(radii) < budget and tries < 4 * budget:
            tries += 1
            kind, opts = spaces[rng.randrange(len(spaces))]
            if kind == "uniform":
                r, bs = opts[rng.randrange(len(opts))]
                push((r,) * M.n, bs)
            else:
                combo = [o[rng.randrange(len(o))] for o in opts]
                push(tuple(c[0] for c in combo), tuple(c[1] for c in combo))
        exhaustive = False
    if isinstance(sigma, BoundedBelowExists):
        keep = [i for i, rs in enumerate(radii) if sigma.contains(Scale(M, rs))]
        radii = [radii[i] for i in keep]
        balls = [balls[i] for i in keep]
    arr = np.array(balls, dtype=np.uint64).reshape(len(balls), M.n)
    return radii, arr, exhaustive


def enumerate_scales(
    M: VMetricSpace,
    sigma: ScaleSystem,
    budget: int = DEFAULT_BUDGET,
    variant: str = STRICT,
    reduce: bool = False,
    seed: int = 0,
    allow_sampling: bool = True,
) -> ScaleEnumeration:
    """All ``sigma``-scales over the candidate radii of ``M``.

    With ``reduce`` only one scale per distinct assignment of balls is kept,
    which loses nothing for any question about steps, walks, or balls.  Past
    ``budget`` scales a seeded sample is returned (led by the finest scale)
    and ``exhaustive`` is cleared.
    """
    radii, _, exhaustive = _enumerate_raw(M, sigma, variant, budget, reduce, seed, allow_sampling)
    return ScaleEnumeration([Scale(M, r, f"{sigma.name}#{i}") for i, r in enumerate(radii)], exhaustive)


def canonical_finest_scale(M: VMetricSpace) -> Scale:
    """R*(x) = the family of subsets of the opens containing x (Flagg metrics only)."""
    if M.flagg is None:
        raise SpaceError("canonical scale needs a Flagg metrization")
    q = M.quantale
    radii = []
    for x in range(M.n):
        g = sum(1 << i for i, U in enumerate(M.flagg.ground_sets) if U is not None and U >> x & 1)
        radii.append(q.principal(g))
    return Scale(M, tuple(radii), "canonical")


def finest_scale(M: VMetricSpace, variant: str = STRICT) -> Scale | None:
    """A scale whose balls are inside those of every other scale, if one exists."""
    radii = []
    for x in range(M.n):
        opts = _options(M, x, variant, None, True)
        r, b = _finest_choice(opts)
        if any(b & ~c for _, c in opts):
            return None
        radii.append(r)
    return Scale(M, tuple(radii), "finest")


# --------------------------------------------------------------------------
# Sigma-open sets


def sigma_open_witness(M: VMetricSpace, sigma: ScaleSystem, targets: Sequence[int], variant: str = STRICT) -> Scale | None:
    """A ``sigma``-scale whose ball at every x lies inside ``targets[x]``.

    The search is pointwise: any admissible radius per point may be combined
    freely for pointwise systems, a single radius is shared for uniform ones,
    and each reference point of an expansion-rate system is tried in turn.
    """
    for kind, opts in _scale_space(M, sigma, variant, True):
        if kind == "uniform":
            for r, balls in opts:
                if all(b & ~t == 0 for b, t in zip(balls, targets)):
                    return Scale(M, (r,) * M.n, f"{sigma.name}-witness")
            continue
        chosen = []
        for x in range(M.n):
            fits = [o for o in opts[x] if o[1] & ~targets[x] == 0]
            if not fits:
                break
            chosen.append(_finest_choice(fits)[0])
        else:
            R = Scale(M, tuple(chosen), f"{sigma.name}-witness")
            if sigma.contains(R):
                return R
    return None


def is_sigma_open(M: VMetricSpace, sigma: ScaleSystem, A: int, variant: str = STRICT) -> bool:
    targets = [A if A >> x & 1 else M.full for x in range(M.n)]
    return sigma_open_witness(M, sigma, targets, variant) is not None


def sigma_clopen_sets(M: VMetricSpace, sigma: ScaleSystem, budget: int = CLOPEN_SCAN_LIMIT, variant: str = STRICT) -> list[int]:
    """Every A such that A and its complement are both ``sigma``-open."""
    if M.n > budget:
        raise BudgetError(f"clopen search over 2^{M.n} subsets exceeds the budget")
    openness = {}
    for A in range(1 << M.n):
        openness[A] = is_sigma_open(M, sigma, A, variant)
    return [A for A in range(1 << M.n) if openness[A] and openness[M.full & ~A]]


# --------------------------------------------------------------------------
# Sigma-components and connectedness


def _meet_partition(labels: np.ndarray, scale_id: str, exhaustive: bool) -> ComponentPartition:
    n = labels.shape[1]
    if labels.shape[0] == 0:
        return ComponentPartition((), scale_id, exhaustive)
    _, inv = np.unique(labels.T, axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    first = {}
    out = []
    for x in range(n):
        out.append(first.setdefault(int(inv[x]), x))
    return _partition_from_labels(out, scale_id, exhaustive)


def sigma_components(
    M: VMetricSpace,
    sigma: ScaleSystem,
    budget: int = DEFAULT_BUDGET,
    variant: str = STRICT,
    fast: bool = True,
    seed: int = 0,
) -> ComponentPartition:
    """Meet of the component partitions of every ``sigma``-scale.

    When the enumeration had to be sampled the result can only be coarser
    than the true partition, and ``exhaustive`` is False.
    """
    if M.n == 0:
        return ComponentPartition((), sigma.name)
    if fast and isinstance(sigma, All):
        R = finest_scale(M, variant)
        if R is not None:
            part = r_components(M, R, variant)
            complete = radius_candidates(M, (), variant).complete
            return ComponentPartition(part.blocks, sigma.name, complete)
    _, balls, exhaustive = _enumerate_raw(M, sigma, variant, budget, True, seed, True)
    return _meet_partition(_kernels.component_labels(balls), sigma.name, exhaustive)


def is_sigma_connected(
    M: VMetricSpace,
    sigma: ScaleSystem,
    budget: int = DEFAULT_BUDGET,
    variant: str = STRICT,
    fast: bool = True,
    seed: int = 0,
) -> Verdict:
    """Connected for every ``sigma``-scale; the witness is a disconnecting scale."""
    if M.n == 0:
        return Verdict(False, None, True, "empty")
    if fast and isinstance(sigma, All):
        R = finest_scale(M, variant)
        if R is not None:
            part = r_components(M, R, variant)
            complete = radius_candidates(M, (), variant).complete
            return Verdict(part.connected, None if part.connected else R, complete, "finest")
    radii, balls, exhaustive = _enumerate_raw(M, sigma, variant, budget, True, seed, True)
    labels = _kernels.component_labels(balls)
    bad = np.nonzero(labels.max(axis=1) > 0)[0]
    if len(bad):
        return Verdict(False, Scale(M, radii[int(bad[0])], f"{sigma.name}-separating"), True, "enumeration")
    return Verdict(True, None, exhaustive, "enumeration")


def is_sigma_continuous(
    f: Sequence[int],
    X: VMetricSpace,
    Y: VMetricSpace,
    sigma: ScaleSystem,
    budget: int = DEFAULT_BUDGET,
    variant: str = STRICT,
    seed: int = 0,
) -> ContinuityResult:
    """For every sigma-scale R on Y, some sigma-scale S on X keeps S-steps inside R-balls.

    ``f`` maps point indices of X to point indices of Y.
    """
    f = tuple(f)
    if len(f) != X.n or any(not 0 <= v < Y.n for v in f):
        raise SpaceError("map must send every point of X to a point of Y")
    radii, balls, exhaustive = _enumerate_raw(Y, sigma, variant, budget, True, seed, True)
    for rs, bs in zip(radii, balls.tolist()):
        targets = []
        for x in range(X.n):
            B = int(bs[f[x]])
            targets.append(sum(1 << x2 for x2 in range(X.n) if B >> f[x2] & 1))
        if sigma_open_witness(X, sigma, targets, variant) is None:
            return ContinuityResult(False, Scale(Y, rs, f"{sigma.name}-witness"), True)
    return ContinuityResult(True, None, exhaustive)
