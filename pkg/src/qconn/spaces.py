"""Finite topological spaces, quantale-valued metric spaces, and maps between them.

Point sets are integer bitmasks over point indices throughout; use
:meth:`FiniteTopSpace.mask` / :meth:`FiniteTopSpace.labels_of` (and the same
methods on :class:`VMetricSpace`) to convert from and to labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .quantale import (
    EXT,
    INF,
    OMEGA_ENUM_LIMIT,
    BudgetError,
    OmegaElement,
    OmegaQuantale,
    QuantaleError,
    big_meet,
    bits,
    ext,
)

__all__ = [
    "SpaceError",
    "FiniteTopSpace",
    "VMetricSpace",
    "FlaggInfo",
    "RadiusCandidates",
    "flagg_metrize",
    "mutual_metrize",
    "open_ball",
    "induced_topology",
    "closure_of",
    "entourage",
    "product_topology",
    "subspace",
    "standard_space",
    "radius_candidates",
    "popcount",
    "MAX_POINTS",
    "OPEN_BUDGET",
]

MAX_POINTS = 64
OPEN_BUDGET = 1 << 16
CANDIDATE_BUDGET = 1 << 14


class SpaceError(ValueError):
    """Invalid space, point, or subset."""


def popcount(m: int) -> int:
    return bin(m).count("1")


def _set_key(m: int):
    return (popcount(m), bits(m))


class _Points:
    points: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise SpaceError(f"unknown point {label!r}") from None

    def mask(self, labels: Iterable) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> list[str]:
        return [self.points[i] for i in bits(mask)]

    def _init_points(self, points):
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise SpaceError("duplicate point labels")
        if len(self.points) > MAX_POINTS:
            raise BudgetError(f"{len(self.points)} points exceeds the {MAX_POINTS}-point budget")
        self._index = {p: i for i, p in enumerate(self.points)}


# --------------------------------------------------------------------------
# topologies


class FiniteTopSpace(_Points):
    """A finite set of labelled points with a family of open sets.

    A finite topology is determined by the minimal open neighbourhood of each
    point; those are kept as the primary representation and the full open
    family is produced on demand.
    """

    def __init__(self, points: Sequence[str], opens: Iterable[int | Iterable[str]]):
        self._init_points(points)
        masks = []
        for o in opens:
            masks.append(o if isinstance(o, int) else self.mask(o))
        family = set(masks)
        if len(family) != len(masks):
            raise SpaceError("duplicate open sets")
        if 0 not in family or self.full not in family:
            raise SpaceError("opens must contain the empty set and the whole space")
        for m in family:
            if m & ~self.full:
                raise SpaceError("open set mentions a point outside the space")
        for a, b in itertools.combinations(family, 2):
            if a | b not in family or a & b not in family:
                raise SpaceError(f"opens not closed under union/intersection: {self.labels_of(a)}, {self.labels_of(b)}")
        self._opens = tuple(sorted(family, key=_set_key))
        self.nbhd = tuple(self._meet_containing(x, self._opens) for x in range(self.n))

    def _meet_containing(self, x: int, family) -> int:
        m = self.full
        for o in family:
            if o >> x & 1:
                m &= o
        return m

    @classmethod
    def from_neighbourhoods(cls, points: Sequence[str], nbhd: Sequence[int]) -> "FiniteTopSpace":
        self = cls.__new__(cls)
        self._init_points(points)
        nbhd = tuple(nbhd)
        if len(nbhd) != self.n:
            raise SpaceError("one neighbourhood per point required")
        for x, u in enumerate(nbhd):
            if not u >> x & 1 or u & ~self.full:
                raise SpaceError(f"bad neighbourhood for {self.points[x]!r}")
            for y in bits(u):
                if nbhd[y] & ~u:
                    raise SpaceError("neighbourhoods are not transitive")
        self.nbhd = nbhd
        self._opens = None
        return self

    @classmethod
    def from_preorder(cls, points: Sequence[str], leq: Sequence[Sequence[bool]]) -> "FiniteTopSpace":
        """Open up-sets of a preorder (``leq[x][y]``: every open containing x contains y)."""
        n = len(points)
        nb = [sum(1 << y for y in range(n) if leq[x][y]) for x in range(n)]
        return cls.from_neighbourhoods(points, nb)

    def opens_within(self, budget: int = OPEN_BUDGET) -> tuple[int, ...]:
        if self._opens is None:
            seen = {0}
            frontier = [0]
            while frontier:
                nxt = []
                for o in frontier:
                    for x in range(self.n):
                        if not o >> x & 1:
                            u = o | self.nbhd[x]
                            if u not in seen:
                                seen.add(u)
                                nxt.append(u)
                                if len(seen) > budget:
                                    raise BudgetError(f"more than {budget} open sets")
                frontier = nxt
            self._opens = tuple(sorted(seen, key=_set_key))
        return self._opens

    @property
    def opens(self) -> tuple[int, ...]:
        return self.opens_within()

    def is_open(self, mask: int) -> bool:
        return all(self.nbhd[x] & ~mask == 0 for x in bits(mask))

    def closure(self, mask: int) -> int:
        return sum(1 << x for x in range(self.n) if self.nbhd[x] & mask)

    def leq(self, x: int, y: int) -> bool:
        """Specialization preorder: every open containing x contains y."""
        return bool(self.nbhd[x] >> y & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteTopSpace) and self.points == other.points and self.nbhd == other.nbhd

    def __hash__(self) -> int:
        return hash((self.points, self.nbhd))

    def __repr__(self) -> str:
        return f"FiniteTopSpace({list(self.points)}, nbhd={[self.labels_of(u) for u in self.nbhd]})"


# --------------------------------------------------------------------------
# metric spaces


@dataclass(frozen=True)
class FlaggInfo:
    """Provenance of a Flagg metric: the topology and each ground index's open set."""

    topology: FiniteTopSpace
    ground_sets: tuple  # point mask per ground index, or None when foreign to this space


class VMetricSpace(_Points):
    """A finite set with a quantale-valued distance (a quasi-metric in general)."""

    def __init__(self, quantale, points: Sequence[str], d, symmetric: bool = False, flagg: FlaggInfo | None = None):
        self._init_points(points)
        self.quantale = quantale
        self.d = tuple(tuple(row) for row in d)
        self.symmetric = bool(symmetric)
        self.flagg = flagg
        self._cache: dict = {}
        self._validate()

    def _validate(self):
        q, d, n = self.quantale, self.d, self.n
        if len(d) != n or any(len(row) != n for row in d):
            raise SpaceError("distance matrix must be square over the points")
        for row in d:
            for v in row:
                q.check(v)
        for i in range(n):
            if d[i][i] != q.zero:
                raise SpaceError(f"d({self.points[i]},{self.points[i]}) is not 0")
        if self.symmetric:
            for i, j in itertools.combinations(range(n), 2):
                if d[i][j] != d[j][i]:
                    raise SpaceError(f"asymmetric distance between {self.points[i]!r} and {self.points[j]!r}")
        bad = self._triangle_violation()
        if bad is not None:
            i, j, k = bad
            raise SpaceError(f"triangle inequality fails at {self.points[i]!r},{self.points[j]!r},{self.points[k]!r}")

    def _triangle_violation(self):
        q, d, n = self.quantale, self.d, self.n
        if isinstance(q, OmegaQuantale) and all(len(v.antichain) == 1 for row in d for v in row):
            P = [[v.antichain[0] for v in row] for row in d]
            for i in range(n):
                Pi = P[i]
                for j in range(n):
                    Pij = Pi[j]
                    Pj = P[j]
                    for k in range(n):
                        if Pij & Pj[k] & ~Pi[k]:
                            return i, j, k
            return None
        for i, j, k in itertools.product(range(n), repeat=3):
            if not q.leq(d[i][k], q.add(d[i][j], d[j][k])):
                return i, j, k
        return None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VMetricSpace)
            and self.quantale == other.quantale
            and self.points == other.points
            and self.d == other.d
            and self.symmetric == other.symmetric
        )

    def __hash__(self) -> int:
        return hash((self.points, self.d))

    def __repr__(self) -> str:
        return f"VMetricSpace({self.quantale!r}, {list(self.points)})"

    def dist(self, x: int, y: int):
        return self.d[x][y]

    def has_infinite_distance(self) -> bool:
        top = self.quantale.top
        return any(v == top for row in self.d for v in row)


def _open_label(space: FiniteTopSpace, m: int, prefix: str = "") -> str:
    return "{" + ",".join(prefix + p for p in space.labels_of(m)) + "}"


def flagg_metrize(T: FiniteTopSpace, ground: Sequence[int] | None = None) -> VMetricSpace:
    """Flagg's metric d(x, y) = the family of subsets of {U : x in U implies y in U}.

    ``ground`` defaults to all open sets.  A smaller family may be passed as
    long as it is a subbase of the topology (every member open, and the
    members containing x intersect to the minimal neighbourhood of x).
    """
    if ground is None:
        ground = T.opens
    else:
        ground = tuple(ground)
        if len(set(ground)) != len(ground):
            raise SpaceError("duplicate ground sets")
        for U in ground:
            if not T.is_open(U):
                raise SpaceError(f"ground set {T.labels_of(U)} is not open")
        for x in range(T.n):
            if T._meet_containing(x, ground) != T.nbhd[x]:
                raise SpaceError("ground family is not a subbase of the topology")
    q = OmegaQuantale([_open_label(T, U) for U in ground])
    members = _flagg_members(T, ground, range(len(ground)), 0)
    d = [[OmegaElement(q.size, (members[x][y],)) for y in range(T.n)] for x in range(T.n)]
    return VMetricSpace(q, T.points, d, symmetric=False, flagg=FlaggInfo(T, tuple(ground)))


def _flagg_members(T, sets, positions, extra: int):
    # members[x][y]: ground bits of the sets U with (x in U => y in U), plus `extra`
    out = []
    for x in range(T.n):
        row = []
        for y in range(T.n):
            m = extra
            for U, g in zip(sets, positions):
                if not (U >> x & 1) or (U >> y & 1):
                    m |= 1 << g
            row.append(m)
        out.append(row)
    return out


def mutual_metrize(family: Sequence[FiniteTopSpace]) -> list[VMetricSpace]:
    """Metrize every space of ``family`` in one shared Omega quantale.

    The ground is the union of all open families with points of different
    spaces kept apart (only the empty set is shared).  Ground sets that are
    not open in a given space are treated as always satisfied by it, so
    distances from a point to itself stay at the bottom element.
    """
    if not family:
        raise SpaceError("empty family")
    labels = ["{}"]
    index = {("{}",): 0}
    per_space = []
    for i, T in enumerate(family):
        pos = []
        for U in T.opens:
            key = ("{}",) if U == 0 else (i, U)
            if key not in index:
                index[key] = len(labels)
                labels.append(_open_label(T, U, f"{i}:"))
            pos.append(index[key])
        per_space.append(pos)
    q = OmegaQuantale(labels)
    out = []
    for T, pos in zip(family, per_space):
        own = sum(1 << g for g in pos)
        members = _flagg_members(T, T.opens, pos, q.full & ~own)
        d = [[OmegaElement(q.size, (members[x][y],)) for y in range(T.n)] for x in range(T.n)]
        ground_sets = [None] * q.size
        for U, g in zip(T.opens, pos):
            ground_sets[g] = U
        out.append(VMetricSpace(q, T.points, d, symmetric=False, flagg=FlaggInfo(T, tuple(ground_sets))))
    return out


def open_ball(M: VMetricSpace, x: int, eps) -> int:
    """Points y with d(x, y) well below ``eps``."""
    q = M.quantale
    q.check(eps)
    if not q.well_above(eps, q.zero):
        raise QuantaleError(f"radius {eps!r} is not positive")
    row = M.d[x]
    return sum(1 << y for y in range(M.n) if q.well_above(eps, row[y]))


def weak_ball(M: VMetricSpace, x: int, eps) -> int:
    q = M.quantale
    row = M.d[x]
    return sum(1 << y for y in range(M.n) if q.leq(row[y], eps))


# --------------------------------------------------------------------------
# radius candidates


@dataclass(frozen=True)
class RadiusCandidates:
    """Positive radii covering every achievable ball pattern of a space.

    ``complete`` is False when the family is only known to cover the strict
    balls (weak balls over non-principal Omega distances).
    """

    values: tuple
    complete: bool


def radius_candidates(M: VMetricSpace, floors: Sequence = (), variant: str = "strict") -> RadiusCandidates:
    key = ("radii", tuple(floors), variant)
    if key in M._cache:
        return M._cache[key]
    q = M.quantale
    if q == EXT:
        res = RadiusCandidates(_ext_thresholds(M, floors), True)
    elif isinstance(q, OmegaQuantale) and q.size <= OMEGA_ENUM_LIMIT:
        res = RadiusCandidates(tuple(e for e in q.enumerate() if q.well_above(e, q.zero)), True)
    elif isinstance(q, OmegaQuantale):
        res = _omega_closure_candidates(M, floors, variant)
    else:
        raise QuantaleError(f"no radius enumeration for {q!r}")
    M._cache[key] = res
    return res


def _ext_thresholds(M, floors) -> tuple:
    vals = sorted({v for row in M.d for v in row if v != INF and v > 0})
    out = {INF}
    if vals:
        out.add(vals[0] / 2)
        out.update(vals)
        out.update((a + b) / 2 for a, b in zip(vals, vals[1:]))
        out.add(vals[-1] * 2)
    else:
        out.add(Fraction(1))
    out.update(f for f in floors if f > 0)
    return tuple(sorted(out))


def _omega_closure_candidates(M, floors, variant) -> RadiusCandidates:
    q = M.quantale
    pool = {m for row in M.d for v in row for m in v.antichain}
    closed = {q.full}
    for m in pool:
        closed |= {c & m for c in closed}
        if len(closed) > CANDIDATE_BUDGET:
            raise BudgetError(f"more than {CANDIDATE_BUDGET} candidate radii")
    caps = [f.union() for f in floors]
    cands = set(closed) | {0}
    for w in caps:
        cands |= {c & w for c in closed}
    vals = [q.singletons(c) for c in sorted(cands, key=_set_key)]
    principal = all(len(v.antichain) == 1 for row in M.d for v in row)
    return RadiusCandidates(tuple(vals), variant == "strict" or principal)


def induced_topology(M: VMetricSpace) -> FiniteTopSpace:
    """The topology generated by all open balls of ``M``."""
    q = M.quantale
    radii = radius_candidates(M).values
    balls = set()
    for x in range(M.n):
        row = M.d[x]
        for eps in radii:
            balls.add(sum(1 << y for y in range(M.n) if q.well_above(eps, row[y])))
    nb = []
    for x in range(M.n):
        u = M.full
        for B in balls:
            if B >> x & 1:
                u &= B
        nb.append(u)
    return FiniteTopSpace.from_neighbourhoods(M.points, nb)


def closure_of(M: VMetricSpace, S: int) -> int:
    """Points at distance 0 from ``S`` (the empty meet is the top)."""
    q = M.quantale
    members = bits(S)
    return sum(1 << x for x in range(M.n) if big_meet(q, (M.d[x][s] for s in members)) == q.zero)


def entourage(M: VMetricSpace, eps) -> frozenset[tuple[int, int]]:
    q = M.quantale
    q.check(eps)
    if not q.well_above(eps, q.zero):
        raise QuantaleError(f"radius {eps!r} is not positive")
    return frozenset(
        (x, y) for x in range(M.n) for y in range(M.n) if q.well_above(eps, M.d[x][y])
    )


def product_topology(factors: Sequence[FiniteTopSpace], budget: int = MAX_POINTS) -> FiniteTopSpace:
    if not factors:
        raise SpaceError("empty product")
    total = 1
    for T in factors:
        total *= T.n
    if total > budget:
        raise BudgetError(f"product has {total} points, budget is {budget}")
    if len(factors) == 1:
        return factors[0]
    coords = list(itertools.product(*[range(T.n) for T in factors]))
    pos = {c: i for i, c in enumerate(coords)}
    labels = ["(" + ",".join(T.points[i] for T, i in zip(factors, c)) + ")" for c in coords]
    nb = []
    for c in coords:
        box = itertools.product(*[bits(T.nbhd[i]) for T, i in zip(factors, c)])
        nb.append(sum(1 << pos[b] for b in box))
    return FiniteTopSpace.from_neighbourhoods(labels, nb)


def product_subbase(factors: Sequence[FiniteTopSpace], product: FiniteTopSpace) -> tuple[int, ...]:
    """Cylinder sets over factor opens: a subbase of the product topology."""
    coords = list(itertools.product(*[range(T.n) for T in factors]))
    out = set()
    for k, T in enumerate(factors):
        for U in T.opens:
            out.add(sum(1 << i for i, c in enumerate(coords) if U >> c[k] & 1))
    return tuple(sorted(out, key=_set_key))


def subspace(M: VMetricSpace, S: int) -> VMetricSpace:
    idx = bits(S)
    if not idx:
        raise SpaceError("empty subspace")
    if S & ~M.full:
        raise SpaceError("subset mentions points outside the space")
    d = [[M.d[i][j] for j in idx] for i in idx]
    return VMetricSpace(M.quantale, [M.points[i] for i in idx], d, M.symmetric)


def _grid(n: int, spacing) -> VMetricSpace:
    spacing = ext(spacing)
    if n < 1 or spacing == INF or spacing <= 0:
        raise SpaceError("grid needs n >= 1 and a finite positive spacing")
    xs = [k * spacing for k in range(n)]
    labels = [str(v) for v in xs]
    d = [[abs(a - b) for b in xs] for a in xs]
    return VMetricSpace(EXT, labels, d, symmetric=True)


def standard_space(name: str, *params):
    """Named instances: sierpinski, discrete(n), indiscrete(n), two_point_infinity, grid(n, spacing)."""
    if name == "sierpinski":
        return FiniteTopSpace(["a", "b"], [[], ["a"], ["a", "b"]])
    if name in ("discrete", "indiscrete"):
        (n,) = params or (2,)
        pts = [f"p{i}" for i in range(n)]
        if name == "discrete":
            return FiniteTopSpace.from_neighbourhoods(pts, [1 << i for i in range(n)])
        return FiniteTopSpace.from_neighbourhoods(pts, [(1 << n) - 1] * n)
    if name == "two_point_infinity":
        z = Fraction(0)
        return VMetricSpace(EXT, ["•", "∘"], [[z, INF], [INF, z]], symmetric=True)
    if name == "grid":
        n, spacing = params
        return _grid(int(n), spacing)
    raise SpaceError(f"unknown standard space {name!r}")
