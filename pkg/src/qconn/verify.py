"""Executable checks of the connectedness theorems on finite corpora.

Every check takes a JSON-able instance dict and returns a failure message (or
None) together with an exhaustiveness flag, so a counterexample can be
replayed from the report alone.  Ground truth comes from oracles that never
touch the walk machinery: clopen scans of the topology and plain arithmetic.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .io import topology_from_json, topology_to_json
from .quantale import EXT, INF, BudgetError, OmegaQuantale, bits, ext, positive_halve
from .scales import (
    ALL,
    BOUNDED_EXISTS,
    STRICT,
    UNIFORM,
    WEAK,
    BoundedBelowFixed,
    Scale,
    ScaleSystem,
    _enumerate_raw,
    ball_of_set,
    canonical_finest_scale,
    constant_scale,
    find_walk,
    is_sigma_connected,
    is_sigma_continuous,
    is_step,
    r_components,
    sigma_clopen_sets,
    sigma_components,
)
from .spaces import (
    FiniteTopSpace,
    VMetricSpace,
    closure_of,
    flagg_metrize,
    induced_topology,
    product_subbase,
    product_topology,
    radius_candidates,
    standard_space,
    subspace,
)

__all__ = [
    "Corpus",
    "VerificationReport",
    "all_topologies",
    "count_preorders",
    "random_topology",
    "clopen_oracle",
    "top_connected",
    "verify_metrization",
    "verify_connectedness_equivalence",
    "verify_compactness_theorem",
    "verify_component_properties",
    "verify_sigma_lemma",
    "verify_hierarchy",
    "verify_structure_theorems",
    "verify_interval_and_product",
    "verify_alterstep",
    "replay",
    "THEOREMS",
]

LETTERS = "abcdefgh"
SCALE_BUDGET = 10**6
FLAGG_GROUND_BUDGET = 256
UNIFORM_NOTE = "uniform side checks only the uniformity induced by the Flagg metric"


# --------------------------------------------------------------------------
# corpora


@lru_cache(maxsize=None)
def _topology_families(n: int) -> tuple[tuple[int, ...], ...]:
    full = (1 << n) - 1
    inner = [m for m in range(1, full)]
    out = []
    for pick in range(1 << len(inner)):
        fam = {0, full}
        fam.update(m for i, m in enumerate(inner) if pick >> i & 1)
        if all(a | b in fam and a & b in fam for a, b in itertools.combinations(fam, 2)):
            out.append(tuple(sorted(fam)))
    return tuple(out)


def all_topologies(n: int) -> list[FiniteTopSpace]:
    """Every topology on ``n`` labelled points, by brute force over open families."""
    if n > 4:
        raise BudgetError("exhaustive topology enumeration is limited to 4 points")
    if n == 0:
        return [FiniteTopSpace([], [0])]
    pts = list(LETTERS[:n])
    return [FiniteTopSpace(pts, fam) for fam in _topology_families(n)]


def count_preorders(n: int) -> int:
    """Number of reflexive transitive relations on ``n`` points (independent count)."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    count = 0
    for pick in range(1 << len(pairs)):
        rel = {p for k, p in enumerate(pairs) if pick >> k & 1}
        if all((i, k) in rel for (i, j) in rel for (j2, k) in rel if j == j2 and i != k):
            count += 1
    return count


def random_topology(n: int, rng: random.Random, p: float | None = None) -> FiniteTopSpace:
    """Open up-sets of the reflexive-transitive closure of a random digraph."""
    if p is None:
        p = rng.choice([0.1, 0.25, 0.4])
    reach = [[i == j or rng.random() < p for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return FiniteTopSpace.from_preorder([f"p{i}" for i in range(n)], reach)


@dataclass(frozen=True)
class Corpus:
    """``exhaustive:N`` (all topologies on 1..N points) or ``random:N:COUNT``."""

    kind: str
    n: int
    count: int = 0
    seed: int = 0

    @classmethod
    def parse(cls, spec: str, seed: int = 0) -> "Corpus":
        parts = spec.split(":")
        try:
            if parts[0] == "exhaustive" and len(parts) == 2:
                return cls("exhaustive", int(parts[1]), 0, seed)
            if parts[0] == "random" and len(parts) == 3:
                return cls("random", int(parts[1]), int(parts[2]), seed)
        except ValueError:
            pass
        raise ValueError(f"bad corpus spec {spec!r}; use exhaustive:N or random:N:COUNT")

    @property
    def spec(self) -> str:
        return f"exhaustive:{self.n}" if self.kind == "exhaustive" else f"random:{self.n}:{self.count}"

    @property
    def exhaustive(self) -> bool:
        return self.kind == "exhaustive"

    def topologies(self) -> list[FiniteTopSpace]:
        if self.kind == "exhaustive":
            return [T for k in range(1, self.n + 1) for T in all_topologies(k)]
        rng = random.Random(self.seed)
        return [random_topology(self.n, rng) for _ in range(self.count)]


# --------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    theorem: str
    instances: int = 0
    exhaustive: bool = True
    counterexample: dict | None = None
    failures: int = 0
    ms: float = 0.0
    corpus: str = ""
    seed: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json(self, timing: bool = False) -> dict:
        return {
            "theorem": self.theorem,
            "instances": self.instances,
            "exhaustive": self.exhaustive,
            "counterexample": self.counterexample,
            "failures": self.failures,
            "ms": round(self.ms, 3) if timing else None,
            "corpus": self.corpus,
            "seed": self.seed,
            "notes": list(self.notes),
        }

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        ex = "exhaustive" if self.exhaustive else "sampled"
        return f"{status} {self.theorem}: {self.instances} instances ({ex}), {self.failures} failures, {self.ms:.0f} ms"


def _run(theorem: str, instances: Iterable[dict], *, corpus: str = "", seed: int = 0, exhaustive: bool = True, notes=()) -> VerificationReport:
    check = THEOREMS[theorem]
    rep = VerificationReport(theorem, corpus=corpus, seed=seed, exhaustive=exhaustive, notes=list(notes))
    t0 = time.perf_counter()
    for inst in instances:
        rep.instances += 1
        failure, ex = check(inst)
        rep.exhaustive = rep.exhaustive and ex
        if failure is not None:
            rep.failures += 1
            if rep.counterexample is None:
                rep.counterexample = {"instance": inst, "failure": failure}
    rep.ms = (time.perf_counter() - t0) * 1000
    return rep


def replay(theorem: str, counterexample: dict) -> str | None:
    """Re-run the check that produced ``counterexample``; returns its failure message."""
    failure, _ = THEOREMS[theorem](counterexample["instance"])
    return failure


# --------------------------------------------------------------------------
# oracles


def clopen_oracle(T: FiniteTopSpace) -> list[int]:
    """All subsets that are open with an open complement.

    Uses the open family directly when it is small, a bitmask scan of all
    subsets up to 20 points, and otherwise the atoms of the clopen algebra
    (smallest sets closed under taking neighbourhoods and closures).
    """
    full = T.full
    try:
        opens = T.opens_within(1 << 12)
    except BudgetError:
        opens = None
    if opens is not None:
        fam = set(opens)
        return sorted(A for A in opens if full & ~A in fam)
    if T.n <= 20:
        return sorted(int(m) for m in _kernels.clopen_masks(np.array(T.nbhd, dtype=np.uint64)))
    atoms = _clopen_atoms(T)
    if len(atoms) > 20:
        raise BudgetError("too many clopen sets to list")
    return sorted(sum(a for a, on in zip(atoms, pick) if on) for pick in itertools.product((0, 1), repeat=len(atoms)))


def _clopen_atoms(T: FiniteTopSpace) -> list[int]:
    seen = 0
    atoms = []
    for x in range(T.n):
        if seen >> x & 1:
            continue
        hull = 1 << x
        while True:
            grown = hull
            for y in bits(hull):
                grown |= T.nbhd[y]
            grown |= T.closure(hull)
            if grown == hull:
                break
            hull = grown
        atoms.append(hull)
        seen |= hull
    return atoms


def top_connected(T: FiniteTopSpace) -> bool:
    """Non-empty with no clopen set besides the empty set and the whole space."""
    if T.n == 0:
        return False
    if T._opens is not None and len(T._opens) <= 1 << 12:
        return len(clopen_oracle(T)) == 2 or T.n == 1
    if T.n <= 20:
        return not _kernels.has_nontrivial_clopen(np.array(T.nbhd, dtype=np.uint64))
    return len(_clopen_atoms(T)) == 1


def _components_oracle(T: FiniteTopSpace) -> list[int]:
    """Connected components as the atoms of the clopen algebra (scan-based)."""
    clopens = clopen_oracle(T)
    atoms = []
    for x in range(T.n):
        atoms.append(min((A for A in clopens if A >> x & 1), key=lambda A: bin(A).count("1")))
    return atoms


def _top(inst) -> FiniteTopSpace:
    return topology_from_json(inst["topology"])


def _topology_instances(corpus: Corpus, max_points: int | None = None) -> list[dict]:
    return [
        {"topology": topology_to_json(T)}
        for T in corpus.topologies()
        if max_points is None or T.n <= max_points
    ]


def _scale_labels(M: VMetricSpace, sigma: ScaleSystem, variant: str = STRICT):
    radii, balls, exhaustive = _enumerate_raw(M, sigma, variant, SCALE_BUDGET, True, 0, True)
    return radii, balls, _kernels.component_labels(balls), exhaustive


# --------------------------------------------------------------------------
# metrization


def _check_metrization(inst):
    T = _top(inst)
    M = flagg_metrize(T)
    back = induced_topology(M)
    if back != T:
        return f"induced topology {back!r} differs from input", True
    return None, True


def verify_metrization(corpus: Corpus) -> VerificationReport:
    return _run("metrization", _topology_instances(corpus), corpus=corpus.spec, seed=corpus.seed, exhaustive=corpus.exhaustive)


# --------------------------------------------------------------------------
# connectedness equivalence


def _check_equivalence(inst, full_scales_upto: int = 3):
    T = _top(inst)
    M = flagg_metrize(T)
    oracle = top_connected(T)
    canonical = r_components(M, canonical_finest_scale(M)).connected
    verdicts = {"clopen": oracle, "canonical": canonical}
    exhaustive = True
    if T.n <= inst.get("full_scales_upto", full_scales_upto):
        _, _, labels, ex = _scale_labels(M, ALL)
        exhaustive = exhaustive and ex
        verdicts["all-scales"] = bool((labels.max(axis=1) == 0).all())
    if len(set(verdicts.values())) != 1:
        return f"verdicts disagree: {verdicts}", exhaustive
    u = is_sigma_connected(M, UNIFORM, fast=False)
    u_clopen = sigma_clopen_sets(M, UNIFORM) == sorted({0, M.full})
    exhaustive = exhaustive and u.exhaustive
    if u.connected != u_clopen:
        return f"uniform walk verdict {u.connected} but uniformly-clopen verdict {u_clopen}", exhaustive
    return None, exhaustive


def verify_connectedness_equivalence(corpus: Corpus, full_scales_upto: int = 3) -> VerificationReport:
    insts = [dict(i, full_scales_upto=full_scales_upto) for i in _topology_instances(corpus)]
    return _run(
        "connectedness-equivalence",
        insts,
        corpus=corpus.spec,
        seed=corpus.seed,
        exhaustive=corpus.exhaustive,
        notes=[UNIFORM_NOTE],
    )


# --------------------------------------------------------------------------
# compactness


def _refine_step(M: VMetricSpace, R: Scale, half: Sequence, x: int, y: int) -> list[int] | None:
    """Split a weak eps-step (x, y) into an R-walk through a cover centre."""
    q = M.quantale
    for k in range(M.n):
        if q.well_above(half[k], M.d[k][x]):
            walk = [x, k, y]
            if all(is_step(M, R, a, b, WEAK) for a, b in zip(walk, walk[1:])):
                return walk
        if q.well_above(half[k], M.d[k][y]):
            walk = [x, k, y]
            if all(is_step(M, R, a, b, WEAK) for a, b in zip(walk, walk[1:])):
                return walk
    return None


def _check_compactness(inst):
    T = _top(inst)
    M = flagg_metrize(T)
    q = M.quantale
    conn = is_sigma_connected(M, ALL)
    uconn = is_sigma_connected(M, UNIFORM, fast=False)
    if conn.connected != uconn.connected:
        return f"connected={conn.connected} but uniformly connected={uconn.connected}", True
    # replay the refinement argument: halve R, take eps = meet of the halves,
    # and split every weak eps-step into an R-walk
    scales = [canonical_finest_scale(M)]
    radii, _, _ = _enumerate_raw(M, ALL, STRICT, 64, True, 0, True)
    scales += [Scale(M, r) for r in radii[:8]]
    for R in scales:
        half = [positive_halve(q, r) for r in R.radii]
        eps = half[0]
        for h in half[1:]:
            eps = q.meet(eps, h)
        for x, y in itertools.product(range(M.n), repeat=2):
            if q.leq(M.d[x][y], eps) or q.leq(M.d[y][x], eps):
                if _refine_step(M, R, half, x, y) is None:
                    return f"eps-step ({T.points[x]},{T.points[y]}) not refinable under {R.radii!r}", True
        if uconn.connected:
            E = constant_scale(M, eps)
            for z in range(1, M.n):
                w = find_walk(M, E, 0, z, WEAK)
                if w is None:
                    return f"uniformly connected but no weak eps-walk to {T.points[z]}", True
    return None, conn.exhaustive and uconn.exhaustive


def verify_compactness_theorem(corpus: Corpus) -> VerificationReport:
    return _run("compactness", _topology_instances(corpus), corpus=corpus.spec, seed=corpus.seed,
                exhaustive=corpus.exhaustive, notes=[UNIFORM_NOTE])


# --------------------------------------------------------------------------
# component properties


def _blocks_fixed(balls: np.ndarray, labels: np.ndarray) -> int:
    """Index of the first scale with a ball leaving its component, or -1."""
    S, n = balls.shape
    one = np.uint64(1)
    for y in range(n):
        inball = ((balls >> np.uint64(y)) & one).astype(bool)  # [S, n]: y in ball(x)
        bad = inball & (labels != labels[:, y : y + 1])
        rows = np.nonzero(bad.any(axis=1))[0]
        if len(rows):
            return int(rows[0])
    return -1


def _check_components(inst):
    if "map" in inst:
        return _check_image(inst)
    T = _top(inst)
    M = flagg_metrize(T)
    radii, balls, labels, exhaustive = _scale_labels(M, ALL)
    bad = _blocks_fixed(balls, labels)
    if bad >= 0:
        return f"component of scale {radii[bad]!r} is not clopen", exhaustive
    # literal ball_of_set check on a handful of scales
    for rs in radii[:16]:
        R = Scale(M, rs)
        for B in r_components(M, R).blocks:
            if ball_of_set(M, R, B) != B or ball_of_set(M, R, M.full & ~B) != M.full & ~B:
                return f"block {T.labels_of(B)} not fixed by the ball operator", exhaustive
    C = sigma_components(M, ALL, fast=False)
    for B in C.blocks:
        if closure_of(M, B) != B:
            return f"connected component {T.labels_of(B)} is not closed", exhaustive and C.exhaustive
    return None, exhaustive and C.exhaustive


def _check_image(inst):
    X = flagg_metrize(topology_from_json(inst["topology"]))
    Y = flagg_metrize(topology_from_json(inst["target"]))
    f = inst["map"]
    cont = is_sigma_continuous(f, X, Y, ALL)
    if not cont.continuous:
        return None, cont.exhaustive
    CX = sigma_components(X, ALL)
    CY = sigma_components(Y, ALL)
    for x, x2 in itertools.combinations(range(X.n), 2):
        if CX.same(x, x2) and not CY.same(f[x], f[x2]):
            return f"connected points {X.points[x]},{X.points[x2]} map to disconnected points", cont.exhaustive
    return None, cont.exhaustive and CX.exhaustive and CY.exhaustive


def _map_instances(tops: list[FiniteTopSpace], count: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        A, B = rng.choice(tops), rng.choice(tops)
        f = [rng.randrange(B.n) for _ in range(A.n)]
        if rng.random() < 0.2:
            f = [f[0]] * A.n
        out.append({"topology": topology_to_json(A), "target": topology_to_json(B), "map": f})
    return out


def verify_component_properties(corpus: Corpus, maps: int = 200, map_points: int = 3) -> VerificationReport:
    insts = _topology_instances(corpus)
    small = [T for T in corpus.topologies() if T.n <= map_points]
    if small and maps:
        insts += _map_instances(small, maps, corpus.seed)
    return _run("component-properties", insts, corpus=corpus.spec, seed=corpus.seed, exhaustive=corpus.exhaustive)


# --------------------------------------------------------------------------
# the four-condition lemma


def _sample_omega_eps(q: OmegaQuantale, k: int):
    """Deterministic positive lower bounds: bottom, a principal element, top."""
    if k == 0:
        return q.zero
    if k == 1:
        return q.singletons(q.full & ~(q.full >> 1))
    return q.principal(q.full >> 1)


def _discrete_candidates() -> list[VMetricSpace]:
    z = Fraction(0)
    three = VMetricSpace(EXT, ["u", "v", "w"], [[z, INF, INF], [INF, z, INF], [INF, INF, z]], symmetric=True)
    return [
        standard_space("two_point_infinity"),
        three,
        standard_space("grid", 3, 1),
        flagg_metrize(standard_space("discrete", 2)),
        flagg_metrize(standard_space("sierpinski")),
    ]


def _sigma_for(name: str, spaces: Sequence[VMetricSpace], k: int = 0) -> ScaleSystem:
    if name == "all":
        return ALL
    if name == "uniform":
        return UNIFORM
    if name == "bounded-exists":
        return BOUNDED_EXISTS
    if name == "bounded":
        eps = {EXT: Fraction(1, 2)}
        for M in spaces:
            if isinstance(M.quantale, OmegaQuantale):
                eps[M.quantale] = _sample_omega_eps(M.quantale, k)
        return BoundedBelowFixed(eps)
    raise ValueError(f"unknown scale system {name!r}")


def _is_sigma_discrete(D: VMetricSpace, sigma: ScaleSystem) -> bool:
    clopen = set(sigma_clopen_sets(D, sigma))
    return all(1 << x in clopen for x in range(D.n))


def _all_maps_constant(X, Y, sigma) -> tuple[bool, bool, list | None]:
    exhaustive = True
    for f in itertools.product(range(Y.n), repeat=X.n):
        if len(set(f)) == 1:
            continue
        res = is_sigma_continuous(f, X, Y, sigma)
        exhaustive = exhaustive and res.exhaustive
        if res.continuous:
            return False, exhaustive, list(f)
    return True, exhaustive, None


def _check_lemma(inst):
    T = _top(inst)
    X = flagg_metrize(T)
    codomains = _discrete_candidates()
    sigma = _sigma_for(inst["sigma"], [X] + codomains, inst.get("eps", 0))
    two = codomains[0]
    walk = is_sigma_connected(X, sigma, fast=False)
    clopens = sigma_clopen_sets(X, sigma)
    no_clopen = clopens == sorted({0, X.full})
    to_two, ex2, f2 = _all_maps_constant(X, two, sigma)
    discrete = [D for D in codomains if _is_sigma_discrete(D, sigma)]
    if not any(D is two for D in discrete):
        return "two-point space is not sigma-discrete", True
    to_discrete, exd = True, True
    for D in discrete:
        ok, ex, _ = _all_maps_constant(X, D, sigma)
        exd = exd and ex
        to_discrete = to_discrete and ok
        comps = sigma_components(D, sigma, fast=False)
        if comps.blocks != tuple(1 << x for x in range(D.n)):
            return f"sigma-discrete space {D!r} is not totally disconnected", True
    exhaustive = walk.exhaustive and ex2 and exd
    verdicts = {"walks": walk.connected, "no-clopen": no_clopen, "maps-to-two": to_two, "maps-to-discrete": to_discrete}
    if len(set(verdicts.values())) != 1:
        return f"lemma verdicts disagree: {verdicts}", exhaustive
    for C in clopens:
        if C in (0, X.full):
            continue
        xi = [0 if C >> x & 1 else 1 for x in range(X.n)]
        if not is_sigma_continuous(xi, X, two, sigma).continuous:
            return f"indicator of clopen {T.labels_of(C)} is not sigma-continuous", exhaustive
    return None, exhaustive


def verify_sigma_lemma(corpus: Corpus, sigma: str = "all", eps_samples: int = 3) -> VerificationReport:
    insts = []
    for i in _topology_instances(corpus):
        if sigma == "bounded":
            insts += [dict(i, sigma=sigma, eps=k) for k in range(eps_samples)]
        else:
            insts.append(dict(i, sigma=sigma))
    return _run("sigma-lemma", insts, corpus=corpus.spec, seed=corpus.seed, exhaustive=corpus.exhaustive, notes=[f"sigma={sigma}"])


# --------------------------------------------------------------------------
# hierarchy


CONTAINMENTS = [("uniform", "bounded-exists"), ("bounded-exists", "all"), ("bounded", "bounded-exists"), ("bounded", "all")]


def _check_hierarchy(inst):
    if "grid" in inst:
        n, delta = inst["grid"]
        M = standard_space("grid", n, delta)
    else:
        M = flagg_metrize(_top(inst))
    k = inst.get("eps", 0)
    exhaustive = True
    verdict = {}
    systems = {}
    for name in ("all", "bounded-exists", "uniform", "bounded"):
        sigma = _sigma_for(name, [M], k)
        systems[name] = sigma
        v = is_sigma_connected(M, sigma, fast=False)
        verdict[name] = v.connected
        exhaustive = exhaustive and v.exhaustive
    for small, big in CONTAINMENTS:
        radii, _, _ = _enumerate_raw(M, systems[small], STRICT, 4096, True, 0, True)
        if not all(systems[big].contains(Scale(M, r)) for r in radii):
            return f"{small} scale outside {big}", exhaustive
        if verdict[big] and not verdict[small]:
            return f"{big}-connected but not {small}-connected", exhaustive
    return None, exhaustive


def verify_hierarchy(corpus: Corpus, eps_samples: int = 3, grids: Sequence[tuple] = ((5, "1/4"),)) -> VerificationReport:
    insts = [dict(i, eps=k) for i in _topology_instances(corpus) for k in range(eps_samples)]
    insts += [{"grid": [n, d]} for n, d in grids]
    return _run("hierarchy", insts, corpus=corpus.spec, seed=corpus.seed, exhaustive=corpus.exhaustive)


# --------------------------------------------------------------------------
# structure theorems


def _sub_connected(M: VMetricSpace, S: int, sigma: ScaleSystem) -> tuple[bool, bool]:
    v = is_sigma_connected(subspace(M, S), sigma)
    return v.connected, v.exhaustive


def _random_connected(M, sigma, rng, must: int = 0, tries: int = 12) -> int:
    for _ in range(tries):
        S = must
        for x in range(M.n):
            if rng.random() < 0.5:
                S |= 1 << x
        if S and _sub_connected(M, S, sigma)[0]:
            return S
    return must or 1 << rng.randrange(M.n)


def _check_structure(inst):
    T = _top(inst)
    M = flagg_metrize(T)
    sigma = _sigma_for(inst["sigma"], [M])
    kind = inst["kind"]
    sets = inst["sets"]
    exhaustive = True
    for S in sets:
        ok, ex = _sub_connected(M, S, sigma)
        exhaustive = exhaustive and ex
        if not ok:
            return f"generated set {T.labels_of(S)} is not {sigma!r}-connected", exhaustive
    if kind == "closure":
        C, D = sets[0], inst["target"]
        if C & ~D or D & ~closure_of(M, C):
            return "target is not between the set and its closure", exhaustive
        target = D
    elif kind == "chain":
        for a, b in zip(sets, sets[1:]):
            if not a & b:
                return "consecutive chain members are disjoint", exhaustive
        target = 0
        for S in sets:
            target |= S
    else:
        common = M.full
        target = 0
        for S in sets:
            common &= S
            target |= S
        if not common:
            return "family has no common point", exhaustive
    ok, ex = _sub_connected(M, target, sigma)
    if not ok:
        return f"{kind}: {T.labels_of(target)} is not {sigma!r}-connected", exhaustive and ex
    return None, exhaustive and ex


def _structure_instances(kind: str, count: int, seed: int, sizes=(2, 3, 4, 5)) -> list[dict]:
    rng = random.Random(f"{kind}:{seed}")
    out = []
    for i in range(count):
        T = random_topology(rng.choice(sizes), rng)
        M = flagg_metrize(T)
        sname = "all" if i % 2 == 0 else "uniform"
        sigma = _sigma_for(sname, [M])
        if kind == "closure":
            C = _random_connected(M, sigma, rng)
            extra = closure_of(M, C) & ~C
            D = C | sum(1 << x for x in bits(extra) if rng.random() < 0.6)
            inst = {"sets": [C], "target": D}
        elif kind == "chain":
            sets = [_random_connected(M, sigma, rng)]
            for _ in range(rng.randint(1, 3)):
                p = rng.choice(bits(sets[-1]))
                sets.append(_random_connected(M, sigma, rng, must=1 << p))
            inst = {"sets": sets}
        else:
            p = rng.randrange(M.n)
            inst = {"sets": [_random_connected(M, sigma, rng, must=1 << p) for _ in range(rng.randint(2, 4))]}
        inst.update(topology=topology_to_json(T), sigma=sname, kind=kind)
        out.append(inst)
    return out


def verify_structure_theorems(count: int = 500, seed: int = 0, kinds=("closure", "chain", "common-point")) -> list[VerificationReport]:
    reports = []
    for kind in kinds:
        rep = _run("structure", _structure_instances(kind, count, seed), corpus=f"random:2-5:{count}", seed=seed, exhaustive=False)
        rep.notes.append(kind)
        reports.append(rep)
    return reports


# --------------------------------------------------------------------------
# grid surrogate and products


GRID_VALUES = ("1/8", "1/4", "1/2", "1")


def _check_grid(inst):
    n, delta, eps = inst["grid"]
    M = standard_space("grid", n, delta)
    got = r_components(M, constant_scale(M, ext(eps)), WEAK).connected
    expected = n == 1 or ext(delta) <= ext(eps)
    if got != expected:
        return f"grid({n},{delta}) at eps={eps}: walk verdict {got}, expected {expected}", True
    return None, True


def _product_metric(factors: Sequence[FiniteTopSpace], P: FiniteTopSpace) -> tuple[VMetricSpace, str]:
    try:
        if len(P.opens_within(FLAGG_GROUND_BUDGET)) <= FLAGG_GROUND_BUDGET:
            return flagg_metrize(P), "opens"
    except BudgetError:
        pass
    return flagg_metrize(P, product_subbase(factors, P)), "subbase"


def _check_product(inst):
    if "grid" in inst:
        return _check_grid(inst)
    factors = [topology_from_json(t) for t in inst["factors"]]
    P = product_topology(factors)
    oracle = top_connected(P)
    expected = all(top_connected(T) for T in factors)
    if oracle != expected:
        return f"product connected={oracle} but factors connected={expected}", True
    for T in factors:
        Mf = flagg_metrize(T)
        if Mf.has_infinite_distance():
            return "Flagg factor metric is not locally finite", True
    M, _ = _product_metric(factors, P)
    walk = r_components(M, canonical_finest_scale(M)).connected
    if walk != oracle:
        return f"product Flagg walk verdict {walk} disagrees with oracle {oracle}", True
    return None, True


def verify_interval_and_product(
    grid_sizes: Iterable[int] = range(2, 10),
    grid_values: Sequence[str] = GRID_VALUES,
    factor_points: int = 3,
    max_factors: int = 3,
) -> VerificationReport:
    insts = [{"grid": [n, d, e]} for n in grid_sizes for d in grid_values for e in grid_values]
    pool = [topology_to_json(T) for T in Corpus("exhaustive", factor_points).topologies()]
    for k in range(1, max_factors + 1):
        for combo in itertools.combinations_with_replacement(range(len(pool)), k):
            insts.append({"factors": [pool[i] for i in combo]})
    return _run(
        "interval-product",
        insts,
        corpus=f"exhaustive:{factor_points}^<={max_factors}",
        notes=[f"products with more than {FLAGG_GROUND_BUDGET} opens are metrized over the cylinder subbase"],
    )


# --------------------------------------------------------------------------
# weak and strict steps


def _interpolate(M: VMetricSpace, r):
    """Some c with 0 < c well below r, searched over the candidate radii first."""
    q = M.quantale
    for c in radius_candidates(M).values:
        if q.well_above(c, q.zero) and q.well_above(r, c):
            return c
    if q == EXT:
        return Fraction(1) if r == INF else r / 2
    return q.principal(r.union())


def _check_step_variants(inst):
    if "grid" in inst:
        n, delta = inst["grid"]
        M = standard_space("grid", n, delta)
    else:
        M = flagg_metrize(_top(inst))
    strict = is_sigma_connected(M, ALL, variant=STRICT, fast=False)
    weak = is_sigma_connected(M, ALL, variant=WEAK, fast=False)
    exhaustive = strict.exhaustive and weak.exhaustive
    if strict.connected != weak.connected:
        return f"strict verdict {strict.connected} but weak verdict {weak.connected}", exhaustive
    q = M.quantale
    radii, _, _ = _enumerate_raw(M, ALL, STRICT, 512, True, 0, True)
    for rs in radii:
        R = Scale(M, rs)
        R2 = Scale(M, tuple(_interpolate(M, r) for r in rs))
        for x, r, r2 in zip(range(M.n), rs, R2.radii):
            if not (q.well_above(r2, q.zero) and q.well_above(r, r2)):
                return f"interpolant {r2!r} not strictly between 0 and {r!r}", exhaustive
        for x, y in itertools.product(range(M.n), repeat=2):
            if is_step(M, R2, x, y, WEAK) and not is_step(M, R, x, y, STRICT):
                return f"weak R'-step ({M.points[x]},{M.points[y]}) is not a strict R-step", exhaustive
    return None, exhaustive


def verify_alterstep(corpus: Corpus, grids: Sequence[tuple] = ((3, "1/2"),)) -> VerificationReport:
    insts = _topology_instances(corpus) + [{"grid": [n, d]} for n, d in grids]
    return _run("step-variants", insts, corpus=corpus.spec, seed=corpus.seed, exhaustive=corpus.exhaustive)


THEOREMS: dict[str, Callable] = {
    "metrization": _check_metrization,
    "connectedness-equivalence": _check_equivalence,
    "compactness": _check_compactness,
    "component-properties": _check_components,
    "sigma-lemma": _check_lemma,
    "hierarchy": _check_hierarchy,
    "structure": _check_structure,
    "interval-product": _check_product,
    "step-variants": _check_step_variants,
}
