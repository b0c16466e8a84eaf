"""Law checking for value quantales.

Finite Omega instances are checked exhaustively (laws quantified over subsets
of the carrier fall back to sampling once the powerset of the carrier gets
large); the extended rationals are sampled with constructive witnesses for the
existential laws.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .quantale import INF, EXT, OmegaQuantale, big_meet

__all__ = ["LawResult", "LawReport", "check_quantale_laws", "well_above_by_definition", "SUBSET_EXHAUSTIVE_LIMIT"]

# carriers up to this size have every subset enumerated
SUBSET_EXHAUSTIVE_LIMIT = 12


@dataclass
class LawResult:
    name: str
    passed: bool = True
    cases: int = 0
    exhaustive: bool = True
    witness: tuple | None = None


@dataclass
class LawReport:
    quantale: str
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {
            "quantale": self.quantale,
            "ok": self.ok,
            "laws": [
                {
                    "law": r.name,
                    "passed": r.passed,
                    "cases": r.cases,
                    "exhaustive": r.exhaustive,
                    "witness": None if r.witness is None else [repr(w) for w in r.witness],
                }
                for r in self.results
            ],
        }


def well_above_by_definition(q, b, a, carrier: Sequence) -> bool:
    """``b`` is well above ``a``: every S with meet(S) <= a has a member <= b.

    Brute force over all subsets of a finite carrier.
    """
    n = len(carrier)
    for r in range(n + 1):
        for sub in itertools.combinations(carrier, r):
            if q.leq(big_meet(q, sub), a) and not any(q.leq(s, b) for s in sub):
                return False
    return True


def _law(report: LawReport, name: str, cases: Iterable[tuple], pred: Callable[..., bool], exhaustive: bool):
    res = LawResult(name, exhaustive=exhaustive)
    for case in cases:
        res.cases += 1
        if not pred(*case):
            res.passed = False
            res.witness = case
            break
    report.results.append(res)


def _ext_sample(rng: random.Random):
    r = rng.random()
    if r < 0.08:
        return Fraction(0)
    if r < 0.16:
        return INF
    return Fraction(rng.randint(0, 24), rng.randint(1, 12))


def check_quantale_laws(q, budget: int = 1000, seed: int = 0) -> LawReport:
    """Check the value quantale axioms and their standard consequences.

    Omega instances are run exhaustively; ``budget`` then only bounds the
    sampled subset-quantified laws on larger carriers.  For the extended
    rationals every law is checked on ``budget`` random cases.
    """
    rng = random.Random(seed)
    if isinstance(q, OmegaQuantale):
        return _check_finite(q, q.enumerate(), budget, rng)
    if q == EXT:
        return _check_ext(q, budget, rng)
    raise TypeError(f"no law suite for {q!r}")


def _check_finite(q, carrier: list, budget: int, rng: random.Random) -> LawReport:
    rep = LawReport(repr(q))
    V = carrier
    pairs = list(itertools.product(V, V))
    triples = list(itertools.product(V, V, V))
    zero, top = q.zero, q.top
    positives = [e for e in V if q.well_above(e, zero)]
    subsets_exhaustive = len(V) <= SUBSET_EXHAUSTIVE_LIMIT

    def subsets():
        if subsets_exhaustive:
            for r in range(len(V) + 1):
                yield from itertools.combinations(V, r)
        else:
            for _ in range(budget):
                yield tuple(rng.sample(V, rng.randint(0, min(len(V), 6))))

    eq = lambda a, b: q.leq(a, b) and q.leq(b, a)

    _law(rep, "order-reflexive", ((a,) for a in V), lambda a: q.leq(a, a), True)
    _law(rep, "order-antisymmetric", pairs, lambda a, b: not (q.leq(a, b) and q.leq(b, a)) or a == b, True)
    _law(rep, "order-transitive", triples, lambda a, b, c: not (q.leq(a, b) and q.leq(b, c)) or q.leq(a, c), True)
    _law(rep, "bottom-below-top", [(zero, top)], lambda z, t: q.leq(z, t) and z != t, True)
    _law(rep, "bounds", ((a,) for a in V), lambda a: q.leq(zero, a) and q.leq(a, top), True)
    _law(
        rep,
        "meet-is-glb",
        pairs,
        lambda a, b: q.leq(q.meet(a, b), a)
        and q.leq(q.meet(a, b), b)
        and all(q.leq(c, q.meet(a, b)) for c in V if q.leq(c, a) and q.leq(c, b)),
        True,
    )
    _law(
        rep,
        "join-is-lub",
        pairs,
        lambda a, b: q.leq(a, q.join(a, b))
        and q.leq(b, q.join(a, b))
        and all(q.leq(q.join(a, b), c) for c in V if q.leq(a, c) and q.leq(b, c)),
        True,
    )
    _law(rep, "add-associative", triples, lambda a, b, c: q.add(q.add(a, b), c) == q.add(a, q.add(b, c)), True)
    _law(rep, "add-commutative", pairs, lambda a, b: q.add(a, b) == q.add(b, a), True)
    _law(rep, "add-identity", ((a,) for a in V), lambda a: q.add(a, zero) == a, True)
    _law(
        rep,
        "add-distributes-over-meets",
        ((a, S) for S in subsets() for a in V),
        lambda a, S: eq(q.add(a, big_meet(q, S)), big_meet(q, [q.add(a, s) for s in S])),
        subsets_exhaustive,
    )
    _law(
        rep,
        "approximation",
        ((a,) for a in V),
        lambda a: eq(a, big_meet(q, [b for b in V if q.well_above(b, a)])),
        True,
    )
    _law(
        rep,
        "positive-meet",
        itertools.product(positives, positives),
        lambda a, b: q.well_above(q.meet(a, b), zero),
        True,
    )
    _law(rep, "well-above-implies-leq", pairs, lambda b, a: not q.well_above(b, a) or q.leq(a, b), True)
    _law(
        rep,
        "leq-then-well-above",
        triples,
        lambda a, b, c: not (q.leq(a, b) and q.well_above(c, b)) or q.well_above(c, a),
        True,
    )
    _law(
        rep,
        "well-above-then-leq",
        triples,
        lambda a, b, c: not (q.well_above(b, a) and q.leq(b, c)) or q.well_above(c, a),
        True,
    )
    _law(rep, "zero-is-meet-of-positives", [()], lambda: eq(zero, big_meet(q, positives)), True)
    _law(
        rep,
        "nonzero-escapes-some-positive",
        ((a,) for a in V if a != zero),
        lambda a: any(not q.leq(a, e) for e in positives),
        True,
    )
    _law(
        rep,
        "interpolation",
        ((a, c) for a, c in pairs if q.well_above(c, a)),
        lambda a, c: any(q.well_above(b, a) and q.well_above(c, b) for b in V),
        True,
    )
    _law(
        rep,
        "halving",
        ((e,) for e in positives),
        lambda e: q.well_above(q.halve(e), zero) and q.leq(q.add(q.halve(e), q.halve(e)), e),
        True,
    )
    if len(V) <= SUBSET_EXHAUSTIVE_LIMIT:
        _law(
            rep,
            "well-above-matches-definition",
            pairs,
            lambda b, a: q.well_above(b, a) == well_above_by_definition(q, b, a, V),
            True,
        )
    return rep


def _check_ext(q, budget: int, rng: random.Random) -> LawReport:
    rep = LawReport(repr(q))
    s = lambda: _ext_sample(rng)
    zero, top = q.zero, q.top

    def tuples(k, where=None):
        # resample until `budget` cases meet the law's precondition
        out = []
        for _ in range(50 * budget):
            if len(out) == budget:
                break
            t = tuple(s() for _ in range(k))
            if where is None or where(*t):
                out.append(t)
        return out

    def finite_sets():
        return [(s(), tuple(s() for _ in range(rng.randint(0, 5)))) for _ in range(budget)]

    def approx(a):
        # a is a lower bound of everything well above it, and nothing larger is
        if a == INF:
            return not any(q.well_above(b, a) for b in (s() for _ in range(8)))
        for _ in range(8):
            c = s()
            if q.well_above(c, a) and not q.leq(a, c):
                return False
            if c > a:
                b = a + 1 if c == INF else (a + c) / 2
                if not (q.well_above(b, a) and not q.leq(c, b)):
                    return False
        return True

    def interpolant(a, c):
        return a + 1 if c == INF else (a + c) / 2

    _law(rep, "order-transitive", tuples(3), lambda a, b, c: not (a <= b <= c) or q.leq(a, c), False)
    _law(rep, "bottom-below-top", [(zero, top)], lambda z, t: q.leq(z, t) and z != t, True)
    _law(rep, "bounds", tuples(1), lambda a: q.leq(zero, a) and q.leq(a, top), False)
    _law(
        rep,
        "meet-is-glb",
        tuples(3),
        lambda a, b, c: q.leq(q.meet(a, b), a)
        and q.leq(q.meet(a, b), b)
        and (not (q.leq(c, a) and q.leq(c, b)) or q.leq(c, q.meet(a, b))),
        False,
    )
    _law(rep, "add-associative", tuples(3), lambda a, b, c: q.add(q.add(a, b), c) == q.add(a, q.add(b, c)), False)
    _law(rep, "add-commutative", tuples(2), lambda a, b: q.add(a, b) == q.add(b, a), False)
    _law(rep, "add-identity", tuples(1), lambda a: q.add(a, zero) == a, False)
    _law(
        rep,
        "add-distributes-over-meets",
        finite_sets(),
        lambda a, S: q.add(a, big_meet(q, S)) == big_meet(q, [q.add(a, x) for x in S]),
        False,
    )
    _law(rep, "approximation", tuples(1), approx, False)
    _law(
        rep,
        "positive-meet",
        tuples(2, lambda a, b: q.well_above(a, zero) and q.well_above(b, zero)),
        lambda a, b: q.well_above(q.meet(a, b), zero),
        False,
    )
    _law(rep, "well-above-implies-leq", tuples(2), lambda b, a: not q.well_above(b, a) or q.leq(a, b), False)
    _law(
        rep,
        "leq-then-well-above",
        tuples(3),
        lambda a, b, c: not (q.leq(a, b) and q.well_above(c, b)) or q.well_above(c, a),
        False,
    )
    _law(
        rep,
        "well-above-then-leq",
        tuples(3),
        lambda a, b, c: not (q.well_above(b, a) and q.leq(b, c)) or q.well_above(c, a),
        False,
    )
    _law(
        rep,
        "zero-is-meet-of-positives",
        tuples(1, lambda e: q.well_above(e, zero)),
        lambda e: (lambda h: q.well_above(h, zero) and q.leq(h, e) and h != e)(Fraction(1) if e == INF else e / 2)
        and approx(zero),
        False,
    )
    _law(
        rep,
        "nonzero-escapes-some-positive",
        tuples(1, lambda a: a != zero),
        lambda a: (lambda e: q.well_above(e, zero) and not q.leq(a, e))(Fraction(1) if a == INF else a / 2),
        False,
    )
    _law(
        rep,
        "interpolation",
        tuples(2, lambda a, c: q.well_above(c, a)),
        lambda a, c: q.well_above(interpolant(a, c), a) and q.well_above(c, interpolant(a, c)),
        False,
    )
    _law(
        rep,
        "halving",
        tuples(1, lambda e: q.well_above(e, zero)),
        lambda e: q.well_above(q.halve(e), zero) and q.leq(q.add(q.halve(e), q.halve(e)), e),
        False,
    )
    return rep
