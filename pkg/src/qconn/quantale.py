"""Value quantales: the extended non-negative rationals and Flagg's Omega(S).

Two concrete instances are provided. ``EXT`` is ``[0, inf]`` queried at exact
rational points (finite values are :class:`fractions.Fraction`, the top is
``math.inf``). :class:`OmegaQuantale` is the lattice of down-closed families of
subsets of a finite ground set, ordered by reverse inclusion, with
intersection as addition.  Its elements are stored as maximal antichains whose
members are bitmasks over ground indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Sequence

__all__ = [
    "INF",
    "EXT",
    "QuantaleError",
    "BudgetError",
    "OmegaElement",
    "OmegaQuantale",
    "ExtRationalQuantale",
    "ext",
    "leq",
    "lattice_ops",
    "meet",
    "join",
    "add",
    "well_above",
    "positive_halve",
    "omega_enumerate",
    "OMEGA_ENUM_LIMIT",
]

INF = math.inf
OMEGA_ENUM_LIMIT = 4


class QuantaleError(ValueError):
    """A value does not belong to the quantale it is used with."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured size budget."""


def bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def from_bits(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# --------------------------------------------------------------------------
# extended rationals


def ext(value) -> Fraction | float:
    """Coerce ``value`` to an extended non-negative rational.

    Accepts ints, Fractions, ``math.inf`` and strings such as ``"3/4"`` or
    ``"inf"``.  Floats other than infinity are rejected to keep arithmetic exact.
    """
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return INF
        value = Fraction(s)
    elif isinstance(value, float):
        if value == INF:
            return INF
        raise QuantaleError(f"inexact float {value!r}; use a Fraction or a string")
    elif isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise QuantaleError(f"not an extended rational: {value!r}")
    value = Fraction(value)
    if value < 0:
        raise QuantaleError(f"negative distance {value}")
    return value


class ExtRationalQuantale:
    """The classical value quantale [0, inf] restricted to exact rationals."""

    kind = "ext_rational"
    zero = Fraction(0)
    top = INF

    def __repr__(self) -> str:
        return "EXT"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtRationalQuantale)

    def __hash__(self) -> int:
        return hash(self.kind)

    def check(self, a) -> None:
        if a == INF and isinstance(a, float):
            return
        if type(a) is not Fraction or a < 0:
            raise QuantaleError(f"{a!r} is not an element of {self!r}")

    def contains(self, a) -> bool:
        try:
            self.check(a)
        except QuantaleError:
            return False
        return True

    def leq(self, a, b) -> bool:
        return a <= b

    def meet(self, a, b):
        return min(a, b)

    def join(self, a, b):
        return max(a, b)

    def add(self, a, b):
        if a == INF or b == INF:
            return INF
        return a + b

    def well_above(self, b, a) -> bool:
        # b > a for finite b; inf is well above every finite value but not
        # itself (the empty family meets to inf and has no member below inf).
        if b == INF:
            return a != INF
        return b > a

    def halve(self, eps):
        return INF if eps == INF else eps / 2

    def parse(self, raw):
        if isinstance(raw, str):
            return ext(raw)
        raise QuantaleError(f"extended rationals serialize as strings, got {raw!r}")

    def dump(self, a) -> str:
        if a == INF:
            return "inf"
        return f"{a.numerator}/{a.denominator}"

    def to_json(self) -> dict:
        return {"kind": self.kind}


EXT = ExtRationalQuantale()


# --------------------------------------------------------------------------
# Omega(S)


def _maximalize(members: Iterable[int]) -> tuple[int, ...]:
    uniq = set(members)
    keep = [m for m in uniq if not any(m != o and m & ~o == 0 for o in uniq)]
    keep.sort(key=bits)
    return tuple(keep)


@dataclass(frozen=True, slots=True)
class OmegaElement:
    """A down-closed family of subsets of ``{0..ground_size-1}``.

    Stored as the antichain of its maximal members.  The empty antichain is
    the top (the empty family); ``(full,)`` is the bottom.
    """

    ground_size: int
    antichain: tuple[int, ...]

    def __post_init__(self):
        full = (1 << self.ground_size) - 1
        for m in self.antichain:
            if m < 0 or m & ~full:
                raise QuantaleError(f"member {bits(m)} outside ground of size {self.ground_size}")
        canon = _maximalize(self.antichain)
        if canon != self.antichain:
            object.__setattr__(self, "antichain", canon)

    @classmethod
    def of(cls, ground_size: int, members: Iterable[Iterable[int]]) -> "OmegaElement":
        return cls(ground_size, tuple(from_bits(m) for m in members))

    def members(self) -> list[tuple[int, ...]]:
        return [bits(m) for m in self.antichain]

    def union(self) -> int:
        return reduce(int.__or__, self.antichain, 0)

    def ideal(self) -> frozenset[int]:
        """All members of the family (exponential; oracle use only)."""
        out = set()
        for m in self.antichain:
            sub = m
            while True:
                out.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & m
        return frozenset(out)

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.members())
        return f"↓[{inner}]"


class OmegaQuantale:
    """Flagg's Omega(S) for a finite ground set of labels."""

    kind = "omega"

    def __init__(self, ground: Sequence[str]):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise QuantaleError("duplicate ground labels")
        self.size = len(self.ground)
        self.full = (1 << self.size) - 1
        self.zero = OmegaElement(self.size, (self.full,))
        self.top = OmegaElement(self.size, ())

    def __repr__(self) -> str:
        return f"Omega({self.size})"

    def __eq__(self, other) -> bool:
        return isinstance(other, OmegaQuantale) and other.ground == self.ground

    def __hash__(self) -> int:
        return hash((self.kind, self.ground))

    def check(self, a) -> None:
        if not isinstance(a, OmegaElement) or a.ground_size != self.size:
            raise QuantaleError(f"{a!r} is not an element of {self!r}")

    def contains(self, a) -> bool:
        return isinstance(a, OmegaElement) and a.ground_size == self.size

    def element(self, members: Iterable[Iterable[int]]) -> OmegaElement:
        return OmegaElement.of(self.size, members)

    def principal(self, mask: int) -> OmegaElement:
        """The family of all subsets of ``mask``."""
        return OmegaElement(self.size, (mask,))

    def singletons(self, mask: int) -> OmegaElement:
        """Largest element whose members cover exactly ``mask`` (top if empty)."""
        return OmegaElement(self.size, tuple(1 << i for i in bits(mask)))

    def leq(self, a: OmegaElement, b: OmegaElement) -> bool:
        # reverse inclusion of ideals
        return all(any(g & ~f == 0 for f in a.antichain) for g in b.antichain)

    def meet(self, a: OmegaElement, b: OmegaElement) -> OmegaElement:
        return OmegaElement(self.size, a.antichain + b.antichain)

    def join(self, a: OmegaElement, b: OmegaElement) -> OmegaElement:
        return OmegaElement(self.size, tuple(f & g for f in a.antichain for g in b.antichain))

    add = join

    def well_above(self, b: OmegaElement, a: OmegaElement) -> bool:
        u = b.union()
        return any(u & ~f == 0 for f in a.antichain)

    def halve(self, eps: OmegaElement) -> OmegaElement:
        return eps

    def parse(self, raw) -> OmegaElement:
        if not isinstance(raw, list) or not all(isinstance(m, list) for m in raw):
            raise QuantaleError(f"omega values serialize as lists of index lists, got {raw!r}")
        for m in raw:
            for i in m:
                if not isinstance(i, int) or not 0 <= i < self.size:
                    raise QuantaleError(f"ground index {i!r} out of range")
        return self.element(raw)

    def dump(self, a: OmegaElement) -> list[list[int]]:
        return [list(m) for m in a.members()]

    def to_json(self) -> dict:
        return {"kind": self.kind, "ground": list(self.ground)}

    def enumerate(self, limit: int = OMEGA_ENUM_LIMIT) -> list[OmegaElement]:
        if self.size > limit:
            raise BudgetError(f"ground of size {self.size} exceeds enumeration bound {limit}")
        return [OmegaElement(self.size, ac) for ac in _antichains(self.size)]


def _antichains(n: int) -> Iterator[tuple[int, ...]]:
    subsets = sorted(range(1 << n), key=lambda m: (-bin(m).count("1"), bits(m)))

    def rec(i: int, chosen: tuple[int, ...]):
        if i == len(subsets):
            yield chosen
            return
        yield from rec(i + 1, chosen)
        s = subsets[i]
        # larger sets come first, so only check against already chosen ones
        if not any(s & ~c == 0 for c in chosen):
            yield from rec(i + 1, chosen + (s,))

    for ac in rec(0, ()):
        yield _maximalize(ac)


# --------------------------------------------------------------------------
# handle-level API


def _checked(q, *values) -> None:
    for v in values:
        q.check(v)


def leq(q, a, b) -> bool:
    _checked(q, a, b)
    return q.leq(a, b)


def meet(q, a, b):
    _checked(q, a, b)
    return q.meet(a, b)


def join(q, a, b):
    _checked(q, a, b)
    return q.join(a, b)


def lattice_ops(q, a, b):
    """Return ``(meet, join)`` of ``a`` and ``b``."""
    _checked(q, a, b)
    return q.meet(a, b), q.join(a, b)


def add(q, a, b):
    _checked(q, a, b)
    return q.add(a, b)


def well_above(q, b, a) -> bool:
    """True when ``b`` is well above ``a``."""
    _checked(q, a, b)
    return q.well_above(b, a)


def positive_halve(q, eps):
    """A positive ``delta`` with ``delta + delta <= eps``."""
    _checked(q, eps)
    if not q.well_above(eps, q.zero):
        raise QuantaleError(f"{eps!r} is not positive")
    return q.halve(eps)


def omega_enumerate(q: OmegaQuantale, limit: int = OMEGA_ENUM_LIMIT) -> list[OmegaElement]:
    if not isinstance(q, OmegaQuantale):
        raise QuantaleError("enumeration needs an omega quantale")
    return q.enumerate(limit)


def big_meet(q, values: Iterable):
    return reduce(q.meet, values, q.top)
