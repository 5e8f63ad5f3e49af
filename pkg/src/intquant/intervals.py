"""Half-open intervals on a rational grid and their partial operations.

Everything downstream is indexed by intervals [lo, hi) whose endpoints are
breakpoints of a finite, strictly increasing rational grid.  This module owns
the four partial operations (concatenation ``osum``, difference ``odiff``,
strict union, strict intersection), the bilinear interval form and its
symmetrization, the derived coefficient table used by the algebra relations,
the admissible-pair predicate for the same-sign relations, and ordered
two-part decompositions.

Partial operations return ``None`` where they are undefined; undefinedness is
data, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional


class ConfigError(ValueError):
    """Unknown variant name or malformed configuration value."""


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval [lo, hi); ordering is lexicographic by (lo, hi)."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi})")

    def __str__(self) -> str:
        return f"[{_fmt(self.lo)},{_fmt(self.hi)})"

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def iv(lo, hi) -> Interval:
    return Interval(Fraction(lo), Fraction(hi))


class Grid:
    """Strictly increasing rational breakpoints; at least two of them."""

    def __init__(self, breakpoints: Iterable) -> None:
        pts = tuple(Fraction(b) for b in breakpoints)
        if len(pts) < 2:
            raise ValueError("grid needs at least 2 breakpoints")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError(f"breakpoints must be strictly increasing: {pts}")
        self.breakpoints = pts

    def __len__(self) -> int:
        return len(self.breakpoints)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.breakpoints == other.breakpoints

    def __hash__(self) -> int:
        return hash(self.breakpoints)

    def __repr__(self) -> str:
        return f"Grid({[str(_fmt(b)) for b in self.breakpoints]})"

    def intervals(self) -> list[Interval]:
        """All grid intervals, sorted; n breakpoints give n(n-1)/2 of them."""
        pts = self.breakpoints
        return [Interval(pts[i], pts[j])
                for i in range(len(pts)) for j in range(i + 1, len(pts))]

    def cells(self) -> list[Interval]:
        """Minimal intervals between consecutive breakpoints."""
        pts = self.breakpoints
        return [Interval(a, b) for a, b in zip(pts, pts[1:])]

    def cells_of(self, a: Interval) -> list[Interval]:
        return [c for c in self.cells() if a.lo <= c.lo and c.hi <= a.hi]

    def length_cells(self, a: Interval) -> int:
        return len(self.cells_of(a))

    def contains_interval(self, a: Interval) -> bool:
        return a.lo in self.breakpoints and a.hi in self.breakpoints

    def check_interval(self, a: Interval) -> Interval:
        if not self.contains_interval(a):
            raise ValueError(f"interval {a} has endpoints off the grid {self!r}")
        return a

    def to_json(self) -> list[str]:
        return [_fmt(b) for b in self.breakpoints]

    @classmethod
    def from_json(cls, data: Iterable[str]) -> "Grid":
        return cls(Fraction(s) for s in data)


# ---------------------------------------------------------------------------
# partial operations
# ---------------------------------------------------------------------------

def osum(a: Interval, b: Interval) -> Optional[Interval]:
    """Concatenation: defined iff a, b are adjacent; symmetric."""
    if a.hi == b.lo:
        return Interval(a.lo, b.hi)
    if b.hi == a.lo:
        return Interval(b.lo, a.hi)
    return None


def odiff(a: Interval, b: Interval) -> Optional[Interval]:
    """Set difference a \\ b when it is again a single nonempty interval."""
    if not a.contains(b) or a == b:
        return None
    if a.lo == b.lo:
        return Interval(b.hi, a.hi)
    if a.hi == b.hi:
        return Interval(a.lo, b.lo)
    return None  # b interior to a: difference has two components


def _proper_overlap(a: Interval, b: Interval) -> bool:
    if a == b or a.contains(b) or b.contains(a):
        return False
    return a.lo < b.hi and b.lo < a.hi


def strict_union(a: Interval, b: Interval) -> Optional[Interval]:
    """Union of a properly overlapping or adjacent pair; else undefined."""
    if _proper_overlap(a, b) or osum(a, b) is not None:
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi))
    return None


def strict_intersection(a: Interval, b: Interval) -> Optional[Interval]:
    """Intersection of a properly overlapping pair; else undefined."""
    if _proper_overlap(a, b):
        return Interval(max(a.lo, b.lo), min(a.hi, b.hi))
    return None


def decompositions(grid: Grid, a: Interval) -> list[tuple[Interval, Interval]]:
    """Ordered pairs (b, c) of grid intervals with b ⊕ c = a."""
    out = []
    for b in grid.intervals():
        for c in grid.intervals():
            if osum(b, c) == a:
                out.append((b, c))
    return out


# ---------------------------------------------------------------------------
# interval forms
# ---------------------------------------------------------------------------

def _euler_default(a: Interval, b: Interval) -> int:
    # <[a1,a2), [b1,b2)> = 1(a1 < b2 <= a2) - 1(a1 < b1 <= a2)
    n = 0
    if a.lo < b.hi <= a.hi:
        n += 1
    if a.lo < b.lo <= a.hi:
        n -= 1
    return n


EULER_VARIANTS: dict[str, Callable[[Interval, Interval], int]] = {
    "default": _euler_default,
}


@dataclass(frozen=True)
class EulerData:
    nonsym: int
    sym: int


def euler(a: Interval, b: Interval, variant: str = "default") -> EulerData:
    """Bilinear interval form <a,b> and symmetrization (a|b) = <a,b> + <b,a>."""
    try:
        fn = EULER_VARIANTS[variant]
    except KeyError:
        raise ConfigError(f"unknown euler variant {variant!r}") from None
    return EulerData(fn(a, b), fn(a, b) + fn(b, a))


def _serre_default(table: "CoeffTable", a: Interval, b: Interval) -> bool:
    # Every distinct pair: adjacency and proper overlap carry the nontrivial
    # right-hand side; disjoint non-adjacent and nested pairs reduce to pure
    # q-power commutation (all their index operations are undefined).
    # Excluding nested pairs breaks the verification battery: monomials in a
    # free nested pair violate the PBW spanning shape, the rescaled forms
    # stop being commutative mod (q-1), and the dual coordinate ring
    # overcounts; including them is what the audit accepts.
    if a == b:
        return False
    if osum(a, b) is not None or _proper_overlap(a, b):
        return True
    if a.contains(b) or b.contains(a):
        return True
    return table.sym(a, b) == 0  # disjoint, non-adjacent


def _serre_conservative(table: "CoeffTable", a: Interval, b: Interval) -> bool:
    # nested pairs left without an imposed relation
    if a == b or a.contains(b) or b.contains(a):
        return False
    if osum(a, b) is not None or _proper_overlap(a, b):
        return True
    return table.sym(a, b) == 0


SERRE_VARIANTS: dict[str, Callable[["CoeffTable", Interval, Interval], bool]] = {
    "default": _serre_default,
    "conservative": _serre_conservative,
}


def serre_pairs(grid: Grid, variant: str = "default",
                euler_variant: str = "default") -> set[tuple[Interval, Interval]]:
    """Ordered pairs for which the same-sign relation is imposed."""
    table = CoeffTable(grid, euler_variant)
    try:
        pred = SERRE_VARIANTS[variant]
    except KeyError:
        raise ConfigError(f"unknown serre variant {variant!r}") from None
    ivs = grid.intervals()
    return {(a, b) for a in ivs for b in ivs if pred(table, a, b)}


# ---------------------------------------------------------------------------
# relation coefficients
# ---------------------------------------------------------------------------

class CoeffTable:
    """Scalar coefficients of the defining relations, derived from the form.

    p(a,b)  = (-1)^<a,b> (a|b)
    c±(a,b) = (p(b, a⊖b) ∓̸ ...)/2   (undefined when the index operation is)
    bb(a,b) = p(a, strict_union(a,b))
    r(a,b)  = (1-δ_ab) (-1)^<a,b> (a|b)^2
    s±(a,b) = (p(b, a⊕b) ± 1)/2
    """

    def __init__(self, grid: Grid, euler_variant: str = "default") -> None:
        if euler_variant not in EULER_VARIANTS:
            raise ConfigError(f"unknown euler variant {euler_variant!r}")
        self.grid = grid
        self.euler_variant = euler_variant
        self._fn = EULER_VARIANTS[euler_variant]

    @lru_cache(maxsize=None)
    def nonsym(self, a: Interval, b: Interval) -> int:
        return self._fn(a, b)

    def sym(self, a: Interval, b: Interval) -> int:
        return self.nonsym(a, b) + self.nonsym(b, a)

    def p(self, a: Interval, b: Interval) -> int:
        return (-1) ** (self.nonsym(a, b) % 2) * self.sym(a, b)

    def cplus(self, a: Interval, b: Interval) -> Optional[Fraction]:
        d = odiff(a, b)
        if d is None:
            return None
        return Fraction(self.p(b, d) - 1, 2)

    def cminus(self, a: Interval, b: Interval) -> Optional[Fraction]:
        d = odiff(b, a)
        if d is None:
            return None
        return Fraction(self.p(d, a) + 1, 2)

    def bb(self, a: Interval, b: Interval) -> Optional[int]:
        u = strict_union(a, b)
        if u is None:
            return None
        return self.p(a, u)

    def r(self, a: Interval, b: Interval) -> int:
        if a == b:
            return 0
        return (-1) ** (self.nonsym(a, b) % 2) * self.sym(a, b) ** 2

    def splus(self, a: Interval, b: Interval) -> Optional[Fraction]:
        s = osum(a, b)
        if s is None:
            return None
        return Fraction(self.p(b, s) + 1, 2)

    def sminus(self, a: Interval, b: Interval) -> Optional[Fraction]:
        s = osum(a, b)
        if s is None:
            return None
        return Fraction(self.p(b, s) - 1, 2)

    def row(self, a: Interval, b: Interval) -> dict:
        """All coefficient entries for one ordered pair; None where undefined."""
        return {
            "p": self.p(a, b),
            "c+": self.cplus(a, b),
            "c-": self.cminus(a, b),
            "b": self.bb(a, b),
            "r": self.r(a, b),
            "s+": self.splus(a, b),
            "s-": self.sminus(a, b),
        }


def as_int(x: Fraction, what: str) -> int:
    """Exponents fed to q-powers must be integers; half-integers are a bug."""
    if isinstance(x, int):
        return x
    if x.denominator != 1:
        raise ValueError(f"{what} is not an integer: {x}")
    return x.numerator
