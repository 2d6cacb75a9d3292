"""Exact rational model of the even cohomology of a compact complex surface.

A :class:`SurfaceRing` is a finite divisor basis together with the symmetric
matrix of intersection numbers of the basis divisors, evaluated against the
fundamental class.  Elements are :class:`CohClass` values graded by degree:
a rational in degree 0, a vector of divisor coordinates in degree 2, and a
rational multiple of the point class in degree 4.  All arithmetic is exact
(``fractions.Fraction``); products of two degree-2 classes land in degree 4
through the pairing, and anything of higher degree vanishes on a surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError

RatLike = Fraction | int | str


def as_rational(x: RatLike) -> Fraction:
    """Coerce an int, Fraction, or "p/q" string to an exact Fraction.

    Floats are rejected on purpose: every quantity in this module is exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise InvalidInputError(f"expected an exact rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse rational from {x!r}: {exc}") from None
    raise InvalidInputError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class CohClass:
    """Graded element of a surface ring: (degree 0, degree 2, degree 4)."""

    deg0: Fraction
    deg2: tuple[Fraction, ...]
    deg4: Fraction

    def __add__(self, other: "CohClass") -> "CohClass":
        if len(self.deg2) != len(other.deg2):
            raise InvalidInputError("cannot add classes from rings of different rank")
        return CohClass(
            self.deg0 + other.deg0,
            tuple(a + b for a, b in zip(self.deg2, other.deg2)),
            self.deg4 + other.deg4,
        )

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def __neg__(self) -> "CohClass":
        return self.scale(-1)

    def scale(self, c: RatLike) -> "CohClass":
        c = as_rational(c)
        return CohClass(c * self.deg0, tuple(c * x for x in self.deg2), c * self.deg4)

    def is_zero(self) -> bool:
        return self.deg0 == 0 and self.deg4 == 0 and all(x == 0 for x in self.deg2)

    def is_pure_deg2(self) -> bool:
        """True when only the divisor part is populated (degree 0 and 4 vanish)."""
        return self.deg0 == 0 and self.deg4 == 0


@dataclass(frozen=True)
class SurfaceRing:
    """Divisor basis plus the symmetric rational intersection matrix."""

    basis_names: tuple[str, ...]
    pairing: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        k = len(self.basis_names)
        if k == 0:
            raise InvalidInputError("ring needs at least one basis divisor")
        if any(not name for name in self.basis_names):
            raise InvalidInputError("basis names must be nonempty")
        if len(set(self.basis_names)) != k:
            raise InvalidInputError("basis names must be pairwise distinct")
        if len(self.pairing) != k or any(len(row) != k for row in self.pairing):
            raise InvalidInputError(f"pairing must be a {k}x{k} matrix")
        for i in range(k):
            for j in range(i):
                if self.pairing[i][j] != self.pairing[j][i]:
                    raise InvalidInputError(
                        f"pairing must be symmetric; entries ({i},{j}) and ({j},{i}) differ"
                    )

    @classmethod
    def from_rows(cls, basis_names, rows) -> "SurfaceRing":
        """Build from any nesting of int/str/Fraction entries."""
        return cls(
            tuple(basis_names),
            tuple(tuple(as_rational(x) for x in row) for row in rows),
        )

    @property
    def k(self) -> int:
        return len(self.basis_names)

    def zero(self) -> CohClass:
        return CohClass(Fraction(0), (Fraction(0),) * self.k, Fraction(0))

    def unit(self) -> CohClass:
        return CohClass(Fraction(1), (Fraction(0),) * self.k, Fraction(0))

    def point_class(self, c: RatLike = 1) -> CohClass:
        return CohClass(Fraction(0), (Fraction(0),) * self.k, as_rational(c))

    def divisor(self, coords: dict[str, RatLike] | list | tuple) -> CohClass:
        """Degree-2 class from coordinates, given as a vector or a name->value map."""
        if isinstance(coords, dict):
            unknown = set(coords) - set(self.basis_names)
            if unknown:
                raise InvalidInputError(f"unknown basis names: {sorted(unknown)}")
            vec = tuple(as_rational(coords.get(name, 0)) for name in self.basis_names)
        else:
            if len(coords) != self.k:
                raise InvalidInputError(
                    f"divisor vector has length {len(coords)}, ring has rank {self.k}"
                )
            vec = tuple(as_rational(x) for x in coords)
        return CohClass(Fraction(0), vec, Fraction(0))

    def basis_divisor(self, name: str) -> CohClass:
        return self.divisor({name: 1})

    def pair(self, u: tuple[Fraction, ...], w: tuple[Fraction, ...]) -> Fraction:
        """Bilinear form of two coordinate vectors through the pairing matrix."""
        if len(u) != self.k or len(w) != self.k:
            raise InvalidInputError("coordinate vector length does not match ring rank")
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.pairing[i]
            for j, wj in enumerate(w):
                if wj != 0:
                    total += ui * row[j] * wj
        return total


def ring_mul(a: CohClass, b: CohClass, ring: SurfaceRing) -> CohClass:
    """Graded-commutative product, truncated above degree 4.

    The degree-4 part collects a0*b4, a4*b0, and the pairing of the two
    divisor parts; deg2*deg4 and deg4*deg4 would exceed the dimension of a
    surface and are dropped.
    """
    if len(a.deg2) != ring.k or len(b.deg2) != ring.k:
        raise InvalidInputError("class does not belong to this ring (wrong rank)")
    deg0 = a.deg0 * b.deg0
    deg2 = tuple(a.deg0 * y + b.deg0 * x for x, y in zip(a.deg2, b.deg2))
    deg4 = a.deg0 * b.deg4 + b.deg0 * a.deg4 + ring.pair(a.deg2, b.deg2)
    return CohClass(deg0, deg2, deg4)


def evaluate_on_X(c: CohClass) -> Fraction:
    """Intersection number against the fundamental class: the degree-4 part."""
    return c.deg4


def intersect(a: CohClass, b: CohClass, ring: SurfaceRing) -> Fraction:
    """Convenience: evaluate the product of two classes on the fundamental class."""
    return evaluate_on_X(ring_mul(a, b, ring))
