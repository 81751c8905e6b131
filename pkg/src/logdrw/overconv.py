"""Gauss norms and pseudovaluations on finitely supported elements.

All values are exact: rationals extended by +-infinity.  The Gauss norm of a
de Rham-Witt element reads off its normal form; the norm of a Witt vector over
a polynomial ring reads off its coordinates.  On functions the two agree.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .drw import DrwElement
from .witt_poly import WittVectorPoly
from .weights import POLE

Number = Union[int, Fraction]


class GaussError(ValueError):
    pass


@functools.total_ordering
@dataclass(frozen=True)
class ExtendedValue:
    """A rational, or +infinity / -infinity (``value`` None, sign in ``infinite``)."""

    value: Optional[Fraction] = None
    infinite: int = 0

    def __post_init__(self):
        if (self.value is None) == (self.infinite == 0):
            raise GaussError("give exactly one of a finite value or an infinite sign")
        if self.value is not None and not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def of(cls, x: Union["ExtendedValue", Number]) -> "ExtendedValue":
        return x if isinstance(x, ExtendedValue) else cls(Fraction(x))

    @classmethod
    def inf(cls) -> "ExtendedValue":
        return cls(None, 1)

    @classmethod
    def neg_inf(cls) -> "ExtendedValue":
        return cls(None, -1)

    @property
    def is_finite(self) -> bool:
        return self.infinite == 0

    def _key(self) -> Tuple[int, Fraction]:
        return (self.infinite, self.value if self.value is not None else Fraction(0))

    def __eq__(self, other) -> bool:
        try:
            return self._key() == ExtendedValue.of(other)._key()
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other) -> bool:
        return self._key() < ExtendedValue.of(other)._key()

    def __add__(self, other) -> "ExtendedValue":
        other = ExtendedValue.of(other)
        if self.infinite and other.infinite and self.infinite != other.infinite:
            raise GaussError("inf - inf is undefined")
        if self.infinite or other.infinite:
            return ExtendedValue(None, self.infinite or other.infinite)
        return ExtendedValue(self.value + other.value)

    __radd__ = __add__

    def __neg__(self) -> "ExtendedValue":
        return ExtendedValue(None, -self.infinite) if self.infinite else ExtendedValue(-self.value)

    def __str__(self) -> str:
        if self.infinite:
            return "+inf" if self.infinite > 0 else "-inf"
        return str(self.value)


def _eps(eps: Number) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise GaussError("epsilon must be positive")
    return eps


def _ord(x: int, p: int) -> int:
    if x == 0:
        raise GaussError("ord of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def weight_size(k) -> Fraction:
    """|k+|: the sum of the finite entries (pole entries count as 0)."""
    return sum((Fraction(x) for x in k if x is not POLE), Fraction(0))


def term_value(xi: int, k, p: int, eps: Number) -> Fraction:
    return _ord(xi, p) - _eps(eps) * weight_size(k)


def gauss_norm(omega: DrwElement, eps: Number) -> ExtendedValue:
    """min over the support of ord_p(xi) - eps |k+|; +inf for zero."""
    eps = _eps(eps)
    p = omega.p
    vals = [term_value(xi, key[0], p, eps) for key, xi in omega.terms.items()]
    return ExtendedValue(min(vals)) if vals else ExtendedValue.inf()


def pseudoval(f: Dict[tuple, int], eps: Number, p: int, m: int = 1) -> ExtendedValue:
    """min of ord_p(c) - eps |k| over the monomials c T^k of f, coefficients in Z/p^m."""
    eps = _eps(eps)
    mod = p**m
    vals = [_ord(c % mod, p) - eps * sum(k) for k, c in f.items() if c % mod]
    return ExtendedValue(min(vals)) if vals else ExtendedValue.inf()


def gauss_from_coords(a: WittVectorPoly, eps: Number) -> ExtendedValue:
    """min over coordinates of m + mu_{eps/p^m}(a_m)."""
    eps = _eps(eps)
    best = ExtendedValue.inf()
    for i in range(a.length):
        mu = pseudoval(a.poly(i), eps / a.p**i, a.p)
        best = min(best, mu + i)
    return best


def is_overconvergent_sample(omega: DrwElement, eps: Number, bound: Number) -> bool:
    """True when gamma_eps(omega) >= bound."""
    return gauss_norm(omega, eps) >= ExtendedValue.of(bound)


def overconv_gr_characterization(omega: DrwElement, j: int) -> bool:
    """Every term of omega has exactly j dlog poles."""
    return all(len(key[1].poles) == j for key in omega.terms)
