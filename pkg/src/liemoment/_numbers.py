"""Exact scalars: rationals and Gaussian rationals.

The rational backend is ``gmpy2.mpq`` when available and ``fractions.Fraction``
otherwise; both compare and hash equal to each other, so callers may pass
either.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as Q

    RATIONAL_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    Q = Fraction
    RATIONAL_BACKEND = "fractions"

_ZERO = Q(0)
_ONE = Q(1)


def rational(value) -> "Q":
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to the rational backend.

    Floats are rejected: every exact quantity in this package is entered as
    an integer or a ratio of integers.
    """
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ValueError(f"not a rational literal: {value!r}")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return Q(int(num), int(den))
        return Q(int(text))
    if isinstance(value, bool):
        return Q(int(value))
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, Rational) or type(value).__name__ == "mpq":
        return Q(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(value) -> str:
    """``p/q`` with the denominator omitted when it is 1."""
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


class GaussQ:
    """A Gaussian rational ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO) else rational(re)
        self.im = im if type(im) is type(_ZERO) else rational(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussQ":
        if isinstance(value, GaussQ):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact; use GaussQ(re, im)")
        return cls._raw(rational(value), _ZERO)

    @classmethod
    def parse(cls, text: str) -> "GaussQ":
        """Inverse of :meth:`__str__`: ``"3/2"``, ``"-1/2*i"``, ``"(1/3)+(-2)*i"``."""
        s = text.replace(" ", "")
        m = re.fullmatch(r"\(([^()]+)\)\+\(([^()]+)\)\*i", s)
        if m:
            return cls(rational(m.group(1)), rational(m.group(2)))
        if s.endswith("*i"):
            return cls(0, rational(s[:-2]))
        if s in ("i", "+i"):
            return cls(0, 1)
        if s == "-i":
            return cls(0, -1)
        return cls(rational(s), 0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.coerce(other)
        return GaussQ._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.coerce(other)
        return GaussQ._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussQ.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussQ._raw(a * c, _ZERO)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.coerce(other)
        c, d = other.re, other.im
        den = c * c + d * d
        if not den:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b = self.re, self.im
        return GaussQ._raw((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        return GaussQ.coerce(other) / self

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if n < 0:
            return GaussQ._raw(_ONE, _ZERO) / (self ** (-n))
        out = GaussQ._raw(_ONE, _ZERO)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def times_i(self) -> "GaussQ":
        return GaussQ._raw(-self.im, self.re)

    def div_i(self) -> "GaussQ":
        return GaussQ._raw(self.im, -self.re)

    def conjugate(self) -> "GaussQ":
        return GaussQ._raw(self.re, -self.im)

    # comparison / conversion ---------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)) or type(other).__name__ == "mpq":
            return not self.im and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussQ({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            return f"{format_rational(self.im)}*i"
        return f"({format_rational(self.re)})+({format_rational(self.im)})*i"


ZERO = GaussQ._raw(_ZERO, _ZERO)
ONE = GaussQ._raw(_ONE, _ZERO)
I = GaussQ._raw(_ZERO, _ONE)
