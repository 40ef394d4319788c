"""Exact scalars: rationals (gmpy2.mpq) and Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction

import gmpy2

Q = gmpy2.mpq
_MPQ = type(Q(0))


def rational(x) -> "gmpy2.mpq":
    """Coerce int, Fraction, mpq or a 'p/q' string to an exact rational."""
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Q(x)
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational literal")
        if "/" in s:
            p, q = s.split("/")
            if int(q) == 0:
                raise ZeroDivisionError("zero denominator")
            return Q(int(p), int(q))
        return Q(int(s))
    if isinstance(x, GaussianRational):
        if x.im:
            raise ValueError("Gaussian rational with nonzero imaginary part")
        return x.re
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Q(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_str(x) -> str:
    x = rational(x)
    return str(x)


class GaussianRational:
    """a + b i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = rational(re)
        self.im = rational(im)

    @staticmethod
    def coerce(x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(x, 0)

    def conj(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        try:
            o = rational(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.im == 0 and self.re == o

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"{self.re}+{self.im}i" if self.im > 0 else f"{self.re}{self.im}i"

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        try:
            o = rational(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re - other.re, self.im - other.im)
        try:
            o = rational(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o, self.im)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussianRational(a * c - b * d, a * d + b * c)
        try:
            o = rational(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o, self.im * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        inv = GaussianRational(other.re / n, -other.im / n)
        return self * inv

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


I = GaussianRational(0, 1)


def conj(x):
    if isinstance(x, GaussianRational):
        return x.conj()
    return x


def simplify(x):
    """Return an mpq when a Gaussian rational is real."""
    if isinstance(x, GaussianRational) and not x.im:
        return x.re
    return x


def scalar_to_json(x):
    if isinstance(x, GaussianRational):
        if not x.im:
            return str(x.re)
        return {"re": str(x.re), "im": str(x.im)}
    return str(rational(x))


def scalar_from_json(obj):
    if isinstance(obj, dict):
        if set(obj) != {"re", "im"}:
            raise ValueError("Gaussian rational must have exactly 're' and 'im'")
        return simplify(GaussianRational(rational(obj["re"]), rational(obj["im"])))
    if isinstance(obj, bool) or isinstance(obj, float):
        raise TypeError("rationals must be strings or integers")
    return rational(obj)
