"""Exact coefficients: reduced rational functions in a formal symbol ``s``.

The lattice norm is ``p = s**2``.  Polynomials are sparse dicts mapping an
exponent to a :class:`fractions.Fraction`; a :class:`Scalar` is a pair
numerator/denominator kept coprime with a monic denominator, so equality is
structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

__all__ = [
    "Scalar",
    "PoleError",
    "ZERO",
    "ONE",
    "S",
    "P",
    "scalar_arith",
    "scalar_substitute",
    "reduce_quadratic",
    "as_scalar",
]


class PoleError(ZeroDivisionError):
    """A denominator vanished (division by zero or substitution at a pole)."""


# ---------------------------------------------------------------------------
# sparse polynomial helpers; a polynomial is a dict {exponent: Fraction}

def _padd(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    r = dict(a)
    for k, v in b.items():
        w = r.get(k)
        if w is None:
            r[k] = v
        else:
            w += v
            if w:
                r[k] = w
            else:
                del r[k]
    return r


def _pneg(a):
    return {k: -v for k, v in a.items()}


def _pscale(a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def _pmul(a, b):
    if not a or not b:
        return {}
    if len(a) == 1:
        (ka, va), = a.items()
        return {k + ka: v * va for k, v in b.items()}
    if len(b) == 1:
        (kb, vb), = b.items()
        return {k + kb: v * vb for k, v in a.items()}
    r = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            r[k] = r.get(k, 0) + va * vb
    return {k: v for k, v in r.items() if v}


def _deg(a):
    return max(a) if a else -1


def _pdivmod(a, b):
    if not b:
        raise PoleError("polynomial division by zero")
    db = _deg(b)
    lb = b[db]
    q = {}
    r = dict(a)
    while r and _deg(r) >= db:
        dr = _deg(r)
        c = r[dr] / lb
        shift = dr - db
        q[shift] = c
        for k, v in b.items():
            kk = k + shift
            w = r.get(kk, 0) - c * v
            if w:
                r[kk] = w
            else:
                r.pop(kk, None)
    return q, r


def _pmonic(a):
    lead = a[_deg(a)]
    if lead == 1:
        return a
    return {k: v / lead for k, v in a.items()}


def _pgcd(a, b):
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    return _pmonic(a) if a else {}


def _peval(a, x):
    return sum((v * x ** k for k, v in a.items()), Fraction(0))


_ONE_POLY = {0: Fraction(1)}


def _frozen(a):
    return tuple(sorted(a.items()))


class Scalar:
    """An element of Q(s), immutable and canonically reduced."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=None, den=None, _reduced=False):
        num = {k: Fraction(v) for k, v in (num or {}).items() if v}
        den = {k: Fraction(v) for k, v in (den or _ONE_POLY).items() if v}
        if not den:
            raise PoleError("zero denominator")
        if not _reduced:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "Scalar":
        c = Fraction(c)
        return cls._raw({0: c} if c else {}, _ONE_POLY)

    @classmethod
    def poly(cls, coeffs) -> "Scalar":
        """Polynomial in s from ``{exponent: coefficient}``."""
        return cls._raw({k: Fraction(v) for k, v in coeffs.items() if v}, _ONE_POLY)

    @classmethod
    def poly_in_p(cls, coeffs) -> "Scalar":
        return cls.poly({2 * k: v for k, v in coeffs.items()})

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and 0 in self.den

    def is_const(self) -> bool:
        return self.is_polynomial() and all(k == 0 for k in self.num)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not a rational constant")
        return self.num.get(0, Fraction(0))

    def is_even(self) -> bool:
        """True when the value lies in Q(p), i.e. only even powers of s occur."""
        return all(k % 2 == 0 for k in self.num) and all(k % 2 == 0 for k in self.den)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = as_scalar(other)
        if self.is_polynomial() and other.is_polynomial():
            return Scalar._raw(_padd(self.num, other.num), _ONE_POLY)
        if self.den == other.den:
            return Scalar(_padd(self.num, other.num), self.den)
        return Scalar(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                      _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(_pneg(self.num), self.den)

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Scalar._raw(_pscale(self.num, Fraction(other)), self.den)
        other = as_scalar(other)
        if self.is_polynomial() and other.is_polynomial():
            return Scalar._raw(_pmul(self.num, other.num), _ONE_POLY)
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scalar(other)
        if other.is_zero():
            raise PoleError("division by zero")
        if other.is_const():
            return Scalar._raw(_pscale(self.num, 1 / other.const_value()), self.den)
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return ONE / (self ** -n)
        r = ONE
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_frozen(self.num), _frozen(self.den)))
        return self._hash

    # -- evaluation -------------------------------------------------------
    def at_s(self, s0) -> Fraction:
        d = _peval(self.den, Fraction(s0))
        if not d:
            raise PoleError(f"pole at s={s0}")
        return _peval(self.num, Fraction(s0)) / d

    def at_p(self, p0) -> Fraction:
        """Value at p = p0; only for elements of Q(p)."""
        if not self.is_even():
            raise ValueError("scalar is odd in s; use scalar_substitute")
        num = {k // 2: v for k, v in self.num.items()}
        den = {k // 2: v for k, v in self.den.items()}
        d = _peval(den, Fraction(p0))
        if not d:
            raise PoleError(f"pole at p={p0}")
        return _peval(num, Fraction(p0)) / d

    # -- text -------------------------------------------------------------
    def render(self, var: str = "s") -> str:
        """Text form ``(num)/(den)``; ``var='p'`` is allowed for even scalars."""
        if var == "p" and not self.is_even():
            var = "s"
        n = _render_poly(self.num, var)
        if self.is_polynomial():
            return n
        return f"({n})/({_render_poly(self.den, var)})"

    def __str__(self):
        return self.render("p" if self.is_even() else "s")

    def __repr__(self):
        return f"Scalar({self.render()!r})"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        from .grammar import parse_scalar

        return parse_scalar(text)


def _normalize(num, den):
    if not num:
        return {}, _ONE_POLY
    if _deg(den) > 0:
        g = _pgcd(num, den)
        if _deg(g) > 0:
            num, r1 = _pdivmod(num, g)
            den, r2 = _pdivmod(den, g)
            assert not r1 and not r2
    lead = den[_deg(den)]
    if lead != 1:
        num = _pscale(num, 1 / lead)
        den = _pscale(den, 1 / lead)
    return num, den


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_poly(a, var):
    if not a:
        return "0"
    step = 2 if var == "p" else 1
    parts = []
    for k in sorted(a, reverse=True):
        c = a[k]
        e = k // step
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = _render_coeff(mag)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if mag == 1 else f"{_render_coeff(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.const(x)
    if isinstance(x, str):
        return Scalar.parse(x)
    raise TypeError(f"cannot interpret {x!r} as a Scalar")


ZERO = Scalar.const(0)
ONE = Scalar.const(1)
S = Scalar.poly({1: 1})
P = Scalar.poly({2: 1})


def scalar_arith(kind: str, a, b) -> Scalar:
    a, b = as_scalar(a), as_scalar(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def rational_sqrt(q) -> Fraction | None:
    q = Fraction(q)
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _split_mod(a, p0):
    """Reduce a polynomial modulo s^2 - p0 into (rational part, s part)."""
    r0, r1 = Fraction(0), Fraction(0)
    for k, v in a.items():
        c = v * p0 ** (k // 2)
        if k % 2:
            r1 += c
        else:
            r0 += c
    return r0, r1


def scalar_substitute(a, p0, domain: str | None = None):
    """Specialize ``a`` at ``s**2 = p0``.

    Returns a :class:`Fraction` when the value is rational, otherwise the pair
    ``(rational part, sqrt(p0) part)``.
    """
    a = as_scalar(a)
    p0 = Fraction(p0)
    c, d = _split_mod(a.den, p0)
    root = rational_sqrt(p0)
    where = f" ({domain})" if domain else ""
    if root is not None:
        den = c + d * root
        if not den:
            raise PoleError(f"pole at p0={p0}{where}")
        x, y = _split_mod(a.num, p0)
        return (x + y * root) / den
    norm = c * c - d * d * p0
    if not norm:
        raise PoleError(f"pole at p0={p0}{where}")
    x, y = _split_mod(a.num, p0)
    # (x + y s) / (c + d s) = (x + y s)(c - d s) / (c^2 - d^2 p0)
    re = (x * c - y * d * p0) / norm
    im = (y * c - x * d) / norm
    if not im:
        return re
    return (re, im)


def reduce_quadratic(a, p0) -> Scalar:
    """Canonical representative of ``a`` in Q(sqrt(p0)) as ``x + y*s``.

    If ``p0`` is a rational square the symbol is replaced by the positive root.
    """
    a = as_scalar(a)
    if a.is_const():
        return a
    if a.is_polynomial() and _deg(a.num) <= 1 and rational_sqrt(p0) is None:
        return a
    v = scalar_substitute(a, p0)
    if isinstance(v, tuple):
        return Scalar._raw({k: c for k, c in ((0, v[0]), (1, v[1])) if c}, _ONE_POLY)
    return Scalar.const(v)
