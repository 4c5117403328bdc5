"""Fock basis states for the rank-one Heisenberg, lattice and twisted modules.

``h`` spans the Cartan space with <h, h> = 1 and the lattice generator is
``alpha = s*h`` so that <alpha, alpha> = p = s^2.  An untwisted basis key is a
partition (modes n of h(-n)) together with a rational lattice label q (the
state sits over e^{q alpha}).  A twisted key stores the half-odd modes of
h(-k/2) by their odd numerators k and carries no label.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .exact import ONE, S, ZERO, Scalar, as_scalar, rational_sqrt, reduce_quadratic

TWISTED_SHIFT = Fraction(1, 16)


class AdmissibilityError(ValueError):
    """A lattice label or mode is not allowed in the requested module."""


class BasisKey(NamedTuple):
    q: Fraction | None  # None marks the twisted sector
    parts: tuple  # descending; twisted parts are odd numerators of k/2

    @property
    def twisted(self) -> bool:
        return self.q is None

    def text(self) -> str:
        if self.q is None:
            modes = "".join(f"h(-{k}/2)" for k in self.parts)
            return f"{modes}|tw⟩"
        modes = "".join(f"h(-{k})" for k in self.parts)
        return f"{modes}|q={_frac_text(self.q)}⟩"

    def to_json(self) -> dict:
        if self.q is None:
            return {"partition": [f"{k}/2" for k in self.parts], "q": None, "sector": "twisted"}
        return {"partition": list(self.parts), "q": _frac_text(self.q), "sector": "untwisted"}

    @classmethod
    def from_json(cls, d) -> "BasisKey":
        if d["sector"] == "twisted":
            return cls(None, tuple(sorted((int(Fraction(x) * 2) for x in d["partition"]), reverse=True)))
        return cls(Fraction(d["q"]), tuple(sorted((int(x) for x in d["partition"]), reverse=True)))


def _frac_text(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def add_part(parts: tuple, k: int) -> tuple:
    """Insert ``k`` into a descending tuple."""
    out = list(parts)
    for idx, x in enumerate(out):
        if k >= x:
            out.insert(idx, k)
            return tuple(out)
    out.append(k)
    return tuple(out)


def merge_parts(a: tuple, b: tuple) -> tuple:
    if not b:
        return a
    if not a:
        return b
    return tuple(sorted(a + b, reverse=True))


def remove_part(parts: tuple, k: int) -> tuple:
    out = list(parts)
    out.remove(k)
    return tuple(out)


@dataclass(frozen=True)
class ModuleSpec:
    """Ambient module: ``V_{q0 alpha + L}`` or the twisted space ``M(1)(theta)``.

    ``p`` is ``None`` for a symbolic norm, otherwise a non-zero rational.
    """

    p: Fraction | None = None
    coset: Fraction = Fraction(0)
    twisted: bool = False

    def __post_init__(self):
        if self.p is not None:
            object.__setattr__(self, "p", Fraction(self.p))
            if self.p == 0:
                raise AdmissibilityError("the lattice norm p must be non-zero")
        object.__setattr__(self, "coset", Fraction(self.coset))
        if not self.twisted:
            self.check_label(self.coset)

    @property
    def symbolic(self) -> bool:
        return self.p is None

    @property
    def p_scalar(self) -> Scalar:
        return Scalar.poly({2: 1}) if self.p is None else Scalar.const(self.p)

    @property
    def s_scalar(self) -> Scalar:
        if self.p is None:
            return S
        root = rational_sqrt(self.p)
        return S if root is None else Scalar.const(root)

    def norm(self, c: Scalar) -> Scalar:
        """Canonical coefficient for this p mode."""
        if self.p is None or c.is_const():
            return c
        return reduce_quadratic(c, self.p)

    def check_label(self, q):
        q = Fraction(q)
        if self.twisted:
            raise AdmissibilityError("the twisted module carries no lattice label")
        if self.p is None:
            if q.denominator != 1:
                raise AdmissibilityError(f"symbolic p permits only integral lattice labels, got {q}")
        elif (self.coset * self.p).denominator != 1:
            raise AdmissibilityError(f"coset {self.coset} is not in the dual lattice for p = {self.p}")
        if (q - self.coset).denominator != 1:
            raise AdmissibilityError(f"label {q} is not in the coset {self.coset} + Z")

    def lattice(self) -> "ModuleSpec":
        """The vertex algebra V_L over the same p mode."""
        return ModuleSpec(self.p)

    def twisted_space(self) -> "ModuleSpec":
        return ModuleSpec(self.p, twisted=True)

    def describe(self) -> str:
        pm = "sym" if self.p is None else _frac_text(self.p)
        return f"twisted(p={pm})" if self.twisted else f"V[{_frac_text(self.coset)}+L](p={pm})"


class Vector:
    """A finite linear combination of basis keys with Scalar coefficients."""

    __slots__ = ("terms", "spec")

    def __init__(self, terms=None, spec: ModuleSpec | None = None, _clean=False):
        self.spec = spec if spec is not None else ModuleSpec()
        if _clean:
            self.terms = terms
        else:
            self.terms = {}
            for k, c in (terms or {}).items():
                c = self.spec.norm(as_scalar(c))
                if c:
                    self.terms[k] = c

    @classmethod
    def zero(cls, spec):
        return cls({}, spec, _clean=True)

    def _check(self, other):
        if self.spec.p != other.spec.p:
            raise AdmissibilityError("vectors over different p modes")

    def __add__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        norm = self.spec.norm
        for k, c in other.terms.items():
            old = out.get(k)
            if old is None:
                out[k] = c
            else:
                new = norm(old + c)
                if new:
                    out[k] = new
                else:
                    del out[k]
        return Vector(out, self._merged_spec(other), _clean=True)

    def _merged_spec(self, other):
        if not self.terms:
            return other.spec
        return self.spec

    def __neg__(self):
        return Vector({k: -c for k, c in self.terms.items()}, self.spec, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Vector":
        c = as_scalar(c)
        if not c:
            return Vector.zero(self.spec)
        norm = self.spec.norm
        out = {}
        for k, v in self.terms.items():
            w = norm(v * c)
            if w:
                out[k] = w
        return Vector(out, self.spec, _clean=True)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Vector):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def coefficient(self, key) -> Scalar:
        return self.terms.get(key, ZERO)

    def with_spec(self, spec: ModuleSpec) -> "Vector":
        return Vector(self.terms, spec)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for k in sorted(self.terms, key=_key_order):
            c = self.terms[k]
            out.append(f"({c}) * {k.text()}" if not c.is_const() else f"{_frac_text(c.const_value())} * {k.text()}")
        return " + ".join(out)

    def __repr__(self):
        return f"Vector({self.render()})"

    def to_json(self) -> list:
        return [{"key": k.to_json(), "coef": str(c)} for k, c in sorted(self.terms.items(), key=lambda kv: _key_order(kv[0]))]


def _key_order(k: BasisKey):
    return (k.q is None, k.q if k.q is not None else 0, sum(k.parts), k.parts)


# ---------------------------------------------------------------------------
# operations

def make_state(partition, q=0, spec: ModuleSpec | None = None) -> Vector:
    """Unit basis vector h(-n1)...h(-nk) e^{q alpha}."""
    spec = spec or ModuleSpec()
    parts = tuple(sorted((int(n) for n in partition), reverse=True))
    if any(n < 1 for n in parts):
        raise AdmissibilityError("partition entries must be positive")
    q = Fraction(q)
    if spec.twisted:
        raise AdmissibilityError("use make_twisted_state for the twisted module")
    spec.check_label(q)
    return Vector({BasisKey(q, parts): ONE}, spec, _clean=True)


def make_twisted_state(modes=(), spec: ModuleSpec | None = None) -> Vector:
    """h(-k1)...h(-kn) vac_tw for positive half-odd modes k_i."""
    spec = spec.twisted_space() if spec is not None else ModuleSpec(twisted=True)
    nums = []
    for k in modes:
        k2 = Fraction(k) * 2
        if k2.denominator != 1 or k2.numerator % 2 == 0 or k2 <= 0:
            raise AdmissibilityError(f"twisted modes are positive half-odd integers, got {k}")
        nums.append(int(k2))
    return Vector({BasisKey(None, tuple(sorted(nums, reverse=True))): ONE}, spec, _clean=True)


def vac(spec: ModuleSpec | None = None) -> Vector:
    return make_state((), 0, spec or ModuleSpec())


def theta(v: Vector) -> Vector:
    out = {}
    for k, c in v.terms.items():
        sign = -1 if len(k.parts) % 2 else 1
        nk = k if k.q is None else BasisKey(-k.q, k.parts)
        out[nk] = c if sign == 1 else -c
    spec = v.spec
    if not spec.twisted and spec.coset != 0:
        spec = ModuleSpec(spec.p, -spec.coset)
    return Vector(out, spec, _clean=True)


def project_theta(v: Vector, sign: int) -> Vector:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    t = theta(v)
    return (v + (t if sign == 1 else -t)).scale(Fraction(1, 2))


@dataclass(frozen=True)
class TwistedWeight:
    degree: Fraction  # combinatorial degree, sum of the modes
    declared_shift: Fraction = TWISTED_SHIFT

    @property
    def total(self) -> Fraction:
        return self.degree + self.declared_shift


def weight(key: BasisKey, spec: ModuleSpec | None = None):
    """L(0)-weight of a basis key: Scalar for untwisted keys, TwistedWeight otherwise."""
    if key.q is None:
        return TwistedWeight(Fraction(sum(key.parts), 2))
    spec = spec or ModuleSpec()
    return spec.norm(Scalar.const(sum(key.parts)) + spec.p_scalar * (key.q * key.q / 2))


def depth(key: BasisKey) -> Fraction:
    """Sum of the oscillator modes (weight minus the lattice contribution)."""
    return Fraction(sum(key.parts), 2) if key.q is None else Fraction(sum(key.parts))


def homogeneous_weight(v: Vector):
    """Common weight of all keys of ``v``; raises if ``v`` is not homogeneous."""
    ws = {weight(k, v.spec) for k in v.terms}
    if len(ws) != 1:
        raise ValueError("vector is not homogeneous" if ws else "zero vector has no weight")
    return ws.pop()


def parts_counter(parts) -> Counter:
    return Counter(parts)
