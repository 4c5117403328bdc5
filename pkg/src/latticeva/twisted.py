"""The theta-twisted Fock module M(1)(theta).

Vertex operators are Y(u, x) = Y_0(e^{Delta_x} u, x) where Y_0 is the
normal-ordered product over half-odd modes and

    Delta_x = sum_{m,n >= 0} c_{mn} h(m) h(n) x^{-m-n},
    sum c_{mn} x^m y^n = -log(((1 + x)^{1/2} + (1 + y)^{1/2}) / 2).

On M(1) the zero mode vanishes, so only m, n >= 1 contribute.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import ONE
from .fock import AdmissibilityError, BasisKey, ModuleSpec, Vector
from .modes import _raw_mode, binom, heis_mode

_cmn_cache: dict = {}
_cmn_degree = -1


def _mul_trunc(a: dict, b: dict, n: int) -> dict:
    out = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            if i + j + k + l <= n:
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + c * d
    return {k: v for k, v in out.items() if v}


def cmn_table(degree: int) -> dict:
    """All c_{mn} with m + n <= degree, from the exact bivariate series."""
    global _cmn_cache, _cmn_degree
    if degree <= _cmn_degree:
        return {k: v for k, v in _cmn_cache.items() if sum(k) <= degree}
    # f = ((1+x)^{1/2} - 1)/2 + ((1+y)^{1/2} - 1)/2, so the argument of log is 1 + f
    f = {}
    for k in range(1, degree + 1):
        c = binom(Fraction(1, 2), k) / 2
        f[(k, 0)] = c
        f[(0, k)] = c
    out = {}
    power = {(0, 0): Fraction(1)}
    for r in range(1, degree + 1):
        power = _mul_trunc(power, f, degree)
        w = Fraction((-1) ** r, r)  # -log(1 + f) = sum_r (-1)^r f^r / r
        for key, c in power.items():
            out[key] = out.get(key, Fraction(0)) + w * c
    _cmn_cache = {k: v for k, v in out.items() if v}
    _cmn_degree = degree
    return dict(_cmn_cache)


def cmn(m: int, n: int) -> Fraction:
    if m < 0 or n < 0:
        raise ValueError("c_{mn} is defined for nonnegative m, n")
    return cmn_table(m + n).get((m, n), Fraction(0))


def _check_m1(u: Vector):
    for k in u.terms:
        if k.q is None or k.q != 0:
            raise AdmissibilityError("delta_exp and twisted modes take elements of M(1) (no lattice part)")


def delta_exp(u: Vector) -> dict:
    """{x-exponent: element of M(1)} for e^{Delta_x} u; the x^0 term is u."""
    _check_m1(u)
    maxdeg = max((sum(k.parts) for k in u.terms), default=0)
    table = cmn_table(max(maxdeg, 2))
    pairs = [(m, n, c) for (m, n), c in table.items() if m >= 1 and n >= 1]
    out = {0: u}
    layer = {0: u}
    r = 0
    while layer:
        r += 1
        nxt = {}
        for e, w in layer.items():
            for m, n, c in pairs:
                t = heis_mode(m, heis_mode(n, w))
                if t:
                    key = e - m - n
                    t = t.scale(Fraction(c, r))
                    nxt[key] = nxt[key] + t if key in nxt else t
        layer = {e: w for e, w in nxt.items() if w}
        for e, w in layer.items():
            out[e] = out[e] + w if e in out else w
    return {e: w for e, w in out.items() if w}


def twisted_mode(u: Vector, n: int, v: Vector) -> Vector:
    """Mode n of Y(u, x) on a twisted vector v, for u in M(1) of even h-degree."""
    if not v.spec.twisted:
        raise AdmissibilityError("twisted_mode acts on the twisted module")
    _check_m1(u)
    if any(len(k.parts) % 2 for k in u.terms):
        raise AdmissibilityError("u has odd h-degree, so its twisted modes are not integrally indexed")
    out = Vector.zero(v.spec)
    for e, ue in delta_exp(u).items():
        out = out + _raw_mode(ue, int(n) + e, v, v.spec.p)
    return out


def eigencheck(u: Vector, n: int, v: Vector):
    """lambda with twisted_mode(u, n, v) = lambda v, or None if v is not an eigenvector."""
    r = twisted_mode(u, n, v)
    if not v:
        return None
    key, c = next(iter(v.terms.items()))
    lam = r.coefficient(key) / c
    return lam if r == v.scale(lam) else None


def twisted_top(spec: ModuleSpec | None = None) -> Vector:
    return Vector({BasisKey(None, ()): ONE}, (spec or ModuleSpec()).twisted_space(), _clean=True)


def twisted_eigen_pairs():
    """(omega_1, H_3) eigenvalues on vac_tw and h(-1/2)vac_tw."""
    from .elements import H, omega

    spec = ModuleSpec()
    top = twisted_top(spec)
    out = []
    for label, v in (("vac_tw", top), ("h(-1/2)vac_tw", heis_mode(Fraction(-1, 2), top))):
        out.append((label, eigencheck(omega(spec), 1, v), eigencheck(H(spec), 3, v)))
    return out
