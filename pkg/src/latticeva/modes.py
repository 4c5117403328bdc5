"""Untwisted vertex operators on Fock and lattice modules.

For ``a = h(-i1)...h(-ik) e^{q alpha}`` the field is the normal-ordered product

    Y(a, x) = : d^{(i1-1)}h(x) ... d^{(ik-1)}h(x) E^-(x) e^{q alpha} x^{q alpha(0)} E^+(x) :

with ``d^{(i-1)}h(x) = sum_m binom(-m-1, i-1) h(m) x^{-m-i}`` and
``E^{-/+}(x) = exp(+/- sum_k q s h(-/+k) x^{+/-k} / k)``.  Annihilators
(modes >= 0) act first on the right, creators multiply on the left.  The
twisted module reuses the same machinery with half-odd modes and no zero mode.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from fractions import Fraction
from functools import lru_cache

from .exact import ONE, S, ZERO, Scalar
from .fock import AdmissibilityError, BasisKey, ModuleSpec, Vector, add_part, merge_parts, remove_part

NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def binom(x, k: int) -> Fraction:
    """Generalized binomial coefficient for rational ``x`` and integer ``k``."""
    if k < 0:
        return Fraction(0)
    x = Fraction(x)
    if x.denominator == 1 and x >= 0:
        return Fraction(math.comb(int(x), k))
    r = Fraction(1)
    for j in range(k):
        r = r * (x - j) / (j + 1)
    return r


def _acc(target: dict, key, c):
    old = target.get(key)
    if old is None:
        target[key] = c
    else:
        new = old + c
        if new:
            target[key] = new
        else:
            del target[key]


# ---------------------------------------------------------------------------
# single Heisenberg modes

def heis_mode(n, v: Vector) -> Vector:
    """h(n) v; half-integer ``n`` on twisted vectors, integer ``n`` otherwise."""
    n = Fraction(n)
    spec = v.spec
    if spec.twisted != (n.denominator == 2):
        raise AdmissibilityError(f"mode h({n}) does not match the {'twisted' if spec.twisted else 'untwisted'} sector")
    if n.denominator not in (1, 2):
        raise AdmissibilityError(f"mode index {n} is not integral or half-integral")
    out = {}
    if spec.twisted:
        k = int(2 * n)
        for key, c in v.terms.items():
            if k < 0:
                _acc(out, BasisKey(None, add_part(key.parts, -k)), c)
            else:
                r = key.parts.count(k)
                if r:
                    _acc(out, BasisKey(None, remove_part(key.parts, k)), c * (n * r))
        return Vector(out, spec)
    m = int(n)
    for key, c in v.terms.items():
        if m < 0:
            _acc(out, BasisKey(key.q, add_part(key.parts, -m)), c)
        elif m == 0:
            if key.q:
                _acc(out, key, c * S * key.q)
        else:
            r = key.parts.count(m)
            if r:
                _acc(out, BasisKey(key.q, remove_part(key.parts, m)), c * (m * r))
    return Vector(out, spec)


# ---------------------------------------------------------------------------
# series pieces

def _partitions(n: int, maxpart=None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def _exp_minus(q: Fraction, d: int):
    """Coefficient of x^d in exp(sum_k q s h(-k) x^k / k), as parts -> Scalar."""
    if d == 0:
        return {(): ONE}
    if q == 0:
        return {}
    out = {}
    for lam in _partitions(d):
        cnt = Counter(lam)
        w = Fraction(1)
        for k, r in cnt.items():
            w /= Fraction(k) ** r * math.factorial(r)
        out[lam] = Scalar.poly({len(lam): w * q ** len(lam)})
    return out


@lru_cache(maxsize=None)
def _creation(orders: tuple, q: Fraction, d: int):
    """x^d coefficient of the creation parts of the derivative fields times E^-."""
    if not orders:
        return _exp_minus(q, d)
    i = orders[0]
    rest = orders[1:]
    out = {}
    for dt in range(d + 1):
        sub = _creation(rest, q, d - dt)
        if not sub:
            continue
        w = binom(dt + i - 1, i - 1)
        for parts, c in sub.items():
            _acc(out, add_part(parts, dt + i), c * w)
    return out


@lru_cache(maxsize=None)
def _tw_creation(orders: tuple, d2: int):
    """Twisted creation parts with doubled exponent ``d2``; keys are odd numerators."""
    if not orders:
        return {(): ONE} if d2 == 0 else {}
    i = orders[0]
    rest = orders[1:]
    floor_rest = sum(1 - 2 * j for j in rest)
    out = {}
    k = 1
    # mode h(-k/2) contributes doubled exponent k - 2i
    while k - 2 * i + floor_rest <= d2:
        sub = _tw_creation(rest, d2 - (k - 2 * i))
        if sub:
            w = binom(Fraction(k, 2) - 1, i - 1)
            for parts, c in sub.items():
                _acc(out, add_part(parts, k), c * w)
        k += 2
    return out


def _annihilate(orders, key: BasisKey):
    """Distribute the derivative fields into creators and annihilators.

    Returns ``{(creation_orders, doubled exponent): {parts: Scalar}}`` where
    the annihilators have already acted on ``key``.
    """
    twisted = key.q is None
    h0 = None if twisted or not key.q else S * key.q
    states = {((), 0): {key.parts: ONE}}
    for i in orders:
        new = defaultdict(dict)
        for (cre, e2), vec in states.items():
            tgt = new[(cre + (i,), e2)]
            for parts, c in vec.items():
                _acc(tgt, parts, c)
            if h0 is not None:
                tgt = new[(cre, e2 - 2 * i)]
                w = h0 * (-1 if (i - 1) % 2 else 1)
                for parts, c in vec.items():
                    _acc(tgt, parts, c * w)
            modes = set()
            for parts in vec:
                modes.update(parts)
            for k in modes:
                # mode value m = k (untwisted) or k/2 (twisted)
                m = Fraction(k, 2) if twisted else Fraction(k)
                w = m * binom(-m - 1, i - 1)
                tgt = new[(cre, e2 - int(2 * (m + i)))]
                for parts, c in vec.items():
                    r = parts.count(k)
                    if r:
                        _acc(tgt, remove_part(parts, k), c * (w * r))
        states = {k: v for k, v in new.items() if v}
    return states


def _exp_plus(q: Fraction, vec: dict):
    """Apply exp(-sum_k q s h(k) x^{-k}/k); returns {doubled exponent: {parts: Scalar}}."""
    if q == 0:
        return {0: vec}
    out = defaultdict(dict)
    for parts, c in vec.items():
        cnt = sorted(Counter(parts).items())
        choices = [((), 0, ONE)]
        for k, n in cnt:
            nxt = []
            for kept, e, w in choices:
                for r in range(n + 1):
                    coef = Scalar.poly({r: Fraction((-1) ** r * math.comb(n, r)) * q ** r})
                    nxt.append((kept + (k,) * (n - r), e - k * r, w * coef))
            choices = nxt
        for kept, e, w in choices:
            _acc(out[2 * e], tuple(sorted(kept, reverse=True)), c * w)
    return {e: v for e, v in out.items() if v}


# ---------------------------------------------------------------------------
# basis-level modes

def _zero_mode_exponent(qa, qv, spec: ModuleSpec) -> int:
    prod = Fraction(qa) * Fraction(qv)
    if not prod:
        return 0
    if spec.p is None:
        raise AdmissibilityError(
            "non-integral x-exponent: lattice operator between nonzero labels needs numeric p")
    z = prod * spec.p
    if z.denominator != 1:
        raise AdmissibilityError(f"non-integral x-exponent {z} for labels {qa}, {qv}")
    return int(z)


@lru_cache(maxsize=200000)
def _stage(ka: BasisKey, kv: BasisKey, p):
    """Annihilated pieces of Y(ka, x) kv grouped by creation pattern and exponent."""
    spec = ModuleSpec(p) if kv.q is not None else ModuleSpec(p, twisted=True)
    orders = tuple(sorted(ka.parts))
    ann = _annihilate(orders, kv)
    if kv.q is None:
        return tuple((cre, e2, tuple(vec.items())) for (cre, e2), vec in ann.items())
    z2 = 2 * _zero_mode_exponent(ka.q, kv.q, spec)
    out = defaultdict(dict)
    for (cre, e2), vec in ann.items():
        for f2, w in _exp_plus(ka.q, vec).items():
            tgt = out[(cre, e2 + f2 + z2)]
            for parts, c in w.items():
                _acc(tgt, parts, c)
    return tuple((cre, e2, tuple(vec.items())) for (cre, e2), vec in out.items() if vec)


@lru_cache(maxsize=200000)
def _mode_basis(ka: BasisKey, n: int, kv: BasisKey, p):
    target2 = 2 * (-n - 1)
    out = {}
    twisted = kv.q is None
    label = None if twisted else kv.q + ka.q
    for cre, e2, vec in _stage(ka, kv, p):
        rem2 = target2 - e2
        if twisted:
            cr = _tw_creation(cre, rem2)
        else:
            if rem2 < 0 or rem2 % 2:
                continue
            cr = _creation(cre, ka.q, rem2 // 2)
        if not cr:
            continue
        for parts, c in vec:
            for add, w in cr.items():
                _acc(out, BasisKey(label, merge_parts(parts, add)), c * w)
    return out


def _structural_low(ka: BasisKey, kv: BasisKey, p):
    """Smallest x-exponent (doubled) that can occur in Y(ka, x) kv, or None."""
    low = None
    for cre, e2, _ in _stage(ka, kv, p):
        if kv.q is None:
            e2 += sum(1 - 2 * i for i in cre)
        low = e2 if low is None else min(low, e2)
    return low


def _check_pair(a: Vector, v: Vector):
    if a.spec.twisted or any(k.q is None for k in a.terms):
        raise AdmissibilityError("the acting element must lie in V_L")
    if a.spec.p != v.spec.p:
        raise AdmissibilityError(f"p modes differ: {a.spec.p} vs {v.spec.p}")


def _raw_mode(a: Vector, n: int, v: Vector, p) -> Vector:
    out = {}
    for ka, ca in a.terms.items():
        for kv, cv in v.terms.items():
            res = _mode_basis(ka, n, kv, p)
            if not res:
                continue
            c = ca * cv
            for k, w in res.items():
                _acc(out, k, c * w)
    return Vector(out, v.spec)


def vertex_mode(a: Vector, n: int, v: Vector) -> Vector:
    """a_n v for a in V_L and v in an untwisted module over the same p mode."""
    if v.spec.twisted:
        raise AdmissibilityError("use twisted.twisted_mode on the twisted module")
    _check_pair(a, v)
    return _raw_mode(a, int(n), v, v.spec.p)


def exp_mode(q, n: int, v: Vector) -> Vector:
    """Mode n of Y(e^{q alpha}, x) on v."""
    spec = v.spec
    if spec.twisted:
        raise AdmissibilityError("lattice operators do not act on the twisted module")
    q = Fraction(q)
    spec.lattice().check_label(q)
    return _raw_mode(Vector({BasisKey(q, ()): ONE}, spec.lattice(), _clean=True), int(n), v, spec.p)


def structural_top(a: Vector, v: Vector):
    """Largest n that the normal-ordered expansion can make nonzero."""
    low = None
    for ka in a.terms:
        for kv in v.terms:
            lo = _structural_low(ka, kv, v.spec.p)
            if lo is not None:
                low = lo if low is None else min(low, lo)
    if low is None:
        return None
    return -math.ceil(Fraction(low, 2)) - 1


def epsilon(a: Vector, v: Vector, mode_fn=None, max_gap: int = 256):
    """Largest n with a_n v != 0, or -inf when Y(a, x)v vanishes."""
    mode_fn = mode_fn or vertex_mode
    if not a or not v:
        return NEG_INF
    top = structural_top(a, v)
    if top is None:
        return NEG_INF
    for n in range(top, top - max_gap, -1):
        if mode_fn(a, n, v):
            return n
    raise RuntimeError(f"no nonzero mode within {max_gap} steps of the structural top {top}")


def nonneg_products(a: Vector, b: Vector) -> dict:
    """{k: a_k b} for every k >= 0 with a_k b != 0."""
    top = structural_top(a, b)
    out = {}
    if top is None:
        return out
    for k in range(top, -1, -1):
        r = vertex_mode(a, k, b)
        if r:
            out[k] = r
    return out


def commutator_residual(a: Vector, b: Vector, i: int, j: int, v: Vector) -> Vector:
    """(a_i b_j - b_j a_i)v - sum_k binom(i, k)(a_k b)_{i+j-k} v."""
    lhs = vertex_mode(a, i, vertex_mode(b, j, v)) - vertex_mode(b, j, vertex_mode(a, i, v))
    rhs = Vector.zero(v.spec)
    for k, ab in nonneg_products(a, b).items():
        w = binom(i, k)
        if w:
            rhs = rhs + vertex_mode(ab, i + j - k, v).scale(w)
    return lhs - rhs


def clear_caches():
    for f in (_exp_minus, _creation, _tw_creation, _stage, _mode_basis):
        f.cache_clear()
