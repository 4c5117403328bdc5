"""Zhu's products a*b, a∘b on M(1)+ and a bounded membership test for O(V)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .fock import BasisKey, ModuleSpec, Vector, weight
from .modes import _partitions, binom, vertex_mode

CERTIFIED = "certified_in_O"
NOT_FOUND = "not_found"


def _int_weight(a: Vector) -> int:
    ws = {weight(k, a.spec) for k in a.terms}
    if len(ws) != 1:
        raise ValueError("Zhu products need a homogeneous left factor")
    w = ws.pop()
    if not w.is_const() or w.const_value().denominator != 1:
        raise ValueError(f"left factor has non-integral weight {w}")
    return int(w.const_value())


def zhu_circ(a: Vector, b: Vector) -> Vector:
    """a∘b = sum_i binom(wt a, i) a_{i-2} b."""
    n = _int_weight(a)
    out = Vector.zero(b.spec)
    for i in range(n + 1):
        out = out + vertex_mode(a, i - 2, b).scale(binom(n, i))
    return out


def zhu_star(a: Vector, b: Vector) -> Vector:
    """a*b = sum_i binom(wt a, i) a_{i-1} b."""
    n = _int_weight(a)
    out = Vector.zero(b.spec)
    for i in range(n + 1):
        out = out + vertex_mode(a, i - 1, b).scale(binom(n, i))
    return out


def even_basis(max_weight: int) -> list:
    """h-basis of M(1)+ up to ``max_weight``: partitions with an even number of parts."""
    out = []
    for n in range(max_weight + 1):
        for parts in _partitions(n):
            if len(parts) % 2 == 0:
                out.append(BasisKey(Fraction(0), tuple(parts)))
    return out


@dataclass
class Membership:
    status: str
    cutoff: int
    generators: int  # number of a∘b products spanned
    rank: int
    coefficients: dict | None = None  # (a key, b key) -> coefficient when certified

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


def _to_frac(v: Vector) -> dict:
    out = {}
    for k, c in v.terms.items():
        if not c.is_const():
            raise ValueError("membership is computed in M(1)+, which is free of p")
        out[k] = c.const_value()
    return out


@lru_cache(maxsize=8)
def _echelon(cutoff: int):
    """Reduced rows spanning {a∘b : wt a + wt b <= cutoff} with their combinations."""
    spec = ModuleSpec()
    basis = even_basis(cutoff)
    rows = {}  # pivot -> (row, combination)
    count = 0
    for ka in basis:
        wa = sum(ka.parts)
        if wa == 0:
            continue  # vac∘b = vac_{-2} b = 0
        a = Vector({ka: 1}, spec)
        for kb in basis:
            if wa + sum(kb.parts) > cutoff:
                continue
            vec = _to_frac(zhu_circ(a, Vector({kb: 1}, spec)))
            comb = {(ka, kb): Fraction(1)}
            count += 1
            _reduce_into(rows, vec, comb)
    return rows, count


def _axpy(x: dict, y: dict, c):
    for k, v in y.items():
        new = x.get(k, 0) - c * v
        if new:
            x[k] = new
        else:
            x.pop(k, None)


def _reduce(rows, vec, comb):
    """Eliminate pivots from the top down; each step only introduces lower keys."""
    vec, comb = dict(vec), dict(comb)
    while True:
        hits = [k for k in vec if k in rows]
        if not hits:
            return vec, comb
        k = max(hits, key=_order)
        row, rc = rows[k]
        c = vec[k]
        _axpy(vec, row, c)
        _axpy(comb, rc, c)


def _reduce_into(rows, vec, comb):
    vec, comb = _reduce(rows, vec, comb)
    if not vec:
        return
    piv = max(vec, key=_order)
    c = vec[piv]
    rows[piv] = ({k: x / c for k, x in vec.items()}, {k: x / c for k, x in comb.items()})


def _order(k: BasisKey):
    return (sum(k.parts), k.parts)


def o_membership(v: Vector, cutoff: int) -> Membership:
    """Is v in span{a∘b : a, b in the h-basis of M(1)+, wt a + wt b <= cutoff}?"""
    if any(k.q != 0 for k in v.terms):
        raise ValueError("o_membership works inside M(1)+")
    top = max((sum(k.parts) for k in v.terms), default=0)
    if top > cutoff:
        raise ValueError(f"cutoff {cutoff} is too small for an element of weight {top}")
    rows, count = _echelon(cutoff)
    res, comb = _reduce(rows, _to_frac(v), {})
    if res:
        return Membership(NOT_FOUND, cutoff, count, len(rows))
    return Membership(CERTIFIED, cutoff, count, len(rows), {k: -c for k, c in comb.items()})
