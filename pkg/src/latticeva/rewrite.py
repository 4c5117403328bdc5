"""Operator words, commutator tables and threshold reordering.

A letter is ``(core, n)`` meaning the n-th mode of the element ``core``.  A
core is a generator name (``w H J h E HE0 HE1``), a composite
``("c", a, k, inner)`` standing for the element ``a_k inner`` with k < 0, or
(only inside tables) a derivative ``("d", d, inner)`` standing for
``w_0^d inner``.  Composite letters are expanded with

    (a_k Y)_n = sum_{i <= m} binom(-i-1, -k-1) a_i Y_{n+k-i}
              + sum_{i >= m+1} binom(-i-1, -k-1) Y_{n+k-i} a_i
              + (-1)^k sum_{l >= 0} binom(l-k-1, -k-1) binom(m-k, l-k) (a_l Y)_{n+k-l}

which needs m >= -1.  The infinite sums are cut either by the vector the
word acts on (letters whose mode exceeds the top nonzero mode vanish) or by an
explicit index window for formal comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count

from .elements import builtin
from .exact import ONE, Scalar, as_scalar
from .fock import AdmissibilityError, ModuleSpec, Vector
from .modes import NEG_INF, binom, epsilon, heis_mode, nonneg_products, vertex_mode
from .twisted import twisted_mode

E_TYPE = ("E", "HE0", "HE1")
GENERATOR_WEIGHT = {"w": 2, "H": 4, "J": 4, "h": 1}


class RewriteError(RuntimeError):
    """A commutator table entry is missing or rewriting did not terminate."""


# ---------------------------------------------------------------------------
# cores and letters

def composite(a: str, k: int, inner) -> tuple:
    if k >= 0:
        raise ValueError("composite letters need a negative inner mode")
    return ("c", a, k, inner)


def deriv(d: int, inner) -> tuple:
    return inner if d == 0 else ("d", d, inner)


def core_text(core) -> str:
    if isinstance(core, str):
        return core
    if core[0] == "c":
        return f"({core[1]}[{core[2]}] {core_text(core[3])})"
    return f"(w[0]^{core[1]} {core_text(core[2])})"


def core_base(core) -> str:
    while not isinstance(core, str):
        core = core[3] if core[0] == "c" else core[2]
    return core


def is_e_type(core) -> bool:
    return core_base(core) in E_TYPE


def _spec(p) -> ModuleSpec:
    return ModuleSpec(p)


@lru_cache(maxsize=None)
def core_element(core, p) -> Vector:
    spec = _spec(p)
    if isinstance(core, str):
        return builtin(core, spec)
    if core[0] == "c":
        return vertex_mode(builtin(core[1], spec), core[2], core_element(core[3], p))
    w = builtin("w", spec)
    out = core_element(core[2], p)
    for _ in range(core[1]):
        out = vertex_mode(w, 0, out)
    return out


def letter_action(core, n: int, v: Vector) -> Vector:
    if core == "h":
        return heis_mode(n, v)
    if core == "vac":
        return v if n == -1 else Vector.zero(v.spec)
    a = core_element(core, v.spec.p)
    if v.spec.twisted:
        return twisted_mode(a, n, v)
    return vertex_mode(a, n, v)


def apply_word(letters, v: Vector) -> Vector:
    for core, n in reversed(letters):
        if not v:
            return v
        v = letter_action(core, n, v)
    return v


def letter_text(letter) -> str:
    core, n = letter
    return f"{core_text(core)}[{n}]"


# ---------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class OperatorWord:
    coefficient: Scalar
    letters: tuple

    def render(self) -> str:
        body = " ".join(letter_text(x) for x in self.letters) or "1"
        return f"({self.coefficient}) {body}"


class OperatorPolynomial:
    """Canonicalized sum of words: letters tuple -> Scalar."""

    def __init__(self, terms=None, p=None):
        self.p = None if p is None else Fraction(p)
        self.terms = {}
        for w, c in (terms or {}).items():
            self._acc(tuple(w), as_scalar(c))

    def _acc(self, w, c):
        spec = _spec(self.p)
        old = self.terms.get(w)
        new = spec.norm(c if old is None else old + c)
        if new:
            self.terms[w] = new
        elif old is not None:
            del self.terms[w]

    @classmethod
    def word(cls, letters, coefficient=ONE, p=None):
        return cls({tuple(letters): coefficient}, p)

    def words(self):
        return [OperatorWord(c, w) for w, c in sorted(self.terms.items(), key=lambda t: _word_order(t[0]))]

    def __eq__(self, other):
        return isinstance(other, OperatorPolynomial) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def render(self) -> str:
        return " + ".join(w.render() for w in self.words()) or "0"

    def __repr__(self):
        return f"OperatorPolynomial({self.render()})"


def _word_order(w):
    return (len(w), [(core_text(c), n) for c, n in w])


def apply(poly: OperatorPolynomial, v: Vector) -> Vector:
    """Sum of coefficient * (letters acting right to left) on v."""
    out = Vector.zero(v.spec)
    for w, c in poly.terms.items():
        out = out + apply_word(w, v).scale(c)
    return out


# ---------------------------------------------------------------------------
# candidate spanning families and commutator tables

def _level(v: Vector) -> int:
    lv = {sum(k.parts) for k in v.terms}
    if len(lv) != 1:
        raise RewriteError("product is not homogeneous")
    return lv.pop()


def _bases(v: Vector, p):
    keys = list(v.terms)
    if any(k.q for k in keys):
        out = [("E", 0)]
        if p == 2:
            out.append(("HE0", 3))
        if p == Fraction(1, 2):
            out.append(("HE1", 2))
        return out
    odd = len(keys[0].parts) % 2
    return [("h", 1)] if odd else [("vac", 0)]


def _monomials(level: int, maxgen=None):
    """Sequences of (gen, -i) letters (outermost first) of total level ``level``."""
    if level == 0:
        yield ()
        return
    for g, base in (("w", 1), ("H", 3)):
        for i in range(1, level - base + 1):
            step = base + i
            if step > level:
                break
            key = (g, i)
            if maxgen is not None and key > maxgen:
                continue
            for rest in _monomials(level - step, key):
                yield ((g, -i),) + rest


def _candidates(level: int, bases):
    out = []
    for base, blev in bases:
        for d in range(level - blev + 1):
            for mono in _monomials(level - blev - d):
                core = base
                for g, k in reversed(mono):
                    core = composite(g, k, core)
                if core == "vac" and d:
                    continue
                out.append((len(mono) + d, d, core_text(core), deriv(d, core)))
    out.sort(key=lambda t: t[:3])
    return [t[3] for t in out]


def decompose(target: Vector, p):
    """Express ``target`` over candidate cores: list of (Scalar, core)."""
    if not target:
        return []
    spec = _spec(p)
    level = _level(target)
    rows = []  # (pivot, row vector dict, combination dict)
    residual = dict(target.terms)
    if core_element("vac", p) == target and level == 0:
        return [(ONE, "vac")]
    for idx, cand in enumerate(_candidates(level, _bases(target, p))):
        vec = dict(core_element(cand, p).terms)
        comb = {idx: ONE}
        for piv, row, rc in rows:
            c = vec.get(piv)
            if c:
                vec = _axpy(vec, row, -c, spec)
                comb = _axpy(comb, rc, -c, spec)
        if not vec:
            continue
        piv = min(vec, key=lambda k: (k.q, k.parts))
        c = vec[piv]
        vec = {k: spec.norm(x / c) for k, x in vec.items()}
        comb = {k: spec.norm(x / c) for k, x in comb.items()}
        # keep earlier rows reduced at the new pivot
        new_rows = []
        for opiv, orow, orc in rows:
            oc = orow.get(piv)
            if oc:
                orow = _axpy(orow, vec, -oc, spec)
                orc = _axpy(orc, comb, -oc, spec)
            new_rows.append((opiv, orow, orc))
        rows = new_rows + [(piv, vec, comb)]
        rows_by_idx = rows
        res = dict(residual)
        coeffs = {}
        for rpiv, row, rc in rows_by_idx:
            c = res.get(rpiv)
            if c:
                res = _axpy(res, row, -c, spec)
                coeffs = _axpy(coeffs, rc, c, spec)
        if not res:
            cands = _candidates(level, _bases(target, p))
            return [(coeffs[i], cands[i]) for i in sorted(coeffs)]
    raise RewriteError(f"could not decompose an element of level {level} over the candidate family")


def _axpy(x: dict, y: dict, c, spec) -> dict:
    out = dict(x)
    for k, v in y.items():
        new = spec.norm(out.get(k, 0) + v * c) if k in out else spec.norm(v * c)
        if new:
            out[k] = new
        else:
            out.pop(k, None)
    return out


@dataclass
class CommTable:
    a: str
    b: object
    p: Fraction | None
    entries: dict  # l -> list of (Scalar, core)
    values: dict  # l -> Vector

    def render(self) -> str:
        lines = []
        for l in sorted(self.entries):
            rhs = " + ".join(f"({c}) {core_text(core)}" for c, core in self.entries[l])
            lines.append(f"{self.a}[{l}] {core_text(self.b)} = {rhs}")
        return "\n".join(lines)


@lru_cache(maxsize=None)
def build_comm_table(a: str, b, p=None) -> CommTable:
    """a_l b for all l >= 0, each decomposed over simpler cores and checked."""
    if a not in GENERATOR_WEIGHT:
        raise RewriteError(f"no commutator table with left generator {a!r}")
    p = None if p is None else Fraction(p)
    spec = _spec(p)
    A = builtin(a, spec)
    B = core_element(b, p)
    values = nonneg_products(A, B)
    entries = {}
    for l, val in values.items():
        dec = decompose(val, p)
        check = Vector.zero(spec)
        for c, core in dec:
            check = check + core_element(core, p).scale(c)
        if check != val:
            raise RewriteError(f"table entry {a}[{l}] {core_text(b)} failed verification")
        entries[l] = dec
    return CommTable(a, b, p, entries, values)


def _core_letters(c: Scalar, core, n: int):
    """Words for c * (core)_n with derivative and vacuum cores resolved."""
    if core == "vac":
        return [((), c)] if n == -1 else []
    if not isinstance(core, str) and core[0] == "d":
        d, inner = core[1], core[2]
        w = Fraction((-1) ** d) * _factorial(d) * binom(n, d)
        if not w:
            return []
        return _core_letters(c * w, inner, n - d)
    return [(((core, n),), c)]


def _factorial(d):
    out = 1
    for j in range(2, d + 1):
        out *= j
    return out


# ---------------------------------------------------------------------------
# reordering

def _threshold(thresholds, gen):
    if isinstance(thresholds, int):
        return thresholds
    if gen in thresholds:
        return thresholds[gen]
    if "default" in thresholds:
        return thresholds["default"]
    raise RewriteError(f"no threshold given for generator {gen!r}")


def _klass(letter, thresholds) -> int:
    core, n = letter
    if is_e_type(core):
        return 1
    return 0 if n <= _threshold(thresholds, core) else 2


def _is_composite(letter) -> bool:
    return not isinstance(letter[0], str)


def is_normal(word, thresholds) -> bool:
    last = 0
    for x in word:
        if _is_composite(x):
            return False
        k = _klass(x, thresholds)
        if k < last:
            return False
        last = k
    return True


class _Bounds:
    """Top nonzero modes for cutting the infinite sums."""

    def __init__(self, v: Vector | None, window):
        self.v = v
        self.window = window
        self._eps = {}

    def top(self, core, suffix):
        """Largest useful mode of ``core`` acting on suffix(v); None for the window."""
        if self.v is None:
            return None
        key = (core, suffix)
        if key not in self._eps:
            u = apply_word(suffix, self.v)
            if not u:
                self._eps[key] = NEG_INF
            elif core == "h":
                self._eps[key] = _h_top(u)
            else:
                self._eps[key] = epsilon(core_element(core, self.v.spec.p), u, mode_fn=_mode_fn(u))
        return self._eps[key]


def _mode_fn(u):
    if u.spec.twisted:
        return lambda a, n, v: twisted_mode(a, n, v)
    return None


def _h_top(u: Vector):
    """Largest n with h(n)u != 0; creation modes never vanish, so at least -1."""
    top = -1
    for k in u.terms:
        if k.q:
            top = max(top, 0)
        if k.parts:
            top = max(top, max(k.parts))
    return top


def _expand_composite(word, pos, thresholds, bounds: _Bounds, p):
    (core, n) = word[pos]
    _, a, k, inner = core
    prefix, suffix = word[:pos], word[pos + 1:]
    m = _threshold(thresholds, a)
    if m < -1:
        raise RewriteError("the composite expansion needs a threshold m >= -1")
    out = []
    sign = -1 if k % 2 else 1
    if bounds.v is not None:
        eps_inner = bounds.top(inner, suffix)
        eps_a = bounds.top(a, suffix)
        lo = n + k - eps_inner if eps_inner != NEG_INF else None
        hi = eps_a if eps_a != NEG_INF else None
    else:
        lo, hi = bounds.window
        hi = max(hi, m)
    if lo is not None:
        for i in range(int(lo), m + 1):
            w = binom(-i - 1, -k - 1)
            if w:
                for letters, c in _core_letters(Scalar.const(w), inner, n + k - i):
                    out.append((prefix + ((a, i),) + letters + suffix, c))
    if hi is not None:
        for i in range(m + 1, int(hi) + 1):
            w = binom(-i - 1, -k - 1)
            if w:
                for letters, c in _core_letters(Scalar.const(w), inner, n + k - i):
                    out.append((prefix + letters + ((a, i),) + suffix, c))
    table = build_comm_table(a, inner, p)
    for l, dec in table.entries.items():
        w = sign * binom(l - k - 1, -k - 1) * binom(m - k, l - k)
        if not w:
            continue
        for c0, tcore in dec:
            for letters, c in _core_letters(c0 * w, tcore, n + k - l):
                out.append((prefix + letters + suffix, c))
    return out


def _swap(word, pos, p):
    """Swap word[pos], word[pos+1] using [x_i, y_j] = sum_l binom(i, l)(x_l y)_{i+j-l}."""
    (x, i), (y, j) = word[pos], word[pos + 1]
    prefix, suffix = word[:pos], word[pos + 2:]
    out = [(prefix + ((y, j), (x, i)) + suffix, ONE)]
    if is_e_type(x):
        # E_j z_i = z_i E_j - [z_i, E_j]
        gen, other, gi, oj, sign = y, x, j, i, -1
    else:
        gen, other, gi, oj, sign = x, y, i, j, 1
    if gen == "vac":
        return out
    if "h" in (core_base(x), core_base(y)) and (is_e_type(x) or is_e_type(y)):
        raise RewriteError("h letters cannot pass E-type letters: h_0 E leaves the theta-even span")
    table = build_comm_table(gen, other, p)
    for l, dec in table.entries.items():
        w = binom(gi, l)
        if not w:
            continue
        for c0, tcore in dec:
            for letters, c in _core_letters(c0 * (w * sign), tcore, gi + oj - l):
                out.append((prefix + letters + suffix, c))
    return out


def reorder(word, thresholds, v: Vector | None = None, window=(-12, 12), max_steps: int = 200000,
            p="auto") -> OperatorPolynomial:
    """Threshold normal form of ``word`` (an OperatorWord, letters tuple, or polynomial).

    With ``v`` given, the composite sums are cut exactly for the action on v;
    otherwise the summation index is restricted to ``window`` (a formal
    truncation used for term-by-term comparisons).
    """
    if p == "auto":
        p = v.spec.p if v is not None else None
    if isinstance(word, OperatorPolynomial):
        pending = dict(word.terms)
    elif isinstance(word, OperatorWord):
        pending = {tuple(word.letters): word.coefficient}
    else:
        pending = {tuple(word): ONE}
    spec = _spec(p)
    bounds = _Bounds(v, window)
    done = OperatorPolynomial(p=p)
    steps = count()
    while pending:
        w, c = pending.popitem()
        if not c:
            continue
        if next(steps) > max_steps:
            raise RewriteError("rewriting did not terminate within the step budget")
        comp = [idx for idx, x in enumerate(w) if _is_composite(x)]
        if comp:
            new = _expand_composite(w, comp[-1], thresholds, bounds, p)
        else:
            pos = _first_inversion(w, thresholds)
            if pos is None:
                done._acc(w, c)
                continue
            new = _swap(w, pos, p)
        for nw, nc in new:
            val = spec.norm(pending.get(nw, 0) + nc * c) if nw in pending else spec.norm(nc * c)
            if val:
                pending[nw] = val
            else:
                pending.pop(nw, None)
    return done


def _first_inversion(word, thresholds):
    for idx in range(len(word) - 1):
        if _klass(word[idx], thresholds) > _klass(word[idx + 1], thresholds):
            return idx
    return None
