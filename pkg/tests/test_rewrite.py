from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latticeva.elements import E, omega
from latticeva.exact import Scalar
from latticeva.fock import ModuleSpec, make_state
from latticeva.modes import vertex_mode
from latticeva.rewrite import (OperatorPolynomial, RewriteError, apply, apply_word, build_comm_table, composite,
                               core_base, core_element, decompose, is_normal, reorder)
from latticeva.verify import double_expansion_check, expansion_check

F = Fraction


def _vector_pool():
    sym = ModuleSpec()
    p2 = ModuleSpec(2, F(1, 2))
    p4 = ModuleSpec(4, F(1, 4))
    return [
        make_state((), 0, sym),
        make_state((2, 1), 0, sym),
        make_state((), F(1, 2), p2),
        make_state((1,), F(-1, 2), p2),
        make_state((), F(-3, 4), p4),
        make_state((), 1, ModuleSpec(4)),
    ]


POOL = _vector_pool()
SIMPLE = ["w", "H", "E", "h"]


@st.composite
def letters(draw):
    kind = draw(st.integers(0, 3))
    if kind == 0:
        inner = draw(st.sampled_from(["E", "w", "h"]))
        core = composite("w", draw(st.integers(-2, -1)), inner)
    else:
        core = draw(st.sampled_from(SIMPLE))
    return core, draw(st.integers(-3, 3))


@st.composite
def cases(draw):
    v = draw(st.sampled_from(POOL))
    word = tuple(draw(st.lists(letters(), min_size=1, max_size=3)))
    if v.spec.p is None and v.terms and next(iter(v.terms)).q == 0:
        # symbolic p: lattice letters must never meet a nonzero label
        word = tuple(x for x in word if not (x[0] == "E" or (isinstance(x[0], tuple) and x[0][3] == "E"))) or (("w", 1),)
    bases = {core_base(c) for c, _ in word}
    if "h" in bases and "E" in bases:
        # h_0 E is theta-odd and outside the rewriting family
        word = tuple(x for x in word if core_base(x[0]) != "h")
    if draw(st.booleans()):
        th = draw(st.integers(-1, 2))
    else:
        th = {g: draw(st.integers(-1, 3)) for g in ("w", "H", "h")}
    return word, th, v


@settings(max_examples=60)
@given(cases())
def test_reorder_soundness(case):
    word, th, v = case
    poly = reorder(word, th, v=v)
    assert apply(poly, v) == apply_word(word, v)
    assert all(is_normal(w, th) for w in poly.terms)


@settings(max_examples=30)
@given(cases())
def test_reorder_idempotent(case):
    word, th, v = case
    once = reorder(word, th, v=v)
    assert reorder(once, th, v=v) == once


def test_composite_example():
    spec = ModuleSpec(4, F(1, 4))
    v = make_state((), F(-3, 4), spec)
    word = ((composite("w", -1, "E"), 3),)
    for m in (-1, 0, 2):
        assert apply(reorder(word, {"w": m}, v=v), v) == vertex_mode(core_element(composite("w", -1, "E"), F(4)), 3, v)


def test_double_composite_on_lattice_state():
    spec = ModuleSpec(2, F(1, 2))
    v = make_state((), F(1, 2), spec)
    core = composite("w", -1, composite("w", -1, "E"))
    for n in (-1, 0, 2):
        for m in (-1, 0, 1):
            got = apply(reorder(((core, n),), {"w": m}, v=v), v)
            assert got == vertex_mode(core_element(core, F(2)), n, v)


@pytest.mark.parametrize("k", [-1, -2, -3])
@pytest.mark.parametrize("m", [-1, 0, 1, 3])
def test_single_expansion_term_for_term(k, m):
    for n in (-4, 0, 3):
        assert expansion_check(k, n, m) is None


def test_double_expansion_term_for_term():
    for n in (-2, 0, 4):
        assert double_expansion_check(n) is None


def test_tables_verify_themselves():
    t = build_comm_table("w", "E")
    assert set(t.entries) == {0, 1}
    t = build_comm_table("H", "E", F(2))
    assert 0 in t.entries and "HE0" in t.render()


def test_decompose_h_basis():
    w = omega()
    target = vertex_mode(w, -1, w)
    dec = decompose(target, None)
    total = target.scale(0)
    for c, core in dec:
        total = total + core_element(core, None).scale(c)
    assert total == target


def test_threshold_errors():
    with pytest.raises(RewriteError):
        reorder(((composite("w", -1, "E"), 0),), {"H": 0}, window=(-3, 3))
    with pytest.raises(RewriteError):
        reorder(((composite("w", -1, "E"), 0),), -2, window=(-3, 3))


def test_normal_words_untouched():
    word = (("w", -2), ("E", 0), ("w", 3))
    poly = reorder(word, 0)
    assert poly == OperatorPolynomial.word(word)


def test_h_and_E_do_not_mix():
    v = make_state((), F(1, 2), ModuleSpec(2, F(1, 2)))
    with pytest.raises(RewriteError):
        reorder((("h", 1), ("E", 0)), 0, v=v)


def test_h_composite_on_vacuum():
    v = make_state((), 0, ModuleSpec())
    word = (("H", 3), (composite("w", -1, "h"), -3))
    assert apply(reorder(word, 0, v=v), v) == apply_word(word, v)
