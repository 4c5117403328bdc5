from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latticeva.elements import E, H, HE0, J, J_from_omega_H, h1, omega, vacuum
from latticeva.exact import Scalar
from latticeva.fock import AdmissibilityError, ModuleSpec, make_state, theta
from latticeva.modes import (NEG_INF, binom, commutator_residual, epsilon, exp_mode, heis_mode, nonneg_products,
                             vertex_mode)
import oracles as O

F = Fraction
P4 = ModuleSpec(4, F(1, 4))


def test_binom_generalized():
    assert binom(5, 2) == 10
    assert binom(-1, 3) == -1
    assert binom(F(1, 2), 2) == F(-1, 8)
    assert binom(3, 5) == 0


def test_heisenberg_relations():
    v = make_state((2, 1), 1, ModuleSpec(4))
    for m in range(-3, 4):
        for n in range(-3, 4):
            lhs = heis_mode(m, heis_mode(n, v)) - heis_mode(n, heis_mode(m, v))
            assert lhs == v.scale(m if m + n == 0 else 0)
    assert heis_mode(0, v) == v.scale(2)


def _as_dict(vec):
    return {(k.parts, k.q): c.const_value() for k, c in vec.terms.items()}


@pytest.mark.parametrize("name,elem,ref", [("w", omega, O.OMEGA), ("H", H, O.HAR), ("J", J, O.JAY)])
def test_against_iterate_oracle(name, elem, ref):
    # p = 4 so the zero mode acts by the rational 2q
    for parts, q in [((), F(1, 4)), ((2, 1), F(-3, 4)), ((3, 1, 1), F(5, 4))]:
        v = make_state(parts, q, P4)
        for n in range(-3, 7):
            assert _as_dict(vertex_mode(elem(P4), n, v)) == O.element_mode(ref, n, {(parts, q): F(1)}, F(2))


def test_appendix_samples():
    spec = ModuleSpec()
    w, hh, vac = omega(spec), H(spec), vacuum(spec)
    assert vertex_mode(w, 1, w) == w.scale(2)
    assert vertex_mode(w, 3, w) == vac.scale(F(1, 2))
    assert vertex_mode(hh, 7, hh) == vac.scale(F(5, 3))
    assert vertex_mode(hh, 2, E(spec)) == vertex_mode(w, 0, E(spec)).scale(F(1, 3))
    assert vertex_mode(J(spec), 3, E(spec)) == E(spec).scale(Scalar.parse("p^2 - p/2"))
    assert vertex_mode(w, 1, E(spec)) == E(spec).scale(Scalar.parse("p/2"))


def test_J_two_forms():
    assert J() == J_from_omega_H()


def test_lattice_operators():
    spec = ModuleSpec(2)
    e1 = make_state((), 1, spec)
    assert exp_mode(1, -3, e1) == make_state((), 2, spec)
    assert epsilon(E(ModuleSpec(2, F(1, 2))), make_state((), F(1, 2), ModuleSpec(2, F(1, 2)))) == 0
    assert epsilon(omega(), vacuum()) == -1
    assert epsilon(H(), vacuum()) == -1
    assert epsilon(E(), vacuum()) == -1
    assert epsilon(omega(), make_state((), 0, ModuleSpec())) == -1


def test_symbolic_restriction():
    with pytest.raises(AdmissibilityError):
        vertex_mode(E(), 0, E())


def test_nonneg_products():
    prods = nonneg_products(omega(), omega())
    assert set(prods) == {0, 1, 3}


GENS = {"w": omega, "H": H, "J": J, "E": E}


def _vectors(spec):
    return [make_state((), 0, spec), make_state((1,), 1, spec), make_state((2, 1), -1, spec), E(spec), h1(spec)]


@settings(max_examples=40)
@given(st.sampled_from(sorted(GENS)), st.sampled_from(sorted(GENS)), st.integers(-3, 5), st.integers(-3, 5),
       st.integers(0, 4), st.sampled_from([2, 4]))
def test_borcherds_commutator(a, b, i, j, vi, p):
    spec = ModuleSpec(p)
    v = _vectors(spec)[vi]
    assert commutator_residual(GENS[a](spec), GENS[b](spec), i, j, v) == 0


@given(st.sampled_from(["w", "H", "J"]), st.sampled_from(["w", "H", "J"]), st.integers(-3, 5), st.integers(-3, 5))
def test_borcherds_symbolic(a, b, i, j):
    spec = ModuleSpec()
    for v in (vacuum(spec), make_state((2, 1), 1, spec)):
        assert commutator_residual(GENS[a](spec), GENS[b](spec), i, j, v) == 0


@given(st.sampled_from(sorted(GENS)), st.integers(-3, 5), st.integers(0, 4))
def test_theta_equivariance(a, n, vi):
    spec = ModuleSpec(4)
    x = GENS[a](spec)
    v = _vectors(spec)[vi]
    assert theta(vertex_mode(x, n, v)) == vertex_mode(theta(x), n, theta(v))


@given(st.sampled_from(sorted(GENS)), st.sampled_from(sorted(GENS)), st.integers(-3, 4))
def test_skew_symmetry(a, b, n):
    # a_n b = sum_j (-1)^{n+j+1} (w_0^j / j!) b_{n+j} a
    spec = ModuleSpec(2)
    x, y, w = GENS[a](spec), GENS[b](spec), omega(spec)
    rhs = vertex_mode(y, n, x).scale(0)
    j, fact = 0, 1
    while True:
        t = vertex_mode(y, n + j, x)
        if not t and n + j > 8:
            break
        for _ in range(j):
            t = vertex_mode(w, 0, t)
        rhs = rhs + t.scale(F((-1) ** ((n + j + 1) % 2), fact))
        j += 1
        fact *= j
    assert vertex_mode(x, n, y) == rhs


@given(st.sampled_from(sorted(GENS) + ["HE0"]))
def test_translation(a):
    spec = ModuleSpec(2)
    x = HE0(spec) if a == "HE0" else GENS[a](spec)
    assert vertex_mode(omega(spec), 0, x) == vertex_mode(x, -2, vacuum(spec))


def test_epsilon_of_zero():
    assert epsilon(omega(), vacuum().scale(0)) == NEG_INF
