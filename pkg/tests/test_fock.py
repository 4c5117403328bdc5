from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from latticeva.exact import Scalar
from latticeva.fock import (AdmissibilityError, BasisKey, ModuleSpec, Vector, make_state, make_twisted_state,
                            project_theta, theta, weight)

parts = st.lists(st.integers(1, 4), max_size=4)


@st.composite
def vectors(draw):
    spec = ModuleSpec(4)
    out = Vector.zero(spec)
    for _ in range(draw(st.integers(1, 4))):
        q = Fraction(draw(st.integers(-2, 2)))
        c = draw(st.fractions(min_value=-5, max_value=5, max_denominator=6))
        out = out + make_state(draw(parts), q, spec).scale(c)
    return out


@given(vectors())
def test_theta_involution(v):
    assert theta(theta(v)) == v


@given(vectors())
def test_projections(v):
    plus, minus = project_theta(v, 1), project_theta(v, -1)
    assert plus + minus == v
    assert theta(plus) == plus
    assert theta(minus) == -minus
    assert project_theta(plus, 1) == plus


def test_theta_on_basis():
    v = make_state((2, 1, 1), 1, ModuleSpec(2))
    assert theta(v) == make_state((2, 1, 1), -1, ModuleSpec(2)).scale(-1)


def test_weights():
    k = BasisKey(Fraction(1, 2), (2, 1))
    assert weight(k, ModuleSpec(2)) == Scalar.const(Fraction(13, 4))
    assert weight(BasisKey(Fraction(1), ()), ModuleSpec()) == Scalar.parse("p/2")
    tw = weight(BasisKey(None, (3, 1)))
    assert tw.degree == 2 and tw.total == Fraction(33, 16)


def test_json_round_trip():
    for k in (BasisKey(Fraction(-3, 4), (3, 1)), BasisKey(None, (5, 1, 1))):
        assert BasisKey.from_json(k.to_json()) == k


def test_admissibility():
    with pytest.raises(AdmissibilityError):
        make_state((), Fraction(1, 2), ModuleSpec())
    with pytest.raises(AdmissibilityError):
        ModuleSpec(2, Fraction(1, 3))
    with pytest.raises(AdmissibilityError):
        make_state((), 1, ModuleSpec(2, Fraction(1, 2)))
    with pytest.raises(AdmissibilityError):
        make_twisted_state([1])
    with pytest.raises(AdmissibilityError):
        ModuleSpec(0)
    assert make_twisted_state([Fraction(1, 2), Fraction(3, 2)])


def test_vector_arithmetic():
    spec = ModuleSpec()
    a = make_state((1,), 0, spec)
    b = make_state((2,), 0, spec)
    v = a.scale(Scalar.parse("p")) + b
    assert v - v == 0
    assert (v + a).coefficient(BasisKey(Fraction(0), (1,))) == Scalar.parse("p + 1")
    assert "h(-2)" in v.render()
