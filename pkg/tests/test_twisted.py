from fractions import Fraction

import pytest

from latticeva.elements import H, h1, omega, vacuum
from latticeva.fock import AdmissibilityError, ModuleSpec, make_state, make_twisted_state
from latticeva.modes import binom, heis_mode
from latticeva.twisted import cmn, cmn_table, delta_exp, eigencheck, twisted_eigen_pairs, twisted_mode, twisted_top
import oracles as O

F = Fraction


def test_cmn_values():
    assert cmn(0, 0) == 0
    assert cmn(1, 0) == F(-1, 4)
    assert cmn(1, 1) == F(1, 16)
    assert cmn(2, 1) == F(-1, 32)


def test_cmn_against_series():
    ref = O.cmn_series(6)
    table = cmn_table(6)
    keys = set(ref) | set(table)
    assert all(ref.get(k, 0) == table.get(k, 0) for k in keys)
    assert all(cmn(m, n) == cmn(n, m) for m in range(5) for n in range(5))


def test_delta_on_omega():
    d = delta_exp(omega())
    assert set(d) == {0, -2}
    assert d[-2] == vacuum().scale(F(1, 16))


def test_eigen_pairs():
    pairs = {label: (w1, h3) for label, w1, h3 in twisted_eigen_pairs()}
    assert pairs["vac_tw"] == (F(1, 16), F(-1, 128))
    assert pairs["h(-1/2)vac_tw"] == (F(9, 16), F(15, 128))


def test_virasoro_on_twisted_module():
    # [w_i, w_j] = (i - j) w_{i+j-1} + delta_{i+j,2} i(i-1)(i-2)/12 with c = 1
    w = omega()
    for v in (twisted_top(), make_twisted_state([F(1, 2)]), make_twisted_state([F(3, 2), F(1, 2)])):
        for i in range(-2, 4):
            for j in range(-2, 4):
                lhs = twisted_mode(w, i, twisted_mode(w, j, v)) - twisted_mode(w, j, twisted_mode(w, i, v))
                rhs = twisted_mode(w, i + j - 1, v).scale(i - j)
                if i + j == 2:
                    rhs = rhs + v.scale(F(i * (i - 1) * (i - 2), 12))
                assert lhs == rhs


def test_h_against_omega_on_twisted():
    # [h(n), w_j] = n h(n + j - 1) on half-odd modes
    w = omega()
    v = make_twisted_state([F(3, 2), F(1, 2)])
    for n in (F(-3, 2), F(-1, 2), F(1, 2), F(3, 2)):
        for j in range(-1, 3):
            lhs = heis_mode(n, twisted_mode(w, j, v)) - twisted_mode(w, j, heis_mode(n, v))
            assert lhs == heis_mode(n + j - 1, v).scale(n)


def test_grading():
    # w_1 = L(0) acts by degree + 1/16
    v = make_twisted_state([F(5, 2), F(1, 2)])
    assert eigencheck(omega(), 1, v) == F(3) + F(1, 16)


def test_rejections():
    with pytest.raises(AdmissibilityError):
        twisted_mode(h1(), 0, twisted_top())
    with pytest.raises(AdmissibilityError):
        twisted_mode(omega(), 0, vacuum())
    with pytest.raises(AdmissibilityError):
        delta_exp(make_state((), 1, ModuleSpec(2)))
