"""Named elements of V_L: omega, H, J, E and the composites H_0 E, H_1 E."""

from __future__ import annotations

from fractions import Fraction

from .fock import BasisKey, ModuleSpec, Vector
from .modes import vertex_mode

F = Fraction


def _vec(spec, items):
    return Vector({BasisKey(F(q), tuple(parts)): F(c) for parts, q, c in items}, spec.lattice())


def vacuum(spec=None) -> Vector:
    return _vec(spec or ModuleSpec(), [((), 0, 1)])


def omega(spec=None) -> Vector:
    return _vec(spec or ModuleSpec(), [((1, 1), 0, F(1, 2))])


def H(spec=None) -> Vector:
    return _vec(spec or ModuleSpec(), [((3, 1), 0, F(1, 3)), ((2, 2), 0, F(-1, 3))])


def J(spec=None) -> Vector:
    return _vec(spec or ModuleSpec(), [((1, 1, 1, 1), 0, 1), ((3, 1), 0, -2), ((2, 2), 0, F(3, 2))])


def J_from_omega_H(spec=None) -> Vector:
    """J = -9H + 4 w_{-1}^2 vac - 3 w_{-3} vac, assembled through modes."""
    spec = spec or ModuleSpec()
    w = omega(spec)
    one = vacuum(spec)
    ww = vertex_mode(w, -1, vertex_mode(w, -1, one))
    return H(spec).scale(-9) + ww.scale(4) - vertex_mode(w, -3, one).scale(3)


def E(spec=None) -> Vector:
    return _vec(spec or ModuleSpec(), [((), 1, 1), ((), -1, 1)])


def HE0(spec=None) -> Vector:
    spec = spec or ModuleSpec()
    return vertex_mode(H(spec), 0, E(spec))


def HE1(spec=None) -> Vector:
    spec = spec or ModuleSpec()
    return vertex_mode(H(spec), 1, E(spec))


def h1(spec=None) -> Vector:
    """h(-1)vac, the field h(x) itself."""
    return _vec(spec or ModuleSpec(), [((1,), 0, 1)])


BUILTINS = {
    "w": omega,
    "omega": omega,
    "H": H,
    "J": J,
    "E": E,
    "HE0": HE0,
    "HE1": HE1,
    "h": h1,
    "vac": vacuum,
}

# canonical weights as functions of p (None for symbolic)
WEIGHTS = {"w": 2, "H": 4, "J": 4, "h": 1}


def builtin(name: str, spec=None) -> Vector:
    try:
        fn = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown element {name!r}; choose from {', '.join(sorted(BUILTINS))}") from None
    return fn(spec or ModuleSpec())
