"""Exact vertex-operator computations for rank-one lattice vertex algebras."""

from .exact import ONE, P, S, ZERO, PoleError, Scalar, scalar_arith, scalar_substitute
from .fock import BasisKey, ModuleSpec, Vector, make_state, make_twisted_state, project_theta, theta, weight

__version__ = "0.1.0"
