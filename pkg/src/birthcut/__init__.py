"""Numerics for the birth-of-a-cut random matrix transition.

Subpackages by role:

* ``potentials``   critical potential construction and validation
* ``specialfn``    elliptic functions, theta1, Stirling-type asymptotics
* ``equilibrium``  one- and two-cut equilibrium measures and derivatives
* ``critical``     near-critical expansions (endpoint drift, newborn scaling)
* ``modelchain``   the effective y^{2 nu}/(2 nu) matrix model chain
* ``asymptotics``  mean-field predictions for gamma_n, beta_n, psi_n, kernel
* ``oracle``       exact finite-N recurrence chain (ground truth)
* ``cli``          command-line front end emitting CSV / key=value blocks
"""

from .poly import Poly
from .potentials import (CriticalSpec, build_critical_Q, build_potential,
                         make_quartic_spec, make_spec, quartic_etilde,
                         validate_critical)

__all__ = [
    "Poly", "CriticalSpec", "build_critical_Q", "build_potential",
    "make_quartic_spec", "make_spec", "quartic_etilde", "validate_critical",
]

__version__ = "0.1.0"
