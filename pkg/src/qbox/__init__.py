"""Numerics for quantum mechanics on a q-deformed phase space.

Submodules: ``qcore`` (q-numbers, binomials), ``qfunctions`` (q-exponentials,
q-trigonometric functions, the q-gamma constant), ``qoperators`` (difference
operators, Jackson integrals), ``spectrum`` (box levels and eigenfunctions),
``propagator`` (finite-time kernel), ``classical`` (effective classical
dynamics) and ``verify`` (acceptance suite).
"""

from .errors import (
    ConvergenceError,
    DomainError,
    GammaQuadratureError,
    QBoxError,
    QOverflowError,
    SeriesTruncationError,
)
from .qcore import Deformation, PhysicalConfig, q_factorial, q_number, q_number_base2
from .qfunctions import eq_exp, eq_exp_bar, gamma_q, q_trig
from .spectrum import box_spectrum, eigenfunction, pi_q
from .propagator import KernelRequest, kernel
from .classical import hamiltonian, integrate_trajectory

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "Deformation",
    "DomainError",
    "GammaQuadratureError",
    "KernelRequest",
    "PhysicalConfig",
    "QBoxError",
    "QOverflowError",
    "SeriesTruncationError",
    "box_spectrum",
    "eigenfunction",
    "eq_exp",
    "eq_exp_bar",
    "gamma_q",
    "hamiltonian",
    "integrate_trajectory",
    "kernel",
    "pi_q",
    "q_factorial",
    "q_number",
    "q_number_base2",
    "q_trig",
]
