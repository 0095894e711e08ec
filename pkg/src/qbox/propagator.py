"""Finite-time propagation kernel of the free deformed Hamiltonian.

    K(x, x'; T) = (1/Gamma_q[1]) sqrt(m_q/(2 pi hbar T)) e^(-i pi/4)
                  * sum_n (2n)!/(n! [2n]!) (i m_q/(2 hbar T))^n (x -. x')^(2n)

``(x -. x')^(2n) = prod_k (x - q^(2n-1-2k) x')`` vanishes for every n >= 1
at ``x' = q x`` and ``x' = x/q``, so along those dilation pairs only the
``n = 0`` term survives. The square root is taken on the principal branch,
``1/sqrt(i) = e^(-i pi/4)`` for T > 0.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, SeriesTruncationError
from .qcore import PhysicalConfig
from .qfunctions import eq_exp, gamma_q_continuation

DEFAULT_MAX_TERMS = 512


@dataclass(frozen=True)
class KernelRequest:
    x: float
    x_prime: float
    T: float
    cfg: PhysicalConfig
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise DomainError(f"time interval T must be positive, got {self.T!r}")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")


@dataclass(frozen=True)
class KernelValue:
    value: complex
    terms_used: int
    tail_bound: float
    max_term: float = 1.0


def prefactor(T, cfg, time_reversed=False):
    """``(1/Gamma_q[1]) sqrt(m_q/(2 pi hbar T)) e^(-i pi/4)``; conjugated for reversed time."""
    phase = cmath.exp(1j * math.pi / 4.0) if time_reversed else cmath.exp(-1j * math.pi / 4.0)
    return math.sqrt(cfg.m_q / (2.0 * math.pi * cfg.hbar * T)) * phase / gamma_q_continuation(cfg.d)


def _series(x, xp, T, cfg, max_terms, time_reversed):
    beta = cfg.m_q / (2.0 * cfg.hbar * T)
    if time_reversed:
        beta = -beta
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    x, xp = np.broadcast_arrays(x, xp)
    vr, vi, nterms, tail, mx = kernels.kernel_series(
        x.ravel(), xp.ravel(), cfg.d.q, beta, cfg.d.tol, int(max_terms)
    )
    return (vr + 1j * vi).reshape(x.shape), nterms.reshape(x.shape), tail.reshape(x.shape), mx.reshape(x.shape)


def _evaluate(req, time_reversed):
    s, n, tail, mx = _series(req.x, req.x_prime, req.T, req.cfg, req.max_terms, time_reversed)
    pref = prefactor(req.T, req.cfg, time_reversed)
    if n[0] < 0:
        raise SeriesTruncationError(
            f"kernel series did not converge within {req.max_terms} terms at x={req.x!r}, "
            f"x'={req.x_prime!r}, T={req.T!r}",
            partial=complex(pref * s[0]),
            terms_used=req.max_terms,
        )
    return KernelValue(complex(pref * s[0]), int(n[0]), float(abs(pref) * tail[0]), float(mx[0]))


def kernel(req):
    """Propagation kernel ``<x| exp(-i T H/hbar) |x'>`` for the free deformed Hamiltonian.

    The series is summed with compensation until three consecutive terms
    past the largest one drop below ``tol`` times the running sum;
    :class:`SeriesTruncationError` (carrying the partial sum) is raised when
    ``max_terms`` is reached first, which happens for large
    ``m_q (x - x')^2 / (hbar T)``.
    """
    return _evaluate(req, False)


def kernel_time_reversed(req):
    """The kernel continued to ``-T``: both the series variable and the
    prefactor phase are conjugated."""
    return _evaluate(req, True)


def kernel_grid(x, x_prime, T, cfg, max_terms=DEFAULT_MAX_TERMS):
    """Vectorized kernel values over broadcast ``x`` and ``x_prime`` arrays.

    Points where the series did not converge are returned as NaN.
    """
    KernelRequest(0.0, 0.0, T, cfg, max_terms)
    s, n, _, _ = _series(x, x_prime, T, cfg, max_terms, False)
    out = prefactor(T, cfg) * s
    out[n < 0] = complex(math.nan, math.nan)
    return out


def dilation_pair_value(T, cfg):
    """Closed form of the kernel at ``x' = q^(+-1) x``."""
    return prefactor(T, cfg)


def plane_wave(x, k, d):
    """``N_q e_q(ikx)`` with ``N_q = 1/sqrt(2 pi Gamma_q[1])``.

    The deformed momentum maps it to ``hbar k (q + 1)/(2q)`` times itself.
    """
    norm = 1.0 / math.sqrt(2.0 * math.pi * gamma_q_continuation(d))
    return norm * complex(eq_exp(1j * float(k) * float(x), d).value)


@dataclass(frozen=True)
class ShortTimeCheck:
    lhs: complex
    rhs: complex
    gap: float


def short_time_kernel_check(x, x_prime, T, cfg):
    """Compare the kernel with its truncation after the ``n = 1`` term.

    ``gap = |K - K_1| / |K_1|``. The first dropped term is proportional to
    ``(m_q (x -. x')^2 / (hbar T))^2``, so in the regime where that product is
    small the gap grows fourfold when ``T`` is halved.
    """
    lhs = kernel(KernelRequest(x, x_prime, T, cfg)).value
    q = cfg.d.q
    beta = cfg.m_q / (2.0 * cfg.hbar * T)
    pair = (x - q * x_prime) * (x - x_prime / q)
    first = 2.0 / cfg.d.q_plus * 1j * beta * pair
    rhs = prefactor(T, cfg) * (1.0 + first)
    gap = abs(lhs - rhs) / abs(rhs)
    return ShortTimeCheck(complex(lhs), complex(rhs), float(gap))
