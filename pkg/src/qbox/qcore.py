"""q-number arithmetic, q-factorials and q-binomial expansions."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, QOverflowError


@dataclass(frozen=True)
class Deformation:
    """The deformation parameter ``q`` with its derived constants.

    Inputs with ``0 < q < 1`` are mapped to ``1/q``; the symmetric q-number
    is invariant under that inversion so nothing is lost. ``q = 1`` is the
    undeformed theory and is rejected: use ``q = 1 + eps`` for limits.
    """

    q: float
    tol: float = 1e-12
    requested_q: float = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q <= 0.0:
            raise DomainError(f"q must be a positive finite number, got {self.q!r}")
        if q == 1.0:
            raise DomainError("q = 1 is the undeformed limit; pass q = 1 + eps instead")
        if not (self.tol > 0.0):
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        object.__setattr__(self, "requested_q", q)
        if q < 1.0:
            q = 1.0 / q
        object.__setattr__(self, "q", q)

    @property
    def log_q(self):
        return math.log(self.q)

    @property
    def lam(self):
        """``q - 1/q``, computed as ``2 sinh(log q)`` to keep digits near q = 1."""
        return 2.0 * math.sinh(self.log_q)

    @property
    def q_plus(self):
        """``q + 1/q``."""
        return 2.0 * math.cosh(self.log_q)


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical constants of a run: ``hbar``, mass ``m``, box length ``L``."""

    d: Deformation
    hbar: float = 1.0
    mass: float = 1.0
    box_length: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "box_length"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    @property
    def q(self):
        return self.d.q

    @property
    def m_q(self):
        """Effective mass ``((q + 1)/(2q))^2 m``."""
        q = self.d.q
        return ((q + 1.0) / (2.0 * q)) ** 2 * self.mass


def _check_finite(value, what):
    if not np.all(np.isfinite(value)):
        raise QOverflowError(f"{what} overflows double precision")
    return value


def q_number(a, d):
    """Symmetric q-number ``[a] = (q^a - q^-a)/(q - q^-1)``.

    Accepts scalars or arrays; odd in ``a`` and equal to ``a`` as q -> 1.
    """
    ell = d.log_q
    with np.errstate(over="ignore"):
        val = np.sinh(np.multiply(a, ell)) / math.sinh(ell)
    _check_finite(val, f"[a] at q={d.q}")
    return float(val) if np.ndim(val) == 0 else val


def q_number_base2(n, d):
    """One-sided q-number ``[n, q^2] = (q^(2n) - 1)/(q^2 - 1)``, ``n >= 0``."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError(f"[n, q^2] needs n >= 0, got {n!r}")
    ell = d.log_q
    with np.errstate(over="ignore"):
        val = np.expm1(2.0 * ell * n_arr) / math.expm1(2.0 * ell)
    _check_finite(val, f"[n, q^2] at q={d.q}")
    return float(val) if np.ndim(val) == 0 else val


def _check_order(n, what):
    if int(n) != n or n < 0:
        raise DomainError(f"{what} needs a nonnegative integer, got {n!r}")
    return int(n)


def q_factorial(n, d):
    """``[n]! = [1][2]...[n]`` with ``[0]! = 1``."""
    n = _check_order(n, "q_factorial")
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number(k, d)
        if not math.isfinite(out):
            raise QOverflowError(f"[{n}]! overflows double precision at q={d.q} (at k={k})")
    return out


def q_factorial_base2(n, d):
    """``[n, q^2]! = [1, q^2]...[n, q^2]``."""
    n = _check_order(n, "q_factorial_base2")
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number_base2(k, d)
        if not math.isfinite(out):
            raise QOverflowError(f"[{n}, q^2]! overflows double precision at q={d.q} (at k={k})")
    return out


@dataclass(frozen=True)
class QBinomialExpansion:
    """Coefficients of ``(x +. y)^N``; ``coeffs[n]`` multiplies ``x^n y^(N-n)``."""

    order: int
    coeffs: tuple

    def evaluate(self, x, y):
        n = np.arange(self.order + 1)
        c = np.asarray(self.coeffs)
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        out = np.sum(c * x ** n * y ** (self.order - n), axis=-1)
        return float(out) if out.ndim == 0 else out


def q_binomial_coeffs(N, d):
    """q-binomial coefficients ``[N]!/([n]![N-n]!)`` for ``n = 0..N``.

    Uses the ratio recurrence ``c[n+1] = c[n] [N-n]/[n+1]`` so no factorial
    is ever formed.
    """
    N = _check_order(N, "q_binomial_coeffs")
    coeffs = [1.0]
    for n in range(N):
        nxt = coeffs[-1] * q_number(N - n, d) / q_number(n + 1, d)
        if not math.isfinite(nxt):
            raise QOverflowError(f"q-binomial coefficient overflows for N={N}, q={d.q}")
        coeffs.append(nxt)
    # the exact coefficients are palindromic; enforce it against rounding drift
    for n in range(N // 2 + 1):
        avg = 0.5 * (coeffs[n] + coeffs[N - n])
        coeffs[n] = coeffs[N - n] = avg
    return QBinomialExpansion(N, tuple(coeffs))


def q_binomial_eval_sum(x, y, N, d):
    """``(x +. y)^N`` from its expansion."""
    return q_binomial_coeffs(N, d).evaluate(x, y)


def q_binomial_eval_product(x, y, N, d):
    """``(x +. y)^N`` in factorized form ``prod_{k<N} (x + q^(N-1-2k) y)``.

    Each factor is formed with ``q**e`` directly, so at ``x = -q**e * y`` the
    product is exactly zero.
    """
    N = _check_order(N, "q_binomial_eval_product")
    q = d.q
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.ones(np.broadcast(x, y).shape)
    for k in range(N):
        out = out * (x + q ** (N - 1 - 2 * k) * y)
    return float(out) if out.ndim == 0 else out
