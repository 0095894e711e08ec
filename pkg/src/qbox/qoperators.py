"""Difference and scaling operators, Jackson q-integration and inner products.

Operators come in two forms. On :class:`PowerSeries` they are exact maps of
the coefficients (``D x^n = [n] x^(n-1)`` and so on), so algebraic identities
can be checked without any discretization error. On :class:`GridFunction`
they are exact two-point difference quotients of the callable.
"""

import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, QOverflowError
from .qcore import q_number, q_number_base2


class PowerSeries:
    """Truncated series ``sum_n c_n x^n`` with ``c`` stored as a float array."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        self.coeffs = c
        self.coeffs.flags.writeable = False

    @classmethod
    def monomial(cls, n, coeff=1.0):
        c = np.zeros(n + 1)
        c[n] = coeff
        return cls(c)

    @property
    def order(self):
        return self.coeffs.size - 1

    def __repr__(self):
        return f"PowerSeries(order={self.order})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            out = out * x + c
        return float(out) if out.ndim == 0 else out

    def _padded(self, other):
        m = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(m)
        b = np.zeros(m)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return a, b

    def __add__(self, other):
        a, b = self._padded(other)
        return PowerSeries(a + b)

    def __sub__(self, other):
        a, b = self._padded(other)
        return PowerSeries(a - b)

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def scale(self, s):
        return PowerSeries(s * self.coeffs)

    def map_degree(self, fn):
        """Multiply ``c_n`` by ``fn(n)``: any function of the number operator."""
        n = np.arange(self.coeffs.size)
        return PowerSeries(self.coeffs * fn(n))

    def mul_x(self, power=1):
        """Multiplication by ``x^power``."""
        return PowerSeries(np.concatenate([np.zeros(power), self.coeffs]))

    def dilate(self, s):
        """``f(x) -> f(s x)``."""
        return self.map_degree(lambda n: np.power(float(s), n))

    def max_abs_diff(self, other):
        a, b = self._padded(other)
        return float(np.max(np.abs(a - b)))


def _lower(p, weights):
    # c_n * w_n moves to degree n - 1; the constant term is annihilated
    c = p.coeffs[1:] * weights[1:]
    return PowerSeries(c if c.size else np.zeros(1))


def series_D(p, d):
    """``D x^n = [n] x^(n-1)``."""
    return _lower(p, q_number(np.arange(p.coeffs.size), d))


def series_Dbar(p, d):
    """``Dbar x^n = [n, q^2] x^(n-1)``."""
    return _lower(p, q_number_base2(np.arange(p.coeffs.size), d))


def apply_hat_partial(p, d):
    """``hat-partial x^n = ((q^n - 1)/(q - 1)) x^(n-1)``."""
    n = np.arange(p.coeffs.size)
    return _lower(p, np.expm1(n * d.log_q) / math.expm1(d.log_q))


def apply_number(p):
    """``N = x d/dx``: ``x^n -> n x^n``."""
    return p.map_degree(lambda n: n.astype(float))


def apply_q_power_N(p, alpha, d):
    """``q^(alpha N) f(x) = f(q^alpha x)``."""
    return p.map_degree(lambda n: np.exp(alpha * d.log_q * n))


def apply_gauss_weight(p, sign, d):
    """``q^(sign N(N-1)/2)``: multiplies ``c_n`` by ``q^(sign n(n-1)/2)``."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    n = np.arange(p.coeffs.size)
    expo = sign * 0.5 * n * (n - 1) * d.log_q
    bad = expo > 709.0
    if np.any(bad):
        raise QOverflowError(f"q^(n(n-1)/2) overflows at degree {int(np.argmax(bad))} for q={d.q}")
    return PowerSeries(p.coeffs * np.exp(expo))


def series_integral(p, d):
    """Jackson antiderivative ``D^-1``: ``x^m -> x^(m+1)/[m+1]``, zero at 0."""
    n = np.arange(p.coeffs.size)
    return PowerSeries(np.concatenate([[0.0], p.coeffs / q_number(n + 1, d)]))


@dataclass(frozen=True)
class GridFunction:
    """A deterministic callable ``x -> value`` with a validity interval.

    ``vectorized`` says whether the evaluator accepts numpy arrays; scalar
    evaluators are looped over.
    """

    evaluator: object
    domain: tuple = (-math.inf, math.inf)
    vectorized: bool = True

    def __call__(self, x):
        if self.vectorized or np.ndim(x) == 0:
            return self.evaluator(x)
        x = np.asarray(x)
        out = [self.evaluator(float(v)) for v in x.ravel()]
        return np.asarray(out).reshape(x.shape)

    @classmethod
    def from_series(cls, p, domain=(-math.inf, math.inf)):
        return cls(p, domain, True)


def _as_grid(f):
    return f if isinstance(f, GridFunction) else GridFunction(f)


def _nonzero(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise DomainError(f"{what} is a difference quotient and is undefined at x = 0; use the series form")
    return x


def _scalar(v):
    return v.item() if isinstance(v, np.ndarray) and v.ndim == 0 else v


def apply_D(f, x, d):
    """``(f(qx) - f(x/q)) / ((q - 1/q) x)``."""
    f = _as_grid(f)
    x = _nonzero(x, "D")
    q = d.q
    return _scalar((f(q * x) - f(x / q)) / (d.lam * x))


def apply_Dbar(f, x, d):
    """``(f(q^2 x) - f(x)) / ((q^2 - 1) x)``."""
    f = _as_grid(f)
    x = _nonzero(x, "Dbar")
    return _scalar((f(d.q * d.q * x) - f(x)) / (math.expm1(2.0 * d.log_q) * x))


@dataclass(frozen=True)
class QIntegral:
    value: float
    lattice_points: int
    tail_bound: float


def _jackson_primitive(f, x, d, cap, tol, max_chunk=4096):
    """``sum_k (q - 1/q) x q^-(2k+1) f(q^-(2k+1) x)`` with a tail monitor."""
    if x == 0.0:
        return 0.0, 0, 0.0
    ell = d.log_q
    # stop before the lattice underflows to x = 0, where f may be undefined
    k_normal = int((math.log(abs(x)) - math.log(sys.float_info.min)) / (2.0 * ell) - 0.5)
    cap = max(1, min(cap, k_normal))
    chunk = 64
    r2 = math.exp(-2.0 * ell)
    partial_re = []
    partial_im = []
    total = 0.0
    used = 0
    tail = math.inf
    while used < cap:
        k = np.arange(used, min(used + chunk, cap))
        pts = x * np.exp(-(2 * k + 1) * ell)
        vals = np.asarray(f(pts))
        if vals.shape != pts.shape:
            vals = np.broadcast_to(vals, pts.shape)
        t = d.lam * pts * vals
        used = int(k[-1]) + 1
        partial_re.append(math.fsum(np.real(t)))
        partial_im.append(math.fsum(np.imag(t)))
        total = math.fsum(partial_re)
        if np.iscomplexobj(t) or any(partial_im):
            total = complex(total, math.fsum(partial_im))
        # remaining terms are bounded by a geometric series in q^-2 with the
        # largest |f| seen over the last lattice points as the sup estimate
        sup = float(np.max(np.abs(vals[-min(16, vals.size):])))
        last_pt = float(abs(pts[-1]))
        tail = d.lam * last_pt * sup * r2 / (1.0 - r2)
        if not math.isfinite(abs(total)):
            break
        if tail <= tol * max(abs(total), 1e-300):
            return total, used, tail
        chunk = min(2 * chunk, max_chunk)
    raise ConvergenceError(
        f"Jackson lattice sum at x={x!r} not converged after {cap} points (tail bound {tail:.3g}); "
        "raise cap or check that f is bounded near 0"
    )


def q_integral(f, a, b, d, cap=10_000, tol=None):
    """Jackson integral ``int_a^b Delta_q x f``, the inverse of ``D``.

    Sums ``(q - 1/q) x q^-(2k+1) f(q^-(2k+1) x)`` at ``x = b`` and ``x = a``
    and subtracts. For ``f = Dg`` this telescopes to ``g(b) - g(a)``.
    Raises :class:`ConvergenceError` if the tail bound is not met within
    ``cap`` lattice points per end point.
    """
    if not (0.0 <= a < b):
        raise DomainError(f"need 0 <= a < b, got a={a!r}, b={b!r}")
    f = _as_grid(f)
    tol = d.tol if tol is None else tol
    vb, nb, tb = _jackson_primitive(f, float(b), d, cap, tol)
    va, na, ta = _jackson_primitive(f, float(a), d, cap, tol)
    return QIntegral(vb - va, nb + na, tb + ta)


def momentum_apply(f, x, cfg):
    """Deformed momentum ``-i hbar ((q + 1)/(2q)) D`` applied at ``x``.

    On ``e_q(ikx)`` this gives ``hbar k (q + 1)/(2q)`` times the function.
    """
    q = cfg.d.q
    return -1j * cfg.hbar * (q + 1.0) / (2.0 * q) * apply_D(f, x, cfg.d)


@dataclass(frozen=True)
class UncertaintyReport:
    dp: float
    dx: float
    bound: float
    satisfied: bool
    norm: float


def _quad_line(fn, **kw):
    # ordinary integral over the real line split at the origin, where
    # difference quotients are undefined
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        left = integrate.quad(fn, -np.inf, 0.0, limit=200, epsabs=1e-13, epsrel=1e-12, **kw)[0]
        right = integrate.quad(fn, 0.0, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12, **kw)[0]
    return left + right


def uncertainty_check(psi, cfg, norm_tol=1e-8):
    """``Delta p_q Delta x`` against the bound
    ``(hbar/4) |int (psi*(x) psi(qx) + psi*(qx) psi(x)) dx|``.

    All moments are ordinary integrals over the real line; ``psi`` must be
    normalized to ``norm_tol``.
    """
    psi = _as_grid(psi)
    q = cfg.d.q

    def val(x):
        return complex(psi(x))

    norm = _quad_line(lambda x: abs(val(x)) ** 2)
    if abs(norm - 1.0) > norm_tol:
        raise DomainError(f"psi is not normalized: int |psi|^2 dx = {norm!r}")

    def p_psi(x):
        return complex(momentum_apply(psi, x, cfg))

    mean_x = _quad_line(lambda x: x * abs(val(x)) ** 2)
    mean_x2 = _quad_line(lambda x: x * x * abs(val(x)) ** 2)
    mean_p = _quad_line(lambda x: (val(x).conjugate() * p_psi(x)).real)
    # p_q is hermitian for the ordinary measure, so <p^2> = int |p psi|^2
    mean_p2 = _quad_line(lambda x: abs(p_psi(x)) ** 2)
    dx = math.sqrt(max(mean_x2 - mean_x ** 2, 0.0))
    dp = math.sqrt(max(mean_p2 - mean_p ** 2, 0.0))
    overlap_re = _quad_line(lambda x: (val(x).conjugate() * val(q * x) + val(q * x).conjugate() * val(x)).real)
    overlap_im = _quad_line(lambda x: (val(x).conjugate() * val(q * x) + val(q * x).conjugate() * val(x)).imag)
    bound = 0.25 * cfg.hbar * abs(complex(overlap_re, overlap_im))
    return UncertaintyReport(dp, dx, bound, dp * dx >= bound - 1e-9, norm)
