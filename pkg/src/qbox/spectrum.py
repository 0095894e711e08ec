"""Particle in a box: the arctangent sum, its level crossings, the inversion
series, eigenlevels, eigenfunctions and their normalization.

The barred sine factorizes as ``ebar_q(ix) = prod_k (1 + i (1 - q^-2) q^-2k x)``,
so its phase is ``Theta(x) = sum_k arctan((1 - q^-2) q^-2k x)`` and its zeros
are the level crossings ``Theta(x) = pi n``. Those zeros fix the box
wave numbers ``k_n = pi_q(n)/L``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError
from .qcore import PhysicalConfig
from .qfunctions import barsin_q, series_coefficients, sin_q
from .qoperators import GridFunction, PowerSeries, apply_D, apply_gauss_weight

__all__ = [
    "PhysicalConfig",
    "InversionTable",
    "SpectrumEntry",
    "Eigenfunction",
    "theta",
    "theta_and_derivative",
    "pi_q",
    "lagrange_table",
    "series_reversion",
    "pi_q_series",
    "box_spectrum",
    "eigenfunction",
    "normalize_eigenfunction",
    "gram_matrix",
    "phase_function",
]


def theta_and_derivative(x, d):
    """``Theta(x)`` and ``Theta'(x)``; scalars in, scalars out."""
    th, dth = kernels.theta(np.atleast_1d(np.asarray(x, dtype=float)).ravel(), d.q)
    if np.ndim(x) == 0:
        return float(th[0]), float(dth[0])
    shape = np.shape(x)
    return th.reshape(shape), dth.reshape(shape)


def theta(x, d):
    """``Theta(x) = sum_k arctan((1 - q^-2) q^-2k x)``.

    Terms with ``(1 - q^-2) q^-2k |x| > 1/2`` are summed directly; the rest of
    the infinite sum is evaluated exactly as an odd power series in the
    first omitted argument, so there is no truncation error.
    """
    return theta_and_derivative(x, d)[0]


def pi_q(nu, d, rtol=1e-14, max_iter=200):
    """Root of ``Theta(x) = pi nu`` for ``nu > 0``.

    Integer ``nu`` gives the zeros of the barred sine, half-integers those of
    the barred cosine. Since ``Theta(x) <= x`` the root is at least
    ``pi nu``; the bracket ``[pi nu, pi nu q^(2 nu)]`` is widened by factors of
    ``q^2`` until it straddles the level, then Newton steps are taken and
    replaced by bisection whenever they leave the bracket.
    """
    nu = float(nu)
    if not (nu > 0.0 and math.isfinite(nu)):
        raise DomainError(f"nu must be positive, got {nu!r}")
    target = math.pi * nu
    lo = target
    hi = target * math.exp(2.0 * nu * d.log_q)
    grow = max(d.q * d.q, 1.0 + 1e-3)
    for _ in range(max_iter):
        if theta(hi, d) >= target:
            break
        lo, hi = hi, hi * grow
    else:
        raise ConvergenceError(f"could not bracket Theta(x) = pi*{nu} at q={d.q}")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, df = theta_and_derivative(x, d)
        f -= target
        if f > 0.0:
            hi = x
        else:
            lo = x
        step = f / df if df > 0.0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= rtol * abs(x_new) or hi - lo <= rtol * hi:
            return x_new
        x = x_new
    raise ConvergenceError(f"Newton iteration for pi_q({nu}) did not converge at q={d.q}")


@dataclass(frozen=True)
class InversionTable:
    """Odd coefficients of ``Theta(x) = sum a_k x^k`` and of its inverse ``x = sum b_k y^k``."""

    q: float
    a_coeffs: tuple
    b_coeffs: tuple


def _a_coeff(k, d):
    # a_{2k-1} = (-1)^(k-1)/(2k-1) (1 - q^-2)^(2k-1) / (1 - q^-2(2k-1))
    m = 2 * k - 1
    c = -math.expm1(-2.0 * d.log_q)
    return (-1) ** (k - 1) / m * c ** m / -math.expm1(-2.0 * m * d.log_q)


def lagrange_table(d):
    """``a_1, a_3, a_5, a_7`` and the inversion coefficients ``b_1 .. b_7``.

    The ``b`` are the closed forms in q; each equals the Lagrange-reversion
    combination of the ``a`` (``b_3 = -a_3``, ``b_5 = 3 a_3^2 - a_5``,
    ``b_7 = -12 a_3^3 + 8 a_3 a_5 - a_7``).
    """
    a1, a3, a5, a7 = (_a_coeff(k, d) for k in (1, 2, 3, 4))
    c = -math.expm1(-2.0 * d.log_q)

    def one_minus(m):
        return -math.expm1(-2.0 * m * d.log_q)

    r3 = c ** 3 / one_minus(3)
    b1 = 1.0
    b3 = r3 / 3.0
    b5 = -c ** 5 / one_minus(5) / 5.0 + r3 * r3 / 3.0
    b7 = (
        c ** 7 / one_minus(7) / 7.0
        - 8.0 / 15.0 * c ** 8 / (one_minus(3) * one_minus(5))
        + 4.0 / 9.0 * c ** 9 / one_minus(3) ** 3
    )
    return InversionTable(d.q, (a1, a3, a5, a7), (b1, b3, b5, b7))


def _poly_mul(a, b, n):
    return np.convolve(a, b)[:n]


def series_reversion(a, order):
    """Coefficients ``b_0..b_order`` of the compositional inverse of
    ``y = sum_k a[k] x^k`` (``a[0] = 0``, ``a[1] != 0``).

    Generic route by fixed-point iteration on truncated power series; used
    to cross-check the closed forms of :func:`lagrange_table`.
    """
    n = order + 1
    a = np.asarray(a, dtype=float)[:n]
    a = np.concatenate([a, np.zeros(n - a.size)])
    if a[0] != 0.0 or a[1] == 0.0:
        raise DomainError("series must have a[0] = 0 and a[1] != 0")
    b = np.zeros(n)
    b[1] = 1.0 / a[1]
    for _ in range(order):
        # compose a(b(y)) and correct with the inverse of the linear term
        comp = np.zeros(n)
        power = np.zeros(n)
        power[0] = 1.0
        for k in range(1, n):
            power = _poly_mul(power, b, n)
            comp += a[k] * power
        target = np.zeros(n)
        target[1] = 1.0
        b = b + (target - comp) / a[1]
    return b


def pi_q_series(nu, table):
    """``sum_k b_k (pi nu)^k`` over ``k = 1, 3, 5, 7``.

    An expansion about small argument: it tracks the root for small ``nu`` or
    q close to 1 and drifts away otherwise.
    """
    y = math.pi * float(nu)
    return sum(b * y ** k for b, k in zip(table.b_coeffs, (1, 3, 5, 7)))


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    pi_q: float
    k_n: float
    E_n: float
    N_n: float


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"level index must be a positive integer, got {n!r}")
    return int(n)


def _level(n, cfg):
    z = pi_q(n, cfg.d)
    return z, z / cfg.box_length


def _series_degree(k, L, d, family, tail_tol=1e-14):
    """Smallest odd degree whose dropped terms at ``x = L`` are below ``tail_tol``."""
    y = abs(k * L)
    c = series_coefficients(family, 400, d)
    with np.errstate(divide="ignore"):
        log_mags = np.log(np.abs(c)) + np.arange(c.size) * math.log(max(y, 1e-300))
    peak = int(np.argmax(log_mags))
    for m in range(peak, c.size - 5):
        if np.all(log_mags[m + 1: m + 5] < math.log(tail_tol)):
            return m if m % 2 == 1 else m + 1
    raise ConvergenceError(f"series for {family} at kL={y:g} needs more than 400 terms")


@dataclass(frozen=True)
class Eigenfunction(GridFunction):
    """Box eigenfunction with its truncated power series.

    Calling it evaluates ``N_n sin_q(k_n x)`` (variant ``"S"``) or
    ``N_n barsin_q(k_n x)`` (variant ``"Sbar"``) in double-double arithmetic;
    ``series`` holds the same function as a :class:`PowerSeries` for exact
    operator algebra.
    """

    n: int = 0
    variant: str = "Sbar"
    k_n: float = 0.0
    norm: float = 1.0
    series: PowerSeries = field(default=None, repr=False)


def eigenfunction(n, variant, cfg, norm=None):
    """``S_n(x) = N_n sin_q(k_n x)`` or ``Sbar_n(x) = N_n barsin_q(k_n x)``.

    ``norm`` defaults to :func:`normalize_eigenfunction`. ``Sbar_n`` vanishes
    at 0 and L and solves ``Dbar^2 Sbar_n = -k_n^2 Sbar_n``; ``S_n`` solves
    ``D^2 S_n = -k_n^2 S_n`` and is obtained from ``Sbar_n`` by the weight
    ``q^(N(N-1)/2)``.
    """
    n = _check_n(n)
    if variant not in ("S", "Sbar"):
        raise DomainError(f"variant must be 'S' or 'Sbar', got {variant!r}")
    d = cfg.d
    _, k = _level(n, cfg)
    if norm is None:
        norm = normalize_eigenfunction(n, cfg)
    degree = _series_degree(k, cfg.box_length, d, "barsin")
    scaled = series_coefficients("barsin", degree, d) * np.power(k, np.arange(degree + 1)) * norm
    series = PowerSeries(scaled)
    if variant == "S":
        series = apply_gauss_weight(series, +1, d)
        base = sin_q
    else:
        base = barsin_q

    def evaluate(x):
        return norm * base(k * np.asarray(x, dtype=float), d)

    return Eigenfunction(evaluate, (0.0, cfg.box_length), True, n, variant, k, norm, series)


def _jackson_cap(d, x0, k_max):
    # lattice points x0 q^-(2j+1) down to where the integrand ~ (k x)^2 is
    # negligible; the lattice ratio is q^-2
    reach = math.log(max(x0 * k_max, 1.0) / 1e-6)
    return int(reach / (2.0 * d.log_q)) + 64


def _lattice(x0, d, cap):
    j = np.arange(cap)
    pts = x0 * np.exp(-(2 * j + 1) * d.log_q)
    return pts, d.lam * pts


def _unit_sin_on(pts, k, d):
    return sin_q(k * pts, d)


def normalize_eigenfunction(n, cfg):
    """``N_n > 0`` making the Jackson integral of ``S_n^2`` over ``[0, L/q]`` one."""
    n = _check_n(n)
    d = cfg.d
    _, k = _level(n, cfg)
    x0 = cfg.box_length / d.q
    pts, w = _lattice(x0, d, _jackson_cap(d, x0, k))
    s = _unit_sin_on(pts, k, d)
    self_ip = math.fsum(w * s * s)
    if not self_ip > 0.0:
        raise ConvergenceError(f"non-positive self inner product {self_ip!r} for n={n}, q={d.q}")
    return 1.0 / math.sqrt(self_ip)


def box_spectrum(n_max, cfg):
    """Levels ``n = 1..n_max`` with ``k_n = pi_q(n)/L`` and ``E_n = hbar^2 k_n^2/(2 m_q)``."""
    n_max = _check_n(n_max)
    out = []
    for n in range(1, n_max + 1):
        z, k = _level(n, cfg)
        E = cfg.hbar ** 2 * k * k / (2.0 * cfg.m_q)
        out.append(SpectrumEntry(n, z, k, E, normalize_eigenfunction(n, cfg)))
    return out


@dataclass(frozen=True)
class GramReport:
    """Jackson inner products over ``[0, L/q]`` of the normalized ``S_n``.

    ``bracket[n, m] = S_n(L) DS_m(L/q) - S_m(L) DS_n(L/q)``, which equals
    ``-(k_m^2 - k_n^2) <S_n S_m>`` exactly; ``identity_residual`` measures that.
    """

    matrix: np.ndarray
    bracket: np.ndarray
    identity_residual: np.ndarray
    k: np.ndarray
    norms: np.ndarray


def gram_matrix(n_max, cfg):
    """Inner products ``<S_n S_m>`` for ``n, m <= n_max`` with boundary diagnostics.

    The off-diagonal entries are measured, not asserted: orthogonality of the
    ``S_n`` hinges on the boundary bracket vanishing at ``L/q``, which is
    reported alongside.
    """
    n_max = _check_n(n_max)
    if n_max < 2:
        raise DomainError("gram_matrix needs n_max >= 2")
    d = cfg.d
    L = cfg.box_length
    x0 = L / d.q
    ks = np.array([_level(n, cfg)[1] for n in range(1, n_max + 1)])
    pts, w = _lattice(x0, d, _jackson_cap(d, x0, ks.max()))
    vals = np.array([_unit_sin_on(pts, k, d) for k in ks])
    raw = np.array([[math.fsum(w * a * b) for b in vals] for a in vals])
    norms = 1.0 / np.sqrt(np.diag(raw))
    G = raw * np.outer(norms, norms)
    s_L = np.array([norms[i] * sin_q(ks[i] * L, d) for i in range(n_max)])
    ds = np.array(
        [norms[i] * apply_D(lambda x, k=ks[i]: sin_q(k * np.asarray(x), d), x0, d) for i in range(n_max)]
    )
    bracket = np.outer(s_L, ds) - np.outer(s_L, ds).T
    k2 = ks * ks
    residual = bracket + (k2[None, :] - k2[:, None]) * G
    return GramReport(G, bracket, residual, ks, norms)


def phase_function(m, x, cfg):
    """``Q_m(x) = exp(i 2 pi m log|x/L| / log q)``: unit modulus, ``Q_m(qx) = Q_m(x)``."""
    if int(m) != m or m == 0:
        raise DomainError(f"m must be a nonzero integer, got {m!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise DomainError("Q_m is singular at x = 0")
    out = np.exp(1j * 2.0 * math.pi * m * np.log(np.abs(x) / cfg.box_length) / cfg.d.log_q)
    return complex(out) if out.ndim == 0 else out
