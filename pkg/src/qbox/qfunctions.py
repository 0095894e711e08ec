"""The two q-exponential families, their trigonometric parts, the q-gamma
constant and product-form evaluators of the barred sine and cosine.

``e_q(z) = sum z^n/[n]!`` and ``ebar_q(z) = sum z^n/[n, q^2]!``. Both series
converge for every ``z`` (the coefficients decay like ``q^(-n^2/2)``) but
they do not decay along the negative real axis: ``e_q`` has order zero, so it
is unbounded on every ray. Real and imaginary arguments are summed in
double-double arithmetic, which keeps values meaningful even when the
largest term exceeds the result by fifteen orders of magnitude.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev

from . import kernels
from .errors import ConvergenceError, DomainError, GammaQuadratureError, SeriesTruncationError
from .qcore import q_binomial_eval_product, q_factorial, q_number

DEFAULT_CAP = 512
UNRELIABLE_CANCELLATION = 1e12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesEvalReport:
    """Value of a truncated series with its diagnostics."""

    value: complex
    terms_used: int
    max_term_magnitude: float
    cancellation_ratio: float

    @property
    def reliable(self):
        return self.cancellation_ratio <= UNRELIABLE_CANCELLATION


def _ratio_kind(family):
    return {"e": "sym", "ebar": "base2"}[family]


def _sum_real(x, d, family, parity, alternate, cap, tol=None):
    """Vectorized real-line series; returns (value, nterms, maxterm) arrays."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rhi, rlo = kernels.ratio_table(d.q, _ratio_kind(family), int(cap))
    tol = d.tol if tol is None else tol
    val, nterms, mx, _ = kernels.series_dd(x.ravel(), rhi, rlo, parity, alternate, tol)
    bad = nterms < 0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SeriesTruncationError(
            f"series for {family}_q did not meet the truncation rule within {cap} terms "
            f"at x={x.ravel()[i]!r}, q={d.q}",
            partial=float(val[i]),
            terms_used=cap,
        )
    shape = x.shape
    return val.reshape(shape), nterms.reshape(shape), mx.reshape(shape)


def _report(value, nterms, maxterm):
    ratio = maxterm / max(abs(value), _EPS)
    return SeriesEvalReport(value, int(nterms), float(maxterm), float(max(ratio, 1.0) if value != 0 else ratio))


def _sum_complex(z, d, family, cap):
    # Neumaier-compensated sum for general complex arguments
    rhi, _ = kernels.ratio_table(d.q, _ratio_kind(family), int(cap))
    term = complex(1.0)
    s = complex(1.0)
    comp = complex(0.0)
    mx = 1.0
    count = 0
    az = abs(z)
    for n in range(1, cap + 1):
        term = term * z * rhi[n]
        t = s + term
        if abs(s) >= abs(term):
            comp += (s - t) + term
        else:
            comp += (term - t) + s
        s = t
        mag = abs(term)
        mx = max(mx, mag)
        past_peak = az * rhi[min(n + 1, cap)] < 1.0
        if past_peak and mag <= d.tol * abs(s + comp):
            count += 1
            if count >= 3:
                return _report(s + comp, n + 1, mx)
        else:
            count = 0
    raise SeriesTruncationError(
        f"series for {family}_q did not converge within {cap} terms at z={z!r}, q={d.q}",
        partial=s + comp,
        terms_used=cap,
    )


def _exp_family(z, d, family, cap):
    z = complex(z)
    if z.imag == 0.0:
        v, n, m = _sum_real(z.real, d, family, -1, False, cap)
        return _report(float(v[0]), n[0], m[0])
    if z.real == 0.0:
        y = z.imag
        c, nc, mc = _sum_real(y, d, family, 0, True, cap)
        s, ns, ms = _sum_real(y, d, family, 1, True, cap)
        return _report(complex(c[0], s[0]), nc[0] + ns[0], max(mc[0], ms[0]))
    return _sum_complex(z, d, family, cap)


def eq_exp(z, d, cap=DEFAULT_CAP):
    """``e_q(z) = sum_n z^n/[n]!`` as a :class:`SeriesEvalReport`.

    Terms are added until three consecutive ones past the largest fall below
    ``d.tol`` times the partial sum; reaching ``cap`` terms first raises
    :class:`SeriesTruncationError`.
    """
    return _exp_family(z, d, "e", cap)


def eq_exp_bar(z, d, cap=DEFAULT_CAP):
    """``ebar_q(z) = sum_n z^n/[n, q^2]!``; same truncation contract as :func:`eq_exp`."""
    return _exp_family(z, d, "ebar", cap)


def _vectorized(family, parity, alternate):
    def f(x, d, cap=DEFAULT_CAP):
        v, _, _ = _sum_real(x, d, family, parity, alternate, cap)
        return float(np.asarray(v).reshape(-1)[0]) if np.ndim(x) == 0 else v

    return f


eq_real = _vectorized("e", -1, False)
eq_real.__doc__ = "Vectorized ``e_q(x)`` for real ``x``."
eqbar_real = _vectorized("ebar", -1, False)
eqbar_real.__doc__ = "Vectorized ``ebar_q(x)`` for real ``x``."
sin_q = _vectorized("e", 1, True)
sin_q.__doc__ = "Vectorized ``sin_q(x) = Im e_q(ix)``."
cos_q = _vectorized("e", 0, True)
cos_q.__doc__ = "Vectorized ``cos_q(x) = Re e_q(ix)``."
barsin_q = _vectorized("ebar", 1, True)
barsin_q.__doc__ = "Vectorized barred sine ``Im ebar_q(ix)``."
barcos_q = _vectorized("ebar", 0, True)
barcos_q.__doc__ = "Vectorized barred cosine ``Re ebar_q(ix)``."


@dataclass(frozen=True)
class QTrigValues:
    """The four q-trigonometric functions at one point, each with its report."""

    sin_q: SeriesEvalReport
    cos_q: SeriesEvalReport
    barsin_q: SeriesEvalReport
    barcos_q: SeriesEvalReport

    @property
    def reliable(self):
        return all(r.reliable for r in (self.sin_q, self.cos_q, self.barsin_q, self.barcos_q))


def q_trig(x, d, cap=DEFAULT_CAP):
    """``sin_q, cos_q`` and their barred counterparts at real ``x``.

    A report whose cancellation ratio exceeds 1e12 is flagged unreliable; the
    barred functions can then be taken from :func:`barsin_product` and
    :func:`barcos_product` instead.
    """
    x = float(x)
    out = {}
    for name, family, parity in (
        ("sin_q", "e", 1),
        ("cos_q", "e", 0),
        ("barsin_q", "ebar", 1),
        ("barcos_q", "ebar", 0),
    ):
        v, n, m = _sum_real(x, d, family, parity, True, cap)
        out[name] = _report(float(v[0]), n[0], m[0])
    return QTrigValues(**out)


def series_coefficients(family, degree, d):
    """Coefficients ``c_0..c_degree`` of ``e``, ``ebar``, ``sin``, ``cos``,
    ``barsin`` or ``barcos`` as a float array."""
    base = "ebar" if family in ("ebar", "barsin", "barcos") else "e"
    rhi, rlo = kernels.ratio_table(d.q, _ratio_kind(base), max(int(degree), 1))
    c = np.cumprod(rhi[: degree + 1] + rlo[: degree + 1])
    c[0] = 1.0
    n = np.arange(degree + 1)
    if family in ("sin", "barsin", "cos", "barcos"):
        parity = 1 if family.endswith("sin") else 0
        c = np.where(n % 2 == parity, c * np.where((n // 2) % 2 == 1, -1.0, 1.0), 0.0)
    elif family not in ("e", "ebar"):
        raise DomainError(f"unknown series family {family!r}")
    return c


# q-gamma constant

_TSTAR_THRESHOLD = 1e-16
_DD_NOISE = 1e-32


@dataclass(frozen=True)
class QGamma:
    """``Gamma_q[1]``; ``Gamma_q[n] = [n-1]! * gamma1``."""

    gamma1: float
    quadrature_error_estimate: float
    t_max: float
    method: str

    def gamma(self, n, d):
        return q_factorial(n - 1, d) * self.gamma1


def gamma_q_continuation(d):
    """Closed form ``2 log q / (q - 1/q)`` of ``int_0^inf e_q(-t) dt``.

    Obtained from the Mellin transform of the series (termwise moments
    ``int e_q(-t) t^n dt = [n]! Gamma_q[1]`` fix it by Ramanujan's master
    theorem). It agrees with the ordinary integral wherever that integral
    exists and extends it to every q > 1.
    """
    return 2.0 * d.log_q / d.lam


def find_quadrature_cutoff(d, cap=4096, t_step=0.25, t_limit=400.0):
    """Smallest grid point ``T*`` with ``|e_q(-t)| < 1e-16`` on all of ``[T*, q^2 T*]``.

    Raises :class:`GammaQuadratureError` when the integrand never gets that
    small while it can still be resolved in double-double arithmetic: for
    q above roughly 1.08 it turns around and grows before reaching 1e-16.
    """
    t = np.arange(t_step, t_limit, t_step)
    rhi, rlo = kernels.ratio_table(d.q, "sym", cap)
    val, nterms, mx, _ = kernels.series_dd(-t, rhi, rlo, -1, False, 1e-17)
    ok = (nterms > 0) & (mx * _DD_NOISE < _TSTAR_THRESHOLD)
    small = ok & (np.abs(val) < _TSTAR_THRESHOLD)
    q2 = d.q * d.q
    for i in np.flatnonzero(small):
        hi = q2 * t[i]
        if hi > t[-1]:
            break
        cell = (t >= t[i]) & (t <= hi)
        if np.all(small[cell]):
            return float(t[i])
    reachable = t[ok][-1] if np.any(ok) else 0.0
    raise GammaQuadratureError(
        f"e_q(-t) never stays below {_TSTAR_THRESHOLD:g} over a dilation cell for t <= {reachable:g} "
        f"at q={d.q}; the ordinary integral for Gamma_q[1] does not converge "
        "(use method='continuation')"
    )


def _panel_integral(f, a, b, tol, deg_max=1024):
    """Clenshaw-Curtis style integral of ``f`` over ``[a, b]``.

    The Chebyshev interpolant is integrated with the degree doubled until two
    successive values agree to ``tol`` relative, or until the differences
    stop shrinking, which means they have reached the noise floor of ``f``
    itself. Returns the value and the last difference as error estimate.
    """
    prev = None
    diff_prev = math.inf
    deg = 32
    while deg <= deg_max:
        prim = Chebyshev.interpolate(f, deg, domain=[a, b]).integ()
        val = float(prim(b) - prim(a))
        if prev is not None:
            diff = abs(val - prev)
            if diff <= tol * abs(val):
                return val, diff
            if diff > 0.25 * diff_prev:
                return val, max(diff, diff_prev)
            diff_prev = diff
        prev = val
        deg *= 2
    raise ConvergenceError(f"Chebyshev quadrature on [{a:g}, {b:g}] did not settle at degree {deg_max}")


def moment_integral(n, d, t_max=None):
    """``int_0^T* e_q(-t) t^n dt`` by Chebyshev quadrature on eight panels;
    returns ``(value, error)``.

    The integrand is entire, so the interpolants converge geometrically;
    each panel is evaluated in one vectorized call of the series kernel.
    """
    if t_max is None:
        t_max = find_quadrature_cutoff(d)

    def f(t):
        return eq_real(-t, d) * t ** n

    edges = np.linspace(0.0, t_max, 9)
    parts = [_panel_integral(f, a, b, 1e-14) for a, b in zip(edges[:-1], edges[1:])]
    val = math.fsum(v for v, _ in parts)
    err = sum(e for _, e in parts)
    # beyond T* the integrand is below the threshold over at least one dilation cell
    tail = _TSTAR_THRESHOLD * t_max ** n * (d.q ** 2 - 1.0) * t_max
    return val, err + tail


def gamma_q(d, method="auto"):
    """The constant ``Gamma_q[1] = int_0^inf e_q(-t) dt``.

    ``method="quadrature"`` integrates up to the cutoff of
    :func:`find_quadrature_cutoff` and raises when the ordinary integral does
    not converge; ``"continuation"`` returns the closed form of
    :func:`gamma_q_continuation`; ``"auto"`` tries quadrature first.
    """
    if method not in ("auto", "quadrature", "continuation"):
        raise DomainError(f"unknown method {method!r}")
    if method in ("auto", "quadrature"):
        try:
            t_max = find_quadrature_cutoff(d)
        except GammaQuadratureError:
            if method == "quadrature":
                raise
        else:
            val, err = moment_integral(0, d, t_max)
            if val <= 0.0:
                raise GammaQuadratureError(f"non-positive quadrature value {val!r} at q={d.q}")
            return QGamma(float(val), float(err), t_max, "quadrature")
    return QGamma(gamma_q_continuation(d), 0.0, math.inf, "continuation")


# product forms


def _product_with_tail(x, zeros, d):
    zeros = np.asarray(zeros, dtype=float)
    if zeros.size == 0:
        raise DomainError("at least one zero is required")
    if np.any(np.diff(zeros) <= 0.0) or zeros[0] <= 0.0:
        raise DomainError("zeros must be positive and strictly ascending")
    x = np.asarray(x, dtype=float)
    xr = x[..., None] / zeros
    prod = np.prod(1.0 - xr * xr, axis=-1)
    # zeros beyond the list, spaced asymptotically by the factor q^4
    ratio = d.q ** 4
    z = zeros[-1]
    log_tail = np.zeros_like(x)
    sign = np.ones_like(x)
    for _ in range(2000):
        z *= ratio
        u = (x / z) ** 2
        f = 1.0 - u
        log_tail += np.log(np.abs(f))
        sign *= np.sign(f)
        if np.all(u < 1e-18):
            break
    return prod * sign * np.exp(log_tail)


def barsin_product(x, zeros, d):
    """Barred sine from its zeros: ``x prod_n (1 - (x/pi_q(n))^2)``.

    ``zeros`` lists ``pi_q(1..M)``; the factors for ``n > M`` use zeros
    extrapolated with the asymptotic ratio ``q^4`` (a log-sum tail).
    """
    out = np.asarray(x, dtype=float) * _product_with_tail(x, zeros, d)
    return float(out) if np.ndim(out) == 0 else out


def barcos_product(x, half_zeros, d):
    """Barred cosine from its zeros ``pi_q(1/2), pi_q(3/2), ...``; equals 1 at 0."""
    out = _product_with_tail(x, half_zeros, d)
    return float(out) if np.ndim(out) == 0 else out


def factorization_gap(x, N, d):
    """``|ebar_q(x) - (1 +. x/[N])^N|`` for the finite-product approximation."""
    approx = q_binomial_eval_product(1.0, x / q_number(N, d), N, d)
    return abs(float(eqbar_real(x, d)) - approx)
