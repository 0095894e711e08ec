"""Hot loops with a numba backend and a pure-numpy fallback.

The backend is chosen once at import from ``QBOX_BACKEND`` (``numba`` or
``numpy``). When unset, numba is used if it imports. ``use_backend`` switches
at runtime, which the tests and the benchmark use to compare the two.
"""

import math
import os
from functools import lru_cache

import numpy as np

from ._dd import dd_add, dd_div, dd_mul, dd_mul_d, two_prod

try:
    from . import _numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None
    HAS_NUMBA = False

from . import _numpy

_BACKENDS = {"numpy": _numpy}
if HAS_NUMBA:
    _BACKENDS["numba"] = _numba

_active = None


def use_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for all subsequent kernel calls."""
    global _active
    name = name.strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    if name == "numba" and not HAS_NUMBA:
        raise ImportError("numba backend requested but numba is not installed")
    _active = name


def backend():
    """Name of the active backend."""
    return _active


def available_backends():
    return tuple(_BACKENDS)


use_backend(os.environ.get("QBOX_BACKEND", "numba" if HAS_NUMBA else "numpy"))


def _impl():
    return _BACKENDS[_active]


@lru_cache(maxsize=64)
def ratio_table(q, kind, cap):
    """Double-double reciprocals ``1/[n]`` (``kind="sym"``) or ``1/[n, q^2]``.

    Entry 0 is unused and set to 1. Entries past float overflow of the
    denominator are zero, which cleanly terminates any series using them.
    """
    if kind not in ("sym", "base2"):
        raise ValueError(f"unknown table kind {kind!r}")
    rhi = np.zeros(cap + 1)
    rlo = np.zeros(cap + 1)
    rhi[0] = 1.0
    # run the positive-term recurrences in double-double so the coefficients
    # are as accurate as the summation that uses them
    qih, qil = dd_div(1.0, 0.0, q, 0.0)
    q2h, q2l = two_prod(q, q)
    vh, vl = 1.0, 0.0
    ph, pl = 1.0, 0.0  # q^-(n-1)
    for n in range(1, cap + 1):
        if n > 1:
            if kind == "sym":
                # [n] = q [n-1] + q^-(n-1)
                ph, pl = dd_mul(ph, pl, qih, qil)
                vh, vl = dd_mul_d(vh, vl, q)
                vh, vl = dd_add(vh, vl, ph, pl)
            else:
                # [n, q^2] = q^2 [n-1, q^2] + 1
                vh, vl = dd_mul(vh, vl, q2h, q2l)
                vh, vl = dd_add(vh, vl, 1.0, 0.0)
        if not math.isfinite(vh) or vh > 1e300:
            break
        rhi[n], rlo[n] = dd_div(1.0, 0.0, vh, vl)
    rhi.flags.writeable = False
    rlo.flags.writeable = False
    return rhi, rlo


@lru_cache(maxsize=64)
def kernel_tables(q, cap):
    """Powers ``q^j``, ``q^-j`` and q-numbers ``[n]`` used by the kernel series."""
    ell = math.log(q)
    # keep q^j and [j] finite; the series stops at the table end otherwise
    jmax = min(2 * cap + 2, int(700.0 / ell))
    j = np.arange(jmax, dtype=float)
    pw = np.power(q, j)
    pwinv = np.power(q, -j)
    qn = np.sinh(j * ell) / math.sinh(ell)
    qn[0] = 0.0
    for arr in (pw, pwinv, qn):
        arr.flags.writeable = False
    return pw, pwinv, qn


def series_dd(x, rhi, rlo, parity, alternate, tol):
    """Sum ``sum_n c_n x^n`` with ``c_n = prod_{k<=n} r_k`` in double-double.

    ``parity`` keeps only even (0) or odd (1) powers, -1 keeps all;
    ``alternate`` applies the sign ``(-1)^(n//2)``. Returns the value, the
    number of included terms (-1 when the table ran out first), the largest
    included term magnitude and the sum of included magnitudes.
    """
    x = np.ascontiguousarray(x, dtype=float)
    return _impl().series_dd(x, rhi, rlo, int(parity), bool(alternate), float(tol))


def theta(x, q):
    """``sum_k arctan((1 - q^-2) q^-2k x)`` and its derivative in ``x``."""
    x = np.ascontiguousarray(x, dtype=float)
    ell = math.log(q)
    a = -math.expm1(-2.0 * ell)
    return _impl().theta(x, a, math.exp(-2.0 * ell), ell)


def kernel_series(x, xp, q, beta, tol, cap):
    x = np.ascontiguousarray(x, dtype=float)
    xp = np.ascontiguousarray(xp, dtype=float)
    pw, pwinv, qn = kernel_tables(q, cap)
    return _impl().kernel_series(x, xp, pw, pwinv, qn, float(beta), float(tol))


def rk4_trajectory(x0, v0, h, nsteps, kappa, omega2, mode, xmin):
    """Fixed-step RK4 for ``x'' = -omega2 x`` (mode 0) or the principal-sheet
    equation ``x'' = -kappa^2 x v^4 / (1 + sqrt(1 - (kappa x v)^2))^2`` (mode 1).

    Status is 0 when all steps completed, 1 when the square-root argument went
    negative and 2 when the path reached the coordinate origin.
    """
    return _impl().rk4_trajectory(
        float(x0), float(v0), float(h), int(nsteps), float(kappa), float(omega2), int(mode), float(xmin)
    )


_GL4_A = np.array([[0.25, 0.25 - math.sqrt(3.0) / 6.0], [0.25 + math.sqrt(3.0) / 6.0, 0.25]])


def gauss4_step_matrix(h, omega2):
    """One step of the two-stage Gauss-Legendre method for ``x'' = -omega2 x``.

    The stage equations are linear here, so they are solved once and the step
    is the resulting 2x2 map. The method has order four and conserves
    ``v^2 + omega2 x^2`` up to rounding.
    """
    M = np.array([[0.0, 1.0], [-omega2, 0.0]])
    big = np.eye(4) - h * np.kron(_GL4_A, M)
    rhs = np.kron(np.ones((2, 1)), M)
    stages = np.linalg.solve(big, rhs)
    return np.eye(2) + 0.5 * h * (stages[:2] + stages[2:])


def gauss4_linear(x0, v0, h, nsteps, omega2):
    """Trajectory of ``x'' = -omega2 x`` under the Gauss-Legendre step."""
    R = gauss4_step_matrix(float(h), float(omega2))
    return _impl().linear_propagate(
        float(x0), float(v0), float(R[0, 0]), float(R[0, 1]), float(R[1, 0]), float(R[1, 1]), int(nsteps)
    )
