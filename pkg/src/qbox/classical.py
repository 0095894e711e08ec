"""Effective classical dynamics of the deformed free particle.

Notation used throughout: ``Q = q + 1/q``, ``lam = q - 1/q``,
``kappa = m_q lam / hbar``, ``y = kappa x xdot`` and ``W = sqrt(1 - y^2)``.
The equation of motion has the first integral ``W - 1 = C x^2``, i.e.
``xdot^2 = -(2C + C^2 x^2)/kappa^2``, so every solution is
``x = A sin(omega t + phi)`` with ``omega = 2/(kappa A^2)``. Along such a
solution ``y = sin(2 omega t)`` reaches 1 and the square root changes sign:
half of each period lies on the second sheet ``W = -sqrt(1 - y^2)``. States
therefore carry a ``sheet`` (+1 principal, -1 second).

All of this is an effective model read off from the short-time action;
integrations over many periods are an extrapolation of that model.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import DomainError

_Y_SLACK = 1e-12


def _consts(cfg):
    d = cfg.d
    kappa = cfg.m_q * d.lam / cfg.hbar
    return d.q_plus, d.lam, kappa


def _check_x(x, what):
    if x == 0.0:
        raise DomainError(f"{what} is singular at x = 0")


def _y_and_w(x, xdot, cfg, sheet):
    _, _, kappa = _consts(cfg)
    y = kappa * x * xdot
    if abs(y) > 1.0 + _Y_SLACK:
        raise DomainError(
            f"|m_q (q - 1/q) x xdot / hbar| = {abs(y):.17g} exceeds 1 (arcsine domain) at x={x!r}, xdot={xdot!r}"
        )
    y = max(-1.0, min(1.0, y))
    if sheet not in (1, -1):
        raise DomainError(f"sheet must be +1 or -1, got {sheet!r}")
    return y, sheet * math.sqrt((1.0 - y) * (1.0 + y))


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float
    branch: int = 0
    stationary: bool = False


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    x: float
    xdot: float
    sheet: int = 1


@dataclass(frozen=True)
class Trajectory:
    """Integrated states with the first integral tracked along them."""

    states: tuple
    C: float
    branch: int
    C_values: np.ndarray = field(repr=False)
    C_drift: float
    error_estimate: float
    reason: str
    method: str

    @property
    def t(self):
        return np.array([s.t for s in self.states])

    @property
    def x(self):
        return np.array([s.x for s in self.states])

    @property
    def xdot(self):
        return np.array([s.xdot for s in self.states])

    @property
    def completed(self):
        return self.reason == "completed"


def hamiltonian(x, p, cfg):
    """``H = (hbar^2/2m_q) Q/(lam^2 x^2) * 2 sin^2(p lam x/(Q hbar))``."""
    _check_x(x, "H(x, p)")
    Q, lam, _ = _consts(cfg)
    s = math.sin(p * lam * x / (Q * cfg.hbar))
    return cfg.hbar ** 2 / (2.0 * cfg.m_q) * Q / (lam * x) ** 2 * 2.0 * s * s


def phase_space_lagrangian(p, x, xdot, cfg):
    """``p xdot - (hbar^2/2m_q) Q/(lam^2 x^2) (1 - cos(2 p lam x/(Q hbar)))``."""
    _check_x(x, "L(p, x, xdot)")
    Q, lam, _ = _consts(cfg)
    arg = 2.0 * p * lam * x / (Q * cfg.hbar)
    # 1 - cos(a) = 2 sin^2(a/2) keeps digits for small a
    return p * xdot - cfg.hbar ** 2 / (2.0 * cfg.m_q) * Q / (lam * x) ** 2 * 2.0 * math.sin(0.5 * arg) ** 2


def p0(E, cfg):
    """Slope of the equal-energy curve near the origin, ``sqrt(Q m_q E)``."""
    Q, _, _ = _consts(cfg)
    return math.sqrt(Q * cfg.m_q * E)


def x_max(E, cfg):
    """Turning point ``(hbar/lam) sqrt(Q/(m_q E))``."""
    Q, lam, _ = _consts(cfg)
    return cfg.hbar / abs(lam) * math.sqrt(Q / (cfg.m_q * E))


def xdot_from_p(x, p, cfg):
    """Inverse of the principal momentum branch: ``xdot = sin(2 p lam x/(Q hbar)) / (kappa x)``."""
    _check_x(x, "xdot(x, p)")
    Q, lam, kappa = _consts(cfg)
    return math.sin(2.0 * p * lam * x / (Q * cfg.hbar)) / (kappa * x)


@dataclass(frozen=True)
class EquiEnergyCurve:
    """Points of ``H(x, p) = E`` with ``x >= 0``.

    Each sampled momentum yields one point per branch of
    ``|sin u| = u p0/p`` (``u = p lam x/(Q hbar)``); branch ``j`` has ``u`` in
    ``(j pi, (j + 1) pi)``. Momenta below ``p0`` have no solution and are
    listed in ``skipped``.
    """

    E: float
    p0: float
    x_max: float
    points: tuple
    stationary_points: tuple
    skipped: tuple


def _branch_roots(ratio, j):
    # roots of g(u) = |sin u| - ratio * u on (j pi, (j+1) pi)
    def g(u):
        return abs(math.sin(u)) - ratio * u

    a, b = j * math.pi, (j + 1) * math.pi
    if j == 0:
        # g > 0 just right of 0 when ratio < 1; g(pi) < 0
        if ratio >= 1.0:
            return []
        return [brentq(g, 1e-300 if ratio == 0 else min(1e-8, 0.5 * math.pi), b, xtol=1e-15, rtol=1e-15)]
    # |sin u|/u has a single interior maximum on the branch
    u_peak = brentq(lambda u: math.tan(u) - u, a + 1e-12, a + 0.5 * math.pi - 1e-12, xtol=1e-15)
    if g(u_peak) <= 0.0:
        return []
    return [
        brentq(g, a, u_peak, xtol=1e-15, rtol=1e-15),
        brentq(g, u_peak, b, xtol=1e-15, rtol=1e-15),
    ]


def equi_energy_trajectory(E, cfg, p_range, samples, max_branch=None):
    """Sample the curve ``H(x, p) = E`` for ``p`` in ``p_range``.

    Stationary points of ``x(p)`` with ``x = x_max`` sit at
    ``p = (2j - 1) pi p0/2``; those inside ``p_range`` are emitted with
    ``stationary=True``.
    """
    if not (E > 0.0):
        raise DomainError(f"energy must be positive, got {E!r}")
    p_lo, p_hi = float(p_range[0]), float(p_range[1])
    if not p_lo <= p_hi:
        raise DomainError("p_range must be ordered")
    P0 = p0(E, cfg)
    XM = x_max(E, cfg)
    if max_branch is None:
        max_branch = int(max(abs(p_lo), abs(p_hi)) / (math.pi * P0)) + 1
    pts = []
    skipped = []
    for p in np.linspace(p_lo, p_hi, int(samples)):
        ap = abs(p)
        if ap < P0:
            skipped.append(float(p))
            continue
        ratio = P0 / ap
        found = False
        for j in range(max_branch + 1):
            for u in _branch_roots(ratio, j):
                x = min(XM * abs(math.sin(u)), XM)
                pts.append(PhasePoint(x, float(p), j, False))
                found = True
        if not found:
            skipped.append(float(p))
    stationary = []
    j = 1
    while True:
        ps = (2 * j - 1) * math.pi * P0 / 2.0
        if ps > max(abs(p_lo), abs(p_hi)):
            break
        for sgn in (1.0, -1.0):
            if p_lo <= sgn * ps <= p_hi:
                stationary.append(PhasePoint(XM, sgn * ps, j - 1, True))
        j += 1
    return EquiEnergyCurve(E, P0, XM, tuple(pts), tuple(stationary), tuple(skipped))


def dx_dp_on_curve(x, p, cfg):
    """``dx/dp`` along ``H = E``: ``(x^2/hbar)(lam/Q)/(tan y - y)``, zero where ``tan y`` diverges."""
    Q, lam, _ = _consts(cfg)
    y = p * lam * x / (Q * cfg.hbar)
    return x * x / cfg.hbar * lam / Q * math.cos(y) / (math.sin(y) - y * math.cos(y))


def momentum_branch(x, xdot, n, cfg, sheet=1):
    """``p_n = (hbar/2x)(Q/lam)[arcsin(y) + 2 pi n]``.

    ``sheet=-1`` replaces ``arcsin(y)`` by ``pi - arcsin(y)``, the other
    arcsine branch; that is the momentum on the second sheet of the square
    root.
    """
    _check_x(x, "p_n(x, xdot)")
    y, _ = _y_and_w(x, xdot, cfg, sheet)
    Q, lam, _ = _consts(cfg)
    a = math.asin(y) if sheet == 1 else math.pi - math.asin(y)
    return cfg.hbar / (2.0 * x) * Q / lam * (a + 2.0 * math.pi * n)


def lagrangian_n(x, xdot, n, cfg):
    """Effective Lagrangian on branch ``n``:
    ``(hbar xdot/2x)(Q/lam)[arcsin y + 2 pi n] + (hbar^2/2m_q) Q/(lam^2 x^2) (W - 1)``."""
    _check_x(x, "L_n(x, xdot)")
    y, W = _y_and_w(x, xdot, cfg, 1)
    Q, lam, _ = _consts(cfg)
    # W - 1 = -y^2/(1 + W) avoids cancellation for small y
    w_minus_1 = -y * y / (1.0 + W)
    return (
        cfg.hbar * xdot / (2.0 * x) * Q / lam * (math.asin(y) + 2.0 * math.pi * n)
        + cfg.hbar ** 2 / (2.0 * cfg.m_q) * Q / (lam * x) ** 2 * w_minus_1
    )


def eom_rhs(x, xdot, cfg, sheet=1):
    """Acceleration from the effective equation of motion (branch ``n = 0``).

    ``xddot = -xdot^2/x - 2 W (W - 1)/(kappa^2 x^3)``. On the principal sheet
    this is evaluated as ``-kappa^2 x xdot^4/(1 + W)^2``, the same expression
    without the cancellation between its two terms.
    """
    _check_x(x, "the equation of motion")
    _, _, kappa = _consts(cfg)
    y, W = _y_and_w(x, xdot, cfg, sheet)
    if sheet == 1:
        return -kappa * kappa * x * xdot ** 4 / (1.0 + W) ** 2
    return -xdot * xdot / x - 2.0 * W * (W - 1.0) / (kappa * kappa * x ** 3)


def first_integral(x, xdot, cfg, sheet=1):
    """``C = (W - 1)/x^2``, so that ``xdot^2 = -(2C + C^2 x^2)/kappa^2``.

    On the principal sheet this is computed as ``-kappa^2 xdot^2/(1 + W)``,
    which is also valid at ``x = 0``.
    """
    _, _, kappa = _consts(cfg)
    y, W = _y_and_w(x, xdot, cfg, sheet)
    if sheet == 1:
        return -kappa * kappa * xdot * xdot / (1.0 + W)
    _check_x(x, "the second-sheet first integral")
    return (W - 1.0) / (x * x)


def energy_from_C(C, cfg):
    """``H`` on a state with first integral ``C``: ``-(hbar^2 Q/(2 m_q lam^2)) C``."""
    Q, lam, _ = _consts(cfg)
    return -cfg.hbar ** 2 * Q / (2.0 * cfg.m_q * lam * lam) * C


def sine_solution(A, cfg, t0=0.0):
    """Amplitude, angular frequency and closures ``x(t)``, ``xdot(t)`` of the
    solution ``A sin(omega (t - t0))`` with ``m_q omega A^2/2 = hbar/|q - 1/q|``."""
    _, _, kappa = _consts(cfg)
    omega = 2.0 / (abs(kappa) * A * A)

    def x(t):
        return A * np.sin(omega * (np.asarray(t) - t0))

    def xdot(t):
        return A * omega * np.cos(omega * (np.asarray(t) - t0))

    def sheet(t):
        return np.where(np.cos(2.0 * omega * (np.asarray(t) - t0)) >= 0.0, 1, -1)

    return omega, x, xdot, sheet


def _closest_sheet(x, xdot, cfg, C_ref):
    _, _, kappa = _consts(cfg)
    y = kappa * x * xdot
    if abs(y) > 1.0 + 1e-6:
        return None, None
    y = max(-1.0, min(1.0, y))
    s = math.sqrt((1.0 - y) * (1.0 + y))
    c_plus = -kappa * kappa * xdot * xdot / (1.0 + s)
    if x == 0.0:
        return c_plus, 1
    c_minus = -(1.0 + s) / (x * x)
    if abs(c_minus - C_ref) < abs(c_plus - C_ref):
        return c_minus, -1
    return c_plus, 1


def _run(init, nsteps, h, cfg, method, integrator, C0, kappa):
    if method == "first_integral":
        omega2 = (C0 / kappa) ** 2
        if integrator == "gauss":
            xs, vs = kernels.gauss4_linear(init.x, init.xdot, h, nsteps, omega2)
            return xs, vs, 0
        return kernels.rk4_trajectory(init.x, init.xdot, h, nsteps, kappa, omega2, 0, 0.0)
    A = math.sqrt(-2.0 / C0) if C0 < 0.0 else abs(init.x)
    return kernels.rk4_trajectory(init.x, init.xdot, h, nsteps, kappa, 0.0, 1, 1e-9 * A)


def integrate_trajectory(init, t_end, step, cfg, method="first_integral", n=0, integrator="gauss"):
    """Fixed-step fourth-order integration from ``init`` to ``t_end``.

    ``method="first_integral"`` (default) integrates ``xddot = -(C/kappa)^2 x``
    with ``C`` fixed by the first integral at ``init``; this is the equation
    of motion on both sheets and is regular at ``x = 0``, so the path crosses
    the origin and the branch point ``|y| = 1`` freely. ``method="direct"``
    integrates the principal-sheet equation and stops, with a reason, at the
    branch point or when ``|x|`` drops below ``1e-9`` of the amplitude.

    The first-integral route steps with the two-stage Gauss-Legendre method
    by default (``integrator="rk4"`` selects classical Runge-Kutta). Both are
    fourth order; Gauss-Legendre keeps the state on its orbit to rounding,
    which matters because ``C`` read back from a state near the branch
    point ``|y| = 1`` amplifies any off-orbit error ``e`` to ``sqrt(e)``.
    The direct route always uses Runge-Kutta.

    At every state ``C`` is recomputed from ``(x, xdot)`` on the sheet whose
    value is closest to the initial one; the drift and an error estimate
    from a half-step rerun are recorded.
    """
    if not (step > 0.0):
        raise DomainError(f"step must be positive, got {step!r}")
    if method not in ("first_integral", "direct"):
        raise DomainError(f"unknown method {method!r}")
    if integrator not in ("gauss", "rk4"):
        raise DomainError(f"unknown integrator {integrator!r}")
    if t_end < init.t:
        raise DomainError("t_end must not precede the initial time")
    _, _, kappa = _consts(cfg)
    C0 = first_integral(init.x, init.xdot, cfg, init.sheet)
    nsteps = int(round((t_end - init.t) / step))
    h = (t_end - init.t) / nsteps if nsteps > 0 else step
    xs, vs, status = _run(init, nsteps, h, cfg, method, integrator, C0, kappa)
    xs2, _, status2 = _run(init, 2 * nsteps, 0.5 * h, cfg, method, integrator, C0, kappa)
    common = min(xs.size, (xs2.size + 1) // 2)
    err = float(np.max(np.abs(xs[:common] - xs2[: 2 * common : 2]))) if common else 0.0
    reason = "completed"
    if status == 1:
        reason = f"domain violation: |y| exceeded 1 near t={init.t + (xs.size - 1) * h:.17g}"
    elif status == 2:
        reason = f"reached the coordinate origin near t={init.t + (xs.size - 1) * h:.17g}"
    states = []
    Cs = []
    c_ref = C0
    for i in range(xs.size):
        c, sheet = _closest_sheet(xs[i], vs[i], cfg, c_ref)
        if c is None:
            reason = f"domain violation: |y| exceeded 1 at t={init.t + i * h:.17g}"
            break
        states.append(TrajectoryState(init.t + i * h, float(xs[i]), float(vs[i]), sheet))
        Cs.append(c)
    Cs = np.array(Cs)
    drift = float(np.max(np.abs(Cs - C0)) / abs(C0)) if C0 != 0.0 and Cs.size else 0.0
    return Trajectory(tuple(states), C0, n, Cs, drift, err, reason, method)
