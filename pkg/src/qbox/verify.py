"""Acceptance suite shared by ``qbox verify`` and the test-suite.

Each criterion is a function returning a :class:`CriterionResult` made of
individual :class:`Check` rows. A criterion passes when all of its checks
pass. Criterion 11 is diagnostic and does not gate the exit status.
"""

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import classical, propagator, qoperators as ops, spectrum
from .qcore import (
    Deformation,
    PhysicalConfig,
    q_binomial_eval_product,
    q_binomial_eval_sum,
    q_factorial,
    q_number,
)
from .qfunctions import (
    barsin_q,
    eq_exp,
    factorization_gap,
    barsin_product,
    gamma_q,
    gamma_q_continuation,
    moment_integral,
    series_coefficients,
)

REFERENCE_PI_Q = (5.28, 30.0, 155.0, 787.0)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    checks: tuple
    gating: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def _le(name, value, threshold, detail=""):
    value = float(value)
    return Check(name, bool(value <= threshold), value, float(threshold), detail)


def _sig3(x):
    return float(f"{x:.3g}")


def _rel(a, b):
    return abs(a - b) / abs(b)


# 1


def criterion_1():
    d = Deformation(1.5)
    t0 = time.perf_counter()
    vals = [spectrum.pi_q(n, d) for n in (1, 2, 3, 4)]
    elapsed = time.perf_counter() - t0
    checks = []
    for n, (v, ref) in enumerate(zip(vals, REFERENCE_PI_Q), start=1):
        ok = _sig3(v) == ref
        checks.append(Check(f"pi_q({n}) at q=1.5 rounds to {ref:g}", ok, v, ref, f"{v:.12g}"))
    checks.append(_le("runtime of pi_q(1..4) [s]", elapsed, 1.0))
    return CriterionResult(1, "pi_q levels at q=1.5", tuple(checks), extra={"table": list(zip((1, 2, 3, 4), vals))})


# 2


def criterion_2(q=1.0 + 1e-4):
    d = Deformation(q)
    cfg = PhysicalConfig(d)
    checks = []
    dz = max(abs(spectrum.pi_q(n, d) - math.pi * n) for n in range(1, 6))
    checks.append(_le("max |pi_q(n) - pi n|, n <= 5", dz, 1e-2))
    levels = spectrum.box_spectrum(5, cfg)
    de = max(_rel(e.E_n, (e.n * math.pi) ** 2 / 2.0) for e in levels)
    checks.append(_le("max rel. error of E_n vs n^2 pi^2/2", de, 1e-3))
    xs = np.linspace(-2.0, 2.0, 21)
    X, XP = np.meshgrid(xs, xs)
    K = propagator.kernel_grid(X, XP, 1.0, cfg)
    G = cmath.sqrt(1.0 / (2j * math.pi)) * np.exp(1j * (X - XP) ** 2 / 2.0)
    dk = float(np.max(np.abs(K - G) / np.abs(G)))
    checks.append(_le("max rel. error of kernel vs Gaussian, x,x' in [-2,2], T=1", dk, 1e-3))
    dh = max(
        abs(classical.hamiltonian(x, p, cfg) - p * p / 2.0)
        for x in (-1.0, 1.0)
        for p in (-1.0, 0.0, 1.0)
    )
    checks.append(_le("max |H(x,p) - p^2/2m| on unit samples", dh, 1e-4))
    return CriterionResult(2, f"Classical limits at q={q:g}", tuple(checks))


# 3


def _rel_series_err(lhs, rhs, *parts):
    # measured against the largest coefficient among the operands: composed
    # operators like D x - q x D cancel terms of size [n] down to q^-n, and
    # that cancellation is a floating-point floor, not an algebra error
    scale = max([float(np.max(np.abs(p.coeffs))) for p in (rhs,) + parts] + [1e-300])
    return lhs.max_abs_diff(rhs) / scale


def _log_peak_term(c, x):
    # largest |c_m| x^m, computed in log space
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c)) + np.arange(c.size) * math.log(max(abs(x), 1e-300))
    return float(np.exp(np.max(logs)))


def criterion_3():
    checks = []
    worst = {}

    def note(key, err):
        worst[key] = max(worst.get(key, 0.0), err)

    rng = np.random.default_rng(7)
    for q in (1.1, 1.5, 2.0):
        d = Deformation(q)
        for n in range(0, 13):
            m = ops.PowerSeries.monomial(n)
            a = ops.apply_hat_partial(m.mul_x(), d)
            b = ops.apply_hat_partial(m, d).mul_x().scale(q)
            note("hat-partial x - q x hat-partial = 1", _rel_series_err(a - b, m, a, b))
            for s in (1, -1):
                a = ops.series_D(m.mul_x(), d)
                b = ops.series_D(m, d).mul_x().scale(q ** s)
                note("D x - q^(+-1) x D = q^(-+N)", _rel_series_err(a - b, ops.apply_q_power_N(m, -s, d), a, b))
            if n >= 1:
                xs = np.array([0.3, 0.7, 1.3])
                grid = ops.apply_D(lambda x, n=n: np.asarray(x) ** n, xs, d)
                exact = q_number(n, d) * xs ** (n - 1)
                note("D x^n = [n] x^(n-1)", float(np.max(np.abs(grid - exact) / np.abs(exact))))
            lhs = ops.series_D(ops.series_D(m, d), d)
            rhs = ops.apply_gauss_weight(
                ops.series_Dbar(ops.series_Dbar(ops.apply_gauss_weight(m, -1, d), d), d), +1, d
            )
            note("D^2 = q^(N(N-1)/2) Dbar^2 q^(-N(N-1)/2)", _rel_series_err(lhs, rhs) if n >= 2 else lhs.max_abs_diff(rhs))
            if n <= 10:
                half = lambda p: ops.apply_number(p) + p.scale(0.5)  # noqa: E731
                x2 = lambda p: p.mul_x(2)  # noqa: E731
                d2 = lambda p: ops.series_D(ops.series_D(p, d), d)  # noqa: E731
                a, b = half(x2(m)), x2(half(m))
                note("[N + 1/2, x^2] = 2 x^2", _rel_series_err(a - b, x2(m).scale(2.0), a, b))
                if n >= 2:
                    a, b = half(d2(m)), d2(half(m))
                    note("[N + 1/2, D^2] = -2 D^2", _rel_series_err(a - b, d2(m).scale(-2.0), a, b))
                a, b = d2(x2(m)), x2(d2(m))
                single = m.map_degree(lambda k: q_number(2.0 * (k + 0.5), d))
                product = m.map_degree(lambda k: q_number(2, d) * q_number(2.0 * k + 1.0, d))
                note("[D^2, x^2] = [2(N + 1/2)]", _rel_series_err(a - b, single, a, b))
                note("[D^2, x^2] = [2][2N + 1]", _rel_series_err(a - b, product, a, b))
        for N in range(0, 13):
            x, y = rng.uniform(-1.5, 1.5, 2)
            note("q-binomial sum = product",
                 _rel(q_binomial_eval_sum(x, y, N, d), q_binomial_eval_product(x, y, N, d))
                 if q_binomial_eval_product(x, y, N, d) != 0 else 0.0)
            if N <= 11:
                lhs = q_binomial_eval_product(x, y, N + 1, d)
                rhs = (x + q ** N * y) * q_binomial_eval_product(x, y / q, N, d)
                via_sum = q_binomial_eval_sum(x, y, N + 1, d)
                note("recursion for (x +. y)^(N+1)", max(_rel(lhs, rhs), _rel(via_sum, rhs)))
    for key, err in worst.items():
        checks.append(_le(key, err, 1e-12))
    return CriterionResult(3, "Algebra suite (degree <= 12, q in {1.1, 1.5, 2})", tuple(checks))


# 4


def criterion_4():
    checks = []
    err = 0.0
    for q in (1.2, 1.5):
        d = Deformation(q)
        for x in np.linspace(-5.0, 5.0, 41):
            a = complex(eq_exp(1j * x, d).value)
            for s in (1, -1):
                b = complex(eq_exp(-1j * q ** s * x, d).value)
                err = max(err, abs((a * b).real - 1.0))
    checks.append(_le("max |Re e_q(ix) e_q(-i q^(+-1) x) - 1|, |x| <= 5, q in {1.2, 1.5}", err, 1e-9))
    err = 0.0
    for q in (1.00001, 1.01, 1.05):
        d = Deformation(q)
        g = gamma_q(d, "quadrature")
        for n in range(5):
            v, _ = moment_integral(n, d, g.t_max)
            err = max(err, _rel(v, q_factorial(n, d) * g.gamma1))
    checks.append(_le("max rel. error of int e_q(-t) t^n dt vs [n]! Gamma_q[1], n <= 4, q in {1.00001, 1.01, 1.05}", err, 1e-8))
    d = Deformation(1.5)
    gap = max(factorization_gap(x, 200, d) for x in (-2.0, -1.0, 0.5, 1.0, 1.7))
    checks.append(_le("max |ebar_q(x) - (1 +. x/[N])^N| at N=200, q=1.5", gap, 1e-6))
    zeros = [spectrum.pi_q(n, d) for n in range(1, 13)]
    xs = np.linspace(0.0, zeros[3], 400)
    ser = barsin_q(xs, d)
    prod = barsin_product(xs, zeros, d)
    c = series_coefficients("barsin", 200, d)
    peak = np.array([_log_peak_term(c, x) for x in xs])
    err = float(np.max(np.abs(ser - prod) / np.maximum(peak, 1e-300)))
    checks.append(_le("barsin_q series vs product on [0, pi_q(4)] (relative to peak term)", err, 1e-8))
    return CriterionResult(4, "Special-function identities", tuple(checks))


# 5


def criterion_5():
    checks = []
    err = 0.0
    rng = np.random.default_rng(11)
    for q in (1.1, 1.5, 2.0):
        d = Deformation(q)
        for deg in (0, 1, 3, 6, 9):
            g = ops.PowerSeries(rng.uniform(-1.0, 1.0, deg + 1))
            f = ops.series_D(g, d)
            for a, b in ((0.0, 1.0), (0.25, 2.0)):
                v = ops.q_integral(f, a, b, d).value
                err = max(err, abs(v - (g(b) - g(a))) / max(abs(g(b) - g(a)), 1.0))
    checks.append(_le("Jackson integral of Dg vs g(b) - g(a) on polynomials", err, 1e-12))
    d = Deformation(1.0 + 1e-5)
    v = ops.q_integral(lambda x: np.asarray(x) ** 2, 0.0, 1.0, d, cap=4_000_000).value
    checks.append(_le("|int_0^1 x^2 - 1/3| at q = 1+1e-5", abs(v - 1.0 / 3.0), 1e-4))
    return CriterionResult(5, "Jackson integral", tuple(checks))


# 6


def criterion_6():
    d = Deformation(1.5)
    cfg = PhysicalConfig(d)
    L = cfg.box_length
    grid = L * np.exp(-np.arange(0, 60) * d.log_q / 4.0)
    checks = []
    e1 = e2 = e3 = e4 = 0.0
    for n in range(1, 5):
        S = spectrum.eigenfunction(n, "Sbar", cfg)
        k = S.k_n
        dense = np.linspace(L / 400, L, 400)
        smax = float(np.max(np.abs(S(np.concatenate([grid, dense])))))
        dbar2 = np.array([ops.apply_Dbar(lambda x: ops.apply_Dbar(S, x, d), x, d) for x in grid])
        e1 = max(e1, float(np.max(np.abs(dbar2 + k * k * S(grid)))) / smax)
        c = series_coefficients("barsin", 400, d)
        z = spectrum.pi_q(n, d)
        peak = _log_peak_term(c, z)
        e2 = max(e2, abs(float(barsin_q(z, d))) / peak)
        d2 = np.array([ops.apply_D(lambda x: ops.apply_D(S, x, d), x, d) for x in grid])
        e3 = max(e3, float(np.max(np.abs(d2 + k * k / d.q * S(grid / d.q ** 2)))) / smax)
        e4 = max(e4, abs(float(S(L))) / smax)
    checks.append(_le("|Dbar^2 Sbar_n + k_n^2 Sbar_n| / max|Sbar_n|, n <= 4", e1, 1e-8))
    checks.append(_le("|barsin_q(pi_q(n))| / peak term, n <= 4", e2, 1e-9))
    checks.append(_le("|D^2 Sbar_n(x) + q^-1 k_n^2 Sbar_n(q^-2 x)| / max|Sbar_n|", e3, 1e-10))
    checks.append(_le("|Sbar_n(L)| / max|Sbar_n|", e4, 1e-9))
    return CriterionResult(6, "Spectral residuals at q=1.5", tuple(checks))


# 7


def criterion_7():
    checks = []
    d = Deformation(1.01)
    table = spectrum.lagrange_table(d)
    err = max(_rel(spectrum.pi_q_series(n, table), spectrum.pi_q(n, d)) for n in (1, 2, 3))
    checks.append(_le("pi_q_series vs pi_q at q=1.01, n <= 3 (relative)", err, 1e-6))
    err = 0.0
    for q in (1.01, 1.1, 1.5, 2.0, 3.0):
        t = spectrum.lagrange_table(Deformation(q))
        a = np.zeros(8)
        a[1], a[3], a[5], a[7] = t.a_coeffs
        b = spectrum.series_reversion(a, 7)
        for got, k in zip(t.b_coeffs, (1, 3, 5, 7)):
            err = max(err, abs(got - b[k]) / max(abs(b[k]), 1e-300))
    checks.append(_le("closed-form b_k vs generic series reversion, q in {1.01..3}", err, 1e-12))
    b3 = spectrum.lagrange_table(Deformation(1.5)).b_coeffs[1]
    checks.append(_le("|b_3(1.5) - 0.0626565|", abs(b3 - 0.0626565), 1e-6))
    return CriterionResult(7, "Lagrange inversion", tuple(checks))


# 8


def criterion_8():
    d = Deformation(1.5)
    cfg = PhysicalConfig(d)
    exact = propagator.dilation_pair_value(1.0, cfg)
    expected = cmath.sqrt(cfg.m_q / (2.0 * math.pi * cfg.hbar)) * cmath.exp(-1j * math.pi / 4.0) / gamma_q_continuation(d)
    vals = []
    for x in np.linspace(0.5, 2.0, 16):
        for xp in (d.q * x, x / d.q):
            vals.append(propagator.kernel(propagator.KernelRequest(x, xp, 1.0, cfg)).value)
    vals = np.array(vals)
    checks = [
        _le("max |K(q^(+-1) x, x; 1) - closed form|", float(np.max(np.abs(vals - expected))), 1e-10),
        _le("variation over x in [0.5, 2]", float(np.max(np.abs(vals - vals[0]))), 1e-10),
        _le("|dilation_pair_value - closed form|", abs(exact - expected), 1e-10),
    ]
    g1 = propagator.short_time_kernel_check(1.0, 0.95, 1.0, cfg).gap
    g2 = propagator.short_time_kernel_check(1.0, 0.95, 0.5, cfg).gap
    ratio = g2 / g1
    checks.append(Check("short-time gap ratio under T -> T/2", abs(ratio - 4.0) <= 0.8, ratio, 4.0, "expected 4 +- 20%"))
    return CriterionResult(8, "Kernel special value", tuple(checks))


# 9


def criterion_9():
    d = Deformation(1.5)
    cfg = PhysicalConfig(d)
    A = 1.0
    omega, X, V, sheet = classical.sine_solution(A, cfg)
    period = 2.0 * math.pi / omega
    ts = np.linspace(0.0, period, 1000)[1:]
    res = 0.0
    for t in ts:
        x, v, s = float(X(t)), float(V(t)), int(sheet(t))
        if x == 0.0:
            continue
        res = max(res, abs(-omega * omega * x - classical.eom_rhs(x, v, cfg, s)))
    checks = [_le("sine-solution EOM residual over one period", res, 1e-8)]
    tr = classical.integrate_trajectory(classical.TrajectoryState(0.0, 0.0, float(V(0.0)), 1), 10 * period, period / 200, cfg)
    checks.append(Check("trajectory completed", tr.completed, float(len(tr.states)), 2001.0, tr.reason))
    checks.append(_le("max |x(t) - A sin(omega t)| over 10 periods", float(np.max(np.abs(tr.x - X(tr.t)))), 1e-6))
    checks.append(_le("relative drift of C over 10 periods", tr.C_drift, 1e-6))
    E = 1.0
    curve = classical.equi_energy_trajectory(E, cfg, (0.0, 12.0 * classical.p0(E, cfg)), 801)
    over = max(p.x for p in curve.points) - curve.x_max
    checks.append(_le("max x - x_max over H=E points", over, 1e-12))
    first = curve.stationary_points[0]
    err = max(abs(first.x - curve.x_max), abs(first.p - math.pi * curve.p0 / 2.0))
    on_curve = abs(classical.hamiltonian(first.x, first.p, cfg) - E)
    checks.append(_le("first stationary point vs (x_max, pi p0/2), incl. |H - E|", max(err, on_curve), 1e-8))
    return CriterionResult(9, "Classical dynamics", tuple(checks))


# 10


def criterion_10():
    q = 1.2
    cfg = PhysicalConfig(Deformation(q))

    def psi(x):
        return math.pi ** -0.25 * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2)

    rep = ops.uncertainty_check(ops.GridFunction(psi), cfg)
    closed = 0.5 * cfg.hbar * math.sqrt(2.0 / (1.0 + q * q))
    checks = [
        Check(
            "dp dx >= (hbar/2) sqrt(2/(1+q^2)) - 1e-9",
            rep.dp * rep.dx >= closed - 1e-9,
            rep.dp * rep.dx,
            closed,
            f"lower bound {closed:.12g}",
        ),
        _le("|bound - closed-form overlap bound|", abs(rep.bound - closed), 1e-8),
    ]
    return CriterionResult(10, "Uncertainty relation (Gaussian, q=1.2)", tuple(checks))


# 11


def criterion_11():
    rep = spectrum.gram_matrix(4, PhysicalConfig(Deformation(1.5)))
    diag = float(np.max(np.abs(np.diag(rep.matrix) - 1.0)))
    off = rep.matrix - np.diag(np.diag(rep.matrix))
    near = spectrum.gram_matrix(4, PhysicalConfig(Deformation(1.0 + 1e-5))).matrix
    off_near = float(np.max(np.abs(near - np.diag(np.diag(near)))))
    checks = (
        _le("Gram diagonal - 1 at q=1.5", diag, 1e-8),
        _le("Gram off-diagonals at q=1+1e-5", off_near, 1e-3),
    )
    extra = {
        "off_diagonal_q1.5": off.tolist(),
        "bracket_q1.5": rep.bracket.tolist(),
        "identity_residual_q1.5": float(np.max(np.abs(rep.identity_residual))),
    }
    return CriterionResult(11, "Orthogonality diagnostic (non-gating)", checks, gating=False, extra=extra)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_acceptance(numbers=None, limit_q=None):
    """Run the selected criteria (all by default) in order."""
    out = []
    for n in sorted(numbers or CRITERIA):
        if n not in CRITERIA:
            raise KeyError(f"no acceptance criterion {n}")
        if n == 2 and limit_q is not None:
            out.append(criterion_2(limit_q))
        else:
            out.append(CRITERIA[n]())
    return out


def format_report(results):
    lines = []
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        suffix = "" if r.gating else " [non-gating]"
        lines.append(f"[{tag}] criterion {r.number}: {r.title}{suffix}")
        for c in r.checks:
            mark = "ok  " if c.passed else "FAIL"
            detail = f" ({c.detail})" if c.detail else ""
            lines.append(f"    {mark} {c.name}: {c.value:.6g} (limit {c.threshold:.3g}){detail}")
        if r.number == 1 and "table" in r.extra:
            lines.append("    n   pi_q(n) at q=1.5        reference")
            for (n, v), p in zip(r.extra["table"], REFERENCE_PI_Q):
                lines.append(f"    {n}   {v:<22.17g}  {p:g}")
        for key, val in r.extra.items():
            if key != "table":
                lines.append(f"    {key}: {np.array2string(np.asarray(val), precision=4)}")
    return "\n".join(lines)


def all_gating_passed(results):
    return all(r.passed for r in results if r.gating)
