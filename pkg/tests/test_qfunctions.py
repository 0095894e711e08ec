import cmath
import math

import numpy as np
import pytest

from qbox.errors import DomainError, GammaQuadratureError, SeriesTruncationError
from qbox.qcore import Deformation, q_binomial_eval_sum, q_factorial, q_number
from qbox.qfunctions import (
    barcos_product,
    barcos_q,
    barsin_product,
    barsin_q,
    cos_q,
    eq_exp,
    eq_exp_bar,
    eq_real,
    eqbar_real,
    factorization_gap,
    gamma_q,
    gamma_q_continuation,
    moment_integral,
    q_trig,
    series_coefficients,
    sin_q,
)
from qbox.qoperators import apply_D, apply_Dbar
from qbox.spectrum import pi_q

# reference values from tests/oracles/generate.py (mpmath, 60 digits)
ORACLE_REAL = [
    ("e", 1.5, -50.0, -288.39578580167514135),
    ("e", 1.1, -10.0, 0.000057875322530732215136),
    ("e", 1.5, 3.0, 13.990215438353406352),
    ("ebar", 1.5, 2.0, 4.5583049643467850564),
    ("ebar", 1.3, -7.0, -0.00013040696249322577339),
]

ORACLE_TRIG = [
    (sin_q, 1.5, 5.28, -4.2694584241476233909),
    (cos_q, 1.5, 5.28, 1.1151361721690404269),
    (sin_q, 1.2, 2.0, 0.93593066840335064422),
    (cos_q, 1.2, 2.0, -0.44280194731703208606),
    (barsin_q, 1.5, 3.0, 2.0106450865296923074),
    (barcos_q, 1.2, math.pi, -1.9198781675854072079),
]


@pytest.mark.parametrize("family,q,x,ref", ORACLE_REAL)
def test_real_axis_against_oracle(family, q, x, ref):
    d = Deformation(q)
    rep = (eq_exp if family == "e" else eq_exp_bar)(x, d)
    assert rep.value == pytest.approx(ref, rel=1e-11)
    vec = (eq_real if family == "e" else eqbar_real)(np.array([x]), d)
    assert vec[0] == pytest.approx(ref, rel=1e-11)


def test_complex_argument_against_oracle(d15):
    rep = eq_exp(1 + 2j, d15)
    assert abs(rep.value - complex(-0.78992426440168382574, 3.0021456602076779191)) < 1e-13


@pytest.mark.parametrize("fn,q,x,ref", ORACLE_TRIG)
def test_trig_against_oracle(fn, q, x, ref):
    assert fn(x, Deformation(q)) == pytest.approx(ref, rel=1e-12)


def test_eq_negative_axis_does_not_decay(d15):
    # e_q has order zero, so it is unbounded along the negative axis too
    vals = [abs(eq_exp(-t, d15).value) for t in (10.0, 50.0, 200.0)]
    assert vals[-1] > 1.0


@pytest.mark.xfail(strict=True, reason="e_q(-50) = -288.4 at q=1.5: no decay on the negative axis")
def test_eq_decay_claim_literal(d15):
    assert abs(eq_exp(-50.0, d15).value) < 1e-3


class TestExpBasics:
    def test_zero(self, d15):
        assert eq_exp(0.0, d15).value == 1.0
        assert eq_exp_bar(0.0, d15).value == 1.0

    def test_limits(self):
        d = Deformation(1 + 1e-8)
        assert eq_exp(1.0, d).value == pytest.approx(math.e, abs=1e-6)
        assert eq_exp_bar(1.0, d).value == pytest.approx(math.e, abs=1e-6)

    def test_bar_coefficients(self, d15):
        c = series_coefficients("ebar", 30, d15)
        n = np.arange(31)
        ref = np.array([1.5 ** (-k * (k - 1) / 2) / q_factorial(k, d15) for k in n])
        assert np.allclose(c, ref, rtol=1e-13, atol=0)

    def test_imaginary_axis_parts(self, d15):
        for x in (-3.3, 0.4, 2.0, 7.5):
            z = eq_exp(1j * x, d15).value
            zc = eq_exp(complex(1e-300, x), d15).value  # general complex route
            assert abs(z - complex(cos_q(x, d15), sin_q(x, d15))) <= 1e-12 * max(abs(z), 1)
            assert abs(z - zc) <= 1e-12 * max(abs(z), 1)

    @pytest.mark.parametrize("q", [1.2, 1.5])
    @pytest.mark.parametrize("s", [1, -1])
    def test_unit_real_part(self, q, s):
        d = Deformation(q)
        for x in np.linspace(-5, 5, 21):
            v = eq_exp(1j * x, d).value * eq_exp(-1j * q ** s * x, d).value
            assert abs(v.real - 1.0) <= 1e-9

    @pytest.mark.parametrize("a", [-1.3, 0.7, 2.0])
    def test_D_eigenfunction(self, d15, a):
        for x in (0.3, 1.1, -0.8):
            lhs = apply_D(lambda t: eq_real(a * np.asarray(t), d15), x, d15)
            assert lhs == pytest.approx(a * eq_real(a * x, d15), rel=1e-11)

    @pytest.mark.parametrize("a", [-1.3, 0.7, 2.0])
    def test_Dbar_eigenfunction(self, d15, a):
        for x in (0.3, 1.1, -0.8):
            lhs = apply_Dbar(lambda t: eqbar_real(a * np.asarray(t), d15), x, d15)
            assert lhs == pytest.approx(a * eqbar_real(a * x, d15), rel=1e-11)

    def test_not_multiplicative(self, d15):
        gap = abs(eq_exp(1.0, d15).value ** 2 - eq_exp(2.0, d15).value)
        assert gap > 1e-3

    @pytest.mark.parametrize("x,y", [(0.3, -0.9), (1.0, 1.0), (-0.6, 0.2), (-1.0, -1.0)])
    def test_product_expansion(self, d15, x, y):
        lhs = eq_exp(x, d15).value * eq_exp(y, d15).value
        rhs = math.fsum(q_binomial_eval_sum(x, y, N, d15) / q_factorial(N, d15) for N in range(50))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)

    def test_truncation_error_carries_partial(self, d15):
        with pytest.raises(SeriesTruncationError) as info:
            eq_exp(40.0, d15, cap=8)
        assert info.value.terms_used == 8
        assert info.value.partial is not None

    def test_report_fields(self, d15):
        rep = eq_exp(-20.0, d15)
        assert rep.terms_used <= 512
        assert rep.cancellation_ratio >= 1.0
        assert rep.reliable


class TestTrig:
    def test_origin(self, d15):
        t = q_trig(0.0, d15)
        assert t.sin_q.value == 0.0 and t.barsin_q.value == 0.0
        assert t.cos_q.value == 1.0 and t.barcos_q.value == 1.0

    @pytest.mark.parametrize("fn,sign", [(sin_q, -1), (barsin_q, -1), (cos_q, 1), (barcos_q, 1)])
    def test_parity(self, d15, fn, sign):
        x = np.linspace(0.1, 9.0, 15)
        assert np.array_equal(fn(-x, d15), sign * fn(x, d15))

    def test_barsin_near_first_zero(self, d15):
        rep = q_trig(5.28, d15).barsin_q
        assert abs(rep.value) <= 1e-2 * rep.max_term_magnitude

    def test_sin_not_zero_at_first_barsin_zero(self, d15):
        assert q_trig(5.28, d15).sin_q.value == pytest.approx(-4.2694584, abs=1e-6)

    def test_unreliable_flag(self):
        rep = q_trig(40.0, Deformation(1.00001))
        assert not rep.sin_q.reliable
        assert not rep.reliable

    def test_barcos_loses_odd_symmetry(self):
        assert abs(barcos_q(math.pi, Deformation(1.2)) + 1.0) > 0.5


class TestGamma:
    def test_limit(self):
        g = gamma_q(Deformation(1 + 1e-5), "quadrature")
        assert g.method == "quadrature"
        assert g.gamma1 == pytest.approx(1.0, abs=1e-4)

    def test_large_q_is_continuation(self, d15):
        g = gamma_q(d15)
        assert g.method == "continuation"
        assert g.gamma1 > 0 and abs(g.gamma1 - 1.0) > 1e-2
        assert g.gamma1 == pytest.approx(2 * math.log(1.5) / (1.5 - 1 / 1.5), rel=1e-15)

    def test_quadrature_diverges_at_large_q(self, d15):
        with pytest.raises(GammaQuadratureError):
            gamma_q(d15, "quadrature")

    @pytest.mark.parametrize("q", [1.00001, 1.01, 1.05])
    def test_quadrature_matches_continuation(self, q):
        d = Deformation(q)
        g = gamma_q(d, "quadrature")
        assert g.gamma1 == pytest.approx(gamma_q_continuation(d), rel=1e-10)

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_moment_identity(self, n):
        d = Deformation(1.01)
        g = gamma_q(d, "quadrature")
        v, _ = moment_integral(n, d, g.t_max)
        assert v == pytest.approx(q_factorial(n, d) * g.gamma1, rel=1e-8)
        assert g.gamma(n + 1, d) == pytest.approx(q_factorial(n, d) * g.gamma1)

    def test_unknown_method(self, d15):
        with pytest.raises(DomainError):
            gamma_q(d15, "magic")


class TestProducts:
    @pytest.fixture
    def zeros(self, d15):
        return [pi_q(n, d15) for n in range(1, 5)]

    def test_origin_and_slope(self, d15, zeros):
        assert barsin_product(0.0, zeros, d15) == 0.0
        h = 1e-7
        assert barsin_product(h, zeros, d15) / h == pytest.approx(1.0, rel=1e-10)

    def test_exact_zero(self, d15, zeros):
        assert barsin_product(zeros[0], zeros, d15) == 0.0

    def test_matches_series(self, d15, zeros):
        ref = q_trig(3.0, d15).barsin_q.value
        assert barsin_product(3.0, zeros, d15) == pytest.approx(ref, rel=1e-6)

    def test_barcos(self, d15):
        half = [pi_q(n - 0.5, d15) for n in range(1, 13)]
        assert barcos_product(0.0, half, d15) == 1.0
        assert barcos_product(half[0], half, d15) == 0.0
        xs = np.linspace(0.0, half[3], 50)
        c = series_coefficients("barcos", 200, d15)
        for x in xs:
            peak = max(abs(ci) * x ** k for k, ci in enumerate(c) if ci != 0) if x > 0 else 1.0
            assert abs(barcos_product(x, half, d15) - barcos_q(x, d15)) <= 1e-8 * peak

    @pytest.mark.parametrize("bad", [[], [3.0, 2.0], [-1.0, 2.0]])
    def test_rejects_bad_zero_lists(self, d15, bad):
        with pytest.raises(DomainError):
            barsin_product(1.0, bad, d15)

    @pytest.mark.parametrize("x", [-2.0, -0.5, 1.0, 2.0])
    def test_factorization_limit(self, d15, x):
        gaps = [factorization_gap(x, N, d15) for N in (5, 10, 20, 40)]
        assert all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(gaps, gaps[1:]))
        assert factorization_gap(x, 200, d15) <= 1e-6
