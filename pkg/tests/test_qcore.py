import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbox.errors import DomainError, QOverflowError
from qbox.qcore import (
    Deformation,
    PhysicalConfig,
    q_binomial_coeffs,
    q_binomial_eval_product,
    q_binomial_eval_sum,
    q_factorial,
    q_factorial_base2,
    q_number,
    q_number_base2,
)

Q32 = Fraction(3, 2)


def frac_qnum(n, q=Q32):
    return (q ** n - q ** -n) / (q - 1 / q)


def frac_qfact(n, q=Q32):
    out = Fraction(1)
    for k in range(1, n + 1):
        out *= frac_qnum(k, q)
    return out


class TestDeformation:
    def test_remaps_inverse(self):
        d = Deformation(2.0 / 3.0)
        assert d.q == pytest.approx(1.5, rel=1e-15)
        assert d.requested_q == pytest.approx(2.0 / 3.0)

    @pytest.mark.parametrize("q", [1.0, 0.0, -2.0, math.inf, math.nan])
    def test_rejects(self, q):
        with pytest.raises(DomainError):
            Deformation(q)

    def test_derived_constants(self, d15):
        assert d15.lam == pytest.approx(1.5 - 1 / 1.5, rel=1e-15)
        assert d15.q_plus == pytest.approx(1.5 + 1 / 1.5, rel=1e-15)
        assert d15.lam > 0

    def test_lam_keeps_digits_near_one(self):
        eps = 1e-9
        d = Deformation(1.0 + eps)
        assert d.lam == pytest.approx(2 * eps, rel=1e-8)

    def test_effective_mass(self):
        cfg = PhysicalConfig(Deformation(1.5), mass=2.0)
        assert cfg.m_q == pytest.approx((2.5 / 3.0) ** 2 * 2.0, rel=1e-15)
        assert 0 < cfg.m_q <= cfg.mass

    @pytest.mark.parametrize("field", ["hbar", "mass", "box_length"])
    def test_physical_config_rejects_nonpositive(self, field):
        with pytest.raises(DomainError):
            PhysicalConfig(Deformation(1.5), **{field: 0.0})


class TestQNumber:
    def test_zero(self, d15):
        assert q_number(0, d15) == 0.0

    def test_two(self, d15):
        assert q_number(2, d15) == pytest.approx(13 / 6, rel=1e-15)

    def test_limit(self):
        assert q_number(3, Deformation(1 + 1e-8)) == pytest.approx(3.0, abs=1e-6)

    @pytest.mark.parametrize("n", range(0, 25))
    def test_exact_rational(self, d15, n):
        assert q_number(n, d15) == pytest.approx(float(frac_qnum(n)), rel=2e-15)

    @given(st.floats(-30, 30), st.floats(1.01, 3.0))
    def test_odd(self, a, q):
        d = Deformation(q)
        assert q_number(-a, d) == -q_number(a, d)

    @given(st.integers(0, 20), st.floats(1.01, 3.0))
    def test_invariant_under_inverse_q(self, n, q):
        # evaluate the defining formula at 1/q directly
        p = 1.0 / q
        raw = (p ** n - p ** -n) / (p - 1 / p)
        assert q_number(n, Deformation(q)) == pytest.approx(raw, rel=1e-12)

    def test_vectorized(self, d15):
        out = q_number(np.arange(4), d15)
        assert out.shape == (4,)
        assert out[1] == pytest.approx(1.0)

    def test_overflow(self, d15):
        with pytest.raises(QOverflowError):
            q_number(5000, d15)


class TestBase2:
    def test_small(self, d15):
        assert q_number_base2(0, d15) == 0.0
        assert q_number_base2(1, d15) == pytest.approx(1.0)
        assert q_number_base2(2, d15) == pytest.approx(3.25, rel=1e-15)

    @pytest.mark.parametrize("n", range(1, 15))
    def test_relation_to_symmetric(self, d15, n):
        # [n, q^2] = q^(n-1) [n]
        assert q_number_base2(n, d15) == pytest.approx(1.5 ** (n - 1) * q_number(n, d15), rel=1e-14)

    def test_factorial_base2(self, d15):
        assert q_factorial_base2(3, d15) == pytest.approx(1.0 * 3.25 * (1.5 ** 6 - 1) / 1.25, rel=1e-14)


class TestFactorial:
    def test_examples(self, d15):
        assert q_factorial(0, d15) == 1.0
        assert q_factorial(2, d15) == pytest.approx(13 / 6, rel=1e-15)
        assert q_factorial(3, d15) == pytest.approx(13 / 6 * 133 / 36, rel=1e-15)

    @pytest.mark.parametrize("n", [5, 10, 20])
    def test_exact_rational(self, d15, n):
        assert q_factorial(n, d15) == pytest.approx(float(frac_qfact(n)), rel=1e-13)

    @pytest.mark.parametrize("q", [1.0001, 1.1, 1.5, 3.0])
    def test_dominates_classical(self, q):
        d = Deformation(q)
        for n in range(21):
            assert q_factorial(n, d) >= math.factorial(n) * (1 - 1e-14)

    def test_overflow_reported(self):
        with pytest.raises(QOverflowError):
            q_factorial(400, Deformation(2.0))

    def test_negative(self, d15):
        with pytest.raises(DomainError):
            q_factorial(-1, d15)


class TestBinomial:
    def test_base_cases(self, d15):
        assert list(q_binomial_coeffs(0, d15).coeffs) == [1.0]
        assert list(q_binomial_coeffs(1, d15).coeffs) == [1.0, 1.0]
        assert np.allclose(q_binomial_coeffs(2, d15).coeffs, [1, 13 / 6, 1], rtol=1e-15)

    def test_classical_limit(self):
        c = q_binomial_coeffs(4, Deformation(1 + 1e-9)).coeffs
        assert np.allclose(c, [1, 4, 6, 4, 1], rtol=1e-7)

    @pytest.mark.parametrize("N", range(0, 16))
    def test_exact_and_palindromic(self, d15, N):
        c = np.asarray(q_binomial_coeffs(N, d15).coeffs)
        exact = [float(frac_qfact(N) / (frac_qfact(n) * frac_qfact(N - n))) for n in range(N + 1)]
        assert np.allclose(c, exact, rtol=1e-13)
        assert np.array_equal(c, c[::-1])
        assert np.all(c > 0)

    def test_product_example(self, d15):
        assert q_binomial_eval_product(1.0, 1.0, 2, d15) == pytest.approx(25 / 6, rel=1e-15)

    def test_cubic_limit(self):
        d = Deformation(1 + 1e-10)
        assert q_binomial_eval_product(2.0, 1.0, 3, d) == pytest.approx(27.0, rel=1e-8)

    @pytest.mark.parametrize("N", [2, 4, 6, 10])
    def test_minus_variant_zero_even(self, d15, N):
        y = 0.7
        assert q_binomial_eval_product(1.5 * y, -y, N, d15) == 0.0
        assert q_binomial_eval_product(y / 1.5, -y, N, d15) == 0.0

    @pytest.mark.parametrize("N", [1, 3, 5])
    def test_minus_variant_odd_zeros_at_even_powers(self, d15, N):
        # factors x - q^(N-1-2k) y have even exponents when N is odd
        y = 0.7
        assert q_binomial_eval_product(y, -y, N, d15) == 0.0
        assert q_binomial_eval_product(1.5 * y, -y, N, d15) != 0.0

    def test_expansion_evaluate(self, d15):
        exp = q_binomial_coeffs(5, d15)
        assert exp.evaluate(0.4, -1.2) == pytest.approx(q_binomial_eval_product(0.4, -1.2, 5, d15), rel=1e-13)

    @settings(max_examples=60)
    @given(
        st.floats(-3, 3),
        st.floats(-3, 3),
        st.integers(0, 10),
        st.sampled_from([1.1, 1.5, 2.0]),
    )
    def test_sum_equals_product(self, x, y, N, q):
        d = Deformation(q)
        s = q_binomial_eval_sum(x, y, N, d)
        p = q_binomial_eval_product(x, y, N, d)
        scale = math.prod(abs(x) + q ** (N - 1 - 2 * k) * abs(y) for k in range(N))
        assert abs(s - p) <= 1e-12 * max(scale, 1e-300)

    @settings(max_examples=60)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 10), st.sampled_from([1.1, 1.5, 2.0]))
    def test_recursion(self, x, y, N, q):
        d = Deformation(q)
        lhs = q_binomial_eval_sum(x, y, N + 1, d)
        rhs = (x + q ** N * y) * q_binomial_eval_sum(x, y / q, N, d)
        scale = math.prod(abs(x) + q ** (N - 2 * k) * abs(y) for k in range(N + 1))
        assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300)
