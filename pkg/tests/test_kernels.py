import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qbox import kernels
from qbox.kernels._dd import dd_add, dd_div, dd_mul, two_prod, two_sum
from qbox.qcore import Deformation
from qbox.qfunctions import sin_q
from qbox.spectrum import theta


def _both(fn):
    """Run ``fn`` under every available backend and return the results."""
    previous = kernels.backend()
    out = {}
    try:
        for name in kernels.available_backends():
            kernels.use_backend(name)
            out[name] = fn()
    finally:
        kernels.use_backend(previous)
    return out


def _assert_parity(results, rtol=1e-14):
    ref = results["numpy"]
    for name, res in results.items():
        for a, b in zip(res, ref):
            a, b = np.asarray(a), np.asarray(b)
            assert a.shape == b.shape, name
            assert np.allclose(a, b, rtol=rtol, atol=0, equal_nan=True), name


def test_series_dd_parity():
    rhi, rlo = kernels.ratio_table(1.5, "sym", 512)
    x = np.linspace(-20, 20, 41)
    _assert_parity(_both(lambda: kernels.series_dd(x, rhi, rlo, 1, True, 1e-16)))


def test_theta_parity():
    x = np.geomspace(1e-3, 1e4, 50)
    _assert_parity(_both(lambda: kernels.theta(x, 1.3)))


def test_kernel_series_parity():
    x = np.linspace(-2, 2, 9)
    xp = np.full_like(x, 0.7)
    _assert_parity(_both(lambda: kernels.kernel_series(x, xp, 1.5, 0.4, 1e-12, 512)))


@pytest.mark.parametrize("mode,omega2", [(0, 4.0), (1, 0.0)])
def test_rk4_parity(mode, omega2):
    _assert_parity(_both(lambda: kernels.rk4_trajectory(0.1, 0.5, 1e-3, 500, 0.7, omega2, mode, 1e-12)))


def test_gauss4_parity():
    _assert_parity(_both(lambda: kernels.gauss4_linear(0.0, 1.0, 0.01, 1000, 9.0)))


def test_gauss4_conserves_quadratic_invariant():
    xs, vs = kernels.gauss4_linear(0.3, 1.0, 0.05, 20000, 9.0)
    inv = vs ** 2 + 9.0 * xs ** 2
    # rounding accumulates at most linearly over 20000 steps
    assert np.max(np.abs(inv / inv[0] - 1)) <= 20000 * 4e-16


def test_gauss4_order():
    def err(h):
        n = int(round(1.0 / h))
        xs, _ = kernels.gauss4_linear(0.0, 1.0, h, n, 1.0)
        return abs(xs[-1] - math.sin(1.0))

    assert err(0.1) / err(0.05) == pytest.approx(16.0, rel=0.05)


def test_backend_switch(backend):
    assert kernels.backend() == backend
    d = Deformation(1.5)
    assert theta(5.28, d) == pytest.approx(3.1413895847115330028, rel=1e-13)
    assert sin_q(2.0, Deformation(1.2)) == pytest.approx(0.93593066840335064422, rel=1e-12)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("cuda")


def test_ratio_tables_read_only():
    rhi, rlo = kernels.ratio_table(1.5, "base2", 64)
    with pytest.raises(ValueError):
        rhi[1] = 0.0
    with pytest.raises(ValueError):
        kernels.ratio_table(1.5, "other", 8)


def test_ratio_table_values():
    rhi, rlo = kernels.ratio_table(1.5, "sym", 30)
    q = Fraction(3, 2)
    for n in (1, 2, 7, 30):
        qn = sum(q ** (n - 1 - 2 * k) for k in range(n))
        exact = 1 / qn
        assert abs(Fraction(rhi[n]) + Fraction(rlo[n]) - exact) <= 1e-30 * exact


_finite = st.floats(-1e300, 1e300, allow_nan=False)


@given(_finite, _finite)
def test_two_sum_exact(a, b):
    s, e = two_sum(a, b)
    assert s == a + b
    if math.isfinite(s):
        assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


@given(st.floats(-1e150, 1e150, allow_nan=False), st.floats(-1e150, 1e150, allow_nan=False))
def test_two_prod_exact(a, b):
    p, e = two_prod(a, b)
    if abs(p) > 1e-290:
        assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


def test_dd_arithmetic():
    h, l = dd_div(1.0, 0.0, 3.0, 0.0)
    assert abs(Fraction(h) + Fraction(l) - Fraction(1, 3)) <= Fraction(1, 10 ** 31)
    h, l = dd_mul(h, l, 3.0, 0.0)
    h, l = dd_add(h, l, -1.0, 0.0)
    assert abs(h) <= 1e-31
