"""Pure-numpy versions of the loop kernels.

Each function loops over the series index and vectorizes over the
evaluation points, so results match the compiled backend term by term.
"""

import math

import numpy as np

from ._dd import dd_add, dd_mul, dd_mul_d, two_sum


def series_dd(x, rhi, rlo, parity, alternate, tol):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    cap = rhi.shape[0] - 1
    n_pts = x.shape[0]
    th = np.ones(n_pts)
    tl = np.zeros(n_pts)
    sh = np.zeros(n_pts)
    sl = np.zeros(n_pts)
    mx = np.zeros(n_pts)
    asum = np.zeros(n_pts)
    count = np.zeros(n_pts, dtype=np.int64)
    used = np.zeros(n_pts, dtype=np.int64)
    active = np.ones(n_pts, dtype=bool)
    for n in range(cap + 1):
        if not active.any():
            break
        if n > 0:
            th, tl = dd_mul(th, tl, rhi[n], rlo[n])
            th, tl = dd_mul_d(th, tl, x)
        if parity >= 0 and n % 2 != parity:
            continue
        sign = -1.0 if (alternate and (n // 2) % 2 == 1) else 1.0
        nh, nl = dd_add(sh, sl, sign * th, sign * tl)
        sh = np.where(active, nh, sh)
        sl = np.where(active, nl, sl)
        mag = np.abs(th)
        used += active
        asum = np.where(active, asum + mag, asum)
        mx = np.where(active & (mag > mx), mag, mx)
        past_peak = ax * rhi[min(n + 1, cap)] < 1.0
        small = past_peak & (mag <= tol * np.abs(sh))
        count = np.where(small, count + 1, 0)
        active &= count < 3
    nterms = np.where(active, -1, used)
    return sh + sl, nterms, mx, asum


def theta(x, a, r2, log_q):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    s = np.zeros_like(x)
    ds = np.zeros_like(x)
    c = np.full_like(x, a)
    live = c * ax > 0.5
    while live.any():
        u = c * x
        s = np.where(live, s + np.arctan(u), s)
        ds = np.where(live, ds + c / (1.0 + u * u), ds)
        c = np.where(live, c * r2, c)
        live = c * ax > 0.5
    u = c * x
    u2 = u * u
    p = u.copy()
    dp = c.copy()
    ts = np.zeros_like(x)
    tds = np.zeros_like(x)
    j = 0
    live = np.ones(x.shape, dtype=bool)
    while live.any():
        m = 2 * j + 1
        den = -math.expm1(-2.0 * m * log_q)
        sgn = 1.0 if j % 2 == 0 else -1.0
        term = sgn * p / (m * den)
        ts = np.where(live, ts + term, ts)
        tds = np.where(live, tds + sgn * dp / den, tds)
        live &= ~((np.abs(term) <= 1e-18 * np.abs(ts)) | (p == 0.0))
        p = p * u2
        dp = dp * u2
        j += 1
    return s + ts, ds + tds


def kernel_series(x, xp, pw, pwinv, qn, beta, tol):
    a = np.asarray(x, dtype=float)
    b = np.asarray(xp, dtype=float)
    n_pts = a.shape[0]
    cap = (qn.shape[0] - 2) // 2
    tr = np.ones(n_pts)
    ti = np.zeros(n_pts)
    sr = np.ones(n_pts)
    cr = np.zeros(n_pts)
    si = np.zeros(n_pts)
    ci = np.zeros(n_pts)
    mx = np.ones(n_pts)
    prev = np.ones(n_pts)
    rho = np.zeros(n_pts)
    count = np.zeros(n_pts, dtype=np.int64)
    used = np.ones(n_pts, dtype=np.int64)
    past = np.zeros(n_pts, dtype=bool)
    active = np.ones(n_pts, dtype=bool)
    for n in range(cap):
        if not active.any():
            break
        j = 2 * n + 1
        f1 = a - pw[j] * b
        f2 = pwinv[j] * (pw[j] * a - b)
        fac = 2.0 * (2 * n + 1) / (qn[2 * n + 1] * qn[2 * n + 2]) * beta * f1 * f2
        ntr, nti = -ti * fac, tr * fac
        tr = np.where(active, ntr, tr)
        ti = np.where(active, nti, ti)
        s, e = two_sum(sr, tr)
        sr = np.where(active, s, sr)
        cr = np.where(active, cr + e, cr)
        s, e = two_sum(si, ti)
        si = np.where(active, s, si)
        ci = np.where(active, ci + e, ci)
        used += active
        mag = np.hypot(tr, ti)
        mx = np.where(active & (mag > mx), mag, mx)
        past |= active & (mag < prev)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(prev > 0.0, mag / prev, 0.0)
        rho = np.where(active, r, rho)
        prev = np.where(active, mag, prev)
        tot = np.hypot(sr + cr, si + ci)
        small = past & (mag <= tol * tot)
        count = np.where(active & small, count + 1, np.where(active, 0, count))
        active &= ~((count >= 3) | (mag == 0.0))
    nterms = np.where(active, -1, used)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(rho < 1.0, prev * rho / (1.0 - rho), np.inf)
    return sr + cr, si + ci, nterms, tail, mx


def rk4_trajectory(x0, v0, h, nsteps, kappa, omega2, mode, xmin):
    xs = np.empty(nsteps + 1)
    vs = np.empty(nsteps + 1)
    xs[0] = x0
    vs[0] = v0
    k2 = kappa * kappa

    def accel(xi, vi):
        if mode == 0:
            return -omega2 * xi
        y = kappa * xi * vi
        if abs(y) > 1.0 or abs(xi) < xmin:
            return None
        w = math.sqrt(1.0 - y * y)
        return -k2 * xi * vi ** 4 / ((1.0 + w) * (1.0 + w))

    status = 0
    last = 0
    for s in range(nsteps):
        x = xs[s]
        v = vs[s]
        xi, vi = x, v
        kx = [0.0] * 4
        kv = [0.0] * 4
        bad = False
        for stage in range(4):
            acc = accel(xi, vi)
            if acc is None:
                bad = True
                break
            kx[stage] = vi
            kv[stage] = acc
            step = 0.5 * h if stage < 2 else h
            xi = x + step * kx[stage]
            vi = v + step * kv[stage]
        if bad:
            status = 1 if abs(xi) >= xmin else 2
            break
        xs[s + 1] = x + h / 6.0 * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3])
        vs[s + 1] = v + h / 6.0 * (kv[0] + 2.0 * kv[1] + 2.0 * kv[2] + kv[3])
        last = s + 1
    return xs[: last + 1], vs[: last + 1], status


def linear_propagate(x0, v0, r00, r01, r10, r11, nsteps):
    # plain loop so rounding matches the numba kernel exactly
    xs = np.empty(nsteps + 1)
    vs = np.empty(nsteps + 1)
    x, v = x0, v0
    xs[0], vs[0] = x, v
    for s in range(nsteps):
        x, v = r00 * x + r01 * v, r10 * x + r11 * v
        xs[s + 1] = x
        vs[s + 1] = v
    return xs, vs
