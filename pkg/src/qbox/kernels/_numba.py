"""Loop kernels compiled with numba."""

import math
import types

import numpy as np
from numba import njit

from . import _dd

_jit = njit(cache=True, nogil=True)



def _compile_dd():
    # rebind each helper to a namespace holding the compiled versions so that
    # calls between helpers resolve to compiled code
    ns = {"_SPLITTER": _dd._SPLITTER}
    for name in ("two_sum", "quick_two_sum", "split", "two_prod", "dd_add", "dd_mul", "dd_mul_d"):
        fn = getattr(_dd, name)
        ns[name] = njit(types.FunctionType(fn.__code__, ns, name))
    return ns


_ns = _compile_dd()
two_sum = _ns["two_sum"]
dd_add = _ns["dd_add"]
dd_mul = _ns["dd_mul"]
dd_mul_d = _ns["dd_mul_d"]


@_jit
def series_dd(x, rhi, rlo, parity, alternate, tol):
    n_pts = x.shape[0]
    cap = rhi.shape[0] - 1
    value = np.empty(n_pts)
    nterms = np.empty(n_pts, dtype=np.int64)
    maxterm = np.empty(n_pts)
    abssum = np.empty(n_pts)
    for i in range(n_pts):
        xi = x[i]
        ax = abs(xi)
        th, tl = 1.0, 0.0
        sh, sl = 0.0, 0.0
        mx = 0.0
        asum = 0.0
        count = 0
        used = 0
        done = False
        for n in range(cap + 1):
            if n > 0:
                th, tl = dd_mul(th, tl, rhi[n], rlo[n])
                th, tl = dd_mul_d(th, tl, xi)
            if parity >= 0 and n % 2 != parity:
                continue
            sign = 1.0
            if alternate and (n // 2) % 2 == 1:
                sign = -1.0
            sh, sl = dd_add(sh, sl, sign * th, sign * tl)
            mag = abs(th)
            used += 1
            asum += mag
            if mag > mx:
                mx = mag
            nxt = n + 1 if n < cap else cap
            past_peak = ax * rhi[nxt] < 1.0
            if past_peak and mag <= tol * abs(sh):
                count += 1
            else:
                count = 0
            if count >= 3:
                done = True
                break
        value[i] = sh + sl
        nterms[i] = used if done else -1
        maxterm[i] = mx
        abssum[i] = asum
    return value, nterms, maxterm, abssum


@_jit
def theta(x, a, r2, log_q):
    # a = 1 - q**-2, r2 = q**-2
    n_pts = x.shape[0]
    out = np.empty(n_pts)
    dout = np.empty(n_pts)
    for i in range(n_pts):
        xi = x[i]
        ax = abs(xi)
        s = 0.0
        ds = 0.0
        c = a
        while c * ax > 0.5:
            u = c * xi
            s += math.atan(u)
            ds += c / (1.0 + u * u)
            c *= r2
        # remaining sum as the odd power series of the geometric tail
        u = c * xi
        u2 = u * u
        p = u
        dp = c
        j = 0
        ts = 0.0
        tds = 0.0
        while True:
            m = 2 * j + 1
            den = -math.expm1(-2.0 * m * log_q)
            sgn = 1.0 if j % 2 == 0 else -1.0
            term = sgn * p / (m * den)
            dterm = sgn * dp / den
            ts += term
            tds += dterm
            if abs(term) <= 1e-18 * abs(ts) or p == 0.0:
                break
            p *= u2
            dp *= u2
            j += 1
        out[i] = s + ts
        dout[i] = ds + tds
    return out, dout


@_jit
def kernel_series(x, xp, pw, pwinv, qn, beta, tol):
    # sum_n (2n)!/(n! [2n]!) (i beta)^n (x -. x')^{2n}
    n_pts = x.shape[0]
    cap = (qn.shape[0] - 2) // 2
    vr = np.empty(n_pts)
    vi = np.empty(n_pts)
    nterms = np.empty(n_pts, dtype=np.int64)
    tail = np.empty(n_pts)
    maxterm = np.empty(n_pts)
    for i in range(n_pts):
        a = x[i]
        b = xp[i]
        tr, ti = 1.0, 0.0
        sr, cr = 0.0, 0.0
        si, ci = 0.0, 0.0
        sr, e = two_sum(sr, tr)
        cr += e
        mx = 1.0
        prev = 1.0
        count = 0
        past = False
        done = False
        used = 1
        rho = 0.0
        for n in range(cap):
            j = 2 * n + 1
            f1 = a - pw[j] * b
            f2 = pwinv[j] * (pw[j] * a - b)
            fac = 2.0 * (2 * n + 1) / (qn[2 * n + 1] * qn[2 * n + 2]) * beta * f1 * f2
            # multiply by i * fac
            tr, ti = -ti * fac, tr * fac
            sr, e = two_sum(sr, tr)
            cr += e
            si, e = two_sum(si, ti)
            ci += e
            used += 1
            mag = math.hypot(tr, ti)
            if mag > mx:
                mx = mag
            if mag < prev:
                past = True
            rho = mag / prev if prev > 0.0 else 0.0
            prev = mag
            tot = math.hypot(sr + cr, si + ci)
            if past and mag <= tol * tot:
                count += 1
            else:
                count = 0
            if count >= 3 or mag == 0.0:
                done = True
                break
        vr[i] = sr + cr
        vi[i] = si + ci
        nterms[i] = used if done else -1
        if rho < 1.0:
            tail[i] = prev * rho / (1.0 - rho)
        else:
            tail[i] = math.inf
        maxterm[i] = mx
    return vr, vi, nterms, tail, maxterm


@_jit
def rk4_trajectory(x0, v0, h, nsteps, kappa, omega2, mode, xmin):
    xs = np.empty(nsteps + 1)
    vs = np.empty(nsteps + 1)
    xs[0] = x0
    vs[0] = v0
    status = 0
    k2 = kappa * kappa
    last = 0
    for s in range(nsteps):
        x = xs[s]
        v = vs[s]
        kx = np.empty(4)
        kv = np.empty(4)
        xi, vi = x, v
        bad = False
        for stage in range(4):
            if mode == 0:
                acc = -omega2 * xi
            else:
                y = kappa * xi * vi
                if abs(y) > 1.0 or abs(xi) < xmin:
                    bad = True
                    break
                w = math.sqrt(1.0 - y * y)
                acc = -k2 * xi * vi ** 4 / ((1.0 + w) * (1.0 + w))
            kx[stage] = vi
            kv[stage] = acc
            if stage < 2:
                xi = x + 0.5 * h * kx[stage]
                vi = v + 0.5 * h * kv[stage]
            elif stage == 2:
                xi = x + h * kx[stage]
                vi = v + h * kv[stage]
        if bad:
            status = 1 if abs(xi) >= xmin else 2
            break
        xs[s + 1] = x + h / 6.0 * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3])
        vs[s + 1] = v + h / 6.0 * (kv[0] + 2.0 * kv[1] + 2.0 * kv[2] + kv[3])
        last = s + 1
    return xs[: last + 1], vs[: last + 1], status


@_jit
def linear_propagate(x0, v0, r00, r01, r10, r11, nsteps):
    xs = np.empty(nsteps + 1)
    vs = np.empty(nsteps + 1)
    xs[0] = x0
    vs[0] = v0
    for s in range(nsteps):
        xs[s + 1] = r00 * xs[s] + r01 * vs[s]
        vs[s + 1] = r10 * xs[s] + r11 * vs[s]
    return xs, vs
