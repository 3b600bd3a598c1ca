"""Compiled per-pixel kernels.  Internal; the public API lives in the
sibling modules.

Every loop writes only to its own pixel's output slot and accumulates in
raster order, so results are bit-identical for any thread count.
"""

import math

import numpy as np
from numba import config, get_num_threads, njit, prange, set_num_threads

VARIANCE_FLOOR = 1e-6

# ---------------------------------------------------------------------------
# counter-based RNG: one splitmix64 stream per (seed, row, col)

_MIX_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_ROW = np.uint64(0xA24BAED4963EE407)
_MIX_COL = np.uint64(0x9FB21C651E98DF25)
_MIX_M1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_M2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_M1
    z = (z ^ (z >> np.uint64(27))) * _MIX_M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _pixel_state(seed, r, c):
    s = _mix64(seed + _MIX_GOLDEN)
    s = _mix64(s ^ (np.uint64(r) * _MIX_ROW))
    s = _mix64(s ^ (np.uint64(c) * _MIX_COL))
    return s


@njit(cache=True)
def _next_double(state):
    # advance the stream counter, output a double in the open interval (0, 1)
    state = state + _MIX_GOLDEN
    bits = _mix64(state) >> np.uint64(11)
    return (np.float64(bits) + 0.5) * (1.0 / 9007199254740992.0), state


@njit(cache=True)
def _poisson_draw(lam, state):
    if lam <= 0.0:
        return np.int64(0), state
    if lam < 30.0:
        # inversion by sequential search; the cap only guards against a
        # pathological tail of rounding in the cumulative sum
        u, state = _next_double(state)
        p = math.exp(-lam)
        cum = p
        k = 0
        cap = int(lam + 40.0 * math.sqrt(lam) + 60.0)
        while u > cum and k < cap:
            k += 1
            p *= lam / k
            cum += p
        return np.int64(k), state
    # transformed rejection with squeeze (PTRS), exact for large means
    b = 0.931 + 2.53 * math.sqrt(lam)
    a = -0.059 + 0.02483 * b
    vr = 0.9277 - 3.6224 / (b - 2.0)
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    loglam = math.log(lam)
    while True:
        u, state = _next_double(state)
        u -= 0.5
        v, state = _next_double(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return np.int64(k), state
        if k < 0.0 or (us < 0.013 and v > us):
            continue
        if (
            math.log(v * invalpha / (a / (us * us) + b))
            <= k * loglam - lam - math.lgamma(k + 1.0)
        ):
            return np.int64(k), state


@njit(parallel=True, cache=True)
def poisson_image(lam, seed):
    rows, cols = lam.shape
    out = np.empty((rows, cols), np.int64)
    for r in prange(rows):
        for c in range(cols):
            state = _pixel_state(seed, r, c)
            k, state = _poisson_draw(lam[r, c], state)
            out[r, c] = k
    return out


@njit(cache=True)
def uniform_stream(seed, r, c, n):
    # test hook: the first n uniforms of pixel (r, c)'s substream
    out = np.empty(n, np.float64)
    state = _pixel_state(seed, r, c)
    for i in range(n):
        out[i], state = _next_double(state)
    return out


# ---------------------------------------------------------------------------
# weight solver on a gathered window profile

@njit(cache=True)
def _solve_profile(rho, var):
    # bandwidth a with sum_i rho_i (a - rho_i)+ / var_i = 1, or inf if flat
    m = rho.size
    srho = 0.0
    for i in range(m):
        srho += rho[i]
    if srho <= 0.0:
        return np.inf
    order = np.argsort(rho, kind="mergesort")
    a = 1.0
    s1 = 0.0
    s2 = 0.0
    for t in range(m):
        ri = rho[order[t]]
        vi = var[order[t]]
        s1 += ri / vi
        s2 += ri * ri / vi
        if s1 > 0.0:
            ak = (1.0 + s2) / s1
            if ak >= ri:
                a = ak
            else:
                break
    return a


@njit(cache=True)
def _estimate(rho, var, yy, a):
    m = rho.size
    num = 0.0
    den = 0.0
    if a == np.inf:
        for i in range(m):
            num += yy[i] / var[i]
            den += 1.0 / var[i]
    else:
        for i in range(m):
            wi = a - rho[i]
            if wi > 0.0:
                wi /= var[i]
                num += wi * yy[i]
                den += wi
    return num / den


@njit(parallel=True, cache=True)
def oracle_filter_image(f_pad, y_pad, rows, cols, h, delta):
    side = 2 * h + 1
    m = side * side
    out = np.empty((rows, cols))
    bw = np.empty((rows, cols))
    for r in prange(rows):
        rho = np.empty(m)
        var = np.empty(m)
        yy = np.empty(m)
        for c in range(cols):
            f0 = f_pad[r + h, c + h]
            idx = 0
            for di in range(-h, h + 1):
                for dj in range(-h, h + 1):
                    fx = f_pad[r + h + di, c + h + dj]
                    rho[idx] = abs(fx - f0) + delta
                    var[idx] = fx if fx > VARIANCE_FLOOR else VARIANCE_FLOOR
                    yy[idx] = y_pad[r + h + di, c + h + dj]
                    idx += 1
            a = _solve_profile(rho, var)
            out[r, c] = _estimate(rho, var, yy, a)
            bw[r, c] = a
    return out, bw


@njit(parallel=True, cache=True)
def step1_image(y_pad, rows, cols, h, eta, kappa, win_mask):
    # y_pad is padded by h + eta; kappa is the normalized patch kernel
    # (already masked and renormalized when the checkerboard split is on);
    # win_mask flags which search-window offsets participate.
    side = 2 * h + 1
    p = h + eta
    m = 0
    for i in range(side * side):
        if win_mask.flat[i]:
            m += 1
    full = side * side
    out = np.empty((rows, cols))
    bw = np.empty((rows, cols))
    for r in prange(rows):
        rho = np.empty(m)
        yy = np.empty(m)
        for c in range(cols):
            br = r + p
            bc = c + p
            s = 0.0
            for di in range(-h, h + 1):
                for dj in range(-h, h + 1):
                    s += y_pad[br + di, bc + dj]
            fbar = s / full
            if fbar < VARIANCE_FLOOR:
                fbar = VARIANCE_FLOOR
            sq2f = math.sqrt(2.0 * fbar)
            idx = 0
            for di in range(-h, h + 1):
                for dj in range(-h, h + 1):
                    if not win_mask[di + h, dj + h]:
                        continue
                    d2 = 0.0
                    for pi in range(-eta, eta + 1):
                        for pj in range(-eta, eta + 1):
                            k = kappa[pi + eta, pj + eta]
                            diff = (
                                y_pad[br + pi, bc + pj]
                                - y_pad[br + di + pi, bc + dj + pj]
                            )
                            d2 += k * diff * diff
                    rr = math.sqrt(d2) - sq2f
                    rho[idx] = rr if rr > 0.0 else 0.0
                    yy[idx] = y_pad[br + di, bc + dj]
                    idx += 1
            srho = 0.0
            for i in range(m):
                srho += rho[i]
            if srho <= 0.0:
                s = 0.0
                for i in range(m):
                    s += yy[i]
                out[r, c] = s / m
                bw[r, c] = np.inf
                continue
            # homoscedastic scan: variance is fbar at every window pixel, so
            # a_k = (fbar + sum rho^2) / (sum rho) over the sorted prefix
            order = np.argsort(rho, kind="mergesort")
            a = 1.0
            s1 = 0.0
            s2 = 0.0
            for t in range(m):
                ri = rho[order[t]]
                s1 += ri
                s2 += ri * ri
                if s1 > 0.0:
                    ak = (fbar + s2) / s1
                    if ak >= ri:
                        a = ak
                    else:
                        break
            num = 0.0
            den = 0.0
            for i in range(m):
                wi = a - rho[i]
                if wi > 0.0:
                    num += wi * yy[i]
                    den += wi
            out[r, c] = num / den
            bw[r, c] = a
    return out, bw


@njit(parallel=True, cache=True)
def step2_image(fp_pad, rows, cols, h, d, smooth, threshold):
    # fp_pad is padded by max(h, d); smooth is the unnormalized gaussian
    q = max(h, d)
    side = 2 * h + 1
    full = side * side
    out = np.empty((rows, cols))
    for r in prange(rows):
        for c in range(cols):
            br = r + q
            bc = c + q
            s = 0.0
            for di in range(-h, h + 1):
                for dj in range(-h, h + 1):
                    s += fp_pad[br + di, bc + dj]
            gamma = s / full
            if gamma <= threshold:
                num = 0.0
                den = 0.0
                for di in range(-d, d + 1):
                    for dj in range(-d, d + 1):
                        k = smooth[di + d, dj + d]
                        num += k * fp_pad[br + di, bc + dj]
                        den += k
                out[r, c] = num / den
            else:
                out[r, c] = fp_pad[br, bc]
    return out


# ---------------------------------------------------------------------------

def set_threads(n=None):
    """Set the worker-thread count, clamped to what the host allows.

    Returns the effective count.  Outputs do not depend on it; this is purely
    a performance knob.
    """
    if n is None:
        n = config.NUMBA_NUM_THREADS
    n = max(1, min(int(n), config.NUMBA_NUM_THREADS))
    set_num_threads(n)
    return get_num_threads()
