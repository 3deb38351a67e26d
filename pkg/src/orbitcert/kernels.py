"""Hot floating-point kernels: matrix exponential, point actions, distances and
a Nelder-Mead minimiser over exponential coordinates.

Every function here is written in the numba-compatible subset of numpy and is
compiled with ``@njit`` unless ``ORBITCERT_DISABLE_NUMBA`` is set.  Points are
always 2-D arrays: SPD points are ``(n, n)`` matrices, vector points are stored
as ``(N, 1)`` columns so that one code path covers all models.

Model kinds: 0 = SPD matrices (g p g^T), 1 = hyperboloid (g x), 2 = sphere (g x).
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import jit

KIND_SPD = 0
KIND_HYPERBOLOID = 1
KIND_SPHERE = 2

# Pade (6, 6) numerator coefficients; denominator alternates signs.
_PADE6 = np.array(
    [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0]
)


@jit
def expm(A):
    n = A.shape[0]
    norm = 0.0
    for j in range(n):
        s = 0.0
        for i in range(n):
            s += abs(A[i, j])
        if s > norm:
            norm = s
    squarings = 0
    while norm > 0.5:
        norm *= 0.5
        squarings += 1
    X = A * (0.5 ** squarings)
    num = np.eye(n)
    den = np.eye(n)
    P = np.eye(n)
    sign = 1.0
    for k in range(1, 7):
        P = P @ X
        sign = -sign
        num += _PADE6[k] * P
        den += sign * _PADE6[k] * P
    E = np.ascontiguousarray(np.linalg.solve(den, num))
    for _ in range(squarings):
        E = E @ E
    return E


@jit
def exp_product(theta, mats):
    """Ordered product exp(theta_0 X_0) ... exp(theta_{k-1} X_{k-1})."""
    d = mats.shape[1]
    G = np.eye(d)
    for i in range(theta.shape[0]):
        if theta[i] != 0.0:
            G = G @ expm(theta[i] * mats[i])
    return G


@jit
def act(kind, g, p):
    if kind == KIND_SPD:
        out = g @ p @ g.T
        return 0.5 * (out + out.T)
    return g @ p


@jit
def dist_spd(p, q, scale):
    L = np.linalg.cholesky(p)
    Li = np.linalg.inv(L)
    M = Li @ q @ Li.T
    M = 0.5 * (M + M.T)
    w = np.linalg.eigvalsh(M)
    acc = 0.0
    for i in range(w.shape[0]):
        if w[i] <= 0.0:
            return np.nan
        lw = math.log(w[i])
        acc += lw * lw
    return scale * math.sqrt(acc)


@jit
def dist_hyperboloid(p, q, scale):
    # 2 asinh(|p - q|_J / 2) is arccosh(-<p, q>_J) without cancellation near p = q
    m = -((p[0, 0] - q[0, 0]) ** 2)
    for i in range(1, p.shape[0]):
        m += (p[i, 0] - q[i, 0]) ** 2
    if m < 0.0:
        m = 0.0
    return scale * 2.0 * math.asinh(0.5 * math.sqrt(m))


@jit
def dist_sphere(p, q, scale):
    m = 0.0
    for i in range(p.shape[0]):
        m += (p[i, 0] - q[i, 0]) ** 2
    h = 0.5 * math.sqrt(m)
    if h > 1.0:
        h = 1.0
    return scale * 2.0 * math.asin(h)


@jit
def distance(kind, p, q, scale):
    if kind == KIND_SPD:
        return dist_spd(p, q, scale)
    if kind == KIND_HYPERBOLOID:
        return dist_hyperboloid(p, q, scale)
    return dist_sphere(p, q, scale)


@jit
def orbit_point(kind, theta, mats, base):
    return act(kind, exp_product(theta, mats), base)


@jit
def orbit_points(kind, thetas, mats, base):
    m = thetas.shape[0]
    out = np.empty((m, base.shape[0], base.shape[1]))
    for i in range(m):
        out[i] = orbit_point(kind, thetas[i], mats, base)
    return out


@jit
def objective(theta, kind, mats, base, target, scale):
    return distance(kind, orbit_point(kind, theta, mats, base), target, scale)


@jit
def nelder_mead(x0, step, kind, mats, base, target, scale, ftarget, xtol, ftol, maxfev):
    """Minimise ``objective`` from ``x0``.

    Returns (x_best, f_best, nfev, converged).  Convergence means either
    f_best <= ftarget, or both the simplex diameter and the spread of values
    fell below xtol / ftol.
    """
    k = x0.shape[0]
    sim = np.empty((k + 1, k))
    fs = np.empty(k + 1)
    sim[0] = x0
    for i in range(k):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    nfev = 0
    for i in range(k + 1):
        fs[i] = objective(sim[i], kind, mats, base, target, scale)
        nfev += 1
    converged = False
    while nfev < maxfev:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        if fs[0] <= ftarget:
            converged = True
            break
        diam = 0.0
        for i in range(1, k + 1):
            for j in range(k):
                d = abs(sim[i, j] - sim[0, j])
                if d > diam:
                    diam = d
        if diam <= xtol and fs[k] - fs[0] <= ftol:
            converged = True
            break
        centroid = np.zeros(k)
        for i in range(k):
            centroid += sim[i]
        centroid /= k
        xr = centroid + (centroid - sim[k])
        fr = objective(xr, kind, mats, base, target, scale)
        nfev += 1
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - sim[k])
            fe = objective(xe, kind, mats, base, target, scale)
            nfev += 1
            if fe < fr:
                sim[k] = xe
                fs[k] = fe
            else:
                sim[k] = xr
                fs[k] = fr
        elif fr < fs[k - 1]:
            sim[k] = xr
            fs[k] = fr
        else:
            if fr < fs[k]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (sim[k] - centroid)
            fc = objective(xc, kind, mats, base, target, scale)
            nfev += 1
            if fc < min(fr, fs[k]):
                sim[k] = xc
                fs[k] = fc
            else:
                for i in range(1, k + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fs[i] = objective(sim[i], kind, mats, base, target, scale)
                    nfev += 1
    best = np.argmin(fs)
    return sim[best].copy(), fs[best], nfev, converged


# -- exponential-coordinate recovery ------------------------------------------

@jit
def section(kind, x):
    """Element s of the solvable group S = AN with s.o = x (noncompact models)."""
    if kind == KIND_SPD:
        return np.ascontiguousarray(np.linalg.cholesky(x))
    N = x.shape[0]
    # hyperboloid: s = exp(t B_1) exp(sum v_i (B_i + R_1i)), t = -log(x0 - x1)
    t = -math.log(x[0, 0] - x[1, 0])
    Nm = np.zeros((N, N))
    for i in range(2, N):
        v = x[i, 0]
        Nm[0, i] += v
        Nm[i, 0] += v
        Nm[1, i] += v
        Nm[i, 1] -= v
    n = np.eye(N) + Nm + 0.5 * (Nm @ Nm)
    a = np.eye(N)
    a[0, 0] = math.cosh(t)
    a[1, 1] = math.cosh(t)
    a[0, 1] = math.sinh(t)
    a[1, 0] = math.sinh(t)
    return a @ n


@jit
def nilpotent_log(u):
    d = u.shape[0]
    E = u - np.eye(d)
    L = np.zeros((d, d))
    P = np.eye(d)
    for k in range(1, d + 1):
        P = P @ E
        L += ((-1.0) ** (k + 1) / k) * P
    return L


@jit
def peel_coords(kind, x, base, W, Winv, omega_pinv, a_mats, theta0_map, T, levels, mats):
    """Second-kind coordinates over ``mats`` of the S-element carrying base to x.

    Level 0 (the a-part) is read off the diagonal in a weight basis; higher
    levels are read off the nilpotent logarithm after stripping lower levels.
    When x lies on the orbit the result is exact up to rounding; otherwise it
    is a projection used as a starting point.
    """
    k = mats.shape[0]
    theta = np.zeros(k)
    if kind == KIND_SPHERE:
        h = x.shape[0] // 2
        re = 0.0
        im = 0.0
        for j in range(h):
            re += base[j, 0] * x[j, 0] + base[h + j, 0] * x[h + j, 0]
            im += base[j, 0] * x[h + j, 0] - base[h + j, 0] * x[j, 0]
        if k > 0:
            theta[0] = math.atan2(im, re)
        return theta
    s = section(kind, x) @ np.linalg.inv(section(kind, base))
    D = W.shape[0]
    dg = np.diag(Winv @ s @ W)
    omega = np.empty(D)
    for j in range(D):
        omega[j] = math.log(max(dg[j], 1e-300))
    hc = omega_pinv @ omega
    r = a_mats.shape[0]
    Hm = np.zeros((s.shape[0], s.shape[0]))
    for i in range(r):
        Hm += hc[i] * a_mats[i]
    k0 = theta0_map.shape[0]
    th0 = theta0_map @ hc
    for i in range(k0):
        theta[i] = th0[i]
    cur = expm(-Hm) @ s
    i = k0
    while i < k:
        lev = levels[i]
        j = i
        while j < k and levels[j] == lev:
            j += 1
        L = np.ascontiguousarray(nilpotent_log(cur)).ravel()
        th = T[i:j] @ L
        F = np.eye(s.shape[0])
        for m in range(i, j):
            theta[m] = th[m - i]
            if th[m - i] != 0.0:
                F = F @ expm(th[m - i] * mats[m])
        cur = np.linalg.solve(F, cur)
        i = j
    return theta


@jit
def batch_guess_distances(kind, targets, base, scale, W, Winv, omega_pinv, a_mats, theta0_map, T, levels, mats):
    m = targets.shape[0]
    k = mats.shape[0]
    thetas = np.empty((m, k))
    vals = np.empty(m)
    for i in range(m):
        th = peel_coords(kind, targets[i], base, W, Winv, omega_pinv, a_mats, theta0_map, T, levels, mats)
        thetas[i] = th
        vals[i] = objective(th, kind, mats, base, targets[i], scale)
    return vals, thetas
