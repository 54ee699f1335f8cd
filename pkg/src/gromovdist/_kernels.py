"""Compiled inner loops for the distortion quotient on edge pairs.

Within one edge-pair cell the quotient is (piecewise affine arc length) over
(distance between two affinely moving points).  Arc length there is concave
and the chord is a norm of an affine map, so every superlevel set of the
quotient is convex: the quotient is quasiconcave on a cell.  Along a single
edge the maximizer of affine/sqrt(quadratic) has a closed form.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

GOLDEN = 0.6180339887498949


@njit(cache=True)
def _arc(delta, L, closed):
    d = abs(delta)
    if closed:
        return min(d, L - d)
    return d


@njit(cache=True)
def _dq_at(px, py, pz, s, qx, qy, qz, ex, ey, ez, Sj, v, L, closed, tiny2):
    wx = px - qx - v * ex
    wy = py - qy - v * ey
    wz = pz - qz - v * ez
    c2 = wx * wx + wy * wy + wz * wz
    arc = _arc(Sj + v - s, L, closed)
    if c2 <= tiny2:
        if arc * arc <= 4.0 * tiny2:
            return 1.0
        return np.inf
    return arc / math.sqrt(c2)


@njit(cache=True)
def inner_max(px, py, pz, s, qx, qy, qz, ex, ey, ez, Sj, v0, v1, L, closed, tiny2):
    """max over v in [v0, v1] of dq(point p at parameter s, edge j at offset v).

    Returns (value, argmax v).  The diagonal limit counts as 1.
    """
    wx = px - qx
    wy = py - qy
    wz = pz - qz
    cq = wx * wx + wy * wy + wz * wz
    bq = -2.0 * (wx * ex + wy * ey + wz * ez)
    best = -1.0
    vbest = v0
    cands = np.empty(11)
    k = 0
    cands[k] = v0
    k += 1
    cands[k] = v1
    k += 1
    base = s - Sj
    cands[k] = base
    k += 1
    if closed:
        cands[k] = base + 0.5 * L
        k += 1
        cands[k] = base - 0.5 * L
        k += 1
    # (alpha, beta) for each affine piece of the arc length in v
    for piece in range(4 if closed else 2):
        if piece == 0:
            al, be = -base, 1.0
        elif piece == 1:
            al, be = base, -1.0
        elif piece == 2:
            al, be = L + base, -1.0
        else:
            al, be = L - base, 1.0
        den = be * 0.5 * bq - al
        if den != 0.0:
            cands[k] = (al * 0.5 * bq - be * cq) / den
            k += 1
    for idx in range(k):
        v = cands[idx]
        if not (v >= v0 and v <= v1):
            continue
        val = _dq_at(px, py, pz, s, qx, qy, qz, ex, ey, ez, Sj, v, L, closed, tiny2)
        if val > best:
            best = val
            vbest = v
    return best, vbest


@njit(cache=True)
def _g(P, E, S, i, j, u, v0, v1, L, closed, tiny2):
    px = P[i, 0] + u * E[i, 0]
    py = P[i, 1] + u * E[i, 1]
    pz = P[i, 2] + u * E[i, 2]
    return inner_max(px, py, pz, S[i] + u, P[j, 0], P[j, 1], P[j, 2],
                     E[j, 0], E[j, 1], E[j, 2], S[j], v0, v1, L, closed, tiny2)


@njit(cache=True)
def cell_max(P, E, S, i, j, u0, u1, v0, v1, L, closed, tiny2, n_grid, rel_tol):
    """Maximize dq over the box [u0,u1] x [v0,v1] of cell (i, j).

    Coarse scan then golden-section search on the (quasiconcave) profile
    u -> max_v dq(u, v).
    """
    best = -1.0
    ub = u0
    vb = v0
    step = (u1 - u0) / n_grid
    kbest = 0
    for k in range(n_grid + 1):
        u = u0 + k * step if k < n_grid else u1
        val, v = _g(P, E, S, i, j, u, v0, v1, L, closed, tiny2)
        if val > best:
            best = val
            ub = u
            vb = v
            kbest = k
    lo = u0 + max(kbest - 1, 0) * step
    hi = u0 + min(kbest + 1, n_grid) * step
    if hi > u1:
        hi = u1
    width_tol = rel_tol * (u1 - u0)
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, w1 = _g(P, E, S, i, j, x1, v0, v1, L, closed, tiny2)
    f2, w2 = _g(P, E, S, i, j, x2, v0, v1, L, closed, tiny2)
    for _ in range(200):
        if hi - lo <= width_tol:
            break
        if f1 >= f2:
            if f1 > best:
                best, ub, vb = f1, x1, w1
            hi = x2
            x2, f2, w2 = x1, f1, w1
            x1 = hi - GOLDEN * (hi - lo)
            f1, w1 = _g(P, E, S, i, j, x1, v0, v1, L, closed, tiny2)
        else:
            if f2 > best:
                best, ub, vb = f2, x2, w2
            lo = x1
            x1, f1, w1 = x2, f2, w2
            x2 = lo + GOLDEN * (hi - lo)
            f2, w2 = _g(P, E, S, i, j, x2, v0, v1, L, closed, tiny2)
    if f1 > best:
        best, ub, vb = f1, x1, w1
    if f2 > best:
        best, ub, vb = f2, x2, w2
    return best, ub, vb


@njit(cache=True)
def refine_cells(P, E, Lens, S, L, closed, I, J, UB, lower, keep_rel, tiny2, n_grid, rel_tol):
    """Evaluate cells in the given (descending upper bound) order until no
    remaining cell can reach ``lower * (1 - keep_rel)``."""
    n = len(I)
    vals = np.full(n, -1.0)
    us = np.zeros(n)
    vs = np.zeros(n)
    best = lower
    done = 0
    for k in range(n):
        if UB[k] < best * (1.0 - keep_rel):
            break
        i = I[k]
        j = J[k]
        val, u, v = cell_max(P, E, S, i, j, 0.0, Lens[i], 0.0, Lens[j], L, closed, tiny2, n_grid, rel_tol)
        vals[k] = val
        us[k] = u
        vs[k] = v
        if val > best:
            best = val
        done = k + 1
    return vals, us, vs, done


@njit(cache=True)
def profile(P, E, Lens, S, L, closed, svals, tiny2):
    """D(s) = max_t dq(s, t) at each parameter, with the maximizing t."""
    m = len(Lens)
    n = len(svals)
    D = np.empty(n)
    T = np.empty(n)
    for k in range(n):
        s = svals[k]
        # locate s
        i = np.searchsorted(S, s, side="right") - 1
        if i < 0:
            i = 0
        if i > m - 1:
            i = m - 1
        u = s - S[i]
        px = P[i, 0] + u * E[i, 0]
        py = P[i, 1] + u * E[i, 1]
        pz = P[i, 2] + u * E[i, 2]
        best = 1.0
        tb = s
        for j in range(m):
            val, v = inner_max(px, py, pz, s, P[j, 0], P[j, 1], P[j, 2],
                               E[j, 0], E[j, 1], E[j, 2], S[j], 0.0, Lens[j], L, closed, tiny2)
            if val > best:
                best = val
                tb = S[j] + v
        D[k] = best
        T[k] = tb
    return D, T


# ---------------------------------------------------------------------------
# thickness: minimum chord over {dq >= b} within a cell


@njit(cache=True)
def _feasible_v(P, E, S, i, j, u, v0, v1, L, closed, b):
    """Interval of v in [v0, v1] where arc - b*chord >= 0 at fixed u.

    Each affine piece alpha + beta*v of the arc gives a concave quadratic
    inequality (alpha+beta v)^2 >= b^2 Q(v); the pieces intersect.
    """
    px = P[i, 0] + u * E[i, 0] - P[j, 0]
    py = P[i, 1] + u * E[i, 1] - P[j, 1]
    pz = P[i, 2] + u * E[i, 2] - P[j, 2]
    cq = px * px + py * py + pz * pz
    bq = -2.0 * (px * E[j, 0] + py * E[j, 1] + pz * E[j, 2])
    d0 = S[j] - S[i] - u  # delta = d0 + v, non-negative on cells with i < j
    lo = v0
    hi = v1
    b2 = b * b
    npieces = 2 if closed else 1
    for piece in range(npieces):
        if piece == 0:
            al, be = d0, 1.0
        else:
            al, be = L - d0, -1.0
        # alpha + beta v >= 0
        if be > 0:
            lo = max(lo, -al / be)
        else:
            hi = min(hi, -al / be)
        qa = be * be - b2
        qb = 2.0 * al * be - b2 * bq
        qc = al * al - b2 * cq
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            return 1.0, 0.0
        sq = math.sqrt(disc)
        # stable roots of qa v^2 + qb v + qc with qa < 0
        if qb >= 0:
            tmp = -0.5 * (qb + sq)
        else:
            tmp = -0.5 * (qb - sq)
        r1 = tmp / qa
        r2 = qc / tmp if tmp != 0.0 else r1
        if r1 > r2:
            r1, r2 = r2, r1
        lo = max(lo, r1)
        hi = min(hi, r2)
    return lo, hi


@njit(cache=True)
def _h(P, E, S, i, j, u, v0, v1, L, closed, b):
    lo, hi = _feasible_v(P, E, S, i, j, u, v0, v1, L, closed, b)
    if lo > hi:
        return np.inf
    px = P[i, 0] + u * E[i, 0] - P[j, 0]
    py = P[i, 1] + u * E[i, 1] - P[j, 1]
    pz = P[i, 2] + u * E[i, 2] - P[j, 2]
    vc = px * E[j, 0] + py * E[j, 1] + pz * E[j, 2]
    if vc < lo:
        vc = lo
    if vc > hi:
        vc = hi
    wx = px - vc * E[j, 0]
    wy = py - vc * E[j, 1]
    wz = pz - vc * E[j, 2]
    return math.sqrt(wx * wx + wy * wy + wz * wz)


@njit(cache=True)
def cell_min_chord(P, E, Lens, S, i, j, L, closed, b, u_feas, tiny2):
    """Minimum chord over the feasible set of a non-adjacent cell.

    ``u_feas`` is a u at which the feasible v-interval is non-empty (the
    cell's dq maximizer).  The feasible u-range is an interval around it and
    the minimum chord over v is convex in u.
    """
    u0 = 0.0
    u1 = Lens[i]
    v0 = 0.0
    v1 = Lens[j]
    lo_f, hi_f = _feasible_v(P, E, S, i, j, u_feas, v0, v1, L, closed, b)
    if lo_f > hi_f:
        return np.inf
    # bisection for the feasible u-range
    a_lo = u_feas
    lo_f, hi_f = _feasible_v(P, E, S, i, j, u0, v0, v1, L, closed, b)
    if lo_f <= hi_f:
        a_lo = u0
    else:
        x_in = u_feas
        x_out = u0
        for _ in range(80):
            mid = 0.5 * (x_in + x_out)
            if mid == x_in or mid == x_out:
                break
            lo_f, hi_f = _feasible_v(P, E, S, i, j, mid, v0, v1, L, closed, b)
            if lo_f <= hi_f:
                x_in = mid
            else:
                x_out = mid
        a_lo = x_in
    a_hi = u_feas
    lo_f, hi_f = _feasible_v(P, E, S, i, j, u1, v0, v1, L, closed, b)
    if lo_f <= hi_f:
        a_hi = u1
    else:
        x_in = u_feas
        x_out = u1
        for _ in range(80):
            mid = 0.5 * (x_in + x_out)
            if mid == x_in or mid == x_out:
                break
            lo_f, hi_f = _feasible_v(P, E, S, i, j, mid, v0, v1, L, closed, b)
            if lo_f <= hi_f:
                x_in = mid
            else:
                x_out = mid
        a_hi = x_in
    best = min(_h(P, E, S, i, j, a_lo, v0, v1, L, closed, b),
               _h(P, E, S, i, j, a_hi, v0, v1, L, closed, b),
               _h(P, E, S, i, j, u_feas, v0, v1, L, closed, b))
    lo = a_lo
    hi = a_hi
    if hi - lo <= 0.0:
        return best
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _h(P, E, S, i, j, x1, v0, v1, L, closed, b)
    f2 = _h(P, E, S, i, j, x2, v0, v1, L, closed, b)
    for _ in range(200):
        if hi - lo <= 1e-15 * (u1 - u0):
            break
        if f1 <= f2:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = _h(P, E, S, i, j, x1, v0, v1, L, closed, b)
        else:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = _h(P, E, S, i, j, x2, v0, v1, L, closed, b)
        best = min(best, f1, f2)
    return best


@njit(cache=True)
def thickness_cells(P, E, Lens, S, L, closed, I, J, SEG, b, tiny2, n_grid, rel_tol, start):
    """Minimum chord over {dq >= b} scanning cells by ascending segment
    distance; stops once no remaining cell can improve the incumbent."""
    best = start
    for k in range(len(I)):
        if SEG[k] >= best:
            break
        i = I[k]
        j = J[k]
        val, u, v = cell_max(P, E, S, i, j, 0.0, Lens[i], 0.0, Lens[j], L, closed, tiny2, n_grid, rel_tol)
        if val < b:
            continue
        c = cell_min_chord(P, E, Lens, S, i, j, L, closed, b, u, tiny2)
        if c < best:
            best = c
    return best


# ---------------------------------------------------------------------------
# cell bounds


@njit(cache=True)
def _segdist(ax, ay, az, dx1, dy1, dz1, bx, by, bz, dx2, dy2, dz2):
    rx = ax - bx
    ry = ay - by
    rz = az - bz
    a = dx1 * dx1 + dy1 * dy1 + dz1 * dz1
    e = dx2 * dx2 + dy2 * dy2 + dz2 * dz2
    f = dx2 * rx + dy2 * ry + dz2 * rz
    c = dx1 * rx + dy1 * ry + dz1 * rz
    bb = dx1 * dx2 + dy1 * dy2 + dz1 * dz2
    den = a * e - bb * bb
    if den > 1e-14 * a * e:
        s = (bb * f - c * e) / den
        s = min(max(s, 0.0), 1.0)
    else:
        s = 0.0
    t = (bb * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(max(-c / a, 0.0), 1.0)
    elif t > 1.0:
        t = 1.0
        s = min(max((bb - c) / a, 0.0), 1.0)
    wx = rx + s * dx1 - t * dx2
    wy = ry + s * dy1 - t * dy2
    wz = rz + s * dz1 - t * dz2
    return math.sqrt(wx * wx + wy * wy + wz * wz)


@njit(cache=True)
def cell_bounds(P, E, Lens, S, L, closed, cumang, floor):
    """Upper bound of dq on every cell i < j, and the segment distance.

    The bound is the smaller of arc_max / segment distance and the
    curvature bound sec(kappa/2) over an arc containing both edges.
    Cells whose bound is below ``floor`` are dropped.
    """
    m = len(Lens)
    total = cumang[m]
    cap = m * (m - 1) // 2
    I = np.empty(cap, np.int64)
    J = np.empty(cap, np.int64)
    UB = np.empty(cap)
    SEG = np.empty(cap)
    n = 0
    for i in range(m):
        for j in range(i + 1, m):
            dmin = S[j] - S[i] - Lens[i]
            dmax = S[j] + Lens[j] - S[i]
            if closed:
                if dmin <= 0.5 * L <= dmax:
                    amax = 0.5 * L
                else:
                    amax = max(min(dmin, L - dmin), min(dmax, L - dmax))
            else:
                amax = dmax
            sd = _segdist(P[i, 0], P[i, 1], P[i, 2], Lens[i] * E[i, 0], Lens[i] * E[i, 1], Lens[i] * E[i, 2],
                          P[j, 0], P[j, 1], P[j, 2], Lens[j] * E[j, 0], Lens[j] * E[j, 1], Lens[j] * E[j, 2])
            ub = amax / sd if sd > 0.0 else np.inf
            kap = cumang[j + 1] - cumang[i + 1]
            if closed:
                kap = min(kap, total - kap)
            if kap < math.pi:
                ub = min(ub, 1.0 / math.cos(0.5 * kap))
            if ub < floor:
                continue
            I[n] = i
            J[n] = j
            UB[n] = ub
            SEG[n] = sd
            n += 1
    return I[:n], J[:n], UB[:n], SEG[:n]


@njit(cache=True)
def vertex_pair_max(V, S, L, closed):
    """Largest dq over vertex pairs (a cheap lower bound)."""
    n = V.shape[0]
    best = 1.0
    for a in range(n):
        for b in range(a + 1, n):
            dx = V[a, 0] - V[b, 0]
            dy = V[a, 1] - V[b, 1]
            dz = V[a, 2] - V[b, 2]
            c2 = dx * dx + dy * dy + dz * dz
            if c2 <= 0.0:
                continue
            arc = _arc(S[b] - S[a], L, closed)
            r = arc / math.sqrt(c2)
            if r > best:
                best = r
    return best


@njit(cache=True)
def closest_nonadjacent(A, B, closed, eps):
    """Closest pair of non-adjacent segments [A[i], B[i]]; stops early once
    a pair closer than ``eps`` turns up."""
    m = A.shape[0]
    best = np.inf
    bi = -1
    bj = -1
    for i in range(m):
        hi = m - 1 if (closed and i == 0) else m
        for j in range(i + 2, hi):
            d = _segdist(A[i, 0], A[i, 1], A[i, 2], B[i, 0] - A[i, 0], B[i, 1] - A[i, 1], B[i, 2] - A[i, 2],
                         A[j, 0], A[j, 1], A[j, 2], B[j, 0] - A[j, 0], B[j, 1] - A[j, 1], B[j, 2] - A[j, 2])
            if d < best:
                best = d
                bi = i
                bj = j
                if best < eps:
                    return best, bi, bj
    return best, bi, bj
