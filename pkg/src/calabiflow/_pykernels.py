"""Pure numpy implementation of the per-face kernels.

Angles use the half-angle (semiperimeter) formulas, which stay accurate when
an angle is close to 0 or pi. Degenerate or inverted triangles are clamped:
the angle opposite the offending side becomes pi and the other two become 0,
so every function here is total on positive lengths.
"""

import math

import numpy as np


def triangle_angles(a, b, c, hyperbolic):
    sa = 0.5 * (b + c - a)
    sb = 0.5 * (a + c - b)
    sc = 0.5 * (a + b - c)
    if sa <= 0.0:
        return math.pi, 0.0, 0.0
    if sb <= 0.0:
        return 0.0, math.pi, 0.0
    if sc <= 0.0:
        return 0.0, 0.0, math.pi
    s = 0.5 * (a + b + c)
    if hyperbolic:
        s, sa, sb, sc = math.sinh(s), math.sinh(sa), math.sinh(sb), math.sinh(sc)
    alpha = 2.0 * math.atan2(math.sqrt(sb * sc), math.sqrt(s * sa))
    beta = 2.0 * math.atan2(math.sqrt(sa * sc), math.sqrt(s * sb))
    gamma = 2.0 * math.atan2(math.sqrt(sa * sb), math.sqrt(s * sc))
    return alpha, beta, gamma


def face_angles(lengths, hyperbolic):
    lengths = np.asarray(lengths, dtype=np.float64)
    a, b, c = lengths[:, 0], lengths[:, 1], lengths[:, 2]
    half = np.stack([0.5 * (b + c - a), 0.5 * (a + c - b), 0.5 * (a + b - c)], axis=1)
    s = 0.5 * (a + b + c)
    bad = half <= 0.0
    h = np.where(bad, 1.0, half)
    if hyperbolic:
        h = np.sinh(h)
        s = np.sinh(s)
    # angle at corner k: tan(theta/2)^2 = h[k+1] h[k+2] / (s h[k])
    num = np.sqrt(np.roll(h, -1, axis=1) * np.roll(h, -2, axis=1))
    den = np.sqrt(s[:, None] * h)
    out = 2.0 * np.arctan2(num, den)
    rows = bad.any(axis=1)
    if rows.any():
        out[rows] = np.where(bad[rows], math.pi, 0.0)
    return out


def curvature(face_vertices, angles, n):
    sums = np.bincount(np.asarray(face_vertices).ravel(), weights=np.asarray(angles).ravel(), minlength=n)
    return 2.0 * math.pi - sums


def edge_margins(edge_sides, angles, hyperbolic):
    sides = np.asarray(edge_sides)
    f0, c0 = sides[:, 0, 0], sides[:, 0, 1]
    f1, c1 = sides[:, 1, 0], sides[:, 1, 1]
    facing = angles[f0, c0] + angles[f1, c1]
    if hyperbolic:
        total = angles.sum(axis=1)
        margin = total[f0] + total[f1] - 2.0 * facing
    else:
        margin = math.pi - facing
    return np.where(f0 == f1, np.inf, margin)


def cotan_jacobian(face_vertices, angles, n):
    fv = np.asarray(face_vertices)
    w = 1.0 / np.tan(angles)
    a = np.roll(fv, -1, axis=1).ravel()
    b = np.roll(fv, -2, axis=1).ravel()
    w = w.ravel()
    keep = a != b
    L = np.zeros((n, n))
    np.add.at(L, (a[keep], b[keep]), -w[keep])
    np.add.at(L, (b[keep], a[keep]), -w[keep])
    L[np.diag_indices(n)] = 0.0
    L[np.diag_indices(n)] = -L.sum(axis=1)
    return L


def hyperbolic_jacobian(face_vertices, lengths, angles, n):
    fv = np.asarray(face_vertices)
    sh = np.sinh(lengths)
    sin_t = np.sin(angles)
    cos_t = np.cos(angles)
    dl_du = 2.0 * np.tanh(0.5 * lengths)
    # dtheta[f, c, m] = d(angle at corner c) / d(length opposite corner m)
    dtheta = np.empty((fv.shape[0], 3, 3))
    for c in range(3):
        c1, c2 = (c + 1) % 3, (c + 2) % 3
        d = sh[:, c] / (sin_t[:, c] * sh[:, c1] * sh[:, c2])
        dtheta[:, c, c] = d
        dtheta[:, c, c1] = -d * cos_t[:, c2]
        dtheta[:, c, c2] = -d * cos_t[:, c1]
    L = np.zeros((n, n))
    for c in range(3):
        rows = fv[:, c]
        for m in range(3):
            val = -dtheta[:, c, m] * dl_du[:, m]
            np.add.at(L, (rows, fv[:, (m + 1) % 3]), val)
            np.add.at(L, (rows, fv[:, (m + 2) % 3]), val)
    return L
