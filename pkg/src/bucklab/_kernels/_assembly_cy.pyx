# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernels (fast path).

Same contracts as ``assembly_py``: stacked per-triangle inputs, stacked
local matrices out. The Morley basis is obtained per element from a
6x6 Gauss-Jordan solve against the DOF/monomial matrix.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

# degree-2 triangle rule (edge midpoints), weights sum to 1
cdef double[3][3] D2_PTS = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
cdef double D2_W = 1.0 / 3.0

# degree-4 six-point rule
cdef double A1 = 0.445948490915965
cdef double B1 = 0.108103018168070
cdef double A2 = 0.091576213509771
cdef double B2 = 0.816847572980459
cdef double[6][3] D4_PTS = [
    [A1, A1, B1], [A1, B1, A1], [B1, A1, A1],
    [A2, A2, B2], [A2, B2, A2], [B2, A2, A2],
]
cdef double[6] D4_W = [
    0.223381589678011, 0.223381589678011, 0.223381589678011,
    0.109951743655322, 0.109951743655322, 0.109951743655322,
]


cdef inline int _invert6(double a[6][6], double inv[6][6]) noexcept nogil:
    """Gauss-Jordan inverse with partial pivoting; returns 0 on success."""
    cdef int i, j, k, piv
    cdef double big, tmp, f
    for i in range(6):
        for j in range(6):
            inv[i][j] = 1.0 if i == j else 0.0
    for k in range(6):
        piv = k
        big = a[k][k] if a[k][k] >= 0 else -a[k][k]
        for i in range(k + 1, 6):
            tmp = a[i][k] if a[i][k] >= 0 else -a[i][k]
            if tmp > big:
                big = tmp
                piv = i
        if big == 0.0:
            return 1
        if piv != k:
            for j in range(6):
                tmp = a[k][j]; a[k][j] = a[piv][j]; a[piv][j] = tmp
                tmp = inv[k][j]; inv[k][j] = inv[piv][j]; inv[piv][j] = tmp
        f = a[k][k]
        for j in range(6):
            a[k][j] /= f
            inv[k][j] /= f
        for i in range(6):
            if i == k:
                continue
            f = a[i][k]
            if f != 0.0:
                for j in range(6):
                    a[i][j] -= f * a[k][j]
                    inv[i][j] -= f * inv[k][j]
    return 0


def lagrange1_local(cnp.ndarray[cnp.float64_t, ndim=3] coords):
    cdef Py_ssize_t m = coords.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] k = np.empty((m, 3, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] mm = np.empty((m, 3, 3))
    cdef Py_ssize_t t, i, j
    cdef double det, area
    cdef double g[3][2]
    with nogil:
        for t in range(m):
            det = ((coords[t, 1, 0] - coords[t, 0, 0]) * (coords[t, 2, 1] - coords[t, 0, 1])
                   - (coords[t, 1, 1] - coords[t, 0, 1]) * (coords[t, 2, 0] - coords[t, 0, 0]))
            area = 0.5 * det
            for i in range(3):
                g[i][0] = (coords[t, (i + 1) % 3, 1] - coords[t, (i + 2) % 3, 1]) / det
                g[i][1] = -(coords[t, (i + 1) % 3, 0] - coords[t, (i + 2) % 3, 0]) / det
            for i in range(3):
                for j in range(3):
                    k[t, i, j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1])
                    mm[t, i, j] = area * ((2.0 if i == j else 1.0) / 12.0)
    return k, mm


def lagrange2_local(cnp.ndarray[cnp.float64_t, ndim=3] coords):
    cdef Py_ssize_t m = coords.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] k = np.zeros((m, 6, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] mm = np.zeros((m, 6, 6))
    cdef Py_ssize_t t, i, j, q, a
    cdef double det, area, w, li
    cdef double g[3][2]
    cdef double nq[6]
    cdef double dnq[6][3]
    cdef double gn[6][2]
    with nogil:
        for t in range(m):
            det = ((coords[t, 1, 0] - coords[t, 0, 0]) * (coords[t, 2, 1] - coords[t, 0, 1])
                   - (coords[t, 1, 1] - coords[t, 0, 1]) * (coords[t, 2, 0] - coords[t, 0, 0]))
            area = 0.5 * det
            for i in range(3):
                g[i][0] = (coords[t, (i + 1) % 3, 1] - coords[t, (i + 2) % 3, 1]) / det
                g[i][1] = -(coords[t, (i + 1) % 3, 0] - coords[t, (i + 2) % 3, 0]) / det
            for q in range(6):
                w = D4_W[q] * area
                for i in range(3):
                    li = D4_PTS[q][i]
                    nq[i] = li * (2.0 * li - 1.0)
                    dnq[i][0] = 0.0
                    dnq[i][1] = 0.0
                    dnq[i][2] = 0.0
                    dnq[i][i] = 4.0 * li - 1.0
                for i in range(3):
                    nq[3 + i] = 4.0 * D4_PTS[q][(i + 1) % 3] * D4_PTS[q][(i + 2) % 3]
                    dnq[3 + i][0] = 0.0
                    dnq[3 + i][1] = 0.0
                    dnq[3 + i][2] = 0.0
                    dnq[3 + i][(i + 1) % 3] = 4.0 * D4_PTS[q][(i + 2) % 3]
                    dnq[3 + i][(i + 2) % 3] = 4.0 * D4_PTS[q][(i + 1) % 3]
                for i in range(6):
                    gn[i][0] = 0.0
                    gn[i][1] = 0.0
                    for a in range(3):
                        gn[i][0] += dnq[i][a] * g[a][0]
                        gn[i][1] += dnq[i][a] * g[a][1]
                for i in range(6):
                    for j in range(6):
                        k[t, i, j] += w * (gn[i][0] * gn[j][0] + gn[i][1] * gn[j][1])
                        mm[t, i, j] += w * nq[i] * nq[j]
    return k, mm


def morley_local(cnp.ndarray[cnp.float64_t, ndim=3] coords,
                 cnp.ndarray[cnp.float64_t, ndim=3] normals):
    cdef Py_ssize_t m = coords.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] bend = np.zeros((m, 6, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] k = np.zeros((m, 6, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] mass = np.zeros((m, 6, 6))
    cdef Py_ssize_t t, i, j, q
    cdef double det, area, w, xq, yq, cx, cy
    cdef double pl[3][2]
    cdef double mid[3][2]
    cdef double d[6][6]
    cdef double c[6][6]
    cdef double gx[6]
    cdef double gy[6]
    cdef double vals[6]
    cdef double mono[6]
    with nogil:
        for t in range(m):
            det = ((coords[t, 1, 0] - coords[t, 0, 0]) * (coords[t, 2, 1] - coords[t, 0, 1])
                   - (coords[t, 1, 1] - coords[t, 0, 1]) * (coords[t, 2, 0] - coords[t, 0, 0]))
            area = 0.5 * det
            cx = (coords[t, 0, 0] + coords[t, 1, 0] + coords[t, 2, 0]) / 3.0
            cy = (coords[t, 0, 1] + coords[t, 1, 1] + coords[t, 2, 1]) / 3.0
            for i in range(3):
                pl[i][0] = coords[t, i, 0] - cx
                pl[i][1] = coords[t, i, 1] - cy
            for i in range(3):
                mid[i][0] = 0.5 * (pl[(i + 1) % 3][0] + pl[(i + 2) % 3][0])
                mid[i][1] = 0.5 * (pl[(i + 1) % 3][1] + pl[(i + 2) % 3][1])
            for i in range(3):
                d[i][0] = 1.0
                d[i][1] = pl[i][0]
                d[i][2] = pl[i][1]
                d[i][3] = pl[i][0] * pl[i][0]
                d[i][4] = pl[i][0] * pl[i][1]
                d[i][5] = pl[i][1] * pl[i][1]
            for i in range(3):
                d[3 + i][0] = 0.0
                d[3 + i][1] = normals[t, i, 0]
                d[3 + i][2] = normals[t, i, 1]
                d[3 + i][3] = 2.0 * mid[i][0] * normals[t, i, 0]
                d[3 + i][4] = mid[i][1] * normals[t, i, 0] + mid[i][0] * normals[t, i, 1]
                d[3 + i][5] = 2.0 * mid[i][1] * normals[t, i, 1]
            _invert6(d, c)
            # bending: constant Hessians H = [[2a, b], [b, 2c]]
            for i in range(6):
                for j in range(6):
                    bend[t, i, j] = area * (4.0 * c[3][i] * c[3][j]
                                            + 2.0 * c[4][i] * c[4][j]
                                            + 4.0 * c[5][i] * c[5][j])
            # stiffness: midpoint rule, exact for the quadratic integrand
            for q in range(3):
                w = D2_W * area
                xq = D2_PTS[q][0] * pl[0][0] + D2_PTS[q][1] * pl[1][0] + D2_PTS[q][2] * pl[2][0]
                yq = D2_PTS[q][0] * pl[0][1] + D2_PTS[q][1] * pl[1][1] + D2_PTS[q][2] * pl[2][1]
                for i in range(6):
                    gx[i] = c[1][i] + 2.0 * c[3][i] * xq + c[4][i] * yq
                    gy[i] = c[2][i] + c[4][i] * xq + 2.0 * c[5][i] * yq
                for i in range(6):
                    for j in range(6):
                        k[t, i, j] += w * (gx[i] * gx[j] + gy[i] * gy[j])
            # mass: degree-4 rule, exact for products of quadratics
            for q in range(6):
                w = D4_W[q] * area
                xq = D4_PTS[q][0] * pl[0][0] + D4_PTS[q][1] * pl[1][0] + D4_PTS[q][2] * pl[2][0]
                yq = D4_PTS[q][0] * pl[0][1] + D4_PTS[q][1] * pl[1][1] + D4_PTS[q][2] * pl[2][1]
                mono[0] = 1.0
                mono[1] = xq
                mono[2] = yq
                mono[3] = xq * xq
                mono[4] = xq * yq
                mono[5] = yq * yq
                for i in range(6):
                    vals[i] = 0.0
                    for j in range(6):
                        vals[i] += mono[j] * c[j][i]
                for i in range(6):
                    for j in range(6):
                        mass[t, i, j] += w * vals[i] * vals[j]
    return bend, k, mass
