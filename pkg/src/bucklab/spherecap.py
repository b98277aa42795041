"""Spectral experiments on the unit sphere with a polar cap removed.

Separation in the azimuthal angle reduces every problem to 1D forms on
the colatitude interval [eps, pi] with the sin(theta) area weight:

    K_m(u,v) = int (u'v' + m^2 uv / sin^2) sin dtheta
    M_m(u,v) = int uv sin dtheta
    A_m(u,v) = int (L_m u)(L_m v) sin dtheta,
    L_m u    = u'' + cot(theta) u' - m^2 u / sin^2(theta)

Second-order problems use quadratic Lagrange elements, the fourth-order
problem C1 cubic Hermite elements; all integrals by Gauss quadrature on
each interval. Boundary conditions act at theta=eps only. At the pole
the DOFs follow the regularity of smooth functions on the sphere:
values vanish unless m=0 and colatitude derivatives vanish unless m=1.
(Leaving these DOFs unconstrained admits fields whose true bending
energy is infinite but quadrature-finite, which wrecks convergence of
the fourth-order eigenvalues.)
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .eigen import sym_gen_eigs
from .errors import SpectrumRangeError
from .mesh import RadialGrid, make_radial_grid
from .quadrature import gauss_on_interval
from .runio import SweepResult
from .spectra import Spectrum

GAUSS_POINTS = 6
DEFAULT_MODES = 4
DEFAULT_NODES = 64
CAUCHY_TOL = 0.01
MODE_WARN_TOL = 0.05


@dataclass(frozen=True)
class CapOperators:
    """Assembled 1D forms for one azimuthal mode.

    For order "second" the DOFs are the grid nodes plus interval
    midpoints (quadratic Lagrange); for "fourth" they are value and
    colatitude-derivative pairs per node (cubic Hermite). ``a_m`` is
    None for second-order operators.
    """

    grid: RadialGrid
    m: int
    order: str
    k_m: np.ndarray
    m_m: np.ndarray
    a_m: np.ndarray | None

    @property
    def n_dofs(self) -> int:
        return len(self.k_m)

    def edge_value_dof(self) -> int:
        return 0

    def edge_derivative_dof(self) -> int:
        if self.order != "fourth":
            raise ValueError("derivative DOFs exist only for fourth-order operators")
        return 1

    def pole_value_dof(self) -> int:
        if self.order == "second":
            return self.n_dofs - 1
        return self.n_dofs - 2

    def pole_derivative_dof(self) -> int:
        if self.order != "fourth":
            raise ValueError("derivative DOFs exist only for fourth-order operators")
        return self.n_dofs - 1

    def free_dofs(self, bc: str) -> np.ndarray:
        """Free DOFs after the cap-edge condition and pole regularity.

        bc is one of dirichlet | neumann | clamped (clamped needs the
        fourth-order operators).
        """
        drop = []
        if bc == "dirichlet":
            drop.append(self.edge_value_dof())
        elif bc == "clamped":
            drop.append(self.edge_value_dof())
            drop.append(self.edge_derivative_dof())
        elif bc != "neumann":
            raise ValueError(f"unknown boundary condition {bc!r}")
        if self.m != 0:
            drop.append(self.pole_value_dof())
        if self.order == "fourth" and self.m != 1:
            drop.append(self.pole_derivative_dof())
        return np.setdiff1d(np.arange(self.n_dofs), drop)


def _hermite_basis(a: float, b: float, xq: np.ndarray):
    h = b - a
    t = (xq - a) / h
    val = np.stack(
        [
            1 - 3 * t**2 + 2 * t**3,
            h * (t - 2 * t**2 + t**3),
            3 * t**2 - 2 * t**3,
            h * (-(t**2) + t**3),
        ]
    )
    d1 = np.stack(
        [
            (-6 * t + 6 * t**2) / h,
            1 - 4 * t + 3 * t**2,
            (6 * t - 6 * t**2) / h,
            -2 * t + 3 * t**2,
        ]
    )
    d2 = np.stack(
        [
            (-6 + 12 * t) / h**2,
            (-4 + 6 * t) / h,
            (6 - 12 * t) / h**2,
            (-2 + 6 * t) / h,
        ]
    )
    return val, d1, d2


def cap_operators(grid: RadialGrid, m: int, order: str) -> CapOperators:
    """Assemble the weighted 1D forms for azimuthal mode ``m``."""
    if m < 0:
        raise ValueError("mode must be >= 0")
    if order not in ("second", "fourth"):
        raise ValueError(f"order must be 'second' or 'fourth', got {order!r}")
    nodes = grid.nodes
    n_el = len(nodes) - 1
    if order == "second":
        ndof = 2 * n_el + 1  # node i -> 2i, midpoint of element e -> 2e+1
        k = np.zeros((ndof, ndof))
        mm = np.zeros((ndof, ndof))
        for e in range(n_el):
            a, b = nodes[e], nodes[e + 1]
            xq, wq = gauss_on_interval(a, b, GAUSS_POINTS)
            h = b - a
            xi = (2 * xq - (a + b)) / h
            val = np.stack([0.5 * xi * (xi - 1), 1 - xi**2, 0.5 * xi * (xi + 1)])
            d1 = np.stack([(2 * xi - 1) / h, -4 * xi / h, (2 * xi + 1) / h])
            s = np.sin(xq)
            dofs = [2 * e, 2 * e + 1, 2 * e + 2]
            wk = wq * s
            wm = wq * (m * m) / s
            for i in range(3):
                for j in range(i, 3):
                    kij = np.sum(d1[i] * d1[j] * wk + val[i] * val[j] * wm)
                    mij = np.sum(val[i] * val[j] * wk)
                    k[dofs[i], dofs[j]] += kij
                    mm[dofs[i], dofs[j]] += mij
                    if i != j:
                        k[dofs[j], dofs[i]] += kij
                        mm[dofs[j], dofs[i]] += mij
        return CapOperators(grid, m, order, k, mm, None)

    ndof = 2 * len(nodes)  # (value, derivative) per node
    k = np.zeros((ndof, ndof))
    mm = np.zeros((ndof, ndof))
    aa = np.zeros((ndof, ndof))
    for e in range(n_el):
        a, b = nodes[e], nodes[e + 1]
        xq, wq = gauss_on_interval(a, b, GAUSS_POINTS)
        val, d1, d2 = _hermite_basis(a, b, xq)
        s = np.sin(xq)
        c = np.cos(xq)
        lap = d2 + (c / s) * d1 - (m * m / s**2) * val
        dofs = [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3]
        wk = wq * s
        wm = wq * (m * m) / s
        for i in range(4):
            for j in range(i, 4):
                aij = np.sum(lap[i] * lap[j] * wk)
                kij = np.sum(d1[i] * d1[j] * wk + val[i] * val[j] * wm)
                mij = np.sum(val[i] * val[j] * wk)
                aa[dofs[i], dofs[j]] += aij
                k[dofs[i], dofs[j]] += kij
                mm[dofs[i], dofs[j]] += mij
                if i != j:
                    aa[dofs[j], dofs[i]] += aij
                    k[dofs[j], dofs[i]] += kij
                    mm[dofs[j], dofs[i]] += mij
    return CapOperators(grid, m, order, k, mm, aa)


def _mode_eigs(ops: CapOperators, bc: str, k: int) -> np.ndarray:
    free = ops.free_dofs(bc)
    a = ops.k_m[np.ix_(free, free)]
    b = ops.m_m[np.ix_(free, free)]
    w, _ = sym_gen_eigs(a, b, min(k, len(free)))
    return w


def cap_spectrum(
    eps: float,
    bc: str,
    modes: int,
    k: int,
    n_nodes: int = DEFAULT_NODES,
    grading: str = "geometric",
) -> Spectrum:
    """k smallest Laplace-Beltrami eigenvalues on the punctured sphere,
    merged over azimuthal modes 0..modes with m >= 1 doubled."""
    if modes < 2:
        raise ValueError("need modes >= 2 for a faithful merge")
    grid = make_radial_grid(eps, n_nodes, grading)
    per_mode = k  # each mode contributes at most k of the smallest k merged
    vals: list[float] = []
    for m in range(modes + 1):
        ops = cap_operators(grid, m, "second")
        w = _mode_eigs(ops, bc, per_mode)
        mult = 1 if m == 0 else 2
        vals.extend(float(x) for x in w for _ in range(mult))
    vals.sort()
    if k > len(vals):
        raise SpectrumRangeError(f"k={k} exceeds the merged count {len(vals)}")
    return Spectrum(bc, np.array(vals[:k]), f"cap:{grid.content_hash()}")


@dataclass(frozen=True)
class CapBucklingResult:
    value: float
    mode: int
    rel_change: float
    resolution_warning: bool


def cap_buckling_lambda1(
    eps: float,
    modes: int = DEFAULT_MODES,
    n_nodes: int = DEFAULT_NODES,
    grading: str = "geometric",
) -> CapBucklingResult:
    """Smallest fourth-order pencil eigenvalue over the azimuthal modes,
    clamped at the cap edge.

    Solved at n_nodes and 2*n_nodes; the finer value is reported with
    the relative change, and the resolution warning fires above 5%.
    """
    def smallest(n: int) -> tuple[float, int]:
        grid = make_radial_grid(eps, n, grading)
        best, best_m = np.inf, -1
        for m in range(modes + 1):
            ops = cap_operators(grid, m, "fourth")
            free = ops.free_dofs("clamped")
            w, _ = sym_gen_eigs(
                ops.a_m[np.ix_(free, free)], ops.k_m[np.ix_(free, free)], 1
            )
            if w[0] < best:
                best, best_m = float(w[0]), m
        return best, best_m

    coarse, _ = smallest(n_nodes)
    fine, mode = smallest(2 * n_nodes)
    rel = abs(fine - coarse) / max(abs(fine), 1e-300)
    return CapBucklingResult(fine, mode, rel, rel > MODE_WARN_TOL)


def cap_buckling_lambda1_via_modes(
    eps: float,
    modes: int = DEFAULT_MODES,
    n_nodes: int = 2 * DEFAULT_NODES,
    n_basis: int = 40,
    grading: str = "geometric",
) -> float:
    """Cross-check through the second-order discretization: a Galerkin
    solve in the basis of cap Dirichlet eigenfunctions constrained to a
    vanishing colatitude derivative at the cap edge.

    In that basis the bending and gradient forms are diagonal in the
    eigenvalues, so only the edge-derivative constraint couples modes.
    Converges to the clamped value from above as the basis grows.
    """
    best = np.inf
    grid = make_radial_grid(eps, n_nodes, grading)
    h0 = grid.nodes[1] - grid.nodes[0]
    for m in range(modes + 1):
        ops = cap_operators(grid, m, "second")
        free = ops.free_dofs("dirichlet")
        nb = min(n_basis, len(free))
        w, x = sym_gen_eigs(
            ops.k_m[np.ix_(free, free)], ops.m_m[np.ix_(free, free)], nb
        )
        full = np.zeros((ops.n_dofs, nb))
        full[free] = x
        # quadratic-element derivative at theta=eps from the first element
        deriv = (-3.0 / h0) * full[0] + (4.0 / h0) * full[1] + (-1.0 / h0) * full[2]
        norm = deriv @ deriv
        if norm == 0.0:
            continue
        proj = np.eye(nb) - np.outer(deriv, deriv) / norm
        q, _ = np.linalg.qr(proj)
        z = q[:, : nb - 1]
        a_red = z.T @ np.diag(w**2) @ z
        k_red = z.T @ np.diag(w) @ z
        ww = sla.eigh(a_red, k_red, eigvals_only=True, subset_by_index=[0, 0])
        best = min(best, float(ww[0]))
    return best


def _scan_point(eps: float, n_nodes: int, modes: int, grading: str) -> dict:
    def quantities(n: int) -> dict:
        lam = cap_spectrum(eps, "dirichlet", modes, 2, n, grading)
        mu = cap_spectrum(eps, "neumann", modes, 2, n, grading)
        return {
            "lambda1": float(lam.values[0]),
            "lambda2": float(lam.values[1]),
            "mu2": float(mu.values[1]),
        }

    coarse = quantities(n_nodes)
    fine = quantities(2 * n_nodes)
    buck = cap_buckling_lambda1(eps, modes, n_nodes, grading)
    changes = [
        abs(fine[key] - coarse[key]) / max(abs(fine[key]), 1e-300)
        for key in ("lambda1", "lambda2", "mu2")
    ] + [buck.rel_change]
    warning = any(c > CAUCHY_TOL for c in changes)
    return {
        "eps": eps,
        "lambda1": fine["lambda1"],
        "lambda2": fine["lambda2"],
        "mu2": fine["mu2"],
        "Lambda1": buck.value,
        "friedlander_fails": fine["lambda1"] < fine["mu2"],
        "payne_fails": buck.value < fine["lambda2"],
        "resolution_warning": warning,
    }


def cap_scan(
    eps_list,
    n_nodes: int = DEFAULT_NODES,
    modes: int = DEFAULT_MODES,
    grading: str = "geometric",
    threads: int = 1,
) -> SweepResult:
    """Per-eps cap quantities with mesh-Cauchy enforcement under node
    doubling; per-point failures are recorded and the scan continues."""
    eps_arr = [float(e) for e in eps_list]
    result = SweepResult(parameter="eps", grid=eps_arr)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_scan_point, e, n_nodes, modes, grading) for e in eps_arr
            ]
            for i, fut in enumerate(futures):
                try:
                    result.records.append(fut.result())
                except Exception as exc:  # per-point errors recorded, scan continues
                    result.skips.append({"index": i, "reason": str(exc)})
    else:
        for i, e in enumerate(eps_arr):
            try:
                result.records.append(_scan_point(e, n_nodes, modes, grading))
            except Exception as exc:
                result.skips.append({"index": i, "reason": str(exc)})
    result.summary["n_friedlander_fails"] = sum(
        1 for r in result.records if r["friedlander_fails"]
    )
    result.summary["n_payne_fails"] = sum(1 for r in result.records if r["payne_fails"])
    result.summary["n_skipped"] = len(result.skips)
    return result
