"""Quadratic-form assembly on triangulations.

Three element families are provided. Lagrange P1/P2 give the gradient
and mass forms of the second-order problems plus the boundary trace
mass. The Morley element (vertex values + edge-midpoint normal
derivatives, quadratic and nonconforming) carries the fourth-order
machinery: the element-wise bending form, the broken gradient form and
the boundary normal-derivative mass.

The bending matrix ``a_bend`` integrates the Frobenius product of the
per-element (constant) Hessians. On trial spaces with zero boundary
values, the continuum form it discretizes coincides with the integral
of products of Laplacians up to the boundary curvature term
``kappa * (normal derivative)^2``; :meth:`OperatorPair.fourth_order_matrix`
adds that term (kappa = 1/radius on disk meshes, 0 on straight-edged
domains), which keeps pencils on such spaces consistent with the smooth
domain the mesh approximates. On the clamped space the term vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DofKindError, MeshError, SizeLimitError
from .mesh import Mesh

#: dense-matrix guard: assembled DOF counts beyond this raise SizeLimitError
MAX_DENSE_DOFS = 6000

DOF_VERTEX_VALUE = 0
DOF_EDGE_MIDPOINT_VALUE = 1
DOF_EDGE_NORMAL_DERIV = 2
DOF_KIND_NAMES = {
    DOF_VERTEX_VALUE: "vertex-value",
    DOF_EDGE_MIDPOINT_VALUE: "edge-midpoint-value",
    DOF_EDGE_NORMAL_DERIV: "edge-normal-derivative",
}

# 1D boundary mass matrices per unit edge length: P1 (end, end) and
# P2 (end, end, midpoint)
_EDGE_MASS_P1 = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
_EDGE_MASS_P2 = np.array(
    [[4.0, -1.0, 2.0], [-1.0, 4.0, 2.0], [2.0, 2.0, 16.0]]
) / 30.0


@dataclass(frozen=True)
class DofMap:
    """Degree-of-freedom table with boundary classification."""

    kind: str  # "lagrange-1" | "lagrange-2" | "morley"
    n_dofs: int
    dof_kind: np.ndarray  # int8 codes, see DOF_KIND_NAMES
    dof_entity: np.ndarray  # vertex or edge index the DOF lives on
    is_boundary: np.ndarray  # bool per DOF

    def boundary_dofs(self) -> np.ndarray:
        return np.flatnonzero(self.is_boundary)

    def interior_dofs(self) -> np.ndarray:
        return np.flatnonzero(~self.is_boundary)

    def boundary_value_dofs(self) -> np.ndarray:
        mask = self.is_boundary & (self.dof_kind != DOF_EDGE_NORMAL_DERIV)
        return np.flatnonzero(mask)

    def boundary_normal_dofs(self) -> np.ndarray:
        mask = self.is_boundary & (self.dof_kind == DOF_EDGE_NORMAL_DERIV)
        return np.flatnonzero(mask)


@dataclass(frozen=True)
class OperatorPair:
    """Assembled symmetric forms over one DOF set.

    k_grad : gradient form (broken gradient for Morley)
    mass   : L2 mass
    a_bend : element-wise bending form (Morley only, else None)
    b_trace : boundary L2 mass on the boundary-value DOFs listed in
        ``b_trace_dofs`` (Lagrange only, else None)
    b_normal_diag : full-length diagonal of the boundary
        normal-derivative mass (Morley only, else None)
    curvature : boundary curvature of the approximated smooth domain
    """

    mesh: Mesh
    dofmap: DofMap
    k_grad: np.ndarray
    mass: np.ndarray
    a_bend: np.ndarray | None = None
    b_trace: np.ndarray | None = None
    b_trace_dofs: np.ndarray | None = None
    b_normal_diag: np.ndarray | None = None
    curvature: float = 0.0

    def fourth_order_matrix(self) -> np.ndarray:
        """Bending matrix plus the curvature boundary term.

        This is the matrix every fourth-order pencil in the package is
        built from; on clamped vectors it acts exactly like ``a_bend``.
        """
        if self.a_bend is None:
            raise DofKindError("fourth-order form requires a Morley pair")
        f = self.a_bend.copy()
        if self.curvature != 0.0:
            idx = np.arange(len(f))
            f[idx, idx] += self.curvature * self.b_normal_diag
        return f


def _check_not_degenerate(mesh: Mesh) -> np.ndarray:
    areas = mesh.triangle_areas()
    h = mesh.h_max()
    if np.any(areas < 1e-14 * h * h):
        raise MeshError("degenerate triangle (area below 1e-14 * h^2)")
    return areas


def _scatter(matrix: np.ndarray, dofs: np.ndarray, local: np.ndarray) -> None:
    np.add.at(matrix, (dofs[:, :, None], dofs[:, None, :]), local)


def assemble_lagrange(mesh: Mesh, order: int) -> OperatorPair:
    """Gradient, mass and boundary-trace forms for P1/P2 triangles."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    _check_not_degenerate(mesh)
    nv, ne = mesh.n_vertices, mesh.n_edges
    n = nv if order == 1 else nv + ne
    if n > MAX_DENSE_DOFS:
        raise SizeLimitError(f"{n} DOFs exceed the dense cap {MAX_DENSE_DOFS}")

    coords = np.ascontiguousarray(mesh.vertices[mesh.triangles])
    k = np.zeros((n, n))
    m = np.zeros((n, n))
    if order == 1:
        ke, me = _kernels.lagrange1_local(coords)
        dofs = mesh.triangles
    else:
        ke, me = _kernels.lagrange2_local(coords)
        dofs = np.hstack([mesh.triangles, nv + mesh.tri_edges])
    _scatter(k, dofs, ke)
    _scatter(m, dofs, me)

    bvert_mask = np.zeros(nv, dtype=bool)
    bvert_mask[mesh.boundary_vertices] = True
    if order == 1:
        dof_kind = np.full(n, DOF_VERTEX_VALUE, dtype=np.int8)
        dof_entity = np.arange(nv, dtype=np.int64)
        is_boundary = bvert_mask.copy()
    else:
        dof_kind = np.concatenate(
            [
                np.full(nv, DOF_VERTEX_VALUE, dtype=np.int8),
                np.full(ne, DOF_EDGE_MIDPOINT_VALUE, dtype=np.int8),
            ]
        )
        dof_entity = np.concatenate(
            [np.arange(nv, dtype=np.int64), np.arange(ne, dtype=np.int64)]
        )
        bedge_mask = np.zeros(ne, dtype=bool)
        bedge_mask[mesh.boundary_edges] = True
        is_boundary = np.concatenate([bvert_mask, bedge_mask])
    dofmap = DofMap(f"lagrange-{order}", n, dof_kind, dof_entity, is_boundary)

    # boundary trace mass on the boundary-value DOFs
    btd = dofmap.boundary_value_dofs()
    pos = {int(d): i for i, d in enumerate(btd)}
    bt = np.zeros((len(btd), len(btd)))
    lengths = mesh.edge_lengths()
    for e in mesh.boundary_edges:
        va, vb = mesh.edges[e]
        if order == 1:
            loc = [pos[int(va)], pos[int(vb)]]
            bt[np.ix_(loc, loc)] += lengths[e] * _EDGE_MASS_P1
        else:
            loc = [pos[int(va)], pos[int(vb)], pos[int(nv + e)]]
            bt[np.ix_(loc, loc)] += lengths[e] * _EDGE_MASS_P2

    for arr in (k, m, bt, btd):
        arr.setflags(write=False)
    return OperatorPair(
        mesh=mesh,
        dofmap=dofmap,
        k_grad=k,
        mass=m,
        b_trace=bt,
        b_trace_dofs=btd,
        curvature=mesh.boundary_curvature,
    )


def assemble_morley(mesh: Mesh) -> OperatorPair:
    """Morley bending/gradient/mass forms plus the boundary normal mass."""
    _check_not_degenerate(mesh)
    nv, ne = mesh.n_vertices, mesh.n_edges
    n = nv + ne
    if n > MAX_DENSE_DOFS:
        raise SizeLimitError(f"{n} DOFs exceed the dense cap {MAX_DENSE_DOFS}")

    coords = np.ascontiguousarray(mesh.vertices[mesh.triangles])
    normals = np.ascontiguousarray(mesh.edge_normals[mesh.tri_edges])
    ae, ke, me = _kernels.morley_local(coords, normals)

    a = np.zeros((n, n))
    k = np.zeros((n, n))
    m = np.zeros((n, n))
    dofs = np.hstack([mesh.triangles, nv + mesh.tri_edges])
    _scatter(a, dofs, ae)
    _scatter(k, dofs, ke)
    _scatter(m, dofs, me)

    bvert_mask = np.zeros(nv, dtype=bool)
    bvert_mask[mesh.boundary_vertices] = True
    bedge_mask = np.zeros(ne, dtype=bool)
    bedge_mask[mesh.boundary_edges] = True
    dofmap = DofMap(
        "morley",
        n,
        np.concatenate(
            [
                np.full(nv, DOF_VERTEX_VALUE, dtype=np.int8),
                np.full(ne, DOF_EDGE_NORMAL_DERIV, dtype=np.int8),
            ]
        ),
        np.concatenate([np.arange(nv, dtype=np.int64), np.arange(ne, dtype=np.int64)]),
        np.concatenate([bvert_mask, bedge_mask]),
    )
    b_normal = boundary_normal_mass(mesh, dofmap)
    for arr in (a, k, m, b_normal):
        arr.setflags(write=False)
    return OperatorPair(
        mesh=mesh,
        dofmap=dofmap,
        k_grad=k,
        mass=m,
        a_bend=a,
        b_normal_diag=b_normal,
        curvature=mesh.boundary_curvature,
    )


def boundary_normal_mass(mesh: Mesh, dofmap: DofMap) -> np.ndarray:
    """Diagonal of the boundary normal-derivative mass.

    Midpoint quadrature over each boundary edge gives the entry |e| on
    that edge's normal-derivative DOF; all other entries are zero. The
    result is returned as a full-length diagonal vector.
    """
    if dofmap.kind != "morley":
        raise DofKindError("boundary normal mass requires a Morley DOF map")
    diag = np.zeros(dofmap.n_dofs)
    nv = mesh.n_vertices
    diag[nv + mesh.boundary_edges] = mesh.edge_lengths()[mesh.boundary_edges]
    return diag


def classify_dofs(dofmap: DofMap, condition: str) -> tuple[np.ndarray, np.ndarray]:
    """Split DOFs into (constrained, free) for a boundary condition.

    dirichlet-value : all boundary value DOFs (Lagrange kinds only)
    clamped         : boundary vertex values and boundary normal
                      derivatives (Morley only)
    navier          : boundary vertex values only; the second condition
                      of the simply supported problem stays natural
                      (Morley only)
    """
    if condition == "dirichlet-value":
        if dofmap.kind not in ("lagrange-1", "lagrange-2"):
            raise DofKindError("dirichlet-value applies to Lagrange DOF maps")
        constrained = dofmap.boundary_value_dofs()
    elif condition == "clamped":
        if dofmap.kind != "morley":
            raise DofKindError("clamped conditions apply to Morley DOF maps")
        constrained = dofmap.boundary_dofs()
    elif condition == "navier":
        if dofmap.kind != "morley":
            raise DofKindError("navier conditions apply to Morley DOF maps")
        constrained = dofmap.boundary_value_dofs()
    else:
        raise ValueError(f"unknown condition {condition!r}")
    free = np.setdiff1d(np.arange(dofmap.n_dofs), constrained)
    return constrained, free


def export_triplets(matrix: np.ndarray, path) -> None:
    """Write nonzero entries as `row col value` rows, 17 significant digits."""
    with open(path, "w") as f:
        rows, cols = np.nonzero(matrix)
        for r, c in zip(rows, cols):
            f.write(f"{r} {c} {matrix[r, c]:.17g}\n")
