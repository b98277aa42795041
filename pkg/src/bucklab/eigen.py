"""Dense symmetric eigenvalue and inertia kernel.

Generalized eigenproblems are reduced through the Cholesky factor of the
mass matrix (LAPACK's standard path); inertia is read off a symmetric
indefinite LDL^T factorization with 1x1/2x2 pivots, which never forms
eigenvalues. The Schur complement routine checks interior-block
regularity through that same inertia, so the Haynsworth additivity
inertia(Q) = inertia(Q_ii) + inertia(S) holds as an exact integer
identity whenever the check passes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import BucklabError, SingularBlockError

DEFAULT_ZERO_TOL = 1e-9
_SYM_RTOL = 1e-12


@dataclass(frozen=True)
class Inertia:
    n_neg: int
    n_zero: int
    n_pos: int
    zero_tol: float

    def __iter__(self):
        return iter((self.n_neg, self.n_zero, self.n_pos))


def _require_symmetric(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a - a.T)) > _SYM_RTOL * scale:
        raise ValueError(f"{name} is not symmetric within {_SYM_RTOL:g} relative")
    return a


def sym_gen_eigs(
    a: np.ndarray, b: np.ndarray, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """``count`` smallest eigenpairs of A x = gamma B x, B positive definite.

    Returns eigenvalues ascending and B-orthonormal eigenvectors as
    columns. Raises if B fails its Cholesky factorization.
    """
    a = _require_symmetric(a, "A")
    b = _require_symmetric(b, "B")
    n = len(a)
    if not 1 <= count <= n:
        raise ValueError(f"count must be in [1, {n}], got {count}")
    try:
        if count == n:
            w, v = sla.eigh(a, b)
        else:
            w, v = sla.eigh(a, b, subset_by_index=[0, count - 1])
    except sla.LinAlgError as exc:
        raise BucklabError(f"mass matrix is not positive definite: {exc}") from exc
    return w, v


def sym_gen_eigvals_all(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All eigenvalues of the pencil (A, B), ascending."""
    a = _require_symmetric(a, "A")
    b = _require_symmetric(b, "B")
    try:
        return sla.eigh(a, b, eigvals_only=True)
    except sla.LinAlgError as exc:
        raise BucklabError(f"mass matrix is not positive definite: {exc}") from exc


def inertia(a: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> Inertia:
    """Signs of the spectrum via LDL^T with Bunch-Kaufman pivoting.

    Diagonal blocks with magnitude below ``zero_tol * max|A|`` count as
    zero; 2x2 pivot blocks are classified through their closed-form
    eigenvalues.
    """
    a = _require_symmetric(a, "A")
    n = len(a)
    if n == 0:
        return Inertia(0, 0, 0, zero_tol)
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return Inertia(0, n, 0, zero_tol)
    _, d, _ = sla.ldl(a)
    thresh = zero_tol * scale
    n_neg = n_zero = n_pos = 0
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            # 2x2 block: eigenvalues from trace/determinant
            p, q, r = d[i, i], d[i + 1, i + 1], d[i + 1, i]
            mid = 0.5 * (p + q)
            disc = np.hypot(0.5 * (p - q), r)
            for ev in (mid - disc, mid + disc):
                if abs(ev) <= thresh:
                    n_zero += 1
                elif ev < 0:
                    n_neg += 1
                else:
                    n_pos += 1
            i += 2
        else:
            ev = d[i, i]
            if abs(ev) <= thresh:
                n_zero += 1
            elif ev < 0:
                n_neg += 1
            else:
                n_pos += 1
            i += 1
    return Inertia(n_neg, n_zero, n_pos, zero_tol)


def schur_complement(
    q: np.ndarray,
    interior_idx: np.ndarray,
    boundary_idx: np.ndarray,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> np.ndarray:
    """S = Q_bb - Q_bi Q_ii^{-1} Q_ib for a symmetric Q.

    The two index sets must partition the dimension; the interior block
    must be nonsingular (checked by inertia), otherwise
    :class:`SingularBlockError` is raised.
    """
    q = _require_symmetric(q, "Q")
    interior_idx = np.asarray(interior_idx, dtype=np.int64)
    boundary_idx = np.asarray(boundary_idx, dtype=np.int64)
    merged = np.concatenate([interior_idx, boundary_idx])
    if len(merged) != len(q) or len(np.unique(merged)) != len(q):
        raise ValueError("index sets must partition the matrix dimension")
    q_ii = q[np.ix_(interior_idx, interior_idx)]
    if inertia(q_ii, zero_tol).n_zero:
        raise SingularBlockError("interior block is singular at this parameter")
    q_ib = q[np.ix_(interior_idx, boundary_idx)]
    if len(boundary_idx) == 0:
        return np.zeros((0, 0))
    x = sla.solve(q_ii, q_ib, assume_a="sym")
    s = q[np.ix_(boundary_idx, boundary_idx)] - q_ib.T @ x
    return 0.5 * (s + s.T)
