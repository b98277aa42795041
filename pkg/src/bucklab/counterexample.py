"""Unboundedness of the trace Rayleigh quotient over the full
zero-boundary-value space.

The quotient

    [ bending(v) - lambda * gradient(v) ] / boundary-normal-mass(v)

restricted to discrete fields with zero boundary values is bounded
below exactly when the clamped fourth-order block at ``lambda`` is
positive definite, i.e. for lambda below the first buckling eigenvalue.
Beyond it, adding a small multiple of a fixed perturbation with unit
boundary normal derivative to the clamped ground state drives the
quotient to -infinity like 1/eps^2: the numerator tends to the negative
constant alpha while the denominator is exactly eps^2 times the
boundary perimeter. This module reproduces both regimes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import OperatorPair, classify_dofs
from .eigen import sym_gen_eigs
from .errors import ConstraintViolationError, MeshError
from .mesh import Mesh
from .spectra import get_pair
from .traceops import ntl_operator, trace_spectrum

DENOMINATOR_FLOOR = 1e-14
BOUNDARY_VALUE_TOL = 1e-12


@dataclass(frozen=True)
class QuotientSample:
    """One evaluation of the trace Rayleigh quotient.

    ``eps`` is the perturbation size when the sample belongs to a
    sweep, else None. A denominator below 1e-14 is reported as a signed
    infinity marker carrying the numerator's sign, never as a float
    division.
    """

    eps: float | None
    numerator: float
    denominator: float
    quotient: float


@dataclass(frozen=True)
class DivergenceReport:
    lam: float
    lambda1_buckling: float
    alpha: float
    alpha_pencil: float
    grad_energy: float
    samples: tuple[QuotientSample, ...]
    fitted_slope: float
    slope_stderr: float
    anomaly: bool = False


@dataclass(frozen=True)
class BoundedBelowReport:
    lam: float
    beta1: float
    n_trials: int
    min_quotient: float
    minimizer_quotient: float
    violations: int
    interior_residual: float
    passed: bool


def _as_pair(mesh_or_pair) -> OperatorPair:
    if isinstance(mesh_or_pair, OperatorPair):
        if mesh_or_pair.a_bend is None:
            raise ValueError("need a Morley operator pair")
        return mesh_or_pair
    if isinstance(mesh_or_pair, Mesh):
        return get_pair(mesh_or_pair, "morley")
    raise TypeError(f"expected Mesh or OperatorPair, got {type(mesh_or_pair)!r}")


def buckling_ground_state(mesh_or_pair) -> tuple[np.ndarray, float]:
    """Clamped fourth-order ground state, normalized to unit gradient
    energy, lifted to the full DOF vector (zeros on constrained DOFs)."""
    pair = _as_pair(mesh_or_pair)
    _, free = classify_dofs(pair.dofmap, "clamped")
    f = pair.fourth_order_matrix()
    w, v = sym_gen_eigs(
        f[np.ix_(free, free)], pair.k_grad[np.ix_(free, free)], 1
    )
    u1 = np.zeros(pair.dofmap.n_dofs)
    u1[free] = v[:, 0]
    u1 /= math.sqrt(u1 @ pair.k_grad @ u1)
    return u1, float(w[0])


def alpha_value(u1: np.ndarray, lam: float, pair: OperatorPair) -> float:
    """Direct quadratic-form value bending(u1) - lam * gradient(u1).

    With the unit-gradient normalization of the ground state this
    equals (first buckling eigenvalue - lam) up to roundoff.
    """
    f = pair.fourth_order_matrix()
    return float(u1 @ f @ u1 - lam * (u1 @ pair.k_grad @ u1))


def alpha_pencil(lambda1: float, lam: float, u1: np.ndarray, pair: OperatorPair) -> float:
    """The one-line identity -(lam - lambda1) * gradient(u1)."""
    return float(-(lam - lambda1) * (u1 @ pair.k_grad @ u1))


def make_perturbation(mesh_or_pair) -> np.ndarray:
    """Bending-energy minimizer with zero boundary values and unit
    boundary normal derivative DOFs; its boundary normal mass equals
    the mesh perimeter, giving the sweep a fixed positive denominator."""
    pair = _as_pair(mesh_or_pair)
    _, free = classify_dofs(pair.dofmap, "clamped")
    g = np.zeros(pair.dofmap.n_dofs)
    g[pair.dofmap.boundary_normal_dofs()] = 1.0
    f = pair.fourth_order_matrix()
    rhs = -(f @ g)[free]
    try:
        sol = sla.solve(f[np.ix_(free, free)], rhs, assume_a="pos")
    except sla.LinAlgError as exc:
        raise MeshError(f"perturbation solve failed: {exc}") from exc
    h = g.copy()
    h[free] = sol
    return h


def rayleigh_quotient(v: np.ndarray, lam: float, pair: OperatorPair,
                      eps: float | None = None) -> QuotientSample:
    """Evaluate the quotient at a field with zero boundary values."""
    bval = pair.dofmap.boundary_value_dofs()
    if len(bval) and np.max(np.abs(v[bval])) > BOUNDARY_VALUE_TOL:
        raise ConstraintViolationError(
            "trial field has nonzero boundary values"
        )
    f = pair.fourth_order_matrix()
    num = float(v @ f @ v - lam * (v @ pair.k_grad @ v))
    den = float((pair.b_normal_diag * v) @ v)
    if den <= DENOMINATOR_FLOOR:
        if num == 0.0:
            quot = 0.0
        else:
            quot = math.inf if num > 0 else -math.inf
    else:
        quot = num / den
    return QuotientSample(eps, num, den, quot)


def divergence_sweep(mesh_or_pair, lam: float, eps_list) -> DivergenceReport:
    """Quotient samples along v = ground_state + eps * perturbation for
    decreasing eps, with the log-log slope fit over the negative
    samples (expected slope -2)."""
    pair = _as_pair(mesh_or_pair)
    eps_arr = [float(e) for e in eps_list]
    if not eps_arr or any(e <= 0 for e in eps_arr):
        raise ValueError("eps_list must be nonempty and positive")
    if any(a <= b for a, b in zip(eps_arr, eps_arr[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    u1, lambda1 = buckling_ground_state(pair)
    margin = 1e-3 * max(1.0, abs(lambda1))
    if lam <= lambda1 + margin:
        raise ValueError(
            f"lambda={lam} must exceed the first buckling eigenvalue "
            f"{lambda1:.6g} by the margin {margin:.2g}"
        )
    h = make_perturbation(pair)
    samples = tuple(
        rayleigh_quotient(u1 + e * h, lam, pair, eps=e) for e in eps_arr
    )
    alpha = alpha_value(u1, lam, pair)
    neg = [
        s for s in samples if s.quotient < 0 and math.isfinite(s.quotient)
    ]
    if len(neg) >= 2:
        x = np.log([s.eps for s in neg])
        y = np.log([abs(s.quotient) for s in neg])
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        dof = max(len(neg) - 2, 1)
        denom = float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(float(np.sum(resid**2)) / dof / denom)
    else:
        slope, stderr = math.nan, math.nan
    anomaly = any(s.quotient >= 0 for s in samples)
    return DivergenceReport(
        lam=lam,
        lambda1_buckling=lambda1,
        alpha=alpha,
        alpha_pencil=alpha_pencil(lambda1, lam, u1, pair),
        grad_energy=float(u1 @ pair.k_grad @ u1),
        samples=samples,
        fitted_slope=float(slope),
        slope_stderr=float(stderr),
        anomaly=anomaly,
    )


def bounded_below_check(
    mesh_or_pair, lam: float, trials: int, seed: int = 0
) -> BoundedBelowReport:
    """Below the first buckling eigenvalue the infimum of the quotient
    over zero-boundary-value fields is the smallest trace eigenvalue.

    Evaluates the quotient at random trial fields plus the perturbation
    family and asserts none undercuts beta1; also lifts the minimizing
    trace direction to the full space and reports its interior equation
    residual (the discrete form of the attained infimum belonging to
    the solution space).
    """
    pair = _as_pair(mesh_or_pair)
    mesh = pair.mesh
    u1, lambda1 = buckling_ground_state(pair)
    margin = 1e-3 * max(1.0, abs(lambda1))
    if lam >= lambda1 - margin:
        raise ValueError(
            f"lambda={lam} must stay below the first buckling eigenvalue "
            f"{lambda1:.6g} by the margin {margin:.2g}"
        )
    t = ntl_operator(mesh, lam)
    _, beta1, _ = trace_spectrum(t, 1)

    rng = np.random.default_rng(seed)
    _, navier_free = classify_dofs(pair.dofmap, "navier")
    h = make_perturbation(pair)
    quotients: list[float] = []
    for _ in range(trials):
        v = np.zeros(pair.dofmap.n_dofs)
        v[navier_free] = rng.standard_normal(len(navier_free))
        quotients.append(rayleigh_quotient(v, lam, pair).quotient)
    for e in (1e-1, 1e-2, 1e-3, 1e-4):
        quotients.append(rayleigh_quotient(u1 + e * h, lam, pair, eps=e).quotient)

    floor = beta1 - 1e-8 * abs(beta1)
    finite = [q for q in quotients if math.isfinite(q)]
    violations = sum(1 for q in finite if q < floor)
    min_q = min(finite) if finite else math.inf

    # lift the minimizing trace direction and check the interior equations
    _, vecs = sym_gen_eigs(t.matrix, t.boundary_mass, 1)
    psi = vecs[:, 0]
    f = pair.fourth_order_matrix()
    q_full = (f - lam * pair.k_grad)[np.ix_(navier_free, navier_free)]
    bnd_in_free = np.searchsorted(navier_free, t.boundary_dofs)
    int_in_free = np.setdiff1d(np.arange(len(navier_free)), bnd_in_free)
    rhs = -q_full[np.ix_(int_in_free, bnd_in_free)] @ psi
    interior = sla.solve(
        q_full[np.ix_(int_in_free, int_in_free)], rhs, assume_a="sym"
    )
    v_min = np.zeros(len(navier_free))
    v_min[bnd_in_free] = psi
    v_min[int_in_free] = interior
    v_min /= np.linalg.norm(v_min)
    residual = float(np.linalg.norm((q_full @ v_min)[int_in_free]))
    v_full = np.zeros(pair.dofmap.n_dofs)
    v_full[navier_free] = v_min
    minimizer_q = rayleigh_quotient(v_full, lam, pair).quotient

    return BoundedBelowReport(
        lam=lam,
        beta1=beta1,
        n_trials=trials,
        min_quotient=float(min_q),
        minimizer_quotient=float(minimizer_q),
        violations=violations,
        interior_residual=residual,
        passed=violations == 0,
    )
