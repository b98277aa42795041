import math

import numpy as np
import pytest

from bucklab import (
    ConstraintViolationError,
    alpha_value,
    bounded_below_check,
    buckling_ground_state,
    disk_oracle,
    divergence_sweep,
    make_perturbation,
    rayleigh_quotient,
)
from bucklab.counterexample import alpha_pencil
from bucklab.spectra import get_pair


@pytest.fixture(scope="module")
def disk3_pair(disk3):
    return get_pair(disk3, "morley")


@pytest.fixture(scope="module")
def ground(disk3_pair):
    return buckling_ground_state(disk3_pair)


def test_ground_state_contract(disk3, disk3_pair, ground):
    u1, lam1 = ground
    oracle = disk_oracle("buckling", 1).values[0]
    assert abs(lam1 - oracle) / oracle < 0.02
    constrained = disk3_pair.dofmap.boundary_dofs()
    assert np.all(u1[constrained] == 0.0)
    assert abs(u1 @ disk3_pair.k_grad @ u1 - 1.0) < 1e-12


def test_alpha_values(disk3_pair, ground):
    u1, lam1 = ground
    assert abs(alpha_value(u1, lam1, disk3_pair)) < 1e-10
    assert abs(alpha_value(u1, lam1 + 5.0, disk3_pair) + 5.0) < 1e-10
    oracle = disk_oracle("buckling", 1).values[0]
    a20 = alpha_value(u1, 20.0, disk3_pair)
    assert abs(a20 - (oracle - 20.0)) / abs(oracle - 20.0) < 0.01
    # the one-line identity, two ways
    assert abs(a20 - alpha_pencil(lam1, 20.0, u1, disk3_pair)) < 1e-10


def test_perturbation_contract(disk3, disk3_pair):
    h = make_perturbation(disk3_pair)
    perimeter = disk3.perimeter()
    assert abs((disk3_pair.b_normal_diag * h) @ h - perimeter) < 1e-10
    assert np.all(h[disk3_pair.dofmap.boundary_value_dofs()] == 0.0)
    bending = h @ disk3_pair.a_bend @ h
    assert np.isfinite(bending)
    assert bending > 0


def test_quotient_markers_and_samples(disk3_pair, ground):
    u1, lam1 = ground
    s = rayleigh_quotient(u1, lam1 + 5.0, disk3_pair)
    assert s.denominator <= 1e-14
    assert s.numerator < 0
    assert s.quotient == -math.inf

    h = make_perturbation(disk3_pair)
    s0 = rayleigh_quotient(h, 0.0, disk3_pair)
    assert s0.quotient > 0
    assert s0.quotient * s0.denominator == pytest.approx(s0.numerator, rel=1e-10)

    s_eps = rayleigh_quotient(u1 + 1e-2 * h, 20.0, disk3_pair, eps=1e-2)
    assert s_eps.quotient < -1e3

    bad = np.ones(disk3_pair.dofmap.n_dofs)
    with pytest.raises(ConstraintViolationError):
        rayleigh_quotient(bad, 1.0, disk3_pair)


def test_divergence_sweep(disk3):
    report = divergence_sweep(disk3, 20.0, [1e-1, 1e-2, 1e-3, 1e-4])
    assert report.fitted_slope == pytest.approx(-2.0, abs=0.15)
    assert not report.anomaly
    assert abs(report.alpha - report.alpha_pencil) < 1e-10
    # numerator at the smallest eps is alpha to 0.1%
    last = report.samples[-1]
    assert last.eps == 1e-4
    assert abs(last.numerator - report.alpha) < 1e-3 * abs(report.alpha)
    # ordering by decreasing eps
    eps_seq = [s.eps for s in report.samples]
    assert eps_seq == sorted(eps_seq, reverse=True)


def test_divergence_sweep_preconditions(disk3, ground):
    _, lam1 = ground
    with pytest.raises(ValueError):
        divergence_sweep(disk3, lam1 - 1.0, [1e-1, 1e-2])
    with pytest.raises(ValueError):
        divergence_sweep(disk3, 20.0, [1e-2, 1e-1])
    with pytest.raises(ValueError):
        divergence_sweep(disk3, 20.0, [])


def test_bounded_below_regime(disk3):
    report = bounded_below_check(disk3, 2.0, trials=50)
    assert report.passed
    assert report.beta1 > 0
    assert report.min_quotient >= report.beta1 - 1e-8 * abs(report.beta1)
    assert report.interior_residual <= 1e-6
    # the lifted trace minimizer attains the infimum
    assert report.minimizer_quotient == pytest.approx(report.beta1, rel=1e-8)

    # between the first Dirichlet-type value and the buckling threshold
    report10 = bounded_below_check(disk3, 10.0, trials=50)
    assert report10.passed
    assert report10.beta1 < 0
    assert report10.interior_residual <= 1e-6
    assert report10.minimizer_quotient == pytest.approx(report10.beta1, rel=1e-8)


def test_bounded_below_vacuous_trials(disk3):
    report = bounded_below_check(disk3, 2.0, trials=0)
    assert report.passed
    assert report.n_trials == 0
    assert report.beta1 > 0


def test_bounded_below_precondition(disk3, ground):
    _, lam1 = ground
    with pytest.raises(ValueError):
        bounded_below_check(disk3, lam1 + 1.0, trials=5)
