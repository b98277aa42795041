import numpy as np
import pytest

from bucklab import (
    SpectrumRangeError,
    cap_buckling_lambda1,
    cap_operators,
    cap_scan,
    cap_spectrum,
    make_radial_grid,
)
from bucklab.eigen import sym_gen_eigs
from bucklab.spherecap import cap_buckling_lambda1_via_modes


def mode_eigs(eps, m, n, bc, k, order="second"):
    grid = make_radial_grid(eps, n, "geometric")
    ops = cap_operators(grid, m, order)
    free = ops.free_dofs(bc)
    w, _ = sym_gen_eigs(ops.k_m[np.ix_(free, free)], ops.m_m[np.ix_(free, free)], k)
    return w


def test_closed_sphere_limit_mode0():
    w = mode_eigs(1e-3, 0, 64, "neumann", 3)
    targets = np.array([0.0, 2.0, 6.0])
    assert abs(w[0]) < 1e-3
    assert np.all(np.abs(w[1:] - targets[1:]) / targets[1:] < 0.01)


def test_closed_sphere_limit_mode1():
    w = mode_eigs(1e-3, 1, 64, "neumann", 1)
    assert abs(w[0] - 2.0) / 2.0 < 0.01


def test_mode0_rowsum_constants_in_kernel():
    grid = make_radial_grid(0.3, 32, "uniform")
    ops = cap_operators(grid, 0, "second")
    ones = np.ones(ops.n_dofs)
    assert np.max(np.abs(ops.k_m @ ones)) < 1e-10 * np.max(np.abs(ops.k_m))


def test_matrices_symmetric():
    grid = make_radial_grid(0.2, 24, "geometric")
    for m in (0, 1, 3):
        for order in ("second", "fourth"):
            ops = cap_operators(grid, m, order)
            mats = [ops.k_m, ops.m_m] + ([ops.a_m] if ops.a_m is not None else [])
            for mat in mats:
                assert np.max(np.abs(mat - mat.T)) <= 1e-12 * np.max(np.abs(mat))


def test_pole_rules():
    grid = make_radial_grid(0.2, 16, "uniform")
    s0 = cap_operators(grid, 0, "second")
    assert s0.pole_value_dof() in s0.free_dofs("dirichlet")
    s1 = cap_operators(grid, 1, "second")
    assert s1.pole_value_dof() not in s1.free_dofs("dirichlet")

    f0 = cap_operators(grid, 0, "fourth")
    free0 = f0.free_dofs("clamped")
    assert f0.pole_value_dof() in free0
    assert f0.pole_derivative_dof() not in free0
    f1 = cap_operators(grid, 1, "fourth")
    free1 = f1.free_dofs("clamped")
    assert f1.pole_value_dof() not in free1
    assert f1.pole_derivative_dof() in free1
    f2 = cap_operators(grid, 2, "fourth")
    free2 = f2.free_dofs("clamped")
    assert f2.pole_value_dof() not in free2
    assert f2.pole_derivative_dof() not in free2


def test_cap_spectrum_small_eps():
    mu = cap_spectrum(0.1, "neumann", 3, 3)
    assert abs(mu.values[0]) < 1e-4
    assert abs(mu.values[1] - 2.0) / 2.0 < 0.02
    lam = cap_spectrum(0.1, "dirichlet", 3, 2)
    assert lam.values[0] < 0.7
    # the comparison inequality fails on the punctured sphere
    assert lam.values[0] < mu.values[1]


def test_mode_merge_multiplicity_clusters():
    spec = cap_spectrum(1e-3, "neumann", 5, 9, 64)
    values = spec.values
    clusters = {0.0: 0, 2.0: 0, 6.0: 0}
    for v in values:
        for center in clusters:
            if center == 0.0:
                if abs(v) < 1e-3:
                    clusters[center] += 1
            elif abs(v - center) / center < 0.02:
                clusters[center] += 1
    assert clusters[0.0] == 1
    assert clusters[2.0] == 3
    assert clusters[6.0] == 5


def test_grid_refinement_changes_lambda1_little():
    coarse = cap_spectrum(0.05, "dirichlet", 2, 1, 64).values[0]
    fine = cap_spectrum(0.05, "dirichlet", 2, 1, 128).values[0]
    assert abs(fine - coarse) / fine < 0.005


def test_buckling_mesh_cauchy_and_above_dirichlet():
    res = cap_buckling_lambda1(0.5, modes=3, n_nodes=64)
    assert res.rel_change < 0.01
    assert not res.resolution_warning
    lam1 = cap_spectrum(0.5, "dirichlet", 3, 1).values[0]
    assert res.value > lam1


def test_buckling_cross_discretization_hemisphere():
    direct = cap_buckling_lambda1(np.pi / 2 - 1e-9, modes=2, n_nodes=64)
    via_modes = cap_buckling_lambda1_via_modes(np.pi / 2 - 1e-9, modes=2)
    assert abs(direct.value - via_modes) / direct.value < 0.02


def test_cap_scan_contract():
    scan = cap_scan([0.4, 0.2, 0.1, 0.05], n_nodes=48, modes=3)
    assert len(scan.records) == 4
    assert scan.skips == []
    lam1s = [r["lambda1"] for r in scan.records]
    # monotone in eps: smaller cap removed, smaller ground value
    assert all(a > b for a, b in zip(lam1s, lam1s[1:]))
    for r in scan.records:
        assert not r["resolution_warning"]
        assert r["Lambda1"] > r["lambda1"]
        if r["eps"] <= 0.1:
            assert r["friedlander_fails"]
            assert abs(r["mu2"] - 2.0) / 2.0 < 0.02
        assert isinstance(r["payne_fails"], bool)


def test_cap_spectrum_range_guard():
    with pytest.raises(SpectrumRangeError):
        cap_spectrum(0.3, "dirichlet", 2, 10_000, 16)
    with pytest.raises(ValueError):
        cap_spectrum(0.3, "dirichlet", 1, 2)
