import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bucklab import (
    BucklabError,
    SingularBlockError,
    inertia,
    schur_complement,
    sym_gen_eigs,
)

from oracles import jacobi_eigenvalues, random_symmetric


def test_diagonal_pencil():
    w, v = sym_gen_eigs(np.diag([2.0, 8.0]), np.diag([1.0, 2.0]), 2)
    np.testing.assert_allclose(w, [2.0, 4.0], atol=1e-12)
    # B-orthonormal eigenvectors
    b = np.diag([1.0, 2.0])
    np.testing.assert_allclose(v.T @ b @ v, np.eye(2), atol=1e-12)


def test_residual_bound(rng):
    a = random_symmetric(40, rng)
    c = random_symmetric(40, rng, 0.1)
    b = c @ c.T + np.eye(40)
    w, v = sym_gen_eigs(a, b, 10)
    for i in range(10):
        r = a @ v[:, i] - w[i] * (b @ v[:, i])
        bound = 1e-8 * (np.linalg.norm(a) + abs(w[i]) * np.linalg.norm(b))
        assert np.linalg.norm(r) <= bound * np.linalg.norm(v[:, i])


def test_matches_jacobi_oracle(rng):
    a = random_symmetric(50, rng)
    w, _ = sym_gen_eigs(a, np.eye(50), 50)
    oracle = jacobi_eigenvalues(a)
    np.testing.assert_allclose(w, oracle, atol=1e-9, rtol=1e-9)


def test_error_contracts(rng):
    a = random_symmetric(5, rng)
    with pytest.raises(BucklabError):
        sym_gen_eigs(a, -np.eye(5), 2)  # not SPD
    with pytest.raises(ValueError):
        sym_gen_eigs(a, np.eye(5), 6)  # count > dim
    with pytest.raises(ValueError):
        sym_gen_eigs(np.ones((2, 3)), np.eye(2), 1)


def test_inertia_examples():
    i = inertia(np.diag([1.0, -2.0, 0.0]))
    assert (i.n_neg, i.n_zero, i.n_pos) == (1, 1, 1)
    i = inertia(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalues 3, -1
    assert (i.n_neg, i.n_zero, i.n_pos) == (1, 0, 1)
    assert sum(iter(i)) == 2


def test_inertia_agrees_with_eigensolver(rng):
    a = random_symmetric(100, rng)
    i = inertia(a)
    w, _ = sym_gen_eigs(a, np.eye(100), 100)
    assert i.n_neg == int(np.sum(w < 0))
    assert i.n_zero == 0
    assert i.n_neg + i.n_zero + i.n_pos == 100


def test_schur_by_hand():
    q = np.array([[1.0, 2.0], [2.0, 1.0]])
    s = schur_complement(q, np.array([0]), np.array([1]))
    np.testing.assert_allclose(s, [[-3.0]], atol=1e-14)

    block = np.zeros((4, 4))
    block[:2, :2] = np.array([[2.0, 1.0], [1.0, 2.0]])
    block[2:, 2:] = np.array([[5.0, -1.0], [-1.0, 4.0]])
    s = schur_complement(block, np.array([0, 1]), np.array([2, 3]))
    np.testing.assert_allclose(s, block[2:, 2:], atol=1e-14)


def test_schur_errors(rng):
    q = random_symmetric(6, rng)
    with pytest.raises(ValueError):
        schur_complement(q, np.array([0, 1]), np.array([1, 2, 3, 4, 5]))
    singular = np.zeros((3, 3))
    singular[2, 2] = 1.0
    with pytest.raises(SingularBlockError):
        schur_complement(singular, np.array([0, 1]), np.array([2]))


def test_haynsworth_additivity_exact(rng):
    for _ in range(20):
        n = int(rng.integers(6, 30))
        q = random_symmetric(n, rng)
        split = int(rng.integers(1, n))
        perm = rng.permutation(n)
        interior, boundary = perm[:split], perm[split:]
        try:
            s = schur_complement(q, interior, boundary)
        except SingularBlockError:
            continue
        full = inertia(q)
        inner = inertia(q[np.ix_(interior, interior)])
        outer = inertia(s)
        assert full.n_neg == inner.n_neg + outer.n_neg
        assert full.n_pos == inner.n_pos + outer.n_pos


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_inertia_invariant_under_congruence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 12))
    # diagonal with well-separated signs, then a well-conditioned congruence
    signs = rng.choice([-1.0, 1.0], size=n)
    d = np.diag(signs * rng.uniform(0.5, 2.0, size=n))
    t = np.eye(n) + np.tril(rng.uniform(-0.3, 0.3, size=(n, n)), -1)
    a = t @ d @ t.T
    i = inertia(a)
    assert i.n_neg == int(np.sum(signs < 0))
    assert i.n_zero == 0


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_eigenvalues_invariant_under_permutation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    a = random_symmetric(n, rng)
    c = random_symmetric(n, rng, 0.2)
    b = c @ c.T + np.eye(n)
    perm = rng.permutation(n)
    w1, _ = sym_gen_eigs(a, b, n)
    w2, _ = sym_gen_eigs(a[np.ix_(perm, perm)], b[np.ix_(perm, perm)], n)
    np.testing.assert_allclose(w1, w2, atol=1e-9, rtol=1e-9)
