"""Entropy helpers and the closed-form information bound."""

import math

import numpy as np
import pytest

from diqkd import (
    binary_entropy,
    conditional_entropy,
    eve_info_bound,
    hermitian4_eigenvalues,
    shannon_entropy,
    symmetrized_conditional_entropy,
)
from diqkd.entropy import hermitian4_eigensystem, h_q, n_q


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-15)
    assert binary_entropy(0.2) == pytest.approx(0.7219280948873623, abs=1e-15)
    assert binary_entropy(0.05) == pytest.approx(0.28639695711595625, abs=1e-15)


def test_binary_entropy_symmetry():
    for x in (0.01, 0.2, 0.37, 0.49):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1 - x), abs=1e-15)


def test_shannon_entropy_basics():
    assert shannon_entropy([0.25, 0.25, 0.25, 0.25]) == pytest.approx(2.0, abs=1e-12)
    assert shannon_entropy([1.0, 0.0, 0.0, 0.0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)


def test_shannon_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        shannon_entropy([0.5, -0.1, 0.6])
    with pytest.raises(ValueError):
        shannon_entropy([0.3, 0.3])


def test_conditional_entropy_product_table():
    # independent A, B: H(B|A) = H(B)
    a = np.array([0.3, 0.7])
    b = np.array([0.2, 0.8])
    joint = np.outer(a, b)
    assert conditional_entropy(joint) == pytest.approx(binary_entropy(0.2), abs=1e-12)


def test_conditional_entropy_chain_rule():
    rng = np.random.default_rng(5)
    for _ in range(20):
        joint = rng.dirichlet(np.ones(8)).reshape(4, 2)
        marg_a = joint.sum(axis=1)
        chain = shannon_entropy(joint.ravel()) - shannon_entropy(marg_a)
        assert conditional_entropy(joint) == pytest.approx(chain, abs=1e-10)


def test_nq_hq_identities():
    # at z = 1/2 the mixing map collapses to (1 + sqrt(q)) / 2
    for q in (0.04, 0.36, 0.81):
        expect = (1 + math.sqrt(q)) / 2
        assert n_q(0.5, q) == pytest.approx(expect, abs=1e-15)
        assert h_q(0.5, q) == pytest.approx(1.0 - binary_entropy(expect), abs=1e-15)
    # endpoints are fixed points regardless of q
    assert n_q(0.0, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert h_q(0.0, 0.3) == pytest.approx(0.0, abs=1e-15)


def test_bound_endpoints():
    s_max = 2 * math.sqrt(2.0)
    for p in (0.0, 0.1, 0.3):
        assert abs(eve_info_bound(s_max, p)) <= 1e-12
        assert eve_info_bound(2.0, p) == pytest.approx(1 - binary_entropy(p), abs=1e-12)


def test_bound_no_preprocessing_spot():
    # at p = 0 the bound is h((1 + sqrt(S^2/4 - 1)) / 2)
    assert eve_info_bound(2.5, 0.0) == pytest.approx(0.5435644431995964, abs=1e-14)


def test_bound_nonincreasing_in_score():
    for p in (0.0, 0.05, 0.2, 0.4):
        vals = [eve_info_bound(s, p) for s in np.linspace(2.0, 2 * math.sqrt(2.0), 200)]
        diffs = np.diff(vals)
        assert diffs.max() <= 1e-12


def test_bound_decreasing_in_p():
    for s in (2.1, 2.5, 2.7):
        vals = [eve_info_bound(s, p) for p in np.linspace(0.0, 0.49, 50)]
        assert np.diff(vals).max() <= 1e-12


def test_bound_domain_errors():
    with pytest.raises(ValueError):
        eve_info_bound(1.5, 0.0)
    with pytest.raises(ValueError):
        eve_info_bound(3.0, 0.0)
    with pytest.raises(ValueError):
        eve_info_bound(2.5, -0.1)
    with pytest.raises(ValueError):
        eve_info_bound(2.5, 0.6)


def test_eigenvalues_match_numpy_hermitian():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = a + a.conj().T
        mine = hermitian4_eigensystem(m)[0]
        ref = np.linalg.eigvalsh(m)[::-1]
        assert np.allclose(mine, ref, atol=1e-10)


def test_eigenvectors_reconstruct():
    rng = np.random.default_rng(12)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = a + a.conj().T
    w, v = hermitian4_eigensystem(m)
    assert np.abs(m @ v - v @ np.diag(w)).max() < 1e-9


def test_eigenvalues_clamp_tiny_negative():
    # a rank-deficient density-like matrix may produce -1e-16 eigenvalues
    vec = np.array([0.6, 0.0, 0.8, 0.0])
    rho = np.outer(vec, vec)
    w = hermitian4_eigenvalues(rho)
    assert (w >= 0.0).all()
    assert w[0] == pytest.approx(1.0, abs=1e-12)


def test_symmetrization_preserves_conditional_entropy():
    rng = np.random.default_rng(13)
    for _ in range(50):
        joint = rng.dirichlet(np.ones(8)).reshape(4, 2)
        assert symmetrized_conditional_entropy(joint) == pytest.approx(
            conditional_entropy(joint), abs=1e-12
        )
