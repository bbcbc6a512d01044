"""Entropy primitives and the closed-form bound on Eve's information.

All entropies are in bits and 0*log(0) is treated as 0.  Probabilities may
carry round-off noise: values within 1e-12 of the valid range are clamped,
anything further out raises ValueError.
"""

import math

import numpy as np

from . import _kernels as _k

CHSH_LOCAL = 2.0
CHSH_MAX = _k.CHSH_MAX

_SLACK = 1e-12


def _check_prob(z, name):
    z = float(z)
    if z < -_SLACK or z > 1.0 + _SLACK:
        raise ValueError(f"{name} must lie in [0, 1], got {z!r}")
    return min(max(z, 0.0), 1.0)


def binary_entropy(z):
    """h(z) = -z log2 z - (1-z) log2(1-z)."""
    return _k.h2_k(_check_prob(z, "z"))


def shannon_entropy(dist):
    """Shannon entropy of a normalized distribution given as an array.

    :param dist: array-like of outcome probabilities summing to 1.
    :return: entropy in bits.
    """
    p = np.asarray(dist, dtype=float).ravel()
    if np.any(p < -_SLACK):
        raise ValueError("distribution has a negative entry beyond round-off")
    s = p.sum()
    if abs(s - 1.0) > _SLACK:
        raise ValueError(f"distribution sums to {s!r}, expected 1")
    return _k.entropy_vec_k(np.maximum(p, 0.0))


def conditional_entropy(joint):
    """H(B|A) of a joint table with A on axis 0 and B on axis 1."""
    t = np.asarray(joint, dtype=float)
    if t.ndim != 2:
        raise ValueError("joint table must be two-dimensional")
    if np.any(t < -_SLACK):
        raise ValueError("joint table has a negative entry beyond round-off")
    s = t.sum()
    if abs(s - 1.0) > _SLACK:
        raise ValueError(f"joint table sums to {s!r}, expected 1")
    return _k.cond_entropy_table_k(np.maximum(t, 0.0))


def n_q(z, q):
    """Eigenvalue-mixing map used by the preprocessing-adjusted entropy.

    n_q(z) = (1 + sqrt(1 - 4(1-q) z(1-z))) / 2.  At q = 1 this is
    max(z, 1-z); at q -> 0 it tends to 1/2 for any interior z.
    """
    z = _check_prob(z, "z")
    q = _check_prob(q, "q")
    return _k.nq_k(z, q)


def h_q(z, q):
    """h_q(z) = h(z) - h(n_q(z)); the entropy gain left after preprocessing."""
    z = _check_prob(z, "z")
    q = _check_prob(q, "q")
    return _k.hq_k(z, q)


def _check_chsh(S):
    S = float(S)
    if S < CHSH_LOCAL - 1e-9 or S > CHSH_MAX + 1e-9:
        raise ValueError(f"CHSH score {S!r} outside [2, 2*sqrt(2)]")
    return min(max(S, CHSH_LOCAL), CHSH_MAX)


def eve_info_bound(S, p):
    """Tight upper bound on Eve's information about Bob's preprocessed key bit.

    :param S: CHSH score in [2, 2*sqrt(2)] (1e-9 slack is clamped).
    :param p: bit-flip preprocessing probability in [0, 1/2].
    :return: bound in bits; nonincreasing in S and in p, 1 - h(p) at S = 2
        and 0 at S = 2*sqrt(2).
    """
    S = _check_chsh(S)
    p = float(p)
    if p < -_SLACK or p > 0.5 + _SLACK:
        raise ValueError(f"preprocessing probability {p!r} outside [0, 1/2]")
    p = min(max(p, 0.0), 0.5)
    return _k.ip_bound_k(S, p)


def hermitian4_eigensystem(m, tol=1e-10):
    """Eigen-decomposition of a 4x4 Hermitian matrix by cyclic Jacobi.

    Real symmetric input is diagonalized directly; complex Hermitian input is
    embedded as an 8x8 real symmetric matrix whose spectrum doubles.  Returns
    (w, V) with eigenvalues sorted descending and eigenvector columns.

    :param tol: allowed asymmetry |m - m^H| before the input is rejected.
    """
    m = np.asarray(m)
    if m.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    m = 0.5 * (m + m.conj().T)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag)) > 0.0:
        re = np.ascontiguousarray(m.real, dtype=float)
        im = np.ascontiguousarray(m.imag, dtype=float)
        big = np.block([[re, -im], [im, re]])
        w8, v8 = _k.jacobi_eigh_k(big, True, 1e-13, 50)
        w = w8[0::2].copy()
        # each eigenvalue appears twice; column pairs (x, y) encode x + i y
        V = np.empty((4, 4), dtype=complex)
        for j in range(4):
            col = v8[:, 2 * j]
            V[:, j] = col[:4] + 1j * col[4:]
            nrm = np.linalg.norm(V[:, j])
            if nrm > 0.0:
                V[:, j] /= nrm
        return w, V
    a = np.ascontiguousarray(m.real, dtype=float)
    return _k.jacobi_eigh_k(a, True, 1e-13, 50)


def hermitian4_eigenvalues(m, tol=1e-10):
    """Descending eigenvalues of a 4x4 Hermitian matrix.

    Intended for density operators: eigenvalues in (-tol, 0) are clamped to
    zero and anything more negative raises ValueError.
    """
    w, _ = hermitian4_eigensystem(m, tol=tol)
    if w[-1] < -tol:
        raise ValueError(f"matrix has negative eigenvalue {w[-1]!r}")
    return np.maximum(w, 0.0)


def symmetrized_conditional_entropy(joint):
    """H of the twirled key bit given the raw symbol and the public flip bit.

    Takes a k x 2 joint table p(a, b) over Alice's symbol and Bob's bit,
    applies a uniformly random public flip t to Bob's bit and returns
    H(B xor t | A, t).  Equals H(B|A) identically; exposed so the identity
    can be checked numerically on real protocol tables.
    """
    t = np.asarray(joint, dtype=float)
    if t.ndim != 2 or t.shape[1] != 2:
        raise ValueError("expected a k x 2 joint table")
    k = t.shape[0]
    big = np.empty((2 * k, 2))
    big[:k, 0] = 0.5 * t[:, 0]
    big[:k, 1] = 0.5 * t[:, 1]
    big[k:, 0] = 0.5 * t[:, 1]
    big[k:, 1] = 0.5 * t[:, 0]
    return conditional_entropy(big)
