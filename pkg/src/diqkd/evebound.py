"""Eve's conditional entropy over Bell-diagonal attacks and its brute-force maximum.

The adversary prepares a Bell-diagonal state with weights L = (L1, L2, L3, L4)
(ordered L1 >= L2 and L3 >= L4, which costs no generality) and Bob measures an
axis parametrized by C = cos(2*phi).  Eve's information about Bob's
preprocessed outcome is the weight entropy minus the entropy of her state
conditioned on the outcome.  oracle_max_eve_info maximizes that information
over all weights compatible with a given CHSH score, which is what the
closed-form bound in :mod:`diqkd.entropy` is checked against.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .entropy import CHSH_MAX, _check_chsh, _check_prob

_WSLACK = 1e-12


def _as_weights(L):
    """Validate Bell-diagonal weights: nonnegative, normalized, pair-ordered."""
    w = np.asarray(L, dtype=float).ravel()
    if w.shape != (4,):
        raise ValueError("weights must have four entries")
    if np.any(w < -_WSLACK):
        raise ValueError("weights must be nonnegative")
    w = np.maximum(w, 0.0)
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
    if w[0] < w[1] - _WSLACK or w[2] < w[3] - _WSLACK:
        raise ValueError("weights must satisfy L1 >= L2 and L3 >= L4")
    return w


def _q_of(p):
    p = float(p)
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"preprocessing probability {p!r} outside [0, 1/2]")
    q = (1.0 - 2.0 * p) ** 2
    if q == 0.0:
        raise ValueError("p = 1/2 gives q = 0; the conditional state is degenerate there")
    return q


def bell_chsh(L):
    """Largest CHSH score reachable from Bell-diagonal weights L."""
    w = _as_weights(L)
    return _k.bell_chsh_k(w[0], w[1], w[2], w[3])


def eve_conditional_state(L, p, phi, outcome=+1):
    """Eve's 4x4 state conditioned on Bob's preprocessed outcome.

    :param L: Bell-diagonal weights.
    :param p: bit-flip preprocessing probability in [0, 1/2).
    :param phi: measurement axis angle; only cos(2*phi) enters.
    :param outcome: +1 or -1; the two spectra coincide.
    :return: real symmetric 4x4 ndarray with trace 1.
    """
    w = _as_weights(L)
    q = _q_of(p)
    if outcome not in (+1, -1):
        raise ValueError("outcome must be +1 or -1")
    out = np.empty((4, 4))
    _k.eve_state_fill_k(w[0], w[1], w[2], w[3], q, np.cos(2.0 * float(phi)), float(outcome), out)
    return out


def eve_conditional_entropy(L, q, C):
    """Entropy in bits of Eve's conditional state at axis parameter C = cos(2*phi)."""
    w = _as_weights(L)
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q!r}")
    C = float(C)
    if not -1.0 - 1e-12 <= C <= 1.0 + 1e-12:
        raise ValueError(f"C must lie in [-1, 1], got {C!r}")
    return _k.eve_cond_entropy_k(w[0], w[1], w[2], w[3], q, C)


def eve_information(L, p, C):
    """Eve's information H(L) - S(rho_E|outcome) in bits."""
    w = _as_weights(L)
    q = _q_of(p)
    C = float(C)
    if not -1.0 - 1e-12 <= C <= 1.0 + 1e-12:
        raise ValueError(f"C must lie in [-1, 1], got {C!r}")
    return _k.eve_info_k(w[0], w[1], w[2], w[3], q, C)


@dataclass(frozen=True)
class OracleResult:
    """Outcome of the brute-force maximization at one (S, p) point."""

    value: float
    weights: np.ndarray
    c: float
    chsh: float


def oracle_max_eve_info(S, p, grid=(64, 64, 64, 9), refine_maxfev=2000):
    """Brute-force maximum of Eve's information over attacks with CHSH >= S.

    Scans the mixing parametrization L = (P x, (1-P) y, P(1-x), (1-P)(1-y))
    with P in [1/2, 1] and the axis parameter C in [-1, 1] on a full grid,
    then polishes the best grid points with Nelder-Mead.  No structural
    shortcut is taken: the optimum's location (edge weights, C = 1) has to
    emerge from the search.

    :param S: CHSH score in [2, 2*sqrt(2)].
    :param p: preprocessing probability in [0, 1/2).
    :param grid: point counts (n_P, n_x, n_y, n_C).
    :param refine_maxfev: evaluation budget per polish run.
    :return: OracleResult with the maximal information and its argmax.
    """
    S = _check_chsh(S)
    q = _q_of(p)
    nP, nx, ny, nC = grid
    # cosine spacing packs points near the box faces: close to the Tsirelson
    # score the feasible set is a sliver hugging the simplex boundary, thinner
    # than any affordable uniform spacing
    Pg = 0.5 + 0.25 * (1.0 - np.cos(np.linspace(0.0, np.pi, nP)))
    xg = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, nx)))
    yg = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, ny)))
    Cg = np.linspace(-1.0, 1.0, nC)
    K = 5
    vals = np.full((nP, K), -np.inf)
    args = np.zeros((nP, K, 4))
    _k.oracle_scan_k(S, q, Pg, xg, yg, Cg, vals, args)

    flat = vals.ravel()
    order = np.argsort(-flat)[:K]
    if not np.isfinite(flat[order[0]]):
        raise RuntimeError("no feasible grid point; grid too coarse for this score")
    starts = args.reshape(-1, 4)[order]
    best_f = -flat[order[0]]
    best_x = starts[0]

    lo = np.array([0.5, 0.0, 0.0, -1.0])
    hi = np.array([1.0, 1.0, 1.0, 1.0])
    consts = np.array([S, q])
    keep = np.isfinite(flat[order])
    starts = np.ascontiguousarray(starts[keep])
    out_f = np.empty(starts.shape[0])
    out_x = np.empty((starts.shape[0], 4))
    _k.multistart_k(_k.OBJ_ORACLE, consts, starts, lo, hi, refine_maxfev, 1e-10, 1e-13, out_f, out_x)
    for i in range(starts.shape[0]):
        if out_f[i] < best_f:
            best_f = out_f[i]
            best_x = out_x[i]

    P, x, y, C = best_x
    w = np.array([P * x, (1.0 - P) * y, P * (1.0 - x), (1.0 - P) * (1.0 - y)])
    return OracleResult(value=-best_f, weights=w, c=float(C), chsh=bell_chsh(w))


def verify_monotonicity(L, q, samples=101, slack=1e-10):
    """Check that Eve's conditional entropy is nonincreasing in C.

    Evaluates the entropy on a uniform C grid of the given size and returns a
    list of (C_lo, C_hi, s_lo, s_hi) tuples where s(C_hi) > s(C_lo) + slack.
    An empty list means the monotonicity holds on this grid.
    """
    w = _as_weights(L)
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q!r}")
    cs = np.linspace(-1.0, 1.0, int(samples))
    ent = np.array([_k.eve_cond_entropy_k(w[0], w[1], w[2], w[3], q, c) for c in cs])
    bad = []
    for i in range(len(cs) - 1):
        if ent[i + 1] > ent[i] + slack:
            bad.append((float(cs[i]), float(cs[i + 1]), float(ent[i]), float(ent[i + 1])))
    return bad


def random_weights(rng):
    """Draw valid Bell-diagonal weights uniformly from the simplex, pair-ordered."""
    u = rng.dirichlet(np.ones(4))
    return np.array([max(u[0], u[1]), min(u[0], u[1]), max(u[2], u[3]), min(u[2], u[3])])
