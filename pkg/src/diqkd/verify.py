"""Property suites that cross-check the closed-form bound and click model.

Each suite returns a SuiteReport; a suite passes when it finds zero
violations.  The suites are deliberately independent of the optimized code
paths they check: the brute-force maximizer re-derives Eve's information
from eigenvalues, and the photon-number oracle rebuilds click statistics by
truncated state-vector enumeration instead of inclusion-exclusion.
"""

import time
from dataclasses import dataclass

import numpy as np

from .entropy import binary_entropy, conditional_entropy, eve_info_bound, symmetrized_conditional_entropy
from .evebound import (
    bell_chsh,
    eve_conditional_entropy,
    eve_information,
    oracle_max_eve_info,
    random_weights,
    verify_monotonicity,
)
from .fock import fock_joint_distribution
from .spdc import DetectionModel, MeasurementSetting, SqueezedSourceParams, joint_outcome_distribution

SUITES = ("bound-tightness", "monotonicity", "soundness", "fock-oracle", "symmetrization")

CHSH_MAX = 2.0 ** 1.5


@dataclass(frozen=True)
class SuiteReport:
    name: str
    passed: bool
    checks: int
    worst: float
    failures: tuple
    seconds: float

    def summary(self):
        state = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: {state} ({self.checks} checks, worst slack {self.worst:.3e}, "
            f"{self.seconds:.1f}s)"
        )


def _report(name, t0, checks, worst, failures, cap=8):
    return SuiteReport(
        name=name,
        passed=not failures,
        checks=checks,
        worst=worst,
        failures=tuple(failures[:cap]),
        seconds=time.time() - t0,
    )


def suite_bound_tightness(n_grid=25, p_values=(0.0, 0.05, 0.15, 0.3), tol=1e-5):
    """Brute-force maximum of Eve's information must match the closed form.

    Also checks the maximizer structure: the extremal weights put nothing on
    the second and fourth component and the overlap parameter sits at 1
    (skipped where the bound is essentially zero and the maximizer is
    degenerate).
    """
    t0 = time.time()
    failures = []
    worst = 0.0
    checks = 0
    for S in np.linspace(2.0, CHSH_MAX, n_grid):
        for p in p_values:
            res = oracle_max_eve_info(S, p)
            bound = eve_info_bound(S, p)
            gap = abs(res.value - bound)
            worst = max(worst, gap)
            checks += 1
            if gap > tol:
                failures.append(f"S={S:.6f} p={p}: oracle {res.value:.8f} vs bound {bound:.8f}")
                continue
            if bound > 1e-6:
                l2, l4 = res.weights[1], res.weights[3]
                if max(l2, l4) > 0.02 or res.c < 0.95:
                    failures.append(
                        f"S={S:.6f} p={p}: maximizer off structure "
                        f"(L2={l2:.4f}, L4={l4:.4f}, C={res.c:.4f})"
                    )
    return _report("bound-tightness", t0, checks, worst, failures)


def suite_monotonicity(n_draws=1000, n_grid=101, slack=1e-10, seed=20240811):
    """Eve's conditional entropy must be nonincreasing in the overlap C."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for i in range(n_draws):
        weights = random_weights(rng)
        q = rng.uniform(1e-6, 1.0)
        for c_lo, c_hi, s_lo, s_hi in verify_monotonicity(weights, q, samples=n_grid, slack=slack):
            worst = max(worst, s_hi - s_lo)
            failures.append(
                f"draw {i}: H rose {s_lo:.10f} -> {s_hi:.10f} over C in [{c_lo:.4f}, {c_hi:.4f}]"
            )
    return _report("monotonicity", t0, n_draws * (n_grid - 1), worst, failures)


def suite_soundness(n_draws=100000, slack=1e-9, seed=20240812):
    """No admissible state may leak more than the closed-form bound allows.

    The bound is evaluated at the CHSH score reachable by the drawn weights,
    floored at the local bound 2 where the closed form is defined.
    """
    t0 = time.time()
    rng = np.random.default_rng(seed)
    failures = []
    worst = -np.inf
    for i in range(n_draws):
        weights = random_weights(rng)
        p = rng.uniform(0.0, 0.5 - 1e-9)
        phi = rng.uniform(0.0, 0.5 * np.pi)
        info = eve_information(weights, p, float(np.cos(2.0 * phi)))
        bound = eve_info_bound(max(2.0, bell_chsh(weights)), p)
        excess = info - bound
        worst = max(worst, excess)
        if excess > slack:
            failures.append(
                f"draw {i}: info {info:.12f} exceeds bound {bound:.12f} "
                f"(L={np.round(weights, 6).tolist()}, p={p:.6f})"
            )
    return _report("soundness", t0, n_draws, worst, failures)


def suite_fock_oracle(n_draws=10, cutoff=20, tol=1e-8, seed=20240813):
    """Inclusion-exclusion click statistics against truncated enumeration.

    Single mode pair, moderate squeezing, with and without loss, and with
    nonzero coupling phases.
    """
    t0 = time.time()
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    checks = 0
    for eta in (0.7, 1.0):
        det = DetectionModel.uniform(eta)
        for i in range(n_draws):
            src = SqueezedSourceParams(g=rng.uniform(0.05, 0.3), gbar=rng.uniform(0.05, 0.3))
            a = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
            b = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
            fast = joint_outcome_distribution(src, det, a, b).probs
            slow = fock_joint_distribution(src, det, a, b, cutoff=cutoff).probs
            gap = float(np.abs(fast - slow).max())
            worst = max(worst, gap)
            checks += 16
            if gap > tol:
                failures.append(f"eta={eta} draw {i}: max deviation {gap:.3e}")
    return _report("fock-oracle", t0, checks, worst, failures)


def suite_symmetrization(n_draws=200, tol=1e-12, seed=20240814):
    """A public random flip of Bob's bit leaves H(B|A) unchanged and makes
    Bob's marginal uniform."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for i in range(n_draws):
        k = int(rng.integers(2, 6))
        joint = rng.dirichlet(np.ones(2 * k)).reshape(k, 2)
        plain = conditional_entropy(joint)
        sym = symmetrized_conditional_entropy(joint)
        gap = abs(sym - plain)
        worst = max(worst, gap)
        if gap > tol:
            failures.append(f"draw {i}: H(B|A) moved by {gap:.3e}")
        doubled = 0.5 * np.vstack([joint, joint[:, ::-1]])
        b_marg = doubled.sum(axis=0)
        if abs(b_marg[0] - 0.5) > tol:
            failures.append(f"draw {i}: symmetrized marginal {b_marg[0]:.15f} not uniform")
    return _report("symmetrization", t0, 2 * n_draws, worst, failures)


def run_suites(names=("all",), quick=False):
    """Run the selected suites and return their reports.

    quick=True shrinks the sample counts for smoke testing.
    """
    chosen = list(SUITES) if "all" in names else list(names)
    unknown = [n for n in chosen if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; expected subset of {SUITES}")
    reports = []
    for name in chosen:
        if name == "bound-tightness":
            reports.append(suite_bound_tightness(n_grid=7 if quick else 25))
        elif name == "monotonicity":
            reports.append(suite_monotonicity(n_draws=100 if quick else 1000))
        elif name == "soundness":
            reports.append(suite_soundness(n_draws=5000 if quick else 100000))
        elif name == "fock-oracle":
            reports.append(suite_fock_oracle(n_draws=3 if quick else 10, cutoff=12 if quick else 20))
        elif name == "symmetrization":
            reports.append(suite_symmetrization(n_draws=50 if quick else 200))
    return reports
