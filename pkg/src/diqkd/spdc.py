"""Click statistics of a two-mode-squeezed photon-pair source with threshold detectors.

Each party holds two threshold detectors behind a polarization rotation: a
designated ("main") detector and its orthogonal partner.  The source emits N
independent mode pairs with squeezing parameters g and gbar.  Probabilities
of detector-silence subsets have a closed form in the singular values of an
effective 2x2 coupling matrix between the detected modes, and the full
16-entry click-pattern joint follows by inclusion-exclusion.

Click patterns per party are indexed 0..3 as bitmasks: bit 0 set when the
main detector clicked, bit 1 when the orthogonal one did.  Binarization maps
pattern 1 ({main} only) to outcome -1 and the other three patterns to +1;
binary tables are indexed in outcome order (-1, +1).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k

DETECTORS = ("A", "A_perp", "B", "B_perp")

PATTERN_NONE = 0
PATTERN_MAIN = 1
PATTERN_PERP = 2
PATTERN_BOTH = 3

BINARY_OUTCOMES = (-1, +1)


@dataclass(frozen=True)
class SqueezedSourceParams:
    """Source squeezing parameters; tanh(g) and tanh(gbar) are the pair amplitudes.

    :param g: squeezing of the main-main mode pair, g >= 0.
    :param gbar: squeezing of the crossed pair, gbar >= 0.
    :param n_modes: number N >= 1 of independent mode pairs.
    """

    g: float
    gbar: float
    n_modes: int = 1

    def __post_init__(self):
        if self.g < 0.0 or self.gbar < 0.0:
            raise ValueError("squeezing parameters must be nonnegative")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")

    @property
    def tg(self):
        return math.tanh(self.g)

    @property
    def tgbar(self):
        return math.tanh(self.gbar)


@dataclass(frozen=True)
class DetectionModel:
    """Per-detector efficiency and dark-count probability in DETECTORS order."""

    efficiency: tuple = (1.0, 1.0, 1.0, 1.0)
    dark_count: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.efficiency) != 4 or len(self.dark_count) != 4:
            raise ValueError("need one efficiency and one dark-count per detector")
        for e in self.efficiency:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"efficiency {e!r} outside [0, 1]")
        for d in self.dark_count:
            if not 0.0 <= d < 1.0:
                raise ValueError(f"dark-count probability {d!r} outside [0, 1)")

    @classmethod
    def uniform(cls, eta, p_dc=0.0):
        return cls((eta,) * 4, (p_dc,) * 4)

    def eta_array(self):
        return np.array(self.efficiency, dtype=float)

    def dark_array(self):
        return np.array(self.dark_count, dtype=float)


@dataclass(frozen=True)
class MeasurementSetting:
    """Polarization rotation angle (and optional phase) of one analyzer."""

    angle: float
    phase: float = 0.0


def _as_setting(s):
    if isinstance(s, MeasurementSetting):
        return s
    return MeasurementSetting(float(s))


@dataclass(frozen=True)
class JointOutcomeDistribution:
    """4x4 click-pattern joint for one setting pair; indices are pattern masks."""

    probs: np.ndarray
    setting_a: MeasurementSetting = field(default=MeasurementSetting(0.0))
    setting_b: MeasurementSetting = field(default=MeasurementSetting(0.0))

    def marginal_a(self):
        return self.probs.sum(axis=1)

    def marginal_b(self):
        return self.probs.sum(axis=0)


def coupling_matrix(src, a, b):
    """Effective 2x2 coupling between Alice's and Bob's detected modes.

    :param src: SqueezedSourceParams.
    :param a: Alice's MeasurementSetting (or bare angle).
    :param b: Bob's MeasurementSetting (or bare angle).
    :return: complex 2x2 ndarray; rows are Alice's (main, perp) detected
        modes, columns Bob's.  Raises if a singular value reaches 1, since
        the state would not be normalizable.
    """
    a = _as_setting(a)
    b = _as_setting(b)
    m = np.empty((2, 2), dtype=complex)
    _k.coupling_fill_k(src.tg, src.tgbar, a.angle, a.phase, b.angle, b.phase, m)
    g = m.conj().T @ m
    tr = g[0, 0].real + g[1, 1].real
    det = g[0, 0].real * g[1, 1].real - abs(g[0, 1]) ** 2
    lmax2 = 0.5 * tr + math.sqrt(max(0.25 * tr * tr - det, 0.0))
    if lmax2 >= 1.0 - 1e-12:
        raise ValueError("coupling singular value reaches 1; state not normalizable")
    return m


def _subset_mask(subset):
    mask = 0
    for d in subset:
        try:
            mask |= 1 << DETECTORS.index(d)
        except ValueError:
            raise ValueError(f"unknown detector {d!r}; expected one of {DETECTORS}") from None
    return mask


def noclick_probability(subset, src, det, a, b):
    """Probability that every detector in `subset` stays silent.

    :param subset: iterable of detector names from DETECTORS.
    :param src: SqueezedSourceParams.
    :param det: DetectionModel.
    :param a: Alice's setting; b: Bob's setting.
    """
    mask = _subset_mask(subset)
    coupling_matrix(src, a, b)  # normalizability check
    a = _as_setting(a)
    b = _as_setting(b)
    m = np.empty((2, 2), dtype=complex)
    _k.coupling_fill_k(src.tg, src.tgbar, a.angle, a.phase, b.angle, b.phase, m)
    s16 = np.empty(16)
    _k.silent16_k(m, det.eta_array(), det.dark_array(), src.n_modes, s16)
    return float(s16[mask])


def joint_outcome_distribution(src, det, a, b):
    """Joint distribution over both parties' click patterns.

    Entries below -1e-10 signal inconsistent inputs and raise; round-off
    negatives above that are clamped to zero.
    """
    coupling_matrix(src, a, b)  # normalizability check
    a = _as_setting(a)
    b = _as_setting(b)
    j44 = np.empty((4, 4))
    _k.pair_joint44_k(
        src.tg, src.tgbar, a.angle, a.phase, b.angle, b.phase,
        det.eta_array(), det.dark_array(), src.n_modes, j44,
    )
    if j44.min() < 0.0:
        raise ValueError(f"click-pattern probability {j44.min()!r} below -1e-10")
    return JointOutcomeDistribution(probs=j44, setting_a=a, setting_b=b)


def binarize(dist):
    """Collapse a click-pattern joint to binary outcomes.

    Pattern {main} maps to -1, the remaining three patterns to +1.  Returns a
    2x2 table indexed in (-1, +1) order.
    """
    j = dist.probs if isinstance(dist, JointOutcomeDistribution) else np.asarray(dist, dtype=float)
    out = np.empty((2, 2))
    a_minus = j[PATTERN_MAIN, :]
    a_plus = j[PATTERN_NONE, :] + j[PATTERN_PERP, :] + j[PATTERN_BOTH, :]
    for i, row in ((0, a_minus), (1, a_plus)):
        out[i, 0] = row[PATTERN_MAIN]
        out[i, 1] = row[PATTERN_NONE] + row[PATTERN_PERP] + row[PATTERN_BOTH]
    return out


def correlator(dist):
    """Expectation of the product of the binarized outcomes."""
    b = binarize(dist)
    return float(b[0, 0] + b[1, 1] - b[0, 1] - b[1, 0])


def chsh_score(src, det, a1, a2, b1, b2):
    """CHSH combination E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)."""
    s = 0.0
    for aa, bb, sign in ((a1, b1, 1.0), (a1, b2, 1.0), (a2, b1, 1.0), (a2, b2, -1.0)):
        s += sign * correlator(joint_outcome_distribution(src, det, aa, bb))
    return s


def error_correction_term(src, det, a0, b1, p=0.0, variant="four-valued"):
    """Entropy of Bob's preprocessed key bit given Alice's key-setting outcome.

    Bob's outcome at b1 is binarized and flipped with probability p.  With
    variant="four-valued" Alice keeps her full click pattern; with
    variant="binary" she is binarized too and the term is h2 of the mismatch
    rate.

    :return: conditional entropy in bits.
    """
    if variant not in ("four-valued", "binary"):
        raise ValueError(f"unknown variant {variant!r}")
    p = float(p)
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"flip probability {p!r} outside [0, 1/2]")
    dist = joint_outcome_distribution(src, det, a0, b1)
    t42 = np.empty((4, 2))
    return _k.ec_from_joint44_k(dist.probs, p, variant == "four-valued", t42)


def qubit_source_distribution(theta, a, b, eta):
    """Outcome table for an ideal pure two-qubit source with lossy detectors.

    The state is cos(theta)|00> + sin(theta)|11> and each party keeps a
    no-click symbol.  Angles are Bloch rotations of the measured axes in the
    x-z plane.

    :return: 3x3 ndarray indexed (+1, -1, no-click) on both axes.
    """
    theta = float(theta)
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"efficiency {eta!r} outside [0, 1]")
    a = _as_setting(a)
    b = _as_setting(b)
    out = np.empty((3, 3))
    _k.qubit_joint3_fill_k(theta, eta, a.angle, b.angle, out)
    return out
