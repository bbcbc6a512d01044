"""Brute-force photon-number reference for the click-pattern statistics.

This computes the same joint click-pattern distribution as
:func:`diqkd.spdc.joint_outcome_distribution`, but by an entirely different
route: expand the two-mode-squeezed state in the photon-number basis up to a
cutoff, rotate each party's mode pair block by block, and apply the
threshold-detector POVM factor by factor.  No singular values and no
inclusion-exclusion are involved, so agreement between the two routes is a
meaningful check.  Only single-mode-pair sources (n_modes = 1) are supported
and the cost grows with the cutoff, which is fine for its role as a
verification tool.
"""

import math

import numpy as np

from .spdc import JointOutcomeDistribution, _as_setting


def _rotation_block(T, angle, phase):
    """Fock-basis matrix of the two-mode rotation in the T-photon sector.

    Maps |n, T-n> of the emission modes to the detected modes; entry [k, n]
    is the amplitude of |k, T-k> after the rotation.
    """
    c = math.cos(angle)
    s = math.sin(angle)
    ph = complex(math.cos(phase), math.sin(phase))
    D = np.zeros((T + 1, T + 1), dtype=complex)
    lg = [math.lgamma(i + 1) for i in range(T + 1)]
    for n in range(T + 1):
        m = T - n
        # first emission mode -> c*A + s*e^{i phase}*A_perp (creation operators)
        p1 = np.zeros(n + 1, dtype=complex)
        for j in range(n + 1):
            p1[j] = math.comb(n, j) * (c ** j) * (s * ph) ** (n - j)
        # orthogonal emission mode -> s*e^{-i phase}*A - c*A_perp
        p2 = np.zeros(m + 1, dtype=complex)
        for j in range(m + 1):
            p2[j] = math.comb(m, j) * (s * ph.conjugate()) ** j * (-c) ** (m - j)
        w = np.convolve(p1, p2)
        for k in range(T + 1):
            scale = math.exp(0.5 * (lg[k] + lg[T - k] - lg[n] - lg[m]))
            D[k, n] = w[k] * scale
    return D


def fock_joint_distribution(src, det, a, b, cutoff=20):
    """Click-pattern joint computed by truncated photon-number bookkeeping.

    :param src: SqueezedSourceParams with n_modes == 1.
    :param det: DetectionModel.
    :param a: Alice's setting; b: Bob's setting.
    :param cutoff: photon-number truncation per emission mode.
    :return: JointOutcomeDistribution over the 4x4 click patterns.
    """
    if src.n_modes != 1:
        raise ValueError("the photon-number reference handles a single mode pair only")
    a = _as_setting(a)
    b = _as_setting(b)
    tg = src.tg
    tb = src.tgbar
    norm = (1.0 - tg * tg) * (1.0 - tb * tb)

    eta = det.eta_array()
    pdc = det.dark_array()

    def povm_factors(d, counts):
        silent = (1.0 - pdc[d]) * (1.0 - eta[d]) ** counts
        return np.vstack([silent, 1.0 - silent])

    out = np.zeros((4, 4))
    for T in range(0, 2 * cutoff + 1):
        DA = _rotation_block(T, a.angle, a.phase)
        DB = _rotation_block(T, b.angle, b.phase)
        # amplitude of the unrotated state on |n>_a |T-n>_{a_perp} |T-n>_b |n>_{b_perp}
        v = np.zeros(T + 1, dtype=complex)
        for n in range(max(0, T - cutoff), min(T, cutoff) + 1):
            v[n] = tg ** n * (-tb) ** (T - n)
        # amp[k, l] = sum_n DA[k, n] * v[n] * DB[l, T-n]
        amp = DA @ (v[:, None] * DB[:, ::-1].T)
        w2 = norm * np.abs(amp) ** 2
        counts = np.arange(T + 1)
        fa = povm_factors(0, counts)
        fap = povm_factors(1, counts[::-1])
        fb = povm_factors(2, counts)
        fbp = povm_factors(3, counts[::-1])
        for pa in range(4):
            wa = fa[pa & 1] * fap[(pa >> 1) & 1]
            for pb in range(4):
                wb = fb[pb & 1] * fbp[(pb >> 1) & 1]
                out[pa, pb] += wa @ w2 @ wb
    return JointOutcomeDistribution(probs=out, setting_a=a, setting_b=b)
