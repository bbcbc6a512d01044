"""Click statistics of the pair source and the ideal qubit comparison."""

import math

import numpy as np
import pytest

from diqkd import (
    DetectionModel,
    MeasurementSetting,
    SqueezedSourceParams,
    binarize,
    chsh_score,
    correlator,
    coupling_matrix,
    error_correction_term,
    joint_outcome_distribution,
    noclick_probability,
    qubit_source_distribution,
)

CHSH_MAX = 2 * math.sqrt(2.0)


def _src(tg, tb, n=1):
    return SqueezedSourceParams(g=math.atanh(tg), gbar=math.atanh(tb), n_modes=n)


IDEAL = DetectionModel.uniform(1.0)
ZERO = MeasurementSetting(0.0)


def test_coupling_matrix_at_zero_angles():
    src = _src(0.3, 0.5)
    m = coupling_matrix(src, ZERO, ZERO)
    expect = np.array([[0.0, -0.3], [0.5, 0.0]])
    assert np.allclose(m, expect, atol=1e-15)


def test_coupling_matrix_contracts():
    rng = np.random.default_rng(2)
    for _ in range(20):
        src = _src(rng.uniform(0, 0.9), rng.uniform(0, 0.9))
        a = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        b = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        m = coupling_matrix(src, a, b)
        smax = np.linalg.svd(m, compute_uv=False).max()
        assert smax <= 1.0 - 1e-12


def test_source_params_validation():
    with pytest.raises(ValueError):
        SqueezedSourceParams(g=-0.1, gbar=0.2)
    with pytest.raises(ValueError):
        SqueezedSourceParams(g=0.1, gbar=0.2, n_modes=0)


def test_noclick_closed_forms_ideal_detection():
    # at zero angles mode g feeds (A, B_perp) and mode gbar feeds (A_perp, B)
    src = _src(0.3, 0.5)
    assert noclick_probability(("A",), src, IDEAL, ZERO, ZERO) == pytest.approx(
        1 - 0.3**2, abs=1e-14
    )
    assert noclick_probability(("B",), src, IDEAL, ZERO, ZERO) == pytest.approx(
        1 - 0.5**2, abs=1e-14
    )
    assert noclick_probability(("A", "B_perp"), src, IDEAL, ZERO, ZERO) == pytest.approx(
        1 - 0.3**2, abs=1e-14
    )
    full = ("A", "A_perp", "B", "B_perp")
    assert noclick_probability(full, src, IDEAL, ZERO, ZERO) == pytest.approx(
        (1 - 0.3**2) * (1 - 0.5**2), abs=1e-14
    )
    assert noclick_probability((), src, IDEAL, ZERO, ZERO) == 1.0


def test_noclick_multi_pair_power_law():
    src1 = _src(0.3, 0.5, n=1)
    src3 = _src(0.3, 0.5, n=3)
    det = DetectionModel.uniform(0.8)
    a = MeasurementSetting(0.4, 0.1)
    b = MeasurementSetting(-0.2, 0.3)
    p1 = noclick_probability(("A", "B"), src1, det, a, b)
    p3 = noclick_probability(("A", "B"), src3, det, a, b)
    assert p3 == pytest.approx(p1**3, abs=1e-13)


def test_noclick_rejects_unknown_detector():
    with pytest.raises(ValueError):
        noclick_probability(("A", "C"), _src(0.3, 0.5), IDEAL, ZERO, ZERO)


def test_joint_distribution_zero_angle_structure():
    dist = joint_outcome_distribution(_src(0.3, 0.5), IDEAL, ZERO, ZERO)
    probs = dist.probs
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert (probs >= 0.0).all()
    # geometric sums: P(A main only, B perp only) = tg^2 (1 - tb^2)
    assert probs[1, 2] == pytest.approx(0.0675, abs=1e-14)
    assert probs[2, 1] == pytest.approx(0.2275, abs=1e-14)
    assert probs[0, 0] == pytest.approx(0.6825, abs=1e-14)
    # the two mode pairs never cross-fire at zero angles
    assert probs[1, 1] == 0.0
    assert probs[2, 2] == 0.0


def test_joint_distribution_normalized_with_loss_and_darks():
    rng = np.random.default_rng(9)
    for _ in range(10):
        src = _src(rng.uniform(0.05, 0.7), rng.uniform(0.05, 0.7), n=int(rng.integers(1, 5)))
        det = DetectionModel(
            efficiency=tuple(rng.uniform(0.3, 1.0, size=4)),
            dark_count=tuple(rng.uniform(0.0, 0.05, size=4)),
        )
        a = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        b = MeasurementSetting(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        probs = joint_outcome_distribution(src, det, a, b).probs
        assert probs.sum() == pytest.approx(1.0, abs=1e-11)
        assert probs.min() >= 0.0


def test_no_signalling():
    src = _src(0.4, 0.35, n=2)
    det = DetectionModel.uniform(0.75, p_dc=0.01)
    a = MeasurementSetting(0.3)
    marg1 = joint_outcome_distribution(src, det, a, MeasurementSetting(0.9)).marginal_a()
    marg2 = joint_outcome_distribution(src, det, a, MeasurementSetting(-1.4)).marginal_a()
    assert np.allclose(marg1, marg2, atol=1e-12)


def test_binarize_and_correlator():
    dist = joint_outcome_distribution(_src(0.45, 0.45), DetectionModel.uniform(0.9),
                                      MeasurementSetting(0.2), MeasurementSetting(1.1))
    two = binarize(dist)
    assert two.shape == (2, 2)
    assert two.sum() == pytest.approx(1.0, abs=1e-12)
    # correlator recomputed from the binarized table
    expect = two[1, 1] + two[0, 0] - two[0, 1] - two[1, 0]
    assert correlator(dist) == pytest.approx(expect, abs=1e-14)


def test_chsh_score_quantum_bound():
    rng = np.random.default_rng(10)
    det = DetectionModel.uniform(1.0)
    for _ in range(20):
        src = _src(rng.uniform(0.05, 0.8), rng.uniform(0.05, 0.8))
        angles = rng.uniform(-np.pi, np.pi, size=4)
        s = chsh_score(src, det, *(MeasurementSetting(v) for v in angles))
        assert s <= CHSH_MAX + 1e-9


def test_chsh_score_known_violation():
    # the single-pair term is anticorrelated; these settings violate at eta=1
    src = _src(0.4, 0.4)
    s = chsh_score(src, IDEAL,
                   MeasurementSetting(0.0), MeasurementSetting(np.pi / 4),
                   MeasurementSetting(5 * np.pi / 8), MeasurementSetting(-5 * np.pi / 8))
    assert s == pytest.approx(2.1963332748466464, abs=1e-12)
    assert s > 2.0


def test_chsh_score_dead_detectors():
    # with eta = 0 every outcome binarizes to +1, so S = 2 exactly
    src = _src(0.4, 0.4)
    s = chsh_score(src, DetectionModel.uniform(0.0),
                   MeasurementSetting(0.1), MeasurementSetting(0.7),
                   MeasurementSetting(0.3), MeasurementSetting(-0.9))
    assert s == 2.0


def test_error_correction_variants():
    src = _src(0.4, 0.4)
    det = DetectionModel.uniform(0.9)
    a0 = MeasurementSetting(5 * np.pi / 8 - np.pi / 2)
    b1 = MeasurementSetting(5 * np.pi / 8)
    four = error_correction_term(src, det, a0, b1)
    binary = error_correction_term(src, det, a0, b1, variant="binary")
    # conditioning on the full click pattern can only help
    assert four <= binary + 1e-12
    assert 0.0 <= four <= 1.0
    with pytest.raises(ValueError):
        error_correction_term(src, det, a0, b1, variant="bogus")


def test_error_correction_preprocessing_floor():
    # flipping with probability p costs at least h(p)
    src = _src(0.35, 0.35)
    det = DetectionModel.uniform(0.95)
    a0 = MeasurementSetting(0.2)
    b1 = MeasurementSetting(0.2 + np.pi / 2)
    from diqkd import binary_entropy

    for p in (0.05, 0.2, 0.4):
        ec = error_correction_term(src, det, a0, b1, p=p)
        assert ec >= binary_entropy(p) - 1e-12


def test_qubit_distribution_ideal_correlator():
    # at theta = pi/4 and eta = 1 the correlator is cos(a - b)
    for a, b in ((0.0, 0.0), (0.3, -0.5), (1.2, 0.4)):
        t3 = qubit_source_distribution(np.pi / 4, a, b, eta=1.0)
        assert t3.sum() == pytest.approx(1.0, abs=1e-12)
        corr = t3[0, 0] + t3[1, 1] - t3[0, 1] - t3[1, 0]
        assert corr == pytest.approx(math.cos(a - b), abs=1e-12)


def test_qubit_distribution_loss_identity():
    # binned CHSH at the standard settings: eta^2 2sqrt2 + 2 (1-eta)^2
    eta = 0.95
    total = 0.0
    for (a, b, sign) in ((0.0, np.pi / 4, 1), (0.0, -np.pi / 4, 1),
                         (np.pi / 2, np.pi / 4, 1), (np.pi / 2, -np.pi / 4, -1)):
        t3 = qubit_source_distribution(np.pi / 4, a, b, eta=eta)
        # bin no-click to +1 on both sides
        p_agree = t3[0, 0] + t3[1, 1] + t3[0, 2] + t3[2, 0] + t3[2, 2]
        p_diff = t3[0, 1] + t3[1, 0] + t3[1, 2] + t3[2, 1]
        total += sign * (p_agree - p_diff)
    expect = eta**2 * CHSH_MAX + 2 * (1 - eta) ** 2
    assert total == pytest.approx(expect, abs=1e-12)
    assert total == pytest.approx(2.5576554800834366, abs=1e-12)
