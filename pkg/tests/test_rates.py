"""Key-rate evaluation, optimization, and threshold search."""

import math

import numpy as np
import pytest

from diqkd import (
    MeasurementSetting,
    OptimizerOptions,
    ParameterPoint,
    ProtocolSpec,
    SqueezedSourceParams,
    key_rate,
    optimize_rate,
    rate_curve,
    threshold_efficiency,
)

STD = (0.0, np.pi / 4, 5 * np.pi / 8, -5 * np.pi / 8)


def _spdc_point(tg, tb, a0, p=0.0, n_modes=1):
    src = SqueezedSourceParams(g=math.atanh(tg), gbar=math.atanh(tb), n_modes=n_modes)
    settings = tuple(MeasurementSetting(v) for v in (a0,) + STD)
    return ParameterPoint(settings=settings, src=src, p=p)


def _qubit_point(theta, p=0.0):
    settings = tuple(MeasurementSetting(v) for v in
                     (0.0, 0.0, np.pi / 2, np.pi / 4, -np.pi / 4))
    return ParameterPoint(settings=settings, theta=theta, p=p)


def test_spec_validation():
    with pytest.raises(ValueError):
        ProtocolSpec("unknown")
    with pytest.raises(ValueError):
        ProtocolSpec("ma", source="laser")
    with pytest.raises(ValueError):
        ProtocolSpec("pironio", p=0.1)
    with pytest.raises(ValueError):
        ProtocolSpec("noisy", p=0.5)
    assert ProtocolSpec("noisy").optimizes_p
    assert not ProtocolSpec("noisy", p=0.2).optimizes_p
    assert not ProtocolSpec("ma").optimizes_p


def test_key_rate_rejects_bad_efficiency():
    pt = _qubit_point(np.pi / 4)
    with pytest.raises(ValueError):
        key_rate(ProtocolSpec("ma", source="qubit"), pt, 1.1)


def test_key_rate_spdc_spot():
    # a0 aligned with b1 makes the raw-key error vanish at unit efficiency
    pt = _spdc_point(0.4, 0.4, a0=5 * np.pi / 8)
    res = key_rate(ProtocolSpec("ma"), pt, 1.0)
    assert res.rate == pytest.approx(0.1541497849270641, abs=1e-12)
    assert res.chsh == pytest.approx(2.196333274846646, abs=1e-12)
    assert res.ec_term == 0.0
    assert res.eve_term == pytest.approx(0.8458502150729359, abs=1e-12)


def test_key_rate_noisy_spdc_spot():
    # below the violation threshold the adversary term saturates at one
    pt = _spdc_point(0.3, 0.25, a0=0.2, p=0.1, n_modes=2)
    res = key_rate(ProtocolSpec("noisy", p=0.1), pt, 0.85)
    assert res.chsh == pytest.approx(1.990555752066345, abs=1e-12)
    assert res.eve_term == 1.0
    assert res.rate == pytest.approx(-res.ec_term, abs=1e-15)


def test_key_rate_qubit_spot():
    pt = _qubit_point(np.pi / 4)
    res = key_rate(ProtocolSpec("pironio", source="qubit"), pt, 0.95)
    eta = 0.95
    identity = eta * eta * 2 * math.sqrt(2) + 2 * (1 - eta) ** 2
    assert res.chsh == pytest.approx(identity, abs=1e-12)
    assert res.rate == pytest.approx(-0.1583407056324455, abs=1e-12)
    assert res.ec_term == pytest.approx(0.6847970625629213, abs=1e-12)


def test_noisy_without_preprocessing_matches_four_valued():
    pt = _spdc_point(0.35, 0.3, a0=1.9)
    ra = key_rate(ProtocolSpec("ma"), pt, 0.93)
    rb = key_rate(ProtocolSpec("noisy", p=0.0), pt, 0.93)
    assert ra.rate == rb.rate
    assert ra.chsh == rb.chsh


def test_four_valued_correction_dominates_binary():
    # conditioning on the full outcome alphabet can only reduce the EC cost
    rng = np.random.default_rng(7)
    for _ in range(10):
        tg, tb = rng.uniform(0.05, 0.6, size=2)
        a0 = rng.uniform(-np.pi, np.pi)
        eta = rng.uniform(0.7, 1.0)
        pt = _spdc_point(tg, tb, a0=a0)
        rp = key_rate(ProtocolSpec("pironio"), pt, eta)
        rm = key_rate(ProtocolSpec("ma"), pt, eta)
        assert rm.ec_term <= rp.ec_term + 1e-12
        assert rm.rate >= rp.rate - 1e-12


def test_optimize_rate_deterministic():
    spec = ProtocolSpec("ma", source="qubit")
    opts = OptimizerOptions(seed=3, restarts=8)
    a = optimize_rate(spec, 0.95, opts)
    b = optimize_rate(spec, 0.95, opts)
    assert a.rate == b.rate
    assert a.point.angles() == b.point.angles()
    assert a.point.theta == b.point.theta


def test_optimize_rate_seed_changes_search():
    spec = ProtocolSpec("pironio", source="qubit")
    a = optimize_rate(spec, 0.97, OptimizerOptions(seed=0, restarts=8))
    b = optimize_rate(spec, 0.97, OptimizerOptions(seed=1, restarts=8))
    # different Sobol streams must still agree on the achievable rate
    assert a.rate == pytest.approx(b.rate, abs=1e-6)


def test_optimize_rate_spdc_positive_at_unit_efficiency():
    spec = ProtocolSpec("ma")
    opts = OptimizerOptions(seed=0, restarts=8, max_modes=2)
    res = optimize_rate(spec, 1.0, opts)
    assert 0.2 < res.rate < 1.0
    assert res.chsh > 2.2
    assert res.point.src.n_modes in (1, 2)


def test_optimize_rate_warm_points_help():
    spec = ProtocolSpec("pironio", source="qubit")
    opts = OptimizerOptions(seed=5, restarts=4)
    cold = optimize_rate(spec, 0.92, opts)
    warm = optimize_rate(spec, 0.92, opts, warm_points=[cold.point])
    assert warm.rate >= cold.rate - 1e-12


def test_qubit_noisy_threshold():
    spec = ProtocolSpec("noisy", source="qubit")
    res = threshold_efficiency(spec, OptimizerOptions(seed=0, restarts=12), eta_lo=0.8)
    assert 0.824 <= res.eta <= 0.831
    assert res.witness.rate > 0.0
    assert res.trace[0][0] == 1.0


def test_threshold_raises_below_cutoff():
    spec = ProtocolSpec("pironio", source="qubit")
    with pytest.raises(RuntimeError):
        threshold_efficiency(spec, OptimizerOptions(seed=0, restarts=8),
                             eta_lo=0.6, eta_hi=0.7)


def test_rate_curve_monotone_in_efficiency():
    spec = ProtocolSpec("ma", source="qubit")
    grid = [0.94, 0.90, 0.98, 1.0]
    results = rate_curve(spec, grid, OptimizerOptions(seed=0, restarts=8))
    assert len(results) == 4
    etas = [r.eta for r in results]
    assert etas == sorted(grid)
    rates = [max(r.rate, 0.0) for r in results]
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))
    assert results[-1].rate == pytest.approx(1.0, abs=1e-9)
