import json
import math

import pytest
from hypothesis import given, strategies as st

from creditcurves.splines import SplineBasis
from creditcurves.survival import (
    PiecewiseHazardCurve,
    SplineSurvivalCurve,
    load_survival_curve,
    survival_curve_from_dict,
)


@pytest.fixture
def spline_curve():
    return SplineSurvivalCurve(SplineBasis(eta=0.05), (0.5, 0.3, 0.2), horizon=25.0)


def test_flat_hazard_survival():
    curve = PiecewiseHazardCurve.flat(0.02)
    assert curve.survival(5.0) == pytest.approx(math.exp(-0.1), rel=1e-15)
    assert curve.survival(0.0) == 1.0


def test_single_factor_spline_is_exponential():
    curve = SplineSurvivalCurve(SplineBasis(eta=0.03), (1.0, 0.0, 0.0))
    assert curve.survival(10.0) == pytest.approx(math.exp(-0.3), rel=1e-14)
    for t in (0.0, 1.0, 7.5, 20.0):
        assert curve.hazard(t) == pytest.approx(0.03, abs=1e-14)


def test_spline_survival_scalar_sum(spline_curve):
    expected = 0.5 * math.exp(-0.2) + 0.3 * math.exp(-0.4) + 0.2 * math.exp(-0.6)
    assert spline_curve.survival(4.0) == pytest.approx(expected, rel=1e-14)


def test_spline_hazard_closed_form_at_zero(spline_curve):
    # eta * sum(k * beta_k) / sum(beta_k) at t = 0
    assert spline_curve.hazard(0.0) == pytest.approx(0.085, abs=1e-14)


def test_spline_hazard_matches_log_derivative(spline_curve):
    dt = 1e-5
    for t in (0.5, 2.0, 5.0, 13.0):
        numeric = -(math.log(spline_curve.survival(t + dt))
                    - math.log(spline_curve.survival(t - dt))) / (2 * dt)
        assert spline_curve.hazard(t) == pytest.approx(numeric, abs=1e-6)


def test_default_prob_basics():
    curve = PiecewiseHazardCurve.flat(0.02)
    assert curve.default_prob(3.0, 3.0) == 0.0
    assert curve.default_prob(0.0, 1.0) == pytest.approx(1 - math.exp(-0.02), rel=1e-12)
    with pytest.raises(ValueError):
        curve.default_prob(2.0, 1.0)


def test_default_prob_telescopes(spline_curve):
    grid = [0.5 * i for i in range(0, 41)]
    total = sum(spline_curve.default_prob(a, b) for a, b in zip(grid, grid[1:]))
    assert total == pytest.approx(1.0 - spline_curve.survival(20.0), abs=1e-12)


def test_fwd_survival_endpoints(spline_curve):
    assert spline_curve.fwd_survival(0.0, 7.0) == spline_curve.survival(7.0)
    assert spline_curve.fwd_survival(4.0, 4.0) == 1.0
    flat = PiecewiseHazardCurve.flat(0.03)
    assert flat.fwd_survival(2.0, 5.0) == pytest.approx(math.exp(-0.09), rel=1e-12)


@given(t=st.floats(min_value=0.0, max_value=20.0), dt=st.floats(min_value=0.0, max_value=15.0))
def test_fwd_survival_chain_identity(t, dt):
    curve = SplineSurvivalCurve(SplineBasis(eta=0.05), (0.5, 0.3, 0.2), horizon=25.0)
    left = curve.survival(t) * curve.fwd_survival(t, t + dt)
    assert left == pytest.approx(curve.survival(t + dt), abs=1e-12)


def test_zz_spread_values(spline_curve):
    flat = PiecewiseHazardCurve.flat(0.017)
    for T in (1.0, 4.0, 9.0):
        assert flat.zz_spread(T) == pytest.approx(0.017, abs=1e-14)
    curve = PiecewiseHazardCurve([(5.0, -math.log(0.9) / 5.0)])
    assert curve.zz_spread(5.0) == pytest.approx(-math.log(0.9) / 5.0, rel=1e-12)


def test_zz_spread_is_average_hazard(spline_curve):
    # quadrature of the hazard via fine trapezoid against -ln Q / T
    T, n = 8.0, 4000
    step = T / n
    grid = [i * step for i in range(n + 1)]
    integral = sum(
        0.5 * (spline_curve.hazard(a) + spline_curve.hazard(b)) * step
        for a, b in zip(grid, grid[1:])
    )
    assert integral / T == pytest.approx(spline_curve.zz_spread(T), abs=1e-8)


def test_spline_constructor_enforces_invariants():
    basis = SplineBasis(eta=0.05)
    with pytest.raises(ValueError):
        SplineSurvivalCurve(basis, (0.5, 0.3, 0.1))        # Q(0) != 1
    with pytest.raises(ValueError):
        SplineSurvivalCurve(basis, (3.0, -2.0, 0.0))       # Q increasing at 0
    with pytest.raises(ValueError):
        SplineSurvivalCurve(basis, (-1.0, 0.0, 2.0), horizon=30.0)  # goes negative


def test_piecewise_constructor_enforces_invariants():
    with pytest.raises(ValueError):
        PiecewiseHazardCurve([])
    with pytest.raises(ValueError):
        PiecewiseHazardCurve([(1.0, 0.02), (1.0, 0.03)])
    with pytest.raises(ValueError):
        PiecewiseHazardCurve([(1.0, -0.01)])


def test_piecewise_hazard_steps_and_extrapolation():
    curve = PiecewiseHazardCurve([(1.0, 0.01), (3.0, 0.03)])
    assert curve.hazard(0.5) == 0.01
    assert curve.hazard(1.0) == 0.03          # right-continuous at the node
    assert curve.hazard(10.0) == 0.03
    q3 = curve.survival(3.0)
    assert curve.survival(7.0) == pytest.approx(q3 * math.exp(-0.03 * 4.0), rel=1e-12)


def test_spline_tail_extrapolates_constant_hazard(spline_curve):
    h_tail = spline_curve.hazard(spline_curve.horizon)
    q_h = spline_curve.survival(spline_curve.horizon)
    assert spline_curve.survival(spline_curve.horizon + 4.0) == pytest.approx(
        q_h * math.exp(-4.0 * h_tail), rel=1e-12
    )
    assert spline_curve.hazard(spline_curve.horizon + 4.0) == h_tail


def test_json_round_trip(tmp_path, spline_curve):
    for curve in (spline_curve, PiecewiseHazardCurve([(1.0, 0.01), (5.0, 0.04)])):
        clone = survival_curve_from_dict(curve.to_dict())
        for t in (0.0, 0.5, 3.3, 12.0, 28.0):
            assert clone.survival(t) == pytest.approx(curve.survival(t), rel=1e-15)
        path = tmp_path / "curve.json"
        curve.save(str(path))
        loaded = load_survival_curve(str(path))
        assert loaded.survival(4.0) == pytest.approx(curve.survival(4.0), rel=1e-15)
        assert json.loads(path.read_text())["type"] == curve.to_dict()["type"]


def test_from_dict_rejects_unknown_type():
    with pytest.raises(ValueError):
        survival_curve_from_dict({"type": "mystery"})
