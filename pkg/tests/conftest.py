"""Shared fixtures: reference curves and synthetic bond universes."""

from __future__ import annotations

import pytest

from creditcurves.calibration import BondQuote
from creditcurves.conventional import BondSpec
from creditcurves.curves import BaseCurve
from creditcurves.pricing import bond_pv_frp
from creditcurves.splines import SplineBasis
from creditcurves.survival import PiecewiseHazardCurve, SplineSurvivalCurve


@pytest.fixture
def base_curve() -> BaseCurve:
    return BaseCurve.from_zero_rates(
        [(0.5, 0.02), (2.0, 0.025), (5.0, 0.03), (10.0, 0.035), (30.0, 0.04)]
    )


@pytest.fixture
def true_spline_curve() -> SplineSurvivalCurve:
    return SplineSurvivalCurve(SplineBasis(eta=0.025), (0.55, 0.30, 0.15), horizon=20.0)


ROUND_TRIP_BONDS = (
    (1, 0.05), (2, 0.06), (3, 0.045), (4, 0.07), (5, 0.055), (6, 0.05),
    (7, 0.065), (8, 0.06), (9, 0.05), (10, 0.07), (12, 0.06), (15, 0.055),
)


def make_round_trip_quotes(base, truth, recovery=0.40):
    quotes = []
    for j, (maturity, coupon) in enumerate(ROUND_TRIP_BONDS):
        spec = BondSpec(coupon=coupon, freq=2, maturity=float(maturity))
        price = bond_pv_frp(spec, base, truth, recovery)
        quotes.append(BondQuote(id=f"B{j}", spec=spec, clean_price=price))
    return quotes


@pytest.fixture
def round_trip_quotes(base_curve, true_spline_curve):
    return make_round_trip_quotes(base_curve, true_spline_curve)


# Three-bond configuration used for the CDS hedging narrative: an upward
# sloping base curve and a rising hazard curve under which an 8% bond is
# a steep premium, a 3% bond a discount, and a 4.25% bond near par.
HEDGE_RATE_INTERCEPT = 0.012463873820869352
HEDGE_RATE_SLOPE = 0.004728249947694846
HEDGE_HAZARD_START = 0.010015805729897714
HEDGE_HAZARD_END = 0.018730417635104295
HEDGE_RECOVERY = 0.5
HEDGE_MATURITY = 5.0


def make_hedge_market():
    base = BaseCurve.from_zero_rates(
        [(0.5 * i, HEDGE_RATE_INTERCEPT + HEDGE_RATE_SLOPE * 0.5 * i)
         for i in range(1, 11)]
    )
    segments = []
    for i in range(1, 21):
        t = i / 4.0
        mid = (t - 0.125) / HEDGE_MATURITY
        segments.append(
            (t, HEDGE_HAZARD_START + (HEDGE_HAZARD_END - HEDGE_HAZARD_START) * mid)
        )
    return base, PiecewiseHazardCurve(segments)


@pytest.fixture
def hedge_market():
    return make_hedge_market()


@pytest.fixture
def hedge_bonds():
    return {
        "premium": BondSpec(coupon=0.08, freq=2, maturity=HEDGE_MATURITY),
        "discount": BondSpec(coupon=0.03, freq=2, maturity=HEDGE_MATURITY),
        "near_par": BondSpec(coupon=0.0425, freq=2, maturity=HEDGE_MATURITY),
    }
