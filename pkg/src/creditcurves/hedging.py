"""Forward bond prices, CDS hedge construction and CDS-bond basis.

A credit bond hedged with CDS leaves a residual risk-free-equivalent
coupon stream; matching the protection notional to the forward price
profile makes the default payout replicate the bond value at every
horizon.  The hedge grid and CDS legs are quarterly throughout.
Exposure NPVs are weighted by the default-leg measure Z * dQ * (1 - R),
since hedge errors only realize in default states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import measures, pricing
from .conventional import BondSpec
from .curves import BaseCurve
from .pricing import RecoveryAssumption, _recovery_rate
from .rootfind import solve_bracketed
from .survival import SurvivalCurve

RATE_BRACKET = (-0.5, 5.0)
PRICE_TOL = 1e-12
HEDGE_FREQ = 4


@dataclass(frozen=True)
class HedgeLeg:
    maturity: float
    notional: float  # signed; positive = long protection
    spread: float    # par CDS spread at the leg maturity


@dataclass(frozen=True)
class HedgePlan:
    """CDS legs plus the rpv01-weighted aggregate spread and residual NPV."""

    legs: tuple[HedgeLeg, ...]
    cost: float
    residual_npv: float

    def __post_init__(self) -> None:
        if not self.legs:
            raise ValueError("hedge plan needs at least one leg")
        mats = [leg.maturity for leg in self.legs]
        if any(b <= a for a, b in zip(mats, mats[1:])):
            raise ValueError("legs must be sorted by maturity, without duplicates")

    def protection_notional(self, t: float) -> float:
        """Total live protection for a default just after time t."""
        return sum(leg.notional for leg in self.legs if leg.maturity > t)

    def to_dict(self) -> dict:
        return {
            "legs": [
                {"maturity": leg.maturity, "notional": leg.notional,
                 "spread_bp": leg.spread * 1e4}
                for leg in self.legs
            ],
            "cost_bp": self.cost * 1e4,
            "residual_npv": self.residual_npv,
        }


@dataclass(frozen=True)
class RfcPoint:
    t: float
    rfc: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.rfc):
            raise ValueError("risk-free-equivalent coupon must be finite")


def fwd_bond_price(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    t: float,
) -> float:
    """Projected forward price P(t, T) in the continuous approximation.

    The spot integrals are re-expressed with forward discount and
    forward survival (both ratios to time t); P(T, T) = 1.
    """
    T = bond.maturity
    if t < 0.0 or t > T:
        raise ValueError("need 0 <= t <= maturity")
    if t == T:
        return 1.0
    R = _recovery_rate(recovery)
    C = bond.coupon
    q = bond.freq
    denom = base.df(t) * curve.survival(t)
    i_zq, i_hzq, _ = pricing.survival_discount_integrals(base, curve, t, T)
    survived = base.df(T) * curve.survival(T) / denom
    return (
        C * i_zq / denom
        + survived
        - C / (2.0 * q) * (1.0 - survived)
        + R * (1.0 + C / (2.0 * q)) * i_hzq / denom
    )


def fwd_hedge_notional(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    t: float,
) -> float:
    """Forward CDS notional (P(t,T) - R) / (1 - R) equating default payouts."""
    R = _recovery_rate(recovery)
    return (fwd_bond_price(bond, base, curve, recovery, t) - R) / (1.0 - R)


def rfc_stream(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    t: float,
) -> float:
    """Risk-free-equivalent coupon RFC(t, T) = C - h(t) * (P(t,T) - R).

    The stream a riskless bond would need to track the credit bond's
    forward price; equivalently C less the forward CDS carry.
    """
    R = _recovery_rate(recovery)
    price = fwd_bond_price(bond, base, curve, recovery, t)
    return bond.coupon - curve.hazard(t) * (price - R)


def rfc_profile(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    grid: list[float],
) -> tuple[RfcPoint, ...]:
    """Sample the risk-free-equivalent coupon stream on a tenor grid."""
    return tuple(
        RfcPoint(t=t, rfc=rfc_stream(bond, base, curve, recovery, t)) for t in grid
    )


def _leg_spread(maturity: float, base: BaseCurve, curve: SurvivalCurve, R: float) -> float:
    return pricing.cds_par_spread(maturity, HEDGE_FREQ, base, curve, R)


def _aggregate_spread(
    legs: list[tuple[float, float, float]], base: BaseCurve, curve: SurvivalCurve
) -> float:
    """rpv01-weighted aggregate spread of (maturity, notional, spread) legs."""
    num = 0.0
    den = 0.0
    for maturity, notional, spread in legs:
        pv01 = pricing.rpv01(maturity, HEDGE_FREQ, base, curve)
        num += notional * spread * pv01
        den += notional * pv01
    if den == 0.0:
        raise ValueError("degenerate hedge: zero aggregate rpv01")
    return num / den


def _exposure_npv(
    grid: list[float],
    coverage: dict[float, float],
    fwd_notional: dict[float, float],
    base: BaseCurve,
    curve: SurvivalCurve,
    R: float,
) -> float:
    """NPV of residual default exposures Z * dQ * (1-R) * (target - hedged)."""
    npv = 0.0
    q_prev = 1.0
    for t in grid:
        q = curve.survival(t)
        npv += base.df(t) * (q_prev - q) * (1.0 - R) * (fwd_notional[t] - coverage[t])
        q_prev = q
    return npv


def spot_hedge_notionals(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    grid: list[float],
) -> HedgePlan:
    """Staggered spot-CDS hedge on the given maturity grid.

    The leg maturing at grid point t_{i+1} carries the forward price
    drop over [t_i, t_{i+1}] scaled by 1/(1-R); the terminal leg at the
    bond maturity carries the forward notional at the last grid point.
    Legs can be negative (short protection) for discount bonds.
    """
    R = _recovery_rate(recovery)
    T = bond.maturity
    pts = list(grid)
    if not pts or any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("hedge grid must be non-empty and strictly increasing")
    if pts[0] < 0.0 or pts[-1] > T + 1e-12:
        raise ValueError("hedge grid must lie inside [0, maturity]")
    prices = {t: fwd_bond_price(bond, base, curve, recovery, t) for t in pts}
    notionals: dict[float, float] = {}
    for a, b in zip(pts, pts[1:]):
        notionals[b] = (prices[a] - prices[b]) / (1.0 - R)
    terminal = (prices[pts[-1]] - R) / (1.0 - R)
    notionals[T] = notionals.get(T, 0.0) + terminal
    legs = [
        (m, n, _leg_spread(m, base, curve, R))
        for m, n in sorted(notionals.items())
        if m > 0.0
    ]
    cost = _aggregate_spread(legs, base, curve)
    plan_legs = tuple(HedgeLeg(m, n, s) for m, n, s in legs)
    plan = HedgePlan(legs=plan_legs, cost=cost, residual_npv=0.0)
    # Residual exposure: each bucket (t_i, t_{i+1}] is covered by the legs
    # maturing after its start, which telescope to the forward notional at
    # the bucket start, so the replication error vanishes on the plan grid.
    residual = 0.0
    for a, b in zip(pts, pts[1:] + [T]):
        if b <= a:
            continue
        target = (prices[a] - R) / (1.0 - R)
        weight = base.df(b) * (curve.survival(a) - curve.survival(b)) * (1.0 - R)
        residual += weight * (target - plan.protection_notional(a))
    return HedgePlan(legs=plan_legs, cost=cost, residual_npv=residual)


def coarse_hedge(
    bond: BondSpec,
    base: BaseCurve,
    curve_cds: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    candidate_maturities: list[float],
) -> HedgePlan:
    """Two-CDS hedge: face notional to final maturity plus one staggered leg.

    For each candidate staggered maturity the add-on notional zeroes the
    NPV of residual default exposures on a quarterly grid; the plan with
    the lowest rpv01-weighted aggregate spread wins.  The candidate at
    the bond's final maturity reproduces the single-CDS strategy.
    """
    R = _recovery_rate(recovery)
    T = bond.maturity
    if not candidate_maturities:
        raise ValueError("need at least one candidate maturity")
    candidates = sorted(set(float(m) for m in candidate_maturities))
    if all(abs(m - T) > 1e-9 for m in candidates):
        raise ValueError("candidates must include the bond's final maturity")
    if candidates[0] <= 0.0 or candidates[-1] > T + 1e-9:
        raise ValueError("candidate maturities must lie in (0, maturity]")

    steps = round(T * HEDGE_FREQ)
    if abs(T * HEDGE_FREQ - steps) > 1e-8:
        raise ValueError("bond maturity must sit on the quarterly hedge grid")
    grid = [i / HEDGE_FREQ for i in range(1, steps + 1)]
    fwd_n = {
        t: fwd_hedge_notional(bond, base, curve_cds, recovery, t) for t in grid
    }
    spread_T = _leg_spread(T, base, curve_cds, R)

    # Default-leg weights Z * dQ per grid bucket.
    weights = {}
    q_prev = 1.0
    for t in grid:
        q = curve_cds.survival(t)
        weights[t] = base.df(t) * (q_prev - q)
        q_prev = q
    total_gap = sum(weights[t] * (fwd_n[t] - 1.0) for t in grid)

    best: HedgePlan | None = None
    for m in candidates:
        covered = sum(weights[t] for t in grid if t <= m + 1e-12)
        if covered <= 0.0:
            continue
        notional = total_gap / covered
        coverage = {t: 1.0 + (notional if t <= m + 1e-12 else 0.0) for t in grid}
        residual = _exposure_npv(grid, coverage, fwd_n, base, curve_cds, R)
        if abs(m - T) <= 1e-9:
            legs = [(T, 1.0 + notional, spread_T)]
        else:
            legs = [(m, notional, _leg_spread(m, base, curve_cds, R)),
                    (T, 1.0, spread_T)]
        cost = _aggregate_spread(legs, base, curve_cds)
        plan = HedgePlan(
            legs=tuple(HedgeLeg(*leg) for leg in legs),
            cost=cost,
            residual_npv=residual,
        )
        if best is None or plan.cost < best.cost:
            best = plan
    if best is None:
        raise ValueError("no feasible candidate maturity")
    return best


def basis_spread(
    bond: BondSpec,
    market_clean_price: float,
    base: BaseCurve,
    curve_cds: SurvivalCurve,
    recovery: RecoveryAssumption | float,
) -> float:
    """Constant spread reconciling the market price with the CDS-implied
    fair value; the DAS analogue with the CDS-calibrated curve."""
    R = _recovery_rate(recovery)
    if market_clean_price + bond.accrued_interest <= 0.0:
        raise ValueError("dirty price must be > 0")

    def residual(s: float) -> float:
        return (
            pricing.bond_pv_frp(bond, base, curve_cds, R, das=s)
            - bond.accrued_interest
            - market_clean_price
        )

    return solve_bracketed(residual, *RATE_BRACKET, f_tol=PRICE_TOL)


def approx_basis(
    bond: BondSpec,
    market_clean_price: float,
    base: BaseCurve,
    curve_bond: SurvivalCurve,
    curve_cds: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    plan: HedgePlan,
) -> float:
    """Excess spread over the bond-market curve less the plan's
    rpv01-weighted aggregate CDS spread."""
    R = _recovery_rate(recovery)
    s_x = measures.excess_spread(bond, market_clean_price, base, curve_bond, R)
    legs = [(leg.maturity, leg.notional, leg.spread) for leg in plan.legs]
    return s_x - _aggregate_spread(legs, base, curve_cds)
