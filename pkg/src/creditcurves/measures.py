"""Issuer/sector term structures and bond-specific relative value.

Everything here is derived from a base curve plus a fitted survival
curve: par coupons and P-spreads, constant coupon price (CCP) curves,
bond-implied CDS, forward CDS spreads, and the bond-level measures
(fitted price, fitted par coupon, default-adjusted spread, excess
spread).  Sign convention: DAS > 0 means the bond trades cheap to the
fitted curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import pricing
from .conventional import BondSpec
from .curves import BaseCurve
from .errors import ScheduleError
from .rootfind import solve_bracketed
from .survival import SurvivalCurve

RATE_BRACKET = (-0.5, 5.0)
PRICE_TOL = 1e-12
BCDS_FREQ = 4
DEFAULT_CCP_COUPONS = (0.06, 0.08, 0.10)


def _schedule(maturity: float, freq: int) -> tuple[float, ...]:
    n = maturity * freq
    if abs(n - round(n)) > 1e-8 or round(n) < 1:
        raise ScheduleError(f"maturity {maturity} not on a 1/{freq} coupon grid")
    return tuple(i / freq for i in range(1, round(n) + 1))


def _leg_sums(
    times: tuple[float, ...], base: BaseCurve, curve: SurvivalCurve
) -> tuple[float, float, float]:
    """(sum Z*Q, sum Z*(Q_prev - Q), Z*Q at maturity) over a schedule."""
    annuity = 0.0
    protection = 0.0
    q_prev = 1.0
    for t in times:
        z = base.df(t)
        q = curve.survival(t)
        annuity += z * q
        protection += z * (q_prev - q)
        q_prev = q
    return annuity, protection, base.df(times[-1]) * curve.survival(times[-1])


def par_coupon(
    maturity: float, freq: int, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    """Coupon making a hypothetical bond price exactly at par (clean)."""
    times = _schedule(maturity, freq)
    annuity, protection, survived = _leg_sums(times, base, curve)
    den = annuity + 0.5 * recovery * protection
    if den <= 0.0:
        raise ValueError("non-positive par-coupon denominator")
    return freq * (1.0 - survived - recovery * protection) / den


def p_spread(
    maturity: float, freq: int, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    """Par coupon less the risk-free par yield of the same maturity."""
    return par_coupon(maturity, freq, base, curve, recovery) - base.par_yield(maturity, freq)


def ccp(
    maturity: float,
    coupon: float,
    freq: int,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: float,
) -> float:
    """Constant coupon price: clean fitted price of a coupon-C bond."""
    bond = BondSpec(coupon=coupon, freq=freq, maturity=maturity)
    return pricing.bond_pv_frp(bond, base, curve, recovery)


def bcds(maturity: float, base: BaseCurve, curve: SurvivalCurve, recovery: float) -> float:
    """Bond-implied CDS spread: quarterly par CDS off the fitted curve."""
    return pricing.cds_par_spread(maturity, BCDS_FREQ, base, curve, recovery)


def fwd_cds_spread(
    t1: float, t2: float, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    """Forward par CDS spread for protection over [t1, t2].

    Risky-PV01 weighted combination of the spot spreads; equivalent to
    pricing the CDS off the forward discount and survival curves.
    """
    if not 0.0 < t1 < t2:
        raise ValueError("need 0 < t1 < t2")
    s1 = pricing.cds_par_spread(t1, BCDS_FREQ, base, curve, recovery)
    s2 = pricing.cds_par_spread(t2, BCDS_FREQ, base, curve, recovery)
    kappa = pricing.rpv01(t1, BCDS_FREQ, base, curve) / pricing.rpv01(t2, BCDS_FREQ, base, curve)
    assert kappa < 1.0, "rpv01 must be increasing in maturity"
    return (s2 - kappa * s1) / (1.0 - kappa)


def fitted_price(
    bond: BondSpec, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    """Clean price the bond would have if priced exactly on the curve."""
    return pricing.bond_pv_frp(bond, base, curve, recovery) - bond.accrued_interest


def _bond_leg_sums(
    bond: BondSpec, base: BaseCurve, curve: SurvivalCurve
) -> tuple[float, float, float]:
    return _leg_sums(bond.payment_times, base, curve)


def fitted_par_coupon(
    bond: BondSpec, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    """Par coupon on the bond's own (possibly seasoned) schedule.

    The accrued time enters the annuity denominator, so a seasoned bond
    carries a slightly higher fitted par coupon than the generic same-
    maturity one.
    """
    annuity, protection, survived = _bond_leg_sums(bond, base, curve)
    den = annuity + 0.5 * recovery * protection - bond.accrued_time
    if den <= 0.0:
        raise ValueError("non-positive par-coupon denominator")
    return bond.freq * (1.0 - survived - recovery * protection) / den


def fitted_base_par_coupon(bond: BondSpec, base: BaseCurve) -> float:
    """Risk-free par coupon on the bond's schedule (the h = 0 limit of
    fitted_par_coupon), used as the benchmark leg of the fitted P-spread."""
    annuity = sum(base.df(t) for t in bond.payment_times)
    den = annuity - bond.accrued_time
    if den <= 0.0:
        raise ValueError("non-positive par-coupon denominator")
    return bond.freq * (1.0 - base.df(bond.payment_times[-1])) / den


def fitted_p_spread(
    bond: BondSpec, base: BaseCurve, curve: SurvivalCurve, recovery: float
) -> float:
    return fitted_par_coupon(bond, base, curve, recovery) - fitted_base_par_coupon(bond, base)


def das(
    bond: BondSpec,
    market_clean_price: float,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: float,
) -> float:
    """Default-adjusted spread: constant discount spread applied to all
    legs that reconciles the fitted price with the market clean price."""
    if market_clean_price + bond.accrued_interest <= 0.0:
        raise ValueError("dirty price must be > 0")

    def residual(s: float) -> float:
        return (
            pricing.bond_pv_frp(bond, base, curve, recovery, das=s)
            - bond.accrued_interest
            - market_clean_price
        )

    return solve_bracketed(residual, *RATE_BRACKET, f_tol=PRICE_TOL)


def excess_spread(
    bond: BondSpec,
    market_clean_price: float,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: float,
) -> float:
    """Fitted P-spread plus DAS.

    A total relative-value spread; not suitable for discounting because
    the P-spread leg does not refer to the bond's actual cash flows.
    """
    return fitted_p_spread(bond, base, curve, recovery) + das(
        bond, market_clean_price, base, curve, recovery
    )


# ---------------------------------------------------------------------------
# Term structure report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TermStructureRow:
    tenor: float
    survival: float
    hazard: float
    zz_spread: float
    par_coupon: float
    p_spread: float
    ccp: tuple[float, ...]
    bcds: float


@dataclass(frozen=True)
class TermStructureReport:
    """Per-tenor survival, hazard and spread measures on a report grid."""

    recovery: float
    ccp_coupons: tuple[float, ...]
    rows: tuple[TermStructureRow, ...]

    def csv_header(self) -> list[str]:
        labels = []
        for c in self.ccp_coupons:
            pct = c * 100.0
            labels.append(f"ccp_{pct:g}")
        return ["tenor", "Q", "hazard", "zz_spread", "par_coupon", "p_spread",
                *labels, "bcds"]

    def csv_rows(self) -> list[list[float]]:
        return [
            [r.tenor, r.survival, r.hazard, r.zz_spread, r.par_coupon, r.p_spread,
             *r.ccp, r.bcds]
            for r in self.rows
        ]


def report_grid() -> tuple[float, ...]:
    """Default report tenors: half-year steps to 10y, annual to 30y."""
    half_years = [0.5 * i for i in range(1, 21)]
    years = [float(y) for y in range(11, 31)]
    return tuple(half_years + years)


def term_structure_report(
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: float,
    coupons: tuple[float, ...] = DEFAULT_CCP_COUPONS,
    grid: tuple[float, ...] | None = None,
    freq: int = 2,
) -> TermStructureReport:
    tenors = report_grid() if grid is None else tuple(grid)
    if any(b <= a for a, b in zip(tenors, tenors[1:])) or tenors[0] <= 0.0:
        raise ValueError("report grid must be strictly increasing and > 0")
    rows = []
    for t in tenors:
        row = TermStructureRow(
            tenor=t,
            survival=curve.survival(t),
            hazard=curve.hazard(t),
            zz_spread=curve.zz_spread(t),
            par_coupon=par_coupon(t, freq, base, curve, recovery),
            p_spread=p_spread(t, freq, base, curve, recovery),
            ccp=tuple(ccp(t, c, freq, base, curve, recovery) for c in coupons),
            bcds=bcds(t, base, curve, recovery),
        )
        for value in (row.survival, row.hazard, row.zz_spread, row.par_coupon,
                      row.p_spread, *row.ccp, row.bcds):
            if not math.isfinite(value):
                raise ValueError(f"non-finite report value at tenor {t}")
        rows.append(row)
    return TermStructureReport(recovery=recovery, ccp_coupons=tuple(coupons), rows=tuple(rows))
