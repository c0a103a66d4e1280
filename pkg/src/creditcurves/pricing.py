"""Survival-based (fractional recovery of par) pricing of bonds and CDS.

A defaulted bond pays the recovery fraction R of face plus R on half a
coupon of accrued interest, settled on the first coupon date after
default.  CDS legs net accrued premium against the protection payment.
All discrete schedules live on the instrument's own payment grid; CDS
default to quarterly payments.

The continuous-time forms evaluate the survival-weighted discount
integrals in closed form: both curve families reduce, segment by
segment, to sums of exponentials, so no numerical quadrature is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conventional import BondSpec
from .curves import BaseCurve, sorted_unique
from .errors import ScheduleError
from .survival import SurvivalCurve


@dataclass(frozen=True)
class RecoveryAssumption:
    """Fractional recovery of par; accrued interest recovers the same rate."""

    principal: float
    accrued: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.principal < 1.0:
            raise ValueError("principal recovery must be in [0, 1)")
        acc = self.principal if self.accrued is None else float(self.accrued)
        if acc != self.principal:
            raise ValueError("accrued recovery must equal principal recovery")
        object.__setattr__(self, "accrued", acc)

    @property
    def rate(self) -> float:
        return self.principal


@dataclass(frozen=True)
class CdsSpec:
    """Credit default swap contract terms."""

    contractual_coupon: float
    maturity: float
    freq: int = 4
    recovery: float = 0.40

    def __post_init__(self) -> None:
        if self.maturity <= 0.0:
            raise ValueError("maturity must be > 0")
        if not 0.0 <= self.recovery < 1.0:
            raise ValueError("recovery must be in [0, 1)")
        _cds_grid(self.maturity, self.freq)


@dataclass(frozen=True)
class TriangleQuotes:
    """Matching-maturity CDS / DDS / recovery-swap quotes."""

    cds_spread: float
    dds_spread: float
    dds_recovery: float
    rs_rate: float

    def __post_init__(self) -> None:
        for name in ("dds_recovery", "rs_rate"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")


def _recovery_rate(recovery: RecoveryAssumption | float) -> float:
    rate = recovery.rate if isinstance(recovery, RecoveryAssumption) else float(recovery)
    if not 0.0 <= rate < 1.0:
        raise ValueError("recovery rate must be in [0, 1)")
    return rate


def _cds_grid(maturity: float, freq: int) -> tuple[float, ...]:
    n = maturity * freq
    if abs(n - round(n)) > 1e-8 or round(n) < 1:
        raise ScheduleError(f"CDS maturity {maturity} not on a 1/{freq} payment grid")
    n = round(n)
    return tuple(i / freq for i in range(1, n + 1))


def bond_pv_frp(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    das: float = 0.0,
) -> float:
    """Dirty present value of a credit bond under fractional recovery of par.

    Survival-weighted coupons and principal, plus R*(1 + C/2q) of face
    paid on the coupon date ending the default period.  A non-zero ``das``
    discounts all three legs by exp(-das * t).
    """
    R = _recovery_rate(recovery)
    times = bond.payment_times
    if not times:
        raise ValueError("bond has no remaining payments")
    cpn = bond.coupon / bond.freq
    rec_factor = R * (1.0 + bond.coupon / (2.0 * bond.freq))
    pv = 0.0
    q_prev = 1.0
    for t in times:
        z = base.df(t) * math.exp(-das * t)
        q = curve.survival(t)
        pv += cpn * z * q + rec_factor * z * (q_prev - q)
        q_prev = q
    pv += base.df(times[-1]) * math.exp(-das * times[-1]) * curve.survival(times[-1])
    return pv


def cds_upfront(cds: CdsSpec, base: BaseCurve, curve: SurvivalCurve) -> float:
    """Upfront payment equating premium and protection legs."""
    times = _cds_grid(cds.maturity, cds.freq)
    R = cds.recovery
    cpn = cds.contractual_coupon
    prot = 0.0
    prem = 0.0
    q_prev = 1.0
    for t in times:
        z = base.df(t)
        q = curve.survival(t)
        prot += z * (q_prev - q)
        prem += z * q
        q_prev = q
    return (1.0 - R - cpn / (2.0 * cds.freq)) * prot - (cpn / cds.freq) * prem


def cds_par_spread(
    maturity: float,
    freq: int,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
) -> float:
    """Breakeven running premium for zero upfront."""
    R = _recovery_rate(recovery)
    num = 0.0
    den = 0.0
    q_prev = 1.0
    for t in _cds_grid(maturity, freq):
        z = base.df(t)
        q = curve.survival(t)
        num += z * (q_prev - q)
        den += z * (q_prev + q)
        q_prev = q
    if den <= 0.0:
        raise ValueError("degenerate premium annuity")
    return 2.0 * freq * (1.0 - R) * num / den


def rpv01(maturity: float, freq: int, base: BaseCurve, curve: SurvivalCurve) -> float:
    """Risky PV01: value of a unit running premium paid until default."""
    total = 0.0
    q_prev = 1.0
    for t in _cds_grid(maturity, freq):
        q = curve.survival(t)
        total += base.df(t) * (q_prev + q)
        q_prev = q
    return total / (2.0 * freq)


def cds_mtm(cds: CdsSpec, par_spread: float, risky_pv01: float) -> float:
    """Upfront mark-to-market: (par spread - contractual coupon) * rpv01."""
    return (par_spread - cds.contractual_coupon) * risky_pv01


def recovery_swap_hedge(rs_rate: float, dds_recovery: float) -> tuple[float, float]:
    """Notionals (H_cds, H_dds) replicating a payer recovery swap.

    Short one CDS, long (1 - rs_rate)/(1 - dds_recovery) DDS: the default
    payoff nets to zero for every realized recovery.
    """
    if dds_recovery >= 1.0:
        raise ValueError("dds_recovery must be < 1")
    return 1.0, (1.0 - rs_rate) / (1.0 - dds_recovery)


def dds_spread_from_cds(cds_spread: float, dds_recovery: float, rs_rate: float) -> float:
    """No-arbitrage digital default swap spread from CDS and recovery swap."""
    if rs_rate >= 1.0:
        raise ValueError("rs_rate must be < 1")
    return cds_spread * (1.0 - dds_recovery) / (1.0 - rs_rate)


def credit_triangle_hazard(cds_spread: float, rs_rate: float) -> float:
    """Flat-curve hazard rate h = S / (1 - R)."""
    if rs_rate >= 1.0:
        raise ValueError("rs_rate must be < 1")
    return cds_spread / (1.0 - rs_rate)


# ---------------------------------------------------------------------------
# Closed-form survival-weighted integrals and continuous-time prices
# ---------------------------------------------------------------------------


def _int_exp(decay: float, a: float, b: float) -> float:
    """Integral of exp(-decay * u) over [a, b]."""
    if abs(decay) < 1e-14:
        return b - a
    return -math.exp(-decay * a) * math.expm1(-decay * (b - a)) / decay


def survival_discount_integrals(
    base: BaseCurve,
    curve: SurvivalCurve,
    t0: float,
    t1: float,
    extra_decay: float = 0.0,
) -> tuple[float, float, float]:
    """Exact integrals of Z*Q, h*Z*Q and f*Z*Q times exp(-extra_decay*u).

    Both curve families are piecewise sums of exponentials, so each
    segment between curve breakpoints integrates in closed form.
    """
    if t1 <= t0:
        return 0.0, 0.0, 0.0
    cuts = [t0, t1]
    cuts += [x for x in base.node_tenors if t0 < x < t1]
    cuts += [x for x in curve._breakpoints() if t0 < x < t1]
    grid = sorted_unique(cuts)
    i_zq = i_hzq = i_fzq = 0.0
    for a, b in zip(grid, grid[1:]):
        f = base.fwd_rate(a)
        scale = base.df(a) * math.exp(f * a)
        for coef, decay in curve._exp_terms(a, b):
            piece = scale * coef * _int_exp(f + decay + extra_decay, a, b)
            i_zq += piece
            i_hzq += decay * piece
            i_fzq += f * piece
    return i_zq, i_hzq, i_fzq


def bond_price_continuous(
    bond: BondSpec,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
    das: float = 0.0,
) -> float:
    """Clean price in the continuous-coupon approximation.

    Corrects the naive integral formula for the expected accrued coupon
    lost at default and for the early-discount bias of spreading coupons
    over the period, via the -C/2q * (1 - E) term and the (1 + C/2q)
    recovery load.
    """
    R = _recovery_rate(recovery)
    T = bond.maturity
    q = bond.freq
    C = bond.coupon
    i_zq, i_hzq, _ = survival_discount_integrals(base, curve, 0.0, T, extra_decay=das)
    survived = base.df(T) * curve.survival(T) * math.exp(-das * T)
    return (
        C * i_zq
        + survived
        - C / (2.0 * q) * (1.0 - survived)
        + R * (1.0 + C / (2.0 * q)) * i_hzq
    )


def cds_par_spread_continuous(
    maturity: float,
    freq: int,
    base: BaseCurve,
    curve: SurvivalCurve,
    recovery: RecoveryAssumption | float,
) -> float:
    """Continuous-premium par CDS spread with the finite-frequency
    discounting correction (1 - f/2q) applied to the premium annuity."""
    R = _recovery_rate(recovery)
    i_zq, i_hzq, i_fzq = survival_discount_integrals(base, curve, 0.0, maturity)
    den = i_zq - i_fzq / (2.0 * freq)
    if den <= 0.0:
        raise ValueError("degenerate premium annuity")
    return (1.0 - R) * i_hzq / den
