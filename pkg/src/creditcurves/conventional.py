"""Conventional yield and spread measures.

These are the strippable-cash-flow measures kept for comparison with the
survival-based ones: yield to maturity, yield/I-spread against benchmark
yields, Z-spread over a base curve, and the floating-rate-note discount
margin.  Accrued interest handling: full coupons are discounted at their
scheduled times and compared against the dirty price (clean + accrued).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curves import BaseCurve
from .errors import ScheduleError
from .rootfind import solve_bracketed

RATE_BRACKET = (-0.5, 5.0)
PRICE_TOL = 1e-12


@dataclass(frozen=True)
class BondSpec:
    """Bullet bond: annual coupon rate, payment frequency, maturity in years.

    ``accrued_time`` is the time since the last coupon; remaining payment
    dates are t_i = maturity - (N - i)/freq, so freq * (maturity +
    accrued_time) must be a whole number of periods.  Face value is 1.
    """

    coupon: float
    freq: int
    maturity: float
    accrued_time: float = 0.0

    def __post_init__(self) -> None:
        if self.coupon < 0.0:
            raise ValueError("coupon must be >= 0")
        if self.freq not in (1, 2, 4):
            raise ValueError("freq must be 1, 2 or 4")
        if self.maturity <= 0.0:
            raise ValueError("maturity must be > 0")
        if not 0.0 <= self.accrued_time < 1.0 / self.freq:
            raise ValueError("accrued_time must lie in [0, 1/freq)")
        n = (self.maturity + self.accrued_time) * self.freq
        if abs(n - round(n)) > 1e-8 or round(n) < 1:
            raise ScheduleError(
                f"maturity {self.maturity} with accrued {self.accrued_time} does not "
                f"sit on a 1/{self.freq} coupon grid"
            )

    @property
    def n_payments(self) -> int:
        return round((self.maturity + self.accrued_time) * self.freq)

    @property
    def payment_times(self) -> tuple[float, ...]:
        n = self.n_payments
        return tuple(self.maturity - (n - i) / self.freq for i in range(1, n + 1))

    @property
    def accrued_interest(self) -> float:
        return self.coupon * self.accrued_time

    def cash_flows(self) -> tuple[tuple[float, float], ...]:
        """(time, amount) pairs; the final payment includes the principal."""
        times = self.payment_times
        cpn = self.coupon / self.freq
        flows = [(t, cpn) for t in times[:-1]]
        flows.append((times[-1], cpn + 1.0))
        return tuple(flows)


@dataclass(frozen=True)
class FrnSpec:
    """Floating rate note paying (index fixing + quoted margin) / freq.

    ``fixings`` holds the projected forward index rates per period; when
    omitted they are implied from the discount curve passed to
    ``discount_margin``.
    """

    quoted_margin: float
    freq: int
    maturity: float
    fixings: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.freq < 1:
            raise ValueError("freq must be >= 1")
        n = self.maturity * self.freq
        if abs(n - round(n)) > 1e-8 or round(n) < 1:
            raise ScheduleError(f"maturity {self.maturity} not on a 1/{self.freq} grid")
        if self.fixings is not None:
            fixings = tuple(float(x) for x in self.fixings)
            if len(fixings) != round(n):
                raise ValueError("need one fixing per payment period")
            object.__setattr__(self, "fixings", fixings)

    @property
    def n_payments(self) -> int:
        return round(self.maturity * self.freq)


def _pv_at_yield(bond: BondSpec, y: float, q_conv: float) -> float:
    if math.isinf(q_conv):
        return sum(cf * math.exp(-y * t) for t, cf in bond.cash_flows())
    return sum(cf * (1.0 + y / q_conv) ** (-q_conv * t) for t, cf in bond.cash_flows())


def ytm(bond: BondSpec, clean_price: float, q_conv: float | None = None) -> float:
    """Yield to maturity in compounding convention q_conv (default: the
    bond's own frequency; ``math.inf`` for continuous compounding)."""
    conv = float(bond.freq) if q_conv is None else float(q_conv)
    dirty = clean_price + bond.accrued_interest
    if dirty <= 0.0:
        raise ValueError("dirty price must be > 0")
    return solve_bracketed(
        lambda y: _pv_at_yield(bond, y, conv) - dirty,
        *RATE_BRACKET,
        f_tol=PRICE_TOL,
    )


def i_spread(
    bond_yield: float,
    maturity: float,
    bench1: tuple[float, float],
    bench2: tuple[float, float] | None = None,
) -> float:
    """Spread over benchmark yields, linearly interpolated in maturity.

    With a single benchmark this is the plain yield spread.  With two,
    the bond maturity must lie inside the benchmark bracket.
    """
    t1, y1 = bench1
    if bench2 is None:
        return bond_yield - y1
    t2, y2 = bench2
    if not t1 < t2:
        raise ValueError("benchmark maturities must be increasing")
    if not t1 <= maturity <= t2:
        raise ValueError("bond maturity outside the benchmark bracket")
    w = (maturity - t1) / (t2 - t1)
    return bond_yield - ((1.0 - w) * y1 + w * y2)


def z_spread(bond: BondSpec, clean_price: float, base: BaseCurve) -> float:
    """Constant spread s with dirty = sum CF * Z_base(t) * exp(-s*t)."""
    dirty = clean_price + bond.accrued_interest
    if dirty <= 0.0:
        raise ValueError("dirty price must be > 0")
    flows = bond.cash_flows()
    dfs = [base.df(t) for t, _ in flows]

    def residual(s: float) -> float:
        return sum(cf * df * math.exp(-s * t) for (t, cf), df in zip(flows, dfs)) - dirty

    return solve_bracketed(residual, *RATE_BRACKET, f_tol=PRICE_TOL)


def z_spread_duration(bond: BondSpec, clean_price: float, base: BaseCurve) -> float:
    """Sensitivity -d ln PV / d s at the bond's fitted Z-spread, in years."""
    s = z_spread(bond, clean_price, base)
    dirty = clean_price + bond.accrued_interest
    weighted = sum(t * cf * base.df(t) * math.exp(-s * t) for t, cf in bond.cash_flows())
    return weighted / dirty


def discount_margin(frn: FrnSpec, price: float, base: BaseCurve | None = None) -> float:
    """Zero discount margin of a floating rate note at a reset date.

    Cash flows are (L_i + QM)/q with the principal added at maturity;
    discounting compounds 1/(1 + (L_i + DM)/q) per period.  Forward
    fixings come from the spec, or are implied from ``base`` when absent.
    """
    if price <= 0.0:
        raise ValueError("price must be > 0")
    n = frn.n_payments
    delta = 1.0 / frn.freq
    if frn.fixings is not None:
        fixings = frn.fixings
    else:
        if base is None:
            raise ValueError("need either explicit fixings or a base curve")
        fixings = tuple(
            (base.df((i - 1) * delta) / base.df(i * delta) - 1.0) / delta
            for i in range(1, n + 1)
        )

    def residual(dm: float) -> float:
        pv = 0.0
        disc = 1.0
        for i, fix in enumerate(fixings, start=1):
            disc /= 1.0 + delta * (fix + dm)
            cf = (fix + frn.quoted_margin) * delta
            if i == n:
                cf += 1.0
            pv += cf * disc
        return pv - price

    return solve_bracketed(residual, *RATE_BRACKET, f_tol=PRICE_TOL)
