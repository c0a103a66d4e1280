"""Risk-free (base) discount curve.

Conventions used throughout the package:

- Times are year fractions measured from the valuation date.
- Rates are continuously compounded decimals (0.05 = 5%).
- The curve is a set of (tenor, discount factor) nodes with an implicit
  node (0, 1.0).  Interpolation is log-linear in the discount factor, so
  instantaneous forward rates are piecewise constant; extrapolation past
  the last node keeps the last forward rate flat.

Construction rejects increasing discount factors, i.e. negative forward
rates, so every curve built here has df(t) non-increasing and fwd >= 0.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from typing import Iterable, Sequence

from .errors import ParseError, ScheduleError


class BaseCurve:
    """Immutable discount curve, log-linear in discount factors."""

    def __init__(self, nodes: Iterable[tuple[float, float]]):
        pts = [(float(t), float(df)) for t, df in nodes]
        if not pts:
            raise ValueError("curve needs at least one node")
        prev_t, prev_df = 0.0, 1.0
        for t, df in pts:
            if t <= prev_t:
                raise ValueError("node tenors must be strictly increasing and > 0")
            if not 0.0 < df <= 1.0:
                raise ValueError(f"discount factor at t={t} must be in (0, 1]")
            if df > prev_df:
                raise ValueError(
                    f"discount factors must be non-increasing (negative forward at t={t})"
                )
            prev_t, prev_df = t, df
        self._times = (0.0,) + tuple(t for t, _ in pts)
        self._dfs = (1.0,) + tuple(df for _, df in pts)
        # Constant forward per segment; the last one also drives extrapolation.
        self._fwds = tuple(
            math.log(self._dfs[i] / self._dfs[i + 1]) / (self._times[i + 1] - self._times[i])
            for i in range(len(self._dfs) - 1)
        )

    @classmethod
    def from_zero_rates(cls, pairs: Iterable[tuple[float, float]]) -> "BaseCurve":
        """Build from (tenor, continuously-compounded zero rate) pairs."""
        return cls([(t, math.exp(-r * t)) for t, r in pairs])

    @classmethod
    def flat(cls, rate: float, tenor: float = 1.0) -> "BaseCurve":
        """Flat curve df(t) = exp(-rate * t); exact at all t, not just nodes."""
        return cls([(tenor, math.exp(-rate * tenor))])

    @property
    def node_tenors(self) -> tuple[float, ...]:
        return self._times[1:]

    def df(self, t: float) -> float:
        """Discount factor Z(t); log-linear between nodes, flat forward beyond."""
        if t < 0.0:
            raise ValueError("t must be >= 0")
        if t == 0.0:
            return 1.0
        times = self._times
        if t >= times[-1]:
            return self._dfs[-1] * math.exp(-self._fwds[-1] * (t - times[-1]))
        i = bisect_right(times, t) - 1
        return self._dfs[i] * math.exp(-self._fwds[i] * (t - times[i]))

    def zero_rate(self, t: float) -> float:
        """Continuously compounded zero rate r(t) = -ln Z(t) / t, t > 0."""
        if t <= 0.0:
            raise ValueError("t must be > 0")
        return -math.log(self.df(t)) / t

    def fwd_rate(self, t: float) -> float:
        """Instantaneous forward rate; right-limit at nodes, flat beyond the end."""
        if t < 0.0:
            raise ValueError("t must be >= 0")
        times = self._times
        if t >= times[-1]:
            return self._fwds[-1]
        return self._fwds[bisect_right(times, t) - 1]

    def par_yield(self, maturity: float, freq: int) -> float:
        """Coupon rate pricing a riskless bullet bond at par.

        The maturity must be an integer number of coupon periods; coupon
        dates are i/freq for i = 1..N.
        """
        n = maturity * freq
        n_int = round(n)
        if n_int < 1 or abs(n - n_int) > 1e-9:
            raise ScheduleError(
                f"maturity {maturity} is not an integer number of 1/{freq} periods"
            )
        annuity = sum(self.df(i / freq) for i in range(1, n_int + 1))
        return freq * (1.0 - self.df(maturity)) / annuity

    def __repr__(self) -> str:
        inner = ", ".join(f"({t:g}, {df:.6g})" for t, df in zip(self._times[1:], self._dfs[1:]))
        return f"BaseCurve([{inner}])"


def load_base_curve(path: str) -> BaseCurve:
    """Read a curve CSV with header ``tenor_years,zero_rate`` or
    ``tenor_years,discount_factor`` (exactly one of the two columns)."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        has_rate = "zero_rate" in fields
        has_df = "discount_factor" in fields
        if "tenor_years" not in fields or has_rate == has_df:
            raise ParseError(
                f"{path}: header must be tenor_years plus exactly one of "
                "zero_rate / discount_factor"
            )
        column = "zero_rate" if has_rate else "discount_factor"
        pairs = []
        for row in reader:
            line = reader.line_num
            try:
                tenor = float(row["tenor_years"])
                value = float(row[column])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{path}: row {line}: {exc}") from exc
            pairs.append((tenor, value))
        if not pairs:
            raise ParseError(f"{path}: no curve rows")
    try:
        if has_rate:
            return BaseCurve.from_zero_rates(pairs)
        return BaseCurve(pairs)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_base_curve(curve: BaseCurve, path: str) -> None:
    """Write the node discount factors back out in the CSV schema."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["tenor_years", "discount_factor"])
        for t in curve.node_tenors:
            writer.writerow([repr(t), repr(curve.df(t))])


def sorted_unique(values: Sequence[float], tol: float = 1e-12) -> list[float]:
    """Sort and deduplicate breakpoints (helper for segment integration)."""
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out
