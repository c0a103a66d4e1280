"""Survival probability term structures.

Two representations are supported:

- ``SplineSurvivalCurve``: Q(t) = sum_k beta_k * Phi_k(t | eta) on an
  exponential spline basis, the output of the cross-sectional bond fit.
- ``PiecewiseHazardCurve``: piecewise-constant hazard segments, the
  output of a CDS bootstrap.

Invariants enforced at construction: Q(0) = 1, Q non-increasing on a
quarterly validation grid, and Q positive at the curve horizon.  Past
the horizon both representations extrapolate with the terminal hazard
rate, which keeps hazards non-negative and survival positive forever.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

from .splines import SplineBasis

VALIDATION_STEP = 0.25
DEFAULT_HORIZON = 30.0
_Q0_TOL = 1e-12


class SurvivalCurve:
    """Shared behaviour; concrete curves implement survival() and hazard()."""

    horizon: float

    def survival(self, t: float) -> float:
        raise NotImplementedError

    def hazard(self, t: float) -> float:
        raise NotImplementedError

    def default_prob(self, t1: float, t2: float) -> float:
        """Probability of default inside [t1, t2]: Q(t1) - Q(t2)."""
        if t1 < 0.0 or t2 < t1:
            raise ValueError("need 0 <= t1 <= t2")
        return self.survival(t1) - self.survival(t2)

    def cumulative_default_prob(self, t: float) -> float:
        return self.default_prob(0.0, t)

    def fwd_survival(self, t: float, T: float) -> float:
        """Conditional survival to T given survival to t: Q(T)/Q(t)."""
        if t < 0.0 or T < t:
            raise ValueError("need 0 <= t <= T")
        qt = self.survival(t)
        if qt <= 0.0:
            raise ValueError(f"survival vanishes at t={t}")
        return self.survival(T) / qt

    def zz_spread(self, T: float) -> float:
        """Average hazard to T: -ln Q(T) / T (zero-coupon zero-recovery spread)."""
        if T <= 0.0:
            raise ValueError("T must be > 0")
        return -math.log(self.survival(T)) / T

    # -- segment decomposition used by the closed-form integrators ---------

    def _breakpoints(self) -> tuple[float, ...]:
        raise NotImplementedError

    def _exp_terms(self, a: float, b: float) -> list[tuple[float, float]]:
        """Q(u) = sum c * exp(-d * u) on [a, b] (no breakpoints inside)."""
        raise NotImplementedError

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        raise NotImplementedError

    def save(self, path: str) -> None:
        with open(path, "w") as handle:
            json.dump(self.to_dict(), handle, indent=2)
            handle.write("\n")


class SplineSurvivalCurve(SurvivalCurve):
    """Exponential-spline survival curve with constant-hazard tail."""

    def __init__(self, basis: SplineBasis, beta: Sequence[float], horizon: float = DEFAULT_HORIZON):
        beta = tuple(float(b) for b in beta)
        if len(beta) != basis.size:
            raise ValueError("beta length must match basis size")
        if horizon <= 0.0:
            raise ValueError("horizon must be > 0")
        if abs(sum(beta) - 1.0) > _Q0_TOL:
            raise ValueError(f"Q(0) = sum(beta) = {sum(beta)!r} must equal 1")
        self.basis = basis
        self.beta = beta
        self.horizon = float(horizon)
        self._validate_grid()
        q_h = self._spline_q(self.horizon)
        self._tail_hazard = self._spline_hazard(self.horizon)
        self._q_horizon = q_h

    def _validate_grid(self) -> None:
        steps = int(math.ceil(self.horizon / VALIDATION_STEP))
        grid = [min(i * VALIDATION_STEP, self.horizon) for i in range(steps + 1)]
        prev = self._spline_q(0.0)
        for t in grid[1:]:
            q = self._spline_q(t)
            if q > prev + _Q0_TOL:
                raise ValueError(f"survival probability increases near t={t:.2f}")
            prev = q
        if prev <= 0.0:
            raise ValueError("survival probability non-positive at the horizon")

    def _spline_q(self, t: float) -> float:
        return sum(b * self.basis.factor(k + 1, t) for k, b in enumerate(self.beta))

    def _spline_hazard(self, t: float) -> float:
        q = self._spline_q(t)
        if q <= 0.0:
            raise ValueError(f"survival vanishes at t={t}; hazard undefined")
        dq = sum(b * self.basis.factor_slope(k + 1, t) for k, b in enumerate(self.beta))
        return -dq / q

    def survival(self, t: float) -> float:
        if t < 0.0:
            raise ValueError("t must be >= 0")
        if t <= self.horizon:
            return self._spline_q(t)
        return self._q_horizon * math.exp(-self._tail_hazard * (t - self.horizon))

    def hazard(self, t: float) -> float:
        if t < 0.0:
            raise ValueError("t must be >= 0")
        if t <= self.horizon:
            return self._spline_hazard(t)
        return self._tail_hazard

    def _breakpoints(self) -> tuple[float, ...]:
        return self.basis.knot_tenors + (self.horizon,)

    def _exp_terms(self, a: float, b: float) -> list[tuple[float, float]]:
        if a >= self.horizon:
            coef = self._q_horizon * math.exp(self._tail_hazard * self.horizon)
            return [(coef, self._tail_hazard)]
        terms: list[tuple[float, float]] = []
        mid = 0.5 * (a + b)
        for k, beta in enumerate(self.beta, start=1):
            if beta == 0.0:
                continue
            above = k > 3 and mid > self.basis.knot_tenor(k)
            for coef, decay in self.basis.exp_terms(k, above):
                terms.append((beta * coef, decay))
        return terms

    def to_dict(self) -> dict:
        record = {"type": "spline", "eta": self.basis.eta, "beta": list(self.beta),
                  "horizon": self.horizon}
        if self.basis.knots:
            record["knots"] = [[k, t] for k, t in self.basis.knots]
        return record


class PiecewiseHazardCurve(SurvivalCurve):
    """Piecewise-constant hazard; segment k covers (tenor_{k-1}, tenor_k]."""

    def __init__(self, segments: Sequence[tuple[float, float]]):
        segs = tuple((float(t), float(h)) for t, h in segments)
        if not segs:
            raise ValueError("need at least one hazard segment")
        prev = 0.0
        for t, h in segs:
            if t <= prev:
                raise ValueError("segment tenors must be strictly increasing and > 0")
            if h < 0.0:
                raise ValueError(f"hazard rate at tenor {t} must be >= 0")
            prev = t
        self.segments = segs
        self.horizon = segs[-1][0]
        # Cumulative hazard at the segment ends.
        cum = [0.0]
        prev = 0.0
        for t, h in segs:
            cum.append(cum[-1] + h * (t - prev))
            prev = t
        self._cum = tuple(cum)

    @classmethod
    def flat(cls, hazard: float, tenor: float = 1.0) -> "PiecewiseHazardCurve":
        return cls([(tenor, hazard)])

    @property
    def hazard_rates(self) -> tuple[float, ...]:
        return tuple(h for _, h in self.segments)

    def _cumulative(self, t: float) -> float:
        prev = 0.0
        for i, (tenor, h) in enumerate(self.segments):
            if t <= tenor:
                return self._cum[i] + h * (t - prev)
            prev = tenor
        return self._cum[-1] + self.segments[-1][1] * (t - self.horizon)

    def survival(self, t: float) -> float:
        if t < 0.0:
            raise ValueError("t must be >= 0")
        return math.exp(-self._cumulative(t))

    def hazard(self, t: float) -> float:
        """Right-continuous hazard rate; terminal rate past the last tenor."""
        if t < 0.0:
            raise ValueError("t must be >= 0")
        for tenor, h in self.segments:
            if t < tenor:
                return h
        return self.segments[-1][1]

    def _breakpoints(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.segments)

    def _exp_terms(self, a: float, b: float) -> list[tuple[float, float]]:
        h = self.hazard(a)
        coef = self.survival(a) * math.exp(h * a)
        return [(coef, h)]

    def to_dict(self) -> dict:
        return {"type": "piecewise_hazard",
                "segments": [[t, h] for t, h in self.segments]}


def survival_curve_from_dict(record: dict) -> SurvivalCurve:
    """Rebuild a curve from its JSON record {type, eta, beta[] | segments[]}."""
    kind = record.get("type")
    if kind == "spline":
        knots = tuple((int(k), float(t)) for k, t in record.get("knots", []))
        basis = SplineBasis(eta=float(record["eta"]),
                            size=len(record["beta"]), knots=knots)
        horizon = float(record.get("horizon", DEFAULT_HORIZON))
        return SplineSurvivalCurve(basis, record["beta"], horizon=horizon)
    if kind == "piecewise_hazard":
        return PiecewiseHazardCurve([(float(t), float(h)) for t, h in record["segments"]])
    raise ValueError(f"unknown survival curve type {kind!r}")


def load_survival_curve(path: str) -> SurvivalCurve:
    with open(path) as handle:
        return survival_curve_from_dict(json.load(handle))
