"""Survival curve estimation.

``fit_survival`` runs the cross-sectional regression of bond prices on
exponential spline factors: survival probabilities enter the pricing
equation linearly, so for a fixed decay rate eta the problem is a
weighted least squares with one equality constraint (Q(0) = 1) and
inequality constraints keeping Q decreasing and positive.  The decay
rate is chosen by an outer grid search on the converged objective, and
outliers are down-weighted by iteratively reweighted least squares with
a Tukey bisquare on median/MAD-standardized residuals.

``calibrate_from_cds`` bootstraps a piecewise-constant hazard curve from
par CDS quotes instead, and ``implied_recovery`` scans the recovery rate
for the value that minimizes the weighted fit error.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import measures, pricing
from .conventional import BondSpec, z_spread_duration
from .curves import BaseCurve
from .errors import (
    ArbitrageError,
    FitError,
    InsufficientDataError,
    ParseError,
)
from .rootfind import solve_bracketed
from .splines import SplineBasis
from .survival import PiecewiseHazardCurve, SplineSurvivalCurve

CONSTRAINT_SLACK = 1e-8  # strict inequalities relaxed to >= this margin
_FEAS_TOL = 1e-10
_MULT_TOL = 1e-10


def default_eta_grid() -> tuple[float, ...]:
    """Multiplicative grid of candidate decay rates, 25bp to 25%."""
    return tuple(0.0025 * 100.0 ** (i / 12.0) for i in range(13))


@dataclass(frozen=True)
class BondQuote:
    """One bond observation for the cross-sectional fit."""

    id: str
    spec: BondSpec
    clean_price: float
    spread_duration: float | None = None
    include: bool = True

    def __post_init__(self) -> None:
        if self.clean_price <= 0.0:
            raise ValueError(f"{self.id}: clean price must be > 0")
        if self.spread_duration is not None and self.spread_duration <= 0.0:
            raise ValueError(f"{self.id}: spread duration must be > 0")


@dataclass(frozen=True)
class FitConfig:
    factors: int = 3
    eta_grid: tuple[float, ...] = field(default_factory=default_eta_grid)
    constraint_grid: tuple[float, ...] | None = None  # default 0.5 .. T_max + 5
    recovery: float = 0.40
    weight_scheme: str = "formula"  # 1/sqrt(SD); "prose" uses 1/SD**2
    outlier_max_iter: int = 10
    outlier_tuning: float = 4.685
    outlier_tol: float = 1e-8

    def __post_init__(self) -> None:
        if not self.eta_grid or any(e <= 0.0 for e in self.eta_grid):
            raise ValueError("eta_grid must be non-empty and positive")
        if self.weight_scheme not in ("formula", "prose"):
            raise ValueError("weight_scheme must be 'formula' or 'prose'")
        if not 0.0 <= self.recovery < 1.0:
            raise ValueError("recovery must be in [0, 1)")
        if self.outlier_max_iter < 1:
            raise ValueError("outlier_max_iter must be >= 1")


@dataclass(frozen=True)
class FitResult:
    """Fitted curve plus per-bond diagnostics (arrays aligned with ids)."""

    curve: SplineSurvivalCurve
    ids: tuple[str, ...]
    residuals: np.ndarray            # market clean - fitted clean, price units
    das: np.ndarray                  # per-bond default-adjusted spread
    outlier_weights: np.ndarray
    weighted_error: float            # sqrt(OF) with weights normalized to 1
    eta: float
    active_constraints: tuple[str, ...]
    objective_history: tuple[float, ...]


def build_regressors(
    quote: BondQuote, base: BaseCurve, basis: SplineBasis, recovery: float
) -> tuple[np.ndarray, float]:
    """Design row U_j (one entry per spline factor) and adjusted value V_j.

    Substituting Q(t) = sum_k beta_k Phi_k(t) into the bond pricing
    equation makes the dirty price linear in beta; the first-period
    recovery term R*(1 + C/2q)*Z(t_1), which multiplies Q(0) = 1, moves
    to the left-hand side.
    """
    bond = quote.spec
    times = bond.payment_times
    n = len(times)
    cpn = bond.coupon / bond.freq
    rec = recovery * (1.0 + bond.coupon / (2.0 * bond.freq))
    dfs = [base.df(t) for t in times]
    row = np.zeros(basis.size)
    for i in range(n - 1):
        weight = cpn * dfs[i] - rec * (dfs[i] - dfs[i + 1])
        row += weight * basis.row(times[i])
    row += dfs[-1] * (cpn + 1.0 - rec) * basis.row(times[-1])
    dirty = quote.clean_price + bond.accrued_interest
    return row, dirty - rec * dfs[0]


def _bisquare_weights(residuals: np.ndarray, tuning: float) -> np.ndarray:
    centered = residuals - np.median(residuals)
    scale = np.median(np.abs(centered)) / 0.6745
    scale = max(scale, 1e-10)  # residuals at float noise: treat as clean
    u = centered / (tuning * scale)
    w = np.where(np.abs(u) < 1.0, (1.0 - u**2) ** 2, 0.0)
    return np.asarray(w, dtype=float)


def _solve_constrained_wls(
    design: np.ndarray,
    target: np.ndarray,
    weights: np.ndarray,
    ineq: np.ndarray,
    bound: np.ndarray,
) -> tuple[np.ndarray, list[int]]:
    """Minimize sum w_j (U_j beta - V_j)^2 s.t. sum(beta) = 1, G beta >= b.

    Primal active-set iteration from the strictly feasible start
    beta = (1, 0, ..., 0): solve the working-set equality problem, step
    to it clipped at the first blocking constraint, and at a working-set
    optimum drop the constraint with the most negative multiplier.  With
    no inequality active this is a single equality-constrained solve.
    """
    k = design.shape[1]
    wsqrt = np.sqrt(weights)
    dw = design * wsqrt[:, None]
    hess = 2.0 * dw.T @ dw
    lin = 2.0 * dw.T @ (wsqrt * target)
    a_eq = np.ones(k)

    beta = np.zeros(k)
    beta[0] = 1.0
    slack = ineq @ beta - bound
    if np.any(slack < -_FEAS_TOL):
        raise FitError("reference coefficients infeasible; constraint grid is inconsistent")
    binding = [int(i) for i in np.argsort(slack) if slack[i] <= _FEAS_TOL]
    active: list[int] = binding[: max(k - 1, 0)]

    for _ in range(50 + 10 * len(ineq)):
        rows = [a_eq] + [ineq[i] for i in active]
        constraints = np.vstack(rows)
        m = constraints.shape[0]
        kkt = np.zeros((k + m, k + m))
        kkt[:k, :k] = hess
        kkt[:k, k:] = constraints.T
        kkt[k:, :k] = constraints
        rhs = np.concatenate([lin, np.array([1.0] + [bound[i] for i in active])])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:
            raise FitError(f"singular KKT system (active set {active})") from exc
        candidate = sol[:k]
        step = candidate - beta
        if np.max(np.abs(step)) <= 1e-13:
            # At the working-set optimum.  Stationarity reads
            # H beta + A' nu = lin, so inequality multipliers are -nu and
            # optimality requires nu <= 0.
            nu = sol[k + 1 :]
            if len(nu) == 0 or np.max(nu) <= _MULT_TOL:
                return candidate, sorted(active)
            active.pop(int(np.argmax(nu)))
            continue
        # Step toward the candidate, stopping at the first blocking
        # constraint among those not in the working set.
        alpha = 1.0
        blocker = -1
        for i in range(len(ineq)):
            if i in active:
                continue
            slope = ineq[i] @ step
            if slope >= -1e-14:
                continue
            room = ineq[i] @ beta - bound[i]
            limit = max(room, 0.0) / (-slope)
            if limit < alpha - 1e-14:
                alpha = limit
                blocker = i
        beta = beta + alpha * step
        if blocker >= 0:
            active.append(blocker)
    raise FitError("active-set iteration did not converge")


def _constraint_rows(
    basis: SplineBasis, grid: tuple[float, ...]
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    ks = np.arange(1, basis.size + 1, dtype=float)
    rows = []
    labels = []
    for t in grid:
        rows.append(ks * np.exp(-ks * basis.eta * t))  # -dQ/dt > 0 (up to eta)
        labels.append(f"monotonicity@{t:g}")
    t_max = grid[-1]
    rows.append(np.exp(-ks * basis.eta * t_max))       # Q(T_max) > 0
    labels.append(f"positivity@{t_max:g}")
    return np.vstack(rows), np.full(len(rows), CONSTRAINT_SLACK), labels


def _spread_durations(
    quotes: list[BondQuote], base: BaseCurve
) -> np.ndarray:
    out = []
    for q in quotes:
        if q.spread_duration is not None:
            out.append(q.spread_duration)
        else:
            out.append(z_spread_duration(q.spec, q.clean_price, base))
    return np.array(out)


def _check_rank(design: np.ndarray, quotes: list[BondQuote], k: int) -> None:
    if np.linalg.matrix_rank(design) >= k:
        return
    # Point at near-parallel design rows first; they are the usual cause.
    norms = np.linalg.norm(design, axis=1)
    culprits = set()
    for i in range(len(quotes)):
        for j in range(i + 1, len(quotes)):
            if norms[i] == 0.0 or norms[j] == 0.0:
                continue
            cosine = abs(design[i] @ design[j]) / (norms[i] * norms[j])
            if cosine > 1.0 - 1e-10:
                culprits.update((quotes[i].id, quotes[j].id))
    names = sorted(culprits) if culprits else [q.id for q in quotes]
    raise FitError(f"design matrix rank-deficient; collinear bonds: {', '.join(names)}")


def fit_survival(
    quotes: list[BondQuote], base: BaseCurve, config: FitConfig | None = None
) -> FitResult:
    """Fit a spline survival curve to a cross-section of bond prices."""
    config = config or FitConfig()
    live = [q for q in quotes if q.include]
    if len(live) < config.factors:
        raise InsufficientDataError(
            f"insufficient quotes: need at least {config.factors}, got {len(live)}"
        )
    t_max = max(q.spec.maturity for q in live)
    if config.constraint_grid is not None:
        grid = tuple(config.constraint_grid)
    else:
        steps = int(round((t_max + 5.0) / 0.5))
        grid = tuple(0.5 * i for i in range(1, steps + 1))
    sd = _spread_durations(live, base)
    base_w = 1.0 / np.sqrt(sd) if config.weight_scheme == "formula" else 1.0 / sd**2

    best = None
    failures: list[FitError] = []
    for eta in config.eta_grid:
        basis = SplineBasis(eta=eta, size=config.factors)
        rows = [build_regressors(q, base, basis, config.recovery) for q in live]
        design = np.vstack([r for r, _ in rows])
        target = np.array([v for _, v in rows])
        try:
            _check_rank(design, live, config.factors)
            ineq, bound, labels = _constraint_rows(basis, grid)
            w_out = np.ones(len(live))
            history: list[float] = []
            beta = np.zeros(config.factors)
            active: list[int] = []
            for _ in range(config.outlier_max_iter):
                weights = w_out * base_w
                beta, active = _solve_constrained_wls(design, target, weights, ineq, bound)
                eps = target - design @ beta
                history.append(float(np.sum(weights * eps**2)))
                w_new = _bisquare_weights(eps, config.outlier_tuning)
                done = np.max(np.abs(w_new - w_out)) < config.outlier_tol
                w_out = w_new
                if done:
                    break
            # The pointwise constraint grid is coarser than the curve's own
            # validation grid; a candidate that slips between the points is
            # dropped from the eta search rather than failing the fit.
            SplineSurvivalCurve(basis, tuple(beta), horizon=grid[-1])
        except FitError as exc:
            failures.append(exc)
            continue
        except ValueError:
            continue
        candidate = (history[-1], eta, beta, w_out, active, history, labels)
        if best is None or candidate[0] < best[0]:
            best = candidate

    if best is None:
        if failures:
            raise failures[0]
        raise FitError("no eta candidate produced a valid survival curve")
    _, eta, beta, w_out, active, history, labels = best
    basis = SplineBasis(eta=eta, size=config.factors)
    curve = SplineSurvivalCurve(basis, tuple(beta), horizon=grid[-1])

    rows = [build_regressors(q, base, basis, config.recovery) for q in live]
    design = np.vstack([r for r, _ in rows])
    target = np.array([v for _, v in rows])
    eps = target - design @ beta
    weights = w_out * base_w
    total = float(np.sum(weights))
    weighted_error = float(np.sqrt(np.sum(weights * eps**2) / total)) if total > 0 else float("nan")
    das = np.array([
        measures.das(q.spec, q.clean_price, base, curve, config.recovery) for q in live
    ])
    return FitResult(
        curve=curve,
        ids=tuple(q.id for q in live),
        residuals=eps,
        das=das,
        outlier_weights=w_out,
        weighted_error=weighted_error,
        eta=eta,
        active_constraints=tuple(labels[i] for i in active),
        objective_history=tuple(history),
    )


def calibrate_from_cds(
    quotes: list[tuple[float, float]],
    base: BaseCurve,
    rs_rate: float,
    freq: int = 4,
) -> PiecewiseHazardCurve:
    """Bootstrap a piecewise-constant hazard curve from par CDS quotes.

    Quotes are (maturity, par spread in decimal), strictly increasing in
    maturity; each segment hazard is solved so the par spread of the
    partial curve reproduces the quote.
    """
    if not quotes:
        raise InsufficientDataError("no CDS quotes")
    maturities = [m for m, _ in quotes]
    if any(b <= a for a, b in zip(maturities, maturities[1:])) or maturities[0] <= 0.0:
        raise ValueError("CDS maturities must be strictly increasing and > 0")
    if any(s <= 0.0 for _, s in quotes):
        raise ValueError("CDS spreads must be > 0")

    segments: list[tuple[float, float]] = []
    for maturity, spread in quotes:
        def spread_gap(h: float) -> float:
            candidate = PiecewiseHazardCurve(segments + [(maturity, h)])
            return pricing.cds_par_spread(maturity, freq, base, candidate, rs_rate) - spread

        if spread_gap(0.0) > 0.0:
            raise ArbitrageError(
                f"no non-negative hazard reproduces the {maturity}y quote"
            )
        hi = 1.0
        while spread_gap(hi) < 0.0 and hi < 64.0:
            hi *= 2.0
        h = solve_bracketed(spread_gap, 0.0, hi, f_tol=1e-12)
        segments.append((maturity, h))
    return PiecewiseHazardCurve(segments)


def implied_recovery(
    quotes: list[BondQuote], base: BaseCurve, config: FitConfig | None = None
) -> tuple[float, FitResult]:
    """Scan recovery rates for the lowest weighted fit error.

    Requires at least six quotes spanning five years of maturity.  When
    the objective is flat across the scan the recovery is not identified
    by the cross-section; a warning is issued and the config default is
    returned.
    """
    config = config or FitConfig()
    live = [q for q in quotes if q.include]
    if len(live) < 6:
        raise InsufficientDataError("implied recovery needs at least 6 quotes")
    span = max(q.spec.maturity for q in live) - min(q.spec.maturity for q in live)
    if span < 5.0:
        raise InsufficientDataError("implied recovery needs >= 5y of maturity span")

    fits: dict[float, FitResult] = {}
    for step in range(91):
        rate = step / 100.0
        fits[rate] = fit_survival(live, base, replace(config, recovery=rate))
    errors = {r: f.weighted_error for r, f in fits.items()}
    if max(errors.values()) - min(errors.values()) < 1e-6:
        warnings.warn(
            "recovery not identified: fit error is flat across recovery rates",
            RuntimeWarning,
            stacklevel=2,
        )
        rate = config.recovery
        fit = fits.get(rate) or fit_survival(live, base, config)
        return rate, fit
    rate = min(errors, key=lambda r: (errors[r], r))
    return rate, fits[rate]


# ---------------------------------------------------------------------------
# Quote file loaders
# ---------------------------------------------------------------------------

BOND_CSV_FIELDS = ("id", "coupon", "freq", "maturity_years", "accrued_years",
                   "clean_price", "spread_duration")


def load_bond_quotes(path: str) -> list[BondQuote]:
    """Read bond quotes CSV; ``spread_duration`` may be absent or empty."""
    out: list[BondQuote] = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        required = set(BOND_CSV_FIELDS[:-1])
        if not required.issubset(fields):
            missing = ", ".join(sorted(required - set(fields)))
            raise ParseError(f"{path}: missing columns: {missing}")
        for row in reader:
            line = reader.line_num
            try:
                sd_raw = (row.get("spread_duration") or "").strip()
                spec = BondSpec(
                    coupon=float(row["coupon"]),
                    freq=int(row["freq"]),
                    maturity=float(row["maturity_years"]),
                    accrued_time=float(row["accrued_years"]),
                )
                out.append(BondQuote(
                    id=row["id"],
                    spec=spec,
                    clean_price=float(row["clean_price"]),
                    spread_duration=float(sd_raw) if sd_raw else None,
                ))
            except (TypeError, ValueError, KeyError) as exc:
                raise ParseError(f"{path}: row {line}: {exc}") from exc
    return out


def load_cds_quotes(path: str) -> list[tuple[float, float]]:
    """Read CDS quotes CSV with header ``maturity_years,par_spread_bp``;
    spreads are returned in decimals."""
    out: list[tuple[float, float]] = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        if "maturity_years" not in fields or "par_spread_bp" not in fields:
            raise ParseError(f"{path}: header must be maturity_years,par_spread_bp")
        for row in reader:
            line = reader.line_num
            try:
                out.append((
                    float(row["maturity_years"]),
                    float(row["par_spread_bp"]) / 1e4,
                ))
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{path}: row {line}: {exc}") from exc
    if not out:
        raise ParseError(f"{path}: no quote rows")
    return out
