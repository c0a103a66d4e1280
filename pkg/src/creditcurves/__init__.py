"""Survival-based credit term structure analytics.

Fit survival probability curves to bond prices or CDS quotes, price
bonds and CDS consistently under fractional recovery of par, and derive
relative-value measures (par coupons, P-spreads, CCP, BCDS, DAS, excess
spread) together with CDS hedge construction and basis measures.
"""

from .calibration import (
    BondQuote,
    FitConfig,
    FitResult,
    calibrate_from_cds,
    fit_survival,
    implied_recovery,
)
from .conventional import BondSpec, FrnSpec, discount_margin, i_spread, ytm, z_spread, z_spread_duration
from .curves import BaseCurve, load_base_curve
from .errors import (
    ArbitrageError,
    ConvergenceError,
    CreditCurveError,
    FitError,
    InsufficientDataError,
    ParseError,
    ScheduleError,
)
from .pricing import (
    CdsSpec,
    RecoveryAssumption,
    TriangleQuotes,
    bond_price_continuous,
    bond_pv_frp,
    cds_mtm,
    cds_par_spread,
    cds_par_spread_continuous,
    cds_upfront,
    credit_triangle_hazard,
    dds_spread_from_cds,
    recovery_swap_hedge,
    rpv01,
)
from .splines import SplineBasis
from .survival import (
    PiecewiseHazardCurve,
    SplineSurvivalCurve,
    SurvivalCurve,
    load_survival_curve,
    survival_curve_from_dict,
)

__all__ = [
    "ArbitrageError",
    "BaseCurve",
    "BondQuote",
    "BondSpec",
    "CdsSpec",
    "ConvergenceError",
    "CreditCurveError",
    "FitConfig",
    "FitError",
    "FitResult",
    "FrnSpec",
    "InsufficientDataError",
    "ParseError",
    "PiecewiseHazardCurve",
    "RecoveryAssumption",
    "ScheduleError",
    "SplineBasis",
    "SplineSurvivalCurve",
    "SurvivalCurve",
    "TriangleQuotes",
    "bond_price_continuous",
    "bond_pv_frp",
    "calibrate_from_cds",
    "cds_mtm",
    "cds_par_spread",
    "cds_par_spread_continuous",
    "cds_upfront",
    "credit_triangle_hazard",
    "dds_spread_from_cds",
    "discount_margin",
    "fit_survival",
    "i_spread",
    "implied_recovery",
    "load_base_curve",
    "load_survival_curve",
    "recovery_swap_hedge",
    "rpv01",
    "survival_curve_from_dict",
    "ytm",
    "z_spread",
    "z_spread_duration",
]

__version__ = "0.1.0"
