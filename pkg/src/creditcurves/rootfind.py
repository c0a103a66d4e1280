"""Bracketed scalar root finding.

All spread/yield solvers in this package reduce to finding the root of a
monotone pricing residual on a fixed rate bracket, typically (-0.5, 5).
The solver below is a bisection loop refined by secant steps: secant gives
fast local convergence, bisection guarantees progress for the distressed
price configurations where Newton-style iterations diverge.
"""

from __future__ import annotations

from typing import Callable

from .errors import ConvergenceError


def solve_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    f_tol: float = 1e-12,
    x_tol: float = 1e-14,
    max_iter: int = 200,
) -> float:
    """Find x in [lo, hi] with |f(x)| <= f_tol, assuming f changes sign.

    Raises ConvergenceError when the bracket does not straddle a root or
    the iteration budget runs out before reaching the tolerance.
    """
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    fa = f(lo)
    if abs(fa) <= f_tol:
        return lo
    fb = f(hi)
    if abs(fb) <= f_tol:
        return hi
    if fa * fb > 0.0:
        raise ConvergenceError(
            f"no sign change on bracket [{lo}, {hi}]: f(lo)={fa:.6g}, f(hi)={fb:.6g}"
        )
    a, b = lo, hi
    for iteration in range(max_iter):
        # Secant candidate from the bracket endpoints; fall back to the
        # midpoint whenever it leaves the bracket or stalls.
        denom = fb - fa
        x = b - fb * (b - a) / denom if denom != 0.0 else 0.5 * (a + b)
        width = b - a
        if not (a + 0.01 * width < x < b - 0.01 * width) or iteration % 3 == 2:
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) <= f_tol:
            return x
        if (fx > 0.0) == (fa > 0.0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        if b - a < x_tol:
            # Bracket collapsed; accept the better endpoint if it meets a
            # relaxed tolerance, otherwise report failure honestly.
            x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
            if abs(fx) <= max(f_tol, 1e-9 * (abs(fa) + abs(fb))):
                return x
            raise ConvergenceError(
                f"bracket collapsed at x={x:.12g} with residual {fx:.6g}"
            )
    raise ConvergenceError(f"no convergence after {max_iter} iterations")
