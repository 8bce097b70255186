"""Small shared wrappers around scipy's damped least-squares solvers.

All fits in this package go through :func:`least_squares_fit` so that
convergence policy (relative-step tolerance 1e-10, bounded iteration count)
and failure reporting are uniform.  Solvers are deterministic; randomness
only enters through caller-supplied multistart perturbations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares


class FitError(RuntimeError):
    """A fit failed to converge or the data cannot constrain it.

    The last iterate is attached as ``last_params`` for diagnostics.
    """

    def __init__(self, message, last_params=None):
        super().__init__(message)
        self.last_params = last_params


@dataclass
class FitResult:
    params: np.ndarray
    residual: float  # sum of squared weighted residuals
    jacobian: np.ndarray | None = None
    n_evaluations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def jacobian_condition(self) -> float:
        if self.jacobian is None:
            return float("nan")
        s = np.linalg.svd(self.jacobian, compute_uv=False)
        if s[-1] == 0:
            return float("inf")
        return float(s[0] / s[-1])


def least_squares_fit(
    residual_fn,
    x0,
    jac=None,
    bounds=(-np.inf, np.inf),
    max_iter: int = 200,
    xtol: float = 1e-10,
) -> FitResult:
    """Run a damped Gauss-Newton (Levenberg-Marquardt family) fit.

    residual_fn maps a parameter vector to a residual vector; jac, when
    given, returns the analytic residual Jacobian.  Raises FitError when the
    solver stops on its iteration budget without meeting the tolerances.
    """
    x0 = np.asarray(x0, dtype=float)
    unbounded = np.all(np.isneginf(np.atleast_1d(bounds[0]))) and np.all(
        np.isposinf(np.atleast_1d(bounds[1]))
    )
    method = "lm" if unbounded and len(np.atleast_1d(residual_fn(x0))) >= x0.size else "trf"
    sol = least_squares(
        residual_fn,
        x0,
        jac=jac if jac is not None else "2-point",
        bounds=bounds if not unbounded else (-np.inf, np.inf),
        method=method,
        xtol=xtol,
        ftol=xtol,
        gtol=1e-12,
        max_nfev=max_iter * max(1, x0.size),
    )
    if sol.status == 0:
        raise FitError("fit stopped on iteration budget before converging", sol.x)
    return FitResult(
        params=sol.x,
        residual=float(2.0 * sol.cost),
        jacobian=np.asarray(sol.jac),
        n_evaluations=int(sol.nfev),
    )


def multistart_fit(residual_fn, starts, bounds=(-np.inf, np.inf), max_iter=200) -> FitResult:
    """Run least_squares_fit from several starts and keep the best result."""
    best: FitResult | None = None
    last_err: FitError | None = None
    for x0 in starts:
        try:
            res = least_squares_fit(residual_fn, x0, bounds=bounds, max_iter=max_iter)
        except FitError as err:
            last_err = err
            continue
        if best is None or res.residual < best.residual:
            best = res
    if best is None:
        raise last_err if last_err is not None else FitError("no start converged")
    return best
