"""Log-log exponent fits for J_beta(delta) and related quantities."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateInputError, DomainError
from .moment_transforms import DELTA_MIN, j_moment
from .parallel import map_ordered

DEFAULT_GRID = (0.4, 0.2, 0.1, 0.05, 0.025)


def theorem_exponent(beta: int) -> float:
    """Exponent of the improved bound J_beta(delta) << delta^{-e - eps}."""
    if beta < 2:
        raise DomainError("beta must be >= 2")
    return float(max((beta - 1) / 2, 1, beta - 2))


def classical_exponent(beta: int) -> float:
    """Exponent beta/2 of the classical bound."""
    if beta < 2:
        raise DomainError("beta must be >= 2")
    return beta / 2


@dataclass
class ScalingFit:
    points: list
    slope: float
    intercept: float
    residual_rms: float
    theorem_exponent: float | None = None
    classical_exponent: float | None = None
    beta: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["points"] = [{"delta": p[0], "value": p[1]} for p in self.points]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def fit_exponent(points) -> ScalingFit:
    """Least-squares slope of log(value) against log(1/delta).

    Raises:
        DegenerateInputError: fewer than 4 points, repeated or nonpositive deltas,
            or nonpositive values.
    """
    pts = [(float(d), float(v)) for d, v in points]
    if len(pts) < 4:
        raise DegenerateInputError("need at least 4 points")
    deltas = np.array([p[0] for p in pts])
    values = np.array([p[1] for p in pts])
    if np.any(deltas <= 0) or np.any(~np.isfinite(deltas)):
        raise DegenerateInputError("deltas must be positive")
    if len(np.unique(deltas)) != len(deltas):
        raise DegenerateInputError("deltas must be distinct")
    if np.any(values <= 0) or np.any(~np.isfinite(values)):
        raise DegenerateInputError("values must be positive")
    order = np.argsort(-deltas)
    deltas, values = deltas[order], values[order]
    u = np.log(1.0 / deltas)
    w = np.log(values)
    slope, intercept = np.polyfit(u, w, 1)
    resid = w - (slope * u + intercept)
    return ScalingFit(
        points=[(float(d), float(v)) for d, v in zip(deltas, values)],
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(math.sqrt(np.mean(resid ** 2))),
    )


def scaling_campaign(beta: int, deltas=DEFAULT_GRID, tol: float = 1e-6,
                     delta_min: float = DELTA_MIN) -> ScalingFit:
    """Fit the growth exponent of J_beta(delta) over ``deltas``.

    Each J is computed to relative accuracy ``tol`` as well as absolute ``tol``.
    """
    if beta not in (2, 3):
        raise DomainError("the campaign supports beta in {2, 3}")
    deltas = [float(d) for d in deltas]
    values = map_ordered(lambda d: j_moment(beta, d, tol=tol, rtol=tol, delta_min=delta_min).value, deltas)
    fit = fit_exponent(list(zip(deltas, values)))
    fit.beta = beta
    fit.theorem_exponent = theorem_exponent(beta)
    fit.classical_exponent = classical_exponent(beta)
    return fit
