"""The three risk functionals and upper-risk minimization.

Empirical risk is the sample mean of the loss; true risk integrates the
loss against the data-generating density; the upper risk averages per-set
loss suprema over the focal system.  For convex losses and identity-score
focal sets the upper risk has the closed form

    [n * R_n(theta) + M(theta)] / (n + 1),
    M(theta) = loss(theta, a) + loss(theta, b) - min over {a, data, b}.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .conformal import FocalRepresentation, FocalSystem
from .data_model import BoundedSample, LossSpec, ModelKind, ThetaGrid, TrueModel
from .errors import ApproximateSupremumWarning
from .quadrature import integrate

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class RiskKind(enum.Enum):
    EMPIRICAL = "empirical"
    TRUE = "true"
    UPPER = "upper"


@dataclass(frozen=True)
class RiskCurve:
    grid: ThetaGrid
    values: np.ndarray
    kind: RiskKind

    def to_csv(self) -> str:
        lines = ["theta,value,kind"]
        for t, v in zip(self.grid.points, self.values):
            lines.append(f"{t:.17g},{v:.17g},{self.kind.value}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class UpperRiskDecomposition:
    """Upper risk split into its empirical part and the endpoint slack."""

    theta: float
    empirical_part: float
    slack: float

    @property
    def total(self) -> float:
        return self.empirical_part + self.slack


def empirical_risk(loss: LossSpec, sample: BoundedSample, theta: float) -> float:
    loss.check_theta(theta)
    return float(np.mean(loss(theta, sample.values)))


def true_risk(
    loss: LossSpec, model: TrueModel, theta: float, tol: float = 1e-8
) -> float:
    loss.check_theta(theta)
    lo, hi = model.support
    if model.kind is ModelKind.POINT_MASS or lo == hi:
        return float(loss(theta, lo))
    dens = model.density
    return integrate(lambda y: float(loss(theta, y)) * float(dens(y)), lo, hi, tol=tol)


def sup_on_interval(
    loss: LossSpec, theta: float, lo: float, hi: float, fallback_points: int = 513
) -> float:
    """Supremum of loss(theta, .) over the closed interval [lo, hi].

    Convex losses attain it at an endpoint; without the convexity
    attestation a dense grid search is used and a warning issued.
    """
    if lo == hi:
        return float(loss(theta, lo))
    if loss.convex_in_y:
        return float(max(loss(theta, lo), loss(theta, hi)))
    warnings.warn(
        "convexity not attested; supremum approximated on a grid",
        ApproximateSupremumWarning,
    )
    ys = np.linspace(lo, hi, fallback_points)
    return float(np.max(loss(theta, ys)))


def upper_risk_general(loss: LossSpec, focal: FocalSystem, theta: float) -> float:
    """Average of per-focal-set loss suprema (works for any representation)."""
    loss.check_theta(theta)
    total = 0.0
    for pieces in focal.sets:
        best = 0.0
        for lo, hi in pieces:
            best = max(best, sup_on_interval(loss, theta, lo, hi))
        total += best
    return total / focal.n_plus_1


def upper_risk_closed_form(
    loss: LossSpec, sample: BoundedSample, theta: float
) -> UpperRiskDecomposition:
    """Closed form for convex losses under the identity score."""
    loss.check_theta(theta)
    if not loss.convex_in_y:
        from .errors import NonConvexLoss

        raise NonConvexLoss("closed form requires the convexity attestation")
    n = sample.n
    a, b = sample.support_lo, sample.support_hi
    la = float(loss(theta, a))
    lb = float(loss(theta, b))
    data_losses = loss(theta, sample.values)
    m_theta = la + lb - min(la, lb, float(np.min(data_losses)))
    emp = float(np.mean(data_losses))
    return UpperRiskDecomposition(
        theta=theta,
        empirical_part=n * emp / (n + 1),
        slack=m_theta / (n + 1),
    )


def closed_form_curve(
    loss: LossSpec, sample: BoundedSample, thetas: np.ndarray
) -> np.ndarray:
    """Vectorized closed-form upper risk over an array of theta values."""
    thetas = np.asarray(thetas, dtype=float)
    n = sample.n
    a, b = sample.support_lo, sample.support_hi
    la = np.asarray(loss(thetas, a), dtype=float)
    lb = np.asarray(loss(thetas, b), dtype=float)
    table = np.asarray(loss(thetas[:, None], sample.values[None, :]), dtype=float)
    emp = table.mean(axis=1)
    m_theta = la + lb - np.minimum(np.minimum(la, lb), table.min(axis=1))
    return (n * emp + m_theta) / (n + 1)


def risk_curve(
    loss: LossSpec,
    grid: ThetaGrid,
    kind: RiskKind,
    sample: BoundedSample | None = None,
    model: TrueModel | None = None,
    focal: FocalSystem | None = None,
) -> RiskCurve:
    """Evaluate one of the risk functionals across the parameter grid."""
    if kind is RiskKind.EMPIRICAL:
        if sample is None:
            raise ValueError("empirical risk needs a sample")
        vals = np.array([empirical_risk(loss, sample, t) for t in grid.points])
    elif kind is RiskKind.TRUE:
        if model is None:
            raise ValueError("true risk needs a model")
        vals = np.array([true_risk(loss, model, t) for t in grid.points])
    else:
        if focal is not None:
            vals = np.array([upper_risk_general(loss, focal, t) for t in grid.points])
        elif sample is not None:
            for t in (grid.points[0], grid.points[-1]):
                loss.check_theta(t)
            vals = closed_form_curve(loss, sample, grid.points)
        else:
            raise ValueError("upper risk needs a focal system or a sample")
    return RiskCurve(grid=grid, values=vals, kind=kind)


def _golden_section_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def minimize_upper_risk(
    loss: LossSpec,
    sample: BoundedSample,
    grid: ThetaGrid,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Grid argmin of the closed-form upper risk, refined by golden section.

    Refinement runs only when convexity in y is attested (the upper risk is
    then a finite average of maxima of convex functions, hence unimodal for
    the losses supported here); ties at the grid stage break to the lowest
    index.
    """
    values = closed_form_curve(loss, sample, grid.points)
    idx = int(np.argmin(values))
    theta0 = float(grid.points[idx])
    if not loss.convex_in_y or grid.count == 1:
        return theta0, float(values[idx])
    lo = float(grid.points[max(idx - 1, 0)])
    hi = float(grid.points[min(idx + 1, grid.count - 1)])
    if lo == hi:
        return theta0, float(values[idx])
    f = lambda t: upper_risk_closed_form(loss, sample, t).total
    theta_star, val = _golden_section_min(f, lo, hi, tol)
    # keep the grid argmin on ties (all-tie losses would otherwise drift)
    if val < values[idx]:
        return theta_star, val
    return theta0, float(values[idx])
