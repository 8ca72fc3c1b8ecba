"""Concentration-bound machinery for the upper-risk consistency guarantees.

Computes the endpoint-loss constant M, the per-parameter loss range L, the
sample-size threshold n >= 3M/eps - 1, the exponential tail bound
2*exp(-(2/9) n eps^2 / L^2), and Monte Carlo checks that observed
violation frequencies respect the bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .data_model import LossSpec, ThetaGrid, TrueModel
from .errors import InvalidAlpha, NonpositiveEpsilon
from .risk import true_risk, upper_risk_closed_form
from .simulate import sample_truncated_normal, replication_rng


@dataclass(frozen=True)
class ConsistencyConstants:
    M: float
    L_of_theta: Callable[[float], float]
    L_max: float


def _refined_max(f: Callable[[float], float], grid: np.ndarray) -> float:
    """Max of f over grid points, refined inside the bracketing cells."""
    vals = np.array([f(t) for t in grid])
    best = float(np.max(vals))
    idx = int(np.argmax(vals))
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, len(grid) - 1)]
    if lo < hi:
        res = minimize_scalar(
            lambda t: -f(t), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, float(-res.fun))
    return best


def constants(
    loss: LossSpec, support: tuple[float, float], theta_grid: ThetaGrid
) -> ConsistencyConstants:
    """M = sup loss(., a) + sup loss(., b); L(theta) = loss range over [a, b]."""
    a, b = support
    grid = theta_grid.points
    sup_a = _refined_max(lambda t: float(loss(t, a)), grid)
    sup_b = _refined_max(lambda t: float(loss(t, b)), grid)

    def l_of_theta(theta: float) -> float:
        # Convex in y: sup at an endpoint, inf in the interior.
        hi = max(float(loss(theta, a)), float(loss(theta, b)))
        if loss.convex_in_y:
            res = minimize_scalar(
                lambda y: float(loss(theta, y)), bounds=(a, b), method="bounded",
                options={"xatol": 1e-12},
            )
            lo = min(float(res.fun), float(loss(theta, a)), float(loss(theta, b)))
        else:
            ys = np.linspace(a, b, 2049)
            vals = np.asarray(loss(theta, ys), dtype=float)
            hi = max(hi, float(np.max(vals)))
            lo = float(np.min(vals))
        return hi - lo

    l_max = float(max(l_of_theta(t) for t in grid))
    return ConsistencyConstants(M=sup_a + sup_b, L_of_theta=l_of_theta, L_max=l_max)


def min_sample_size(epsilon: float, M: float) -> int:
    """Smallest n satisfying n >= 3M/epsilon - 1 (at least 1)."""
    if epsilon <= 0:
        raise NonpositiveEpsilon(f"epsilon={epsilon}")
    import math

    return max(1, math.ceil(3.0 * M / epsilon - 1.0))


def hoeffding_bound(n: int, epsilon: float, L: float) -> float:
    """Tail bound 2*exp(-(2/9) n eps^2 / L^2); 0 when the loss is constant."""
    if epsilon <= 0:
        raise NonpositiveEpsilon(f"epsilon={epsilon}")
    if L == 0.0:
        return 0.0
    return 2.0 * float(np.exp(-(2.0 / 9.0) * n * epsilon**2 / L**2))


@dataclass(frozen=True)
class BoundReport:
    epsilon: float
    n: int
    threshold_met: bool
    bound: float
    empirical_violation_rate: float
    replications: int
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "epsilon": self.epsilon,
                "n": self.n,
                "threshold_met": self.threshold_met,
                "bound": self.bound,
                "empirical_violation_rate": self.empirical_violation_rate,
                "replications": self.replications,
                "seed": self.seed,
            }
        )


def verify_pointwise(
    model: TrueModel,
    loss: LossSpec,
    theta: float,
    n: int,
    epsilon: float,
    replications: int,
    seed: int,
    theta_grid: ThetaGrid | None = None,
) -> BoundReport:
    """Monte Carlo check of the pointwise deviation bound at one theta.

    The constants grid defaults to 201 points over the loss's parameter
    domain.  Deterministic given seed: replication r uses the stream keyed
    by (seed, n, r).
    """
    if replications < 100:
        raise ValueError("need at least 100 replications")
    if theta_grid is None:
        theta_grid = ThetaGrid(loss.theta_domain[0], loss.theta_domain[1], 201)
    consts = constants(loss, model.support, theta_grid)
    target = true_risk(loss, model, theta)
    lo, hi = model.support
    violations = 0
    for r in range(replications):
        rng = replication_rng(seed, n, r)
        sample = sample_truncated_normal(n, lo, hi, rng)
        upper = upper_risk_closed_form(loss, sample, theta).total
        if abs(upper - target) > epsilon:
            violations += 1
    return BoundReport(
        epsilon=epsilon,
        n=n,
        threshold_met=n >= min_sample_size(epsilon, consts.M),
        bound=hoeffding_bound(n, epsilon, consts.L_of_theta(theta)),
        empirical_violation_rate=violations / replications,
        replications=replications,
        seed=seed,
    )


def witness_uniform(
    theta_grid: ThetaGrid, epsilon: float, alpha: float, L_max: float
) -> int:
    """Hoeffding union-bound sample size for uniform deviation on the grid.

    Smallest n with |grid| * 2 * exp(-2 n eps^2 / L_max^2) < alpha.
    """
    if epsilon <= 0:
        raise NonpositiveEpsilon(f"epsilon={epsilon}")
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha={alpha}")
    if L_max == 0.0:
        return 1
    import math

    n = math.ceil(L_max**2 / (2.0 * epsilon**2) * math.log(2.0 * theta_grid.count / alpha))
    return max(1, n)


@dataclass(frozen=True)
class UniformReport:
    epsilon: float
    alpha: float
    n: int
    estimated_probability: float
    within_alpha: bool
    replications: int
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "epsilon": self.epsilon,
                "alpha": self.alpha,
                "n": self.n,
                "estimated_probability": self.estimated_probability,
                "within_alpha": self.within_alpha,
                "replications": self.replications,
                "seed": self.seed,
            }
        )


def verify_uniform(
    model: TrueModel,
    loss: LossSpec,
    theta_grid: ThetaGrid,
    epsilon: float,
    alpha: float,
    seed: int,
    replications: int = 1000,
) -> UniformReport:
    """Monte Carlo estimate of the uniform-deviation probability on the grid.

    Uses n = max(witness_uniform, min_sample_size) so the theorem's
    guarantee applies.
    """
    consts = constants(loss, model.support, theta_grid)
    n = max(
        witness_uniform(theta_grid, epsilon, alpha, consts.L_max),
        min_sample_size(epsilon, consts.M) if consts.M > 0 else 1,
    )
    targets = np.array([true_risk(loss, model, t) for t in theta_grid.points])
    lo, hi = model.support
    from .risk import closed_form_curve

    violations = 0
    for r in range(replications):
        rng = replication_rng(seed, n, r)
        sample = sample_truncated_normal(n, lo, hi, rng)
        uppers = closed_form_curve(loss, sample, theta_grid.points)
        if float(np.max(np.abs(uppers - targets))) > epsilon:
            violations += 1
    est = violations / replications
    return UniformReport(
        epsilon=epsilon,
        alpha=alpha,
        n=n,
        estimated_probability=est,
        within_alpha=est < alpha,
        replications=replications,
        seed=seed,
    )
