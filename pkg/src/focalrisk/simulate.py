"""Reproducible Monte Carlo engine for replication studies.

Every replication draws from its own counter-based RNG stream (numpy's
Philox generator keyed by (master_seed, n, replication)), so results are
bit-identical regardless of execution order or worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .conformal import NonconformityScore, rank_candidate
from .data_model import BoundedSample, LossSpec, ThetaGrid, TrueModel
from .errors import DegenerateSupport, EmptyInput, GridMismatch
from .risk import RiskCurve, RiskKind, closed_form_curve, minimize_upper_risk

RNG_ALGORITHM = "philox4x64 (numpy.random.Philox)"


def replication_rng(master_seed: int, n: int, replication: int) -> np.random.Generator:
    """Independent stream keyed by (master_seed, n, replication)."""
    seq = np.random.SeedSequence([master_seed, n, replication])
    return np.random.Generator(np.random.Philox(seq))


def sample_truncated_normal(
    n: int, lo: float, hi: float, rng: np.random.Generator
) -> BoundedSample:
    """n iid draws from the standard normal restricted to [lo, hi].

    Rejection sampling: draw standard normals, keep those inside the
    support (acceptance rate ~0.9973 on [-3, 3]).
    """
    if not lo < hi:
        raise DegenerateSupport(f"support [{lo}, {hi}] is degenerate")
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = rng.standard_normal(max(need + 8, int(need * 1.1)))
        keep = batch[(batch >= lo) & (batch <= hi)][:need]
        out[filled : filled + len(keep)] = keep
        filled += len(keep)
    from .data_model import make_sample

    return make_sample(out, lo, hi)


@dataclass(frozen=True)
class SimConfig:
    model: TrueModel
    loss: LossSpec
    n_values: tuple[int, ...]
    replications: int
    theta_grid: ThetaGrid
    percentiles: tuple[float, float] = (0.05, 0.95)
    histogram_bins: int = 30
    master_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be >= 1")
        if list(self.percentiles) != sorted(self.percentiles):
            raise ValueError("percentiles must be sorted ascending")


@dataclass(frozen=True)
class NSummary:
    median_curve: RiskCurve
    band_lo: RiskCurve
    band_hi: RiskCurve
    minimizers: np.ndarray
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray


@dataclass(frozen=True)
class ReplicationSummary:
    config: SimConfig
    per_n: dict[int, NSummary] = field(default_factory=dict)


def aggregate_percentiles(
    curves: Sequence[RiskCurve], probs: Sequence[float]
) -> list[RiskCurve]:
    """Pointwise empirical percentiles across curves sharing one grid.

    Linear interpolation between order statistics at position p*(m-1).
    """
    if not curves:
        raise EmptyInput("no curves to aggregate")
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid.count != grid.count or (c.grid.lo, c.grid.hi) != (grid.lo, grid.hi):
            raise GridMismatch("curves evaluated on different grids")
    stack = np.vstack([c.values for c in curves])
    out = []
    for p in probs:
        vals = np.percentile(stack, 100.0 * p, axis=0, method="linear")
        out.append(RiskCurve(grid=grid, values=vals, kind=curves[0].kind))
    return out


def histogram(
    values: Sequence[float],
    bins: int,
    value_range: tuple[float, float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width histogram; the last bin includes its upper edge."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise EmptyInput("no values to histogram")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if value_range is None:
        lo, hi = float(np.min(vals)), float(np.max(vals))
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
    else:
        lo, hi = value_range
    counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
    return edges, counts


def _one_replication(config: SimConfig, n: int, r: int):
    rng = replication_rng(config.master_seed, n, r)
    lo, hi = config.model.support
    sample = sample_truncated_normal(n, lo, hi, rng)
    curve = closed_form_curve(config.loss, sample, config.theta_grid.points)
    theta_star, _ = minimize_upper_risk(config.loss, sample, config.theta_grid)
    return curve, theta_star


def run_replications(config: SimConfig, workers: int = 1) -> ReplicationSummary:
    """Replication sweep: upper-risk curves, percentile bands, minimizers.

    Output is identical for any worker count: streams are keyed per
    replication and aggregation reduces in index order.
    """
    per_n: dict[int, NSummary] = {}
    p_lo, p_hi = config.percentiles
    for n in config.n_values:
        reps = range(config.replications)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda r: _one_replication(config, n, r), reps))
        else:
            results = [_one_replication(config, n, r) for r in reps]
        curves = [
            RiskCurve(grid=config.theta_grid, values=c, kind=RiskKind.UPPER)
            for c, _ in results
        ]
        minimizers = np.array([t for _, t in results])
        lo_c, med_c, hi_c = aggregate_percentiles(curves, [p_lo, 0.5, p_hi])
        edges, counts = histogram(minimizers, config.histogram_bins)
        per_n[n] = NSummary(
            median_curve=med_c,
            band_lo=lo_c,
            band_hi=hi_c,
            minimizers=minimizers,
            histogram_edges=edges,
            histogram_counts=counts,
        )
    return ReplicationSummary(config=config, per_n=per_n)


def coverage_experiment(
    model: TrueModel,
    score: NonconformityScore,
    n: int,
    alpha: float,
    replications: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo hit frequency of the level-(1-alpha) prediction set.

    Membership of the held-out point in the union of the first k focal
    sets is equivalent to its rank pivot being <= k, which is what is
    tested (exact for every score, no grid discretization).
    """
    from .data_model import make_sample

    k = max(1, min(math.ceil((1.0 - alpha) * (n + 1)), n + 1))
    lo, hi = model.support
    hits = 0
    for r in range(replications):
        rng = replication_rng(seed, n, r)
        draws = sample_truncated_normal(n + 1, lo, hi, rng).to_original()
        sample = make_sample(draws[:n], lo, hi)
        if rank_candidate(sample, float(draws[n]), score) <= k:
            hits += 1
    return hits / replications, k / (n + 1)


def _curve_csv(curve: RiskCurve) -> str:
    lines = ["theta,value"]
    for t, v in zip(curve.grid.points, curve.values):
        lines.append(f"{t:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"


def write_summary(summary: ReplicationSummary, out_dir: str | Path) -> None:
    """Serialize a ReplicationSummary to a directory of CSV files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = summary.config
    for n, s in summary.per_n.items():
        (out / f"median_n{n}.csv").write_text(_curve_csv(s.median_curve))
        (out / f"band_lo_n{n}.csv").write_text(_curve_csv(s.band_lo))
        (out / f"band_hi_n{n}.csv").write_text(_curve_csv(s.band_hi))
        (out / f"minimizers_n{n}.csv").write_text(
            "".join(f"{v:.17g}\n" for v in s.minimizers)
        )
        hist_lines = ["bin_lo,bin_hi,count"]
        for i, c in enumerate(s.histogram_counts):
            hist_lines.append(
                f"{s.histogram_edges[i]:.17g},{s.histogram_edges[i + 1]:.17g},{int(c)}"
            )
        (out / f"histogram_n{n}.csv").write_text("\n".join(hist_lines) + "\n")
    meta = {
        "rng": RNG_ALGORITHM,
        "master_seed": cfg.master_seed,
        "n_values": list(cfg.n_values),
        "replications": cfg.replications,
        "theta_grid": {
            "lo": cfg.theta_grid.lo,
            "hi": cfg.theta_grid.hi,
            "count": cfg.theta_grid.count,
        },
        "percentiles": list(cfg.percentiles),
        "histogram_bins": cfg.histogram_bins,
        "model": cfg.model.kind.value,
        "support": list(cfg.model.support),
        "loss": cfg.loss.kind.value,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
