"""Monte Carlo deployment engine used to check the analytic coverage and link formulas.

Each trial owns the random stream ``(base_seed, trial_index)``, draws a fresh
deployment and a batch of event points from it, and reports an integer success
count. Trials can therefore run on any number of workers in any order and still
reduce to the same estimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from ._cells import count_covered
from .coverage import DeploymentConfig
from .errors import DomainError
from .link import LinkModel, sample_link
from .numerics import RngStream, make_stream, q_inverse
from .sensing import (
    BooleanSensing,
    ElfesSensing,
    SensingModel,
    ShadowFadingSensing,
    model_reach,
    sample_detection,
)

DEFAULT_SEED = 20240601
Z95 = q_inverse(0.025)


@dataclass(frozen=True)
class Deployment:
    node_positions: np.ndarray
    config: DeploymentConfig

    def __post_init__(self):
        if self.node_positions.shape != (self.config.N, 2):
            raise DomainError("position array must have shape (N, 2)")


@dataclass(frozen=True)
class TrialPlan:
    """``event_margin=None`` means: use the sensing model's reach."""

    trials: int = 200
    events_per_trial: int = 500
    event_margin: Optional[float] = None
    base_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.trials < 1 or self.events_per_trial < 1:
            raise DomainError("a trial plan needs at least one trial and one event per trial")
        if self.event_margin is not None and self.event_margin < 0:
            raise DomainError("event_margin must be non-negative")

    def to_dict(self) -> dict:
        return {"trials": self.trials, "events_per_trial": self.events_per_trial,
                "event_margin": self.event_margin, "base_seed": self.base_seed}


@dataclass(frozen=True)
class EmpiricalEstimate:
    mean: float
    half_width_95: float
    trials_used: int
    successes: int = 0
    samples: int = 0
    trial_successes: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "half_width_95": self.half_width_95,
                "trials_used": self.trials_used, "successes": self.successes,
                "samples": self.samples}


@dataclass(frozen=True)
class LinkCensus:
    isolated_fraction: float
    mean_degree: float
    edges: int

    def to_dict(self) -> dict:
        return {"isolated_fraction": self.isolated_fraction,
                "mean_degree": self.mean_degree, "edges": self.edges}


def wilson_half_width(successes: int, n: int, z: float = Z95) -> float:
    """Largest distance from the raw proportion to either end of the Wilson interval."""
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    spread = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(abs(p - (centre - spread)), abs(centre + spread - p))


def _with_wilson_fallback(mean: float, half_width: float, successes: int, n: int) -> float:
    if mean - 5 * half_width <= 0.0 or mean + 5 * half_width >= 1.0:
        return max(half_width, wilson_half_width(successes, n))
    return half_width


def binomial_half_width(successes: int, n: int) -> float:
    p = successes / n
    hw = Z95 * math.sqrt(p * (1 - p) / n)
    return _with_wilson_fallback(p, hw, successes, n)


def uniform_in_disk(radius: float, count: int, stream: RngStream) -> np.ndarray:
    """``count`` points uniform over the disk of ``radius`` about the origin."""
    if count == 0:
        return np.empty((0, 2))
    u = stream.uniform((count, 2))
    r = radius * np.sqrt(u[:, 0])
    theta = 2.0 * math.pi * u[:, 1]
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def deploy(config: DeploymentConfig, stream: RngStream) -> Deployment:
    return Deployment(uniform_in_disk(config.region.radius, config.N, stream), config)


def _is_disk(model: SensingModel) -> Optional[float]:
    """Radius if the model is a deterministic disk, else None."""
    if isinstance(model, BooleanSensing):
        return model.r_s
    if isinstance(model, ShadowFadingSensing) and model.sigma == 0:
        return model.r_s
    if isinstance(model, ElfesSensing) and model.R_1 == model.R_max:
        return model.R_1
    return None


def resolve_margin(model: SensingModel, config: DeploymentConfig, plan: TrialPlan) -> float:
    margin = model_reach(model) if plan.event_margin is None else plan.event_margin
    if margin >= config.region.radius:
        raise DomainError(
            f"event margin {margin:.6g} m leaves no room for events inside a "
            f"{config.region.radius:.6g} m region; pass a smaller explicit margin")
    return margin


def disk_covered_count(nodes: np.ndarray, events: np.ndarray, radius: float) -> int:
    """Number of events within ``radius`` (inclusive) of at least one node."""
    if len(nodes) == 0:
        return 0
    if count_covered is not None:
        return int(count_covered(nodes, events, float(radius)))
    dist, _ = cKDTree(nodes).query(events, k=1, distance_upper_bound=np.nextafter(radius, np.inf))
    return int(np.isfinite(dist).sum())


def _coverage_trial(model: SensingModel, config: DeploymentConfig, plan: TrialPlan,
                    margin: float, index: int) -> int:
    stream = make_stream(plan.base_seed, index)
    nodes = deploy(config, stream).node_positions
    events = uniform_in_disk(config.region.radius - margin, plan.events_per_trial, stream)
    disk = _is_disk(model)
    if disk is not None:
        return disk_covered_count(nodes, events, disk)
    tree = cKDTree(nodes)
    pairs = cKDTree(events).sparse_distance_matrix(tree, model_reach(model),
                                                   output_type="ndarray")
    # canonical (event, node) order so draws never depend on tree internals
    order = np.lexsort((pairs["j"], pairs["i"]))
    event_idx = pairs["i"][order]
    hits = np.asarray(sample_detection(model, pairs["v"][order], stream), dtype=bool)
    covered = np.zeros(plan.events_per_trial, dtype=bool)
    covered[event_idx[hits]] = True
    return int(covered.sum())


def estimate_coverage(model: SensingModel, config: DeploymentConfig, plan: TrialPlan,
                      workers: int = 1) -> EmpiricalEstimate:
    """Fraction of random events detected by at least one node, over fresh deployments.

    Events are drawn from the disk shrunk by the event margin so that, with the
    default margin, no node's sensing footprint is clipped by the region edge.
    The 95% half-width comes from the spread of per-trial coverage fractions,
    since events that share a deployment are not independent.
    """
    events = plan.events_per_trial
    total = plan.trials * events
    if config.N == 0:
        return EmpiricalEstimate(0.0, 0.0, plan.trials, 0, total, (0,) * plan.trials)
    margin = resolve_margin(model, config, plan)

    def run(index: int) -> int:
        return _coverage_trial(model, config, plan, margin, index)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(plan.trials)))
    else:
        counts = [run(i) for i in range(plan.trials)]

    successes = sum(counts)
    mean = successes / total
    if plan.trials >= 2:
        fractions = np.asarray(counts, dtype=float) / events
        hw = Z95 * float(np.std(fractions, ddof=1)) / math.sqrt(plan.trials)
        hw = _with_wilson_fallback(mean, hw, successes, total)
    else:
        hw = binomial_half_width(successes, total)
    return EmpiricalEstimate(mean, hw, plan.trials, successes, total, tuple(counts))


def estimate_link_rate(model: LinkModel, d: float, samples: int,
                       stream: RngStream) -> EmpiricalEstimate:
    if samples < 1:
        raise DomainError("need at least one sample")
    hits = sample_link(model, np.full(samples, float(d)), stream)
    successes = int(np.count_nonzero(hits))
    return EmpiricalEstimate(successes / samples, binomial_half_width(successes, samples),
                             1, successes, samples)


def network_link_census(deployment: Deployment, model: LinkModel,
                        stream: RngStream) -> LinkCensus:
    """Sample every unordered node pair once and summarise the resulting graph."""
    n = deployment.config.N
    if n < 1:
        raise DomainError("census needs at least one node")
    dist = pdist(deployment.node_positions)
    hits = np.asarray(sample_link(model, dist, stream), dtype=bool)
    # pdist order matches triu_indices(n, 1)
    i, j = np.triu_indices(n, 1)
    degree = (np.bincount(i[hits], minlength=n) + np.bincount(j[hits], minlength=n))
    edges = int(hits.sum())
    return LinkCensus(float(np.mean(degree == 0)), 2.0 * edges / n, edges)
