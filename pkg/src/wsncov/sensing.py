"""Point-detection models: Boolean disk, Elfes, and log-normal shadow fading."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _shadowing
from .errors import ConfigurationError, DomainError
from .numerics import RngStream, shadow_truncation_radius


@dataclass(frozen=True)
class BooleanSensing:
    r_s: float

    def __post_init__(self):
        if not (math.isfinite(self.r_s) and self.r_s > 0):
            raise DomainError(f"r_s must be positive, got {self.r_s}")


@dataclass(frozen=True)
class ElfesSensing:
    """Certain detection up to ``R_1``, ``exp(-lam (x - R_1)^beta)`` decay up to ``R_max``."""

    R_1: float
    R_max: float
    lam: float
    beta: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.R_1, self.R_max, self.lam, self.beta)):
            raise DomainError("Elfes parameters must be finite")
        if not 0 <= self.R_1 <= self.R_max:
            raise DomainError(f"need 0 <= R_1 <= R_max, got R_1={self.R_1}, R_max={self.R_max}")
        if self.R_max <= 0:
            raise DomainError("R_max must be positive")
        if self.lam < 0:
            raise DomainError(f"lambda must be non-negative, got {self.lam}")
        if self.beta <= 0:
            raise DomainError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class ShadowFadingSensing:
    r_s: float
    n: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.r_s) and self.r_s > 0):
            raise DomainError(f"r_s must be positive, got {self.r_s}")
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"path-loss exponent must be positive, got {self.n}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")


SensingModel = Union[BooleanSensing, ElfesSensing, ShadowFadingSensing]


@dataclass(frozen=True)
class SensingBudget:
    """Event power budget in dBm/dB; ``PL_ref`` is the mean path loss at ``x_0``."""

    P_s: float
    P_s_th: float
    PL_ref: float
    x_0: float
    n: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.x_0 > 0:
            raise DomainError("x_0 must be positive")
        if not self.n > 0:
            raise DomainError("n must be positive")
        if not self.sigma >= 0:
            raise DomainError("sigma must be non-negative")

    def mean_received_power(self, x: float) -> float:
        return self.P_s - self.PL_ref - 10.0 * self.n * math.log10(x / self.x_0)


def sensing_range_from_budget(budget: SensingBudget) -> float:
    """Non-shadowed sensing range: where mean received event power equals ``P_s_th``."""
    return _shadowing.range_from_budget(budget.P_s, budget.P_s_th, budget.PL_ref,
                                        budget.x_0, budget.n)


def shadow_model_from_budget(budget: SensingBudget) -> ShadowFadingSensing:
    return ShadowFadingSensing(sensing_range_from_budget(budget), budget.n, budget.sigma)


def _elfes_probability(model: ElfesSensing, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    out[x <= model.R_1] = 1.0
    mid = (x > model.R_1) & (x < model.R_max)
    out[mid] = np.exp(-model.lam * (x[mid] - model.R_1) ** model.beta)
    return out


def detection_probability(model: SensingModel, x):
    """Probability that a node at distance ``x`` detects the event.

    Vectorised over ``x``; returns a float for scalar input.
    """
    dist = _shadowing.as_distance(x)
    if isinstance(model, BooleanSensing):
        out = (dist <= model.r_s).astype(float)
    elif isinstance(model, ElfesSensing):
        out = _elfes_probability(model, np.atleast_1d(dist)).reshape(dist.shape)
    elif isinstance(model, ShadowFadingSensing):
        return _shadowing.success_probability(dist, model.r_s, model.n, model.sigma)
    else:
        raise ConfigurationError(f"unknown sensing model {model!r}")
    return float(out) if out.ndim == 0 else out


def sample_detection(model: SensingModel, x, stream: RngStream):
    """One detection realisation per distance in ``x``.

    Boolean draws nothing; Elfes consumes one uniform per distance; shadow fading
    consumes one normal per distance (none when sigma == 0).
    """
    dist = _shadowing.as_distance(x)
    if isinstance(model, BooleanSensing):
        out = dist <= model.r_s
    elif isinstance(model, ElfesSensing):
        p = _elfes_probability(model, np.atleast_1d(dist)).reshape(dist.shape)
        out = stream.uniform(dist.shape if dist.ndim else None) < p
    elif isinstance(model, ShadowFadingSensing):
        return _shadowing.sample_success(dist, model.r_s, model.n, model.sigma, stream)
    else:
        raise ConfigurationError(f"unknown sensing model {model!r}")
    return bool(out) if np.ndim(out) == 0 else out


def model_reach(model: SensingModel) -> float:
    """Largest distance with non-negligible detection probability."""
    if isinstance(model, BooleanSensing):
        return model.r_s
    if isinstance(model, ElfesSensing):
        return model.R_max
    if isinstance(model, ShadowFadingSensing):
        if model.sigma == 0:
            return model.r_s
        return shadow_truncation_radius(model.r_s, model.n, model.sigma)
    raise ConfigurationError(f"unknown sensing model {model!r}")


def model_to_dict(model: SensingModel) -> dict:
    if isinstance(model, BooleanSensing):
        return {"model": "boolean", "r_s": model.r_s}
    if isinstance(model, ElfesSensing):
        return {"model": "elfes", "R_1": model.R_1, "R_max": model.R_max,
                "lambda": model.lam, "beta": model.beta}
    if isinstance(model, ShadowFadingSensing):
        return {"model": "shadow", "r_s": model.r_s, "n": model.n, "sigma": model.sigma}
    raise ConfigurationError(f"unknown sensing model {model!r}")


def model_from_dict(data: dict) -> SensingModel:
    kind = data.get("model")
    try:
        if kind == "boolean":
            return BooleanSensing(float(data["r_s"]))
        if kind == "elfes":
            return ElfesSensing(float(data.get("R_1", 0.0)), float(data["R_max"]),
                                float(data["lambda"]), float(data.get("beta", 1.0)))
        if kind == "shadow":
            return ShadowFadingSensing(float(data["r_s"]), float(data["n"]),
                                       float(data["sigma"]))
    except KeyError as exc:
        raise ConfigurationError(f"{kind} model is missing field {exc.args[0]!r}") from None
    raise ConfigurationError(f"unknown model tag {kind!r}; expected boolean, elfes or shadow")
