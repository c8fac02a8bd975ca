"""Pairwise link probability under log-normal shadowing."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _shadowing
from .errors import ConfigurationError, DomainError
from .numerics import RngStream


@dataclass(frozen=True)
class RadioParams:
    """Transmit/receive budget: powers in dBm, ``PL_ref`` in dB at ``d_0`` metres."""

    P_t: float
    P_rth: float
    PL_ref: float
    d_0: float
    n: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.d_0 > 0:
            raise DomainError("d_0 must be positive")
        if not self.n > 0:
            raise DomainError("n must be positive")
        if not self.sigma >= 0:
            raise DomainError("sigma must be non-negative")


@dataclass(frozen=True)
class LinkModel:
    R_0: float
    n: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.R_0) and self.R_0 > 0):
            raise DomainError(f"R_0 must be positive, got {self.R_0}")
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"n must be positive, got {self.n}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")

    def to_dict(self) -> dict:
        return {"R_0": self.R_0, "n": self.n, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, data: dict) -> "LinkModel":
        try:
            return cls(float(data["R_0"]), float(data["n"]), float(data["sigma"]))
        except KeyError as exc:
            raise ConfigurationError(f"link model is missing field {exc.args[0]!r}") from None


def range_from_budget(params: RadioParams) -> LinkModel:
    """Collapse a radio budget into its non-shadowed communication range."""
    r0 = _shadowing.range_from_budget(params.P_t, params.P_rth, params.PL_ref,
                                      params.d_0, params.n)
    return LinkModel(r0, params.n, params.sigma)


def link_probability(model: LinkModel, d):
    """Probability that a link exists between two nodes ``d`` metres apart."""
    return _shadowing.success_probability(d, model.R_0, model.n, model.sigma)


def sample_link(model: LinkModel, d, stream: RngStream):
    """Independent shadowing realisation(s) of the link at distance(s) ``d``."""
    return _shadowing.sample_success(d, model.R_0, model.n, model.sigma, stream)
