"""Boundary-free analytic coverage fractions for randomly deployed networks.

Every model reduces to a per-node detection probability ``p_det`` (the chance a
uniformly placed node detects a fixed event), which is then combined over ``N``
independent nodes either exactly, ``1 - (1 - p)^N``, or with the exponential
approximation ``1 - exp(-N p)``. Edge effects are ignored: the formulas hold for
events far enough from the region boundary that the whole sensing footprint fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .numerics import LN10, QuadratureSpec, integrate, q_function, q_inverse
from .sensing import (
    BooleanSensing,
    ElfesSensing,
    SensingModel,
    ShadowFadingSensing,
    model_to_dict,
)

EXACT = "exact"
APPROX = "exponential-approx"
MODES = (EXACT, APPROX)
_MODE_ALIASES = {"exact": EXACT, "approx": APPROX, "exponential-approx": APPROX}

# below this lambda * length the 1/lambda^2 forms cancel badly; use Taylor series
SERIES_THRESHOLD = 1e-2

# extra standard deviations kept beyond the tilted peak of the shadow integrand
SHADOW_TAIL_DEVIATES = 9.0
SHADOW_LOG_LOWER = -20.0


@dataclass(frozen=True)
class Region:
    """Disk-shaped area of interest centred on the origin."""

    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise DomainError(f"region radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class DeploymentConfig:
    region: Region
    N: int
    seed: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise DomainError(f"node count must be a non-negative integer, got {self.N}")

    @property
    def rho(self) -> float:
        return self.N / self.region.area


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: str
    half_width: float = 0.0
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"coverage {self.value} outside [0, 1]")
        if self.half_width < 0:
            raise DomainError("half_width must be non-negative")

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method,
                "half_width": self.half_width, "detail": self.detail}


def _normalise_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ConfigurationError(f"unknown coverage mode {mode!r}; use exact or approx") from None


def single_node_detection_boolean(r_s: float, region: Region) -> float:
    if r_s < 0 or r_s > region.radius:
        raise DomainError(f"r_s={r_s} must lie in [0, region radius {region.radius}]")
    return math.pi * r_s**2 / region.area


def coverage_from_pdet(p_det: float, N: int, mode: str = EXACT) -> CoverageResult:
    """Fraction of events detected by at least one of ``N`` independent nodes."""
    mode = _normalise_mode(mode)
    if not 0.0 <= p_det <= 1.0:
        raise DomainError(f"p_det={p_det} outside [0, 1]")
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    if N == 0 or p_det == 0.0:
        value = 0.0
    elif mode == EXACT:
        value = 1.0 if p_det == 1.0 else -math.expm1(N * math.log1p(-p_det))
    else:
        value = -math.expm1(-N * p_det)
    return CoverageResult(value, mode, detail={"p_det": p_det, "N": N})


def _one_minus_exp_times_linear_over_sq(y: float) -> float:
    """(1 - e^-y (1 + y)) / y^2, stable near y = 0."""
    if y < SERIES_THRESHOLD:
        # sum_{k>=2} (-1)^k (k-1) / k! * y^(k-2)
        total = 0.0
        term_fact = 1.0
        for k in range(2, 14):
            term_fact *= k
            total += (-1) ** k * (k - 1) / term_fact * y ** (k - 2)
        return total
    return (1.0 - math.exp(-y) * (1.0 + y)) / (y * y)


def _one_minus_exp_over(y: float) -> float:
    """(1 - e^-y) / y."""
    if y == 0.0:
        return 1.0
    return -math.expm1(-y) / y


def _require_beta_one(model: ElfesSensing) -> None:
    if model.beta != 1.0:
        raise ConfigurationError(
            "closed-form Elfes coverage needs beta = 1; use elfes_pdet_quadrature")


def elfes_pdet_approx(model: ElfesSensing, region: Region) -> float:
    """Per-node detection probability for the Elfes model with ``R_1 = 0``, ``beta = 1``."""
    if model.R_1 != 0.0:
        raise ConfigurationError("the approximate Elfes form assumes R_1 = 0")
    _require_beta_one(model)
    lam, r_max, area = model.lam, model.R_max, region.area
    y = lam * r_max
    if y < SERIES_THRESHOLD:
        return 2.0 * math.pi * r_max**2 / area * _one_minus_exp_times_linear_over_sq(y)
    return 2.0 * math.pi / (area * lam**2) * (1.0 - math.exp(-y) * (1.0 + y))


def elfes_coverage_approx(model: ElfesSensing, N: int, region: Region) -> CoverageResult:
    p = elfes_pdet_approx(model, region)
    result = coverage_from_pdet(p, N, APPROX)
    return CoverageResult(result.value, APPROX,
                          detail={"p_det": p, "N": N, "p_det_method": "elfes-approx"})


def elfes_pdet_exact(model: ElfesSensing, region: Region) -> float:
    """Per-node detection probability for the Elfes model with arbitrary ``R_1`` and ``beta = 1``."""
    _require_beta_one(model)
    lam, r1, r_max, area = model.lam, model.R_1, model.R_max, region.area
    inner = math.pi * r1**2 / area
    length = r_max - r1
    y = lam * length
    if y < SERIES_THRESHOLD:
        # same integral regrouped: L^2 h2(y) + R_1 L h1(y)
        ring = (length**2 * _one_minus_exp_times_linear_over_sq(y)
                + r1 * length * _one_minus_exp_over(y))
        return inner + 2.0 * math.pi / area * ring
    bracket = (1.0 + lam * r1) - math.exp(-y) * (1.0 + lam * r_max)
    return inner + 2.0 * math.pi / (area * lam**2) * bracket


def elfes_pdet_quadrature(model: ElfesSensing, region: Region,
                          relative_tolerance: float = 1e-12) -> float:
    """Direct numerical integration of the Elfes detection profile; any ``beta``."""
    inner = math.pi * model.R_1**2 / region.area
    if model.R_1 == model.R_max:
        return inner

    def ring(x):
        return np.exp(-model.lam * (x - model.R_1) ** model.beta) * x

    spec = QuadratureSpec(model.R_1, model.R_max, relative_tolerance, 2000)
    return inner + 2.0 * math.pi / region.area * integrate(ring, spec)


def _shadow_scale(model: ShadowFadingSensing) -> float:
    """Log-distance scale c = sigma ln10 / (10 n): the detection probability is Q(ln(x/r_s) / c)."""
    return model.sigma * LN10 / (10.0 * model.n)


def shadow_quadrature_spec(model: ShadowFadingSensing,
                           relative_tolerance: float = 1e-10) -> QuadratureSpec:
    """Integration range in t = ln(x / r_s).

    In deviate units u = t / c the weighted integrand Q(u) e^(2 c u) behaves like a
    normal density centred at 2c, so the range is cut ``SHADOW_TAIL_DEVIATES``
    beyond that centre; below ``SHADOW_LOG_LOWER`` the omitted mass is e^(2t)/2.
    """
    c = _shadow_scale(model)
    upper = c * (2.0 * c + SHADOW_TAIL_DEVIATES)
    return QuadratureSpec(SHADOW_LOG_LOWER, upper, relative_tolerance, 2000)


def shadow_pdet_quadrature(model: ShadowFadingSensing, region: Region,
                           relative_tolerance: float = 1e-10) -> float:
    """Numerically integrate the shadow-fading detection profile over the plane.

    Substitutes x = r_s e^t so that x dx = r_s^2 e^(2t) dt, which keeps the
    heavy log-normal tail on a compact interval.
    """
    if model.sigma <= 0:
        raise DomainError("shadow quadrature needs sigma > 0")
    c = _shadow_scale(model)
    spec = shadow_quadrature_spec(model, relative_tolerance)

    def integrand(t):
        return q_function(t / c) * np.exp(2.0 * t)

    # the Q factor falls from 1 to 1/2 within a few c below t = 0
    value = integrate(integrand, spec, breakpoints=(-SHADOW_TAIL_DEVIATES * c, 0.0))
    return 2.0 * math.pi * model.r_s**2 / region.area * value


def shadow_pdet_closed_form(model: ShadowFadingSensing, region: Region) -> float:
    """Log-normal moment: (pi r_s^2 / A) exp(2 c^2) with c = sigma ln10 / (10 n)."""
    c = _shadow_scale(model)
    return math.pi * model.r_s**2 / region.area * math.exp(2.0 * c * c)


def shadow_confidence_radius(model: ShadowFadingSensing, epsilon: float) -> float:
    """Largest distance whose detection probability is still at least ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if model.sigma == 0:
        return model.r_s
    return model.r_s * 10.0 ** (model.sigma * q_inverse(epsilon) / (10.0 * model.n))


def coverage_for_model(
    model: SensingModel,
    config: DeploymentConfig,
    mode: str = EXACT,
    shadow_mode: str = "expected",
    epsilon: Optional[float] = None,
    shadow_method: str = "closed-form",
) -> CoverageResult:
    """Analytic coverage fraction for any sensing model.

    Shadow fading has two readings. ``expected`` integrates the detection
    probability over the plane (computed by ``closed-form`` or ``quadrature``).
    ``confidence`` counts an event as covered by a node only when the node's
    detection probability reaches ``epsilon`` (default 0.9), which turns the
    model into a Boolean disk of radius :func:`shadow_confidence_radius`.
    """
    mode = _normalise_mode(mode)
    region = config.region
    is_confidence = isinstance(model, ShadowFadingSensing) and shadow_mode == "confidence"
    if epsilon is not None and not is_confidence:
        raise ConfigurationError("epsilon applies only to shadow models in confidence mode")
    if shadow_mode not in ("expected", "confidence"):
        raise ConfigurationError(f"unknown shadow mode {shadow_mode!r}")
    if shadow_method not in ("closed-form", "quadrature"):
        raise ConfigurationError(f"unknown shadow method {shadow_method!r}")

    detail: dict = {"model": model_to_dict(model), "N": config.N, "radius": region.radius}
    if isinstance(model, BooleanSensing):
        p = single_node_detection_boolean(model.r_s, region)
        detail["p_det_method"] = "disk"
    elif isinstance(model, ElfesSensing):
        if model.beta != 1.0:
            p = elfes_pdet_quadrature(model, region)
            detail["p_det_method"] = "quadrature"
        elif model.R_1 == 0.0 and model.lam > 0:
            p = elfes_pdet_approx(model, region)
            detail["p_det_method"] = "elfes-approx"
        else:
            p = elfes_pdet_exact(model, region)
            detail["p_det_method"] = "elfes-exact"
    elif isinstance(model, ShadowFadingSensing):
        detail["shadow_mode"] = shadow_mode
        if is_confidence:
            eps = 0.9 if epsilon is None else epsilon
            radius = shadow_confidence_radius(model, eps)
            detail.update(epsilon=eps, effective_radius=radius, p_det_method="confidence-disk")
            p = single_node_detection_boolean(radius, region)
        elif model.sigma == 0:
            p = single_node_detection_boolean(model.r_s, region)
            detail["p_det_method"] = "disk"
        elif shadow_method == "quadrature":
            p = shadow_pdet_quadrature(model, region)
            spec = shadow_quadrature_spec(model)
            detail.update(p_det_method="quadrature",
                          truncation_radius=model.r_s * math.exp(spec.upper))
        else:
            p = shadow_pdet_closed_form(model, region)
            detail["p_det_method"] = "closed-form"
    else:
        raise ConfigurationError(f"unknown sensing model {model!r}")

    combined = coverage_from_pdet(p, config.N, mode)
    detail["p_det"] = p
    return CoverageResult(combined.value, mode, detail=detail)
