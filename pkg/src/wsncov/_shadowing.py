"""Log-normal shadowing kernel shared by the sensing and link models.

Both reduce to the same question: with a nominal (non-shadowed) range R, exponent n
and shadowing deviation sigma dB, does the received power at distance d clear the
threshold? The mean power margin at d is -10 n log10(d / R) dB.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .numerics import RngStream, q_function


def as_distance(d) -> np.ndarray:
    arr = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError(f"distance must be finite, got {d!r}")
    if np.any(arr < 0):
        raise DomainError(f"distance must be non-negative, got {d!r}")
    return arr


def margin_db(d: np.ndarray, nominal_range: float, n: float) -> np.ndarray:
    """Mean received power above threshold; +inf at d = 0."""
    with np.errstate(divide="ignore"):
        return -10.0 * n * np.log10(d / nominal_range)


def range_from_budget(power_dbm: float, threshold_dbm: float, ref_loss_db: float,
                      ref_distance: float, n: float) -> float:
    """Distance at which the mean received power equals the threshold."""
    if not ref_distance > 0 or not n > 0:
        raise DomainError("reference distance and path-loss exponent must be positive")
    return ref_distance * 10.0 ** ((power_dbm - ref_loss_db - threshold_dbm) / (10.0 * n))


def success_probability(d, nominal_range: float, n: float, sigma: float):
    """Q(10 n log10(d / R) / sigma); the radio-disk indicator when sigma == 0."""
    dist = as_distance(d)
    if sigma == 0:
        out = (dist <= nominal_range).astype(float)
    else:
        out = np.ones_like(dist)
        pos = dist > 0
        out[pos] = q_function(-margin_db(dist[pos], nominal_range, n) / sigma)
    return float(out) if out.ndim == 0 else out


def sample_success(d, nominal_range: float, n: float, sigma: float, stream: RngStream):
    """One shadowing realisation per distance: success iff X_sigma <= margin."""
    dist = as_distance(d)
    if sigma == 0:
        out = dist <= nominal_range
    else:
        shadow = sigma * stream.normal(dist.shape if dist.ndim else None)
        out = shadow <= margin_db(dist, nominal_range, n)
    return bool(out) if np.ndim(out) == 0 else out
