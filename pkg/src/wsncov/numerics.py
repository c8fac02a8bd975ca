"""Special functions, adaptive quadrature and reproducible random streams."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

SQRT2 = math.sqrt(2.0)
LN10 = math.log(10.0)

# Q(6) ~ 1e-9: the detection probability beyond this deviate is treated as zero
# when a finite reach is needed (simulator event margin, pair search radius).
TRUNCATION_DEVIATE = 6.0

_U64 = (1 << 64) - 1


def _check_finite(x) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"expected finite input, got {x!r}")


def q_function(x):
    """Standard normal tail probability P(Z > x), via erfc.

    Accepts a scalar or an array; scalars come back as ``float``.
    """
    arr = np.asarray(x, dtype=float)
    _check_finite(arr)
    out = 0.5 * special.erfc(arr / SQRT2)
    return float(out) if out.ndim == 0 else out


def q_inverse(p):
    """Inverse of :func:`q_function` on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"q_inverse needs 0 < p < 1, got {p!r}")
    # Q(x) = Phi(-x)
    out = -special.ndtri(arr)
    return float(out) if out.ndim == 0 else out


# 21-point Gauss-Kronrod rule; odd-indexed nodes carry the embedded 10-point Gauss rule.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208013357568,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(21)
_GAUSS_W[1:10:2] = _WG
_GAUSS_W[11:20:2] = _WG[::-1]


@dataclass(frozen=True)
class QuadratureSpec:
    lower: float
    upper: float
    relative_tolerance: float = 1e-9
    max_subdivisions: int = 500

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("quadrature limits must be finite; truncate infinite ranges first")
        if not self.lower < self.upper:
            raise DomainError(f"need lower < upper, got [{self.lower}, {self.upper}]")
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


def _gk21(f, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    if fx.shape != _NODES.shape:
        fx = np.broadcast_to(fx, _NODES.shape)
    kronrod = half * float(fx @ _KRONROD_W)
    gauss = half * float(fx @ _GAUSS_W)
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Callable,
    spec: QuadratureSpec,
    breakpoints: tuple[float, ...] = (),
) -> float:
    """Adaptive 21-point Gauss-Kronrod integration of ``f`` over ``[spec.lower, spec.upper]``.

    ``f`` is called with a numpy array of abscissae and must return an array of the
    same shape. The interval with the largest error estimate is bisected until the
    summed error is at most ``relative_tolerance * |integral|``. Interior
    ``breakpoints`` (kinks, steps) seed the initial partition.
    """
    edges = [spec.lower]
    edges += sorted(p for p in breakpoints if spec.lower < p < spec.upper)
    edges.append(spec.upper)

    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _gk21(f, a, b)
        heapq.heappush(heap, (-err, a, b, val))
        total += val
        error += err
    _check_finite(total)

    subdivisions = len(heap)
    # absolute floor keeps identically-zero integrands from looping forever
    while error > max(spec.relative_tolerance * abs(total), 1e-300):
        if subdivisions >= spec.max_subdivisions:
            raise ConvergenceError(
                f"no convergence after {subdivisions} subdivisions "
                f"(estimate {total!r}, error {error!r})",
                estimate=total,
                error=error,
            )
        neg_err, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not a < mid < b:
            # interval cannot be split further in floating point
            raise ConvergenceError(
                "interval collapsed below machine resolution", estimate=total, error=error
            )
        left, left_err = _gk21(f, a, mid)
        right, right_err = _gk21(f, mid, b)
        heapq.heappush(heap, (-left_err, a, mid, left))
        heapq.heappush(heap, (-right_err, mid, b, right))
        subdivisions += 1
        # recompute sums from the heap to avoid drift from repeated add/subtract
        total = math.fsum(item[3] for item in heap)
        error = math.fsum(-item[0] for item in heap)
    return total


def shadow_truncation_radius(nominal_range: float, n: float, sigma: float,
                             deviate: float = TRUNCATION_DEVIATE) -> float:
    """Distance at which Q(10 n log10(x / nominal_range) / sigma) drops to Q(deviate)."""
    return nominal_range * 10.0 ** (sigma * deviate / (10.0 * n))


class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Backed by Philox-4x64; the 128-bit key is ``stream_id << 64 | seed``, so the
    sequence depends only on the pair and never on what other streams have drawn.
    ``position`` counts variates handed out so far.
    """

    __slots__ = ("seed", "stream_id", "position", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _U64
        self.stream_id = int(stream_id) & _U64
        self.position = 0
        key = (self.stream_id << 64) | self.seed
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniform(self, size=None):
        """Uniform reals in [0, 1)."""
        out = self._gen.random(size)
        self.position += 1 if size is None else int(np.prod(size))
        return out

    def normal(self, size=None):
        """Standard normal deviates."""
        out = self._gen.standard_normal(size)
        self.position += 1 if size is None else int(np.prod(size))
        return out

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, position={self.position})"


def make_stream(seed: int, stream_id: int = 0) -> RngStream:
    return RngStream(seed, stream_id)
