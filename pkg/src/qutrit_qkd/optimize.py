"""Per-distance mean-photon-number optimization and secure-distance solving.

The key rate as a function of mu is empirically unimodal on (0, 1) for this
formula family; a coarse logarithmic grid guards that assumption and a
golden-section refinement polishes the maximizer.  The refined value is never
allowed to fall below the best grid point, so brute force can only tie.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rates import RateBreakdown, SystemParams, key_rate

MU_MIN = 1e-4
MU_MAX = 0.999
COARSE_GRID_POINTS = 256
GOLDEN_RELTOL = 1e-6
#: Key rates at or below this are "zero after clamping" rather than secure.
SECURE_KEY_FLOOR = 1e-10
BRACKET_KM = 200.0
BISECTION_RESOLUTION_KM = 0.1

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BracketExceededError(RuntimeError):
    """The protocol is still secure at the far end of the search bracket."""


@dataclass(frozen=True)
class CurvePoint:
    """One optimized point of the key-rate-versus-distance curve."""

    length_km: float
    mu_opt: float
    k_opt: float
    breakdown: RateBreakdown


def _golden_max(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > GOLDEN_RELTOL * max(abs(a), abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def optimize_mu(protocol: str, base_params: SystemParams, length_km: float) -> CurvePoint:
    """Maximize the key rate over mu in [1e-4, 0.999] at one distance.

    Coarse 256-point logarithmic scan followed by golden-section refinement
    around the best grid point; returns the maximizer, its rate, and the full
    breakdown.  If the rate is zero across the whole grid the point is
    reported as insecure (k_opt = 0).
    """

    def rate(mu: float) -> float:
        return key_rate(protocol, base_params.with_(length_km=length_km, mu=mu)).k

    grid = np.geomspace(MU_MIN, MU_MAX, COARSE_GRID_POINTS)
    ks = np.array([rate(m) for m in grid])
    i = int(np.argmax(ks))
    best_mu, best_k = float(grid[i]), float(ks[i])
    if best_k > 0.0:
        lo = float(grid[max(0, i - 1)])
        hi = float(grid[min(COARSE_GRID_POINTS - 1, i + 1)])
        refined_mu, refined_k = _golden_max(rate, lo, hi)
        if refined_k > best_k:
            best_mu, best_k = refined_mu, refined_k
    breakdown = key_rate(protocol, base_params.with_(length_km=length_km, mu=best_mu))
    return CurvePoint(length_km, best_mu, breakdown.k, breakdown)


def secure_distance(protocol: str, base_params: SystemParams) -> float:
    """Largest distance at which the optimized key rate stays positive.

    Bisection on the optimized rate over [0, 200] km at 0.1 km resolution;
    "positive" means k_opt above the 1e-10 bits/pulse floor.  Returns 0 when
    the protocol is insecure even back to back.

    Raises:
        BracketExceededError: if still secure at 200 km.
    """
    if optimize_mu(protocol, base_params, 0.0).k_opt <= SECURE_KEY_FLOOR:
        return 0.0
    if optimize_mu(protocol, base_params, BRACKET_KM).k_opt > SECURE_KEY_FLOOR:
        raise BracketExceededError(f"{protocol} is secure beyond {BRACKET_KM} km")
    lo, hi = 0.0, BRACKET_KM
    while hi - lo > BISECTION_RESOLUTION_KM:
        mid = 0.5 * (lo + hi)
        if optimize_mu(protocol, base_params, mid).k_opt > SECURE_KEY_FLOOR:
            lo = mid
        else:
            hi = mid
    return lo


def _curve_point(task) -> CurvePoint:
    protocol, base_params, length_km = task
    return optimize_mu(protocol, base_params, length_km)


def curve(
    protocol: str,
    base_params: SystemParams,
    l_grid: Sequence[float],
    workers: int = 1,
) -> list[CurvePoint]:
    """One optimized point per distance, in the order of ``l_grid``."""
    grid = list(l_grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("l_grid must be sorted ascending")
    tasks = [(protocol, base_params, l) for l in grid]
    if workers <= 1 or len(tasks) < 4:
        return [_curve_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_curve_point, tasks, chunksize=max(1, len(tasks) // (workers * 4))))
