# gecl/utils/grids.py
"""
Sample grids in time and frequency.
"""
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np


def geometric_time_grid(
    t_max: float,
    points_per_decade: int,
    t_min: float = 0.0,
) -> np.ndarray:
    """
    Grid in t that is geometric in (1+t).

    Args:
        t_max: Right end (included)
        points_per_decade: Points per factor 10 of (1+t)
        t_min: Left end (included), must be >= 0

    Returns:
        Strictly increasing array starting at t_min and ending at t_max
    """
    if t_max <= t_min:
        return np.array([t_min], dtype=float)
    lo, hi = np.log10(1.0 + t_min), np.log10(1.0 + t_max)
    count = max(2, int(np.ceil((hi - lo) * points_per_decade)) + 1)
    grid = np.logspace(lo, hi, count) - 1.0
    grid[0], grid[-1] = t_min, t_max
    return grid


def refine_with_packets(
    grid: np.ndarray,
    packets: Iterable[Tuple[float, float]],
    packet_points: int,
) -> np.ndarray:
    """Add ``packet_points`` equispaced samples inside every packet overlapping the grid."""
    grid = np.asarray(grid, dtype=float)
    lo, hi = grid[0], grid[-1]
    extra = [grid]
    for start, end in packets:
        if end < lo or start > hi:
            continue
        pts = np.linspace(max(start, lo), min(end, hi), packet_points)
        extra.append(pts)
    return np.unique(np.concatenate(extra))


def log_frequency_grid(xi_min: float, xi_max: float, count: int) -> np.ndarray:
    """``count`` log-spaced frequencies in [xi_min, xi_max]."""
    if count == 1:
        return np.array([np.sqrt(xi_min * xi_max)])
    return np.logspace(np.log10(xi_min), np.log10(xi_max), count)


def merge_breakpoints(
    t0: float,
    t1: float,
    *sources: Optional[Sequence[float]],
) -> np.ndarray:
    """
    Sorted unique points strictly between t0 and t1 (either orientation).

    The result is ordered in the direction of integration.
    """
    lo, hi = min(t0, t1), max(t0, t1)
    pts = [
        float(p)
        for src in sources if src is not None
        for p in src
        if lo < p < hi
    ]
    ordered = np.unique(np.asarray(pts, dtype=float))
    return ordered if t1 >= t0 else ordered[::-1]
