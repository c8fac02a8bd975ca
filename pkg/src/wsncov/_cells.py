"""Cell-list kernel counting events within a fixed radius of at least one node."""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None


def _count_covered(nodes, events, radius):
    n = nodes.shape[0]
    m = events.shape[0]
    if n == 0 or m == 0:
        return 0
    xmin = nodes[0, 0]
    xmax = xmin
    ymin = nodes[0, 1]
    ymax = ymin
    for i in range(n):
        x = nodes[i, 0]
        y = nodes[i, 1]
        xmin = min(xmin, x)
        xmax = max(xmax, x)
        ymin = min(ymin, y)
        ymax = max(ymax, y)
    # cells at least `radius` wide, and no more cells than ~4 per node
    cell = max(radius, math.sqrt((xmax - xmin) * (ymax - ymin) / (4.0 * n + 1.0)), 1e-300)
    ncx = int((xmax - xmin) / cell) + 1
    ncy = int((ymax - ymin) / cell) + 1
    reach = int(math.ceil(radius / cell))

    start = np.zeros(ncx * ncy + 1, np.int64)
    owner = np.empty(n, np.int64)
    for i in range(n):
        cx = min(int((nodes[i, 0] - xmin) / cell), ncx - 1)
        cy = min(int((nodes[i, 1] - ymin) / cell), ncy - 1)
        owner[i] = cx * ncy + cy
        start[owner[i] + 1] += 1
    for c in range(ncx * ncy):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    order = np.empty(n, np.int64)
    for i in range(n):
        order[fill[owner[i]]] = i
        fill[owner[i]] += 1

    r2 = radius * radius
    covered = 0
    for e in range(m):
        ex = events[e, 0]
        ey = events[e, 1]
        fx = math.floor((ex - xmin) / cell)
        fy = math.floor((ey - ymin) / cell)
        lo_x = max(fx - reach, 0.0)
        hi_x = min(fx + reach, ncx - 1.0)
        lo_y = max(fy - reach, 0.0)
        hi_y = min(fy + reach, ncy - 1.0)
        found = False
        cx = int(lo_x)
        while cx <= hi_x and not found:
            cy = int(lo_y)
            while cy <= hi_y and not found:
                c = cx * ncy + cy
                for k in range(start[c], start[c + 1]):
                    j = order[k]
                    dx = nodes[j, 0] - ex
                    dy = nodes[j, 1] - ey
                    if dx * dx + dy * dy <= r2:
                        found = True
                        break
                cy += 1
            cx += 1
        if found:
            covered += 1
    return covered


count_covered = njit(cache=True)(_count_covered) if njit is not None else None
