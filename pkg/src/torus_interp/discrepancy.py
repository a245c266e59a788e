#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Uniformity measures of site sets: mesh norm (fill distance on the torus) and
star discrepancy, plus the (ln n)^m / n proxy used to drive schedules.
"""

import math

from dataclasses import dataclass

import numpy as np

from scipy.spatial import cKDTree

import idaes.logger as idaeslog

from torus_interp.exceptions import DomainError, UnsupportedError
from torus_interp.torus import as_points, grid_nodes, grid_shape, wrap_array

_log = idaeslog.getLogger(__name__)

DEFAULT_PROBE_RESOLUTION = 256
MIN_PROBE_RESOLUTION = 64
DEFAULT_MAX_CELLS = 2**22


def mesh_norm(points, resolution=DEFAULT_PROBE_RESOLUTION):
    """
    sup_x min_i |x - p_i| (periodic Euclidean metric), estimated as the max
    over the probe grid {j/res}; the estimate is low by at most
    sqrt(m)/(2 res).
    """
    pts = wrap_array(as_points(points))
    shape = grid_shape(resolution, pts.shape[1])
    if any(r < MIN_PROBE_RESOLUTION for r in shape):
        raise DomainError(
            f"probe resolution must be >= {MIN_PROBE_RESOLUTION} per axis, got {shape}"
        )
    tree = cKDTree(pts, boxsize=1.0)
    distances, _ = tree.query(grid_nodes(shape))
    return float(np.max(distances))


@dataclass(frozen=True)
class StarDiscrepancy:
    """
    Bracket lower <= D* <= upper; ``exact`` when both coincide by
    construction (1-D formula or complete critical-box enumeration).
    """

    lower: float
    upper: float
    exact: bool

    @property
    def value(self):
        "The conservative (upper) end of the bracket."
        return self.upper


def _star_discrepancy_1d(x):
    x = np.sort(x)
    n = x.shape[0]
    centres = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return 1.0 / (2.0 * n) + float(np.max(np.abs(x - centres)))


def _anchored_counts(index, shape):
    "Number of sites whose per-axis index is <= each grid node (cumulative histogram)."
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, tuple(index.T), 1)
    for axis in range(len(shape)):
        hist = np.cumsum(hist, axis=axis)
    return hist


def _volumes(grids):
    vol = grids[0]
    for g in grids[1:]:
        vol = np.multiply.outer(vol, g)
    return vol


def _critical_box_bound(pts, max_cells):
    """
    Local discrepancy at the critical corners y in prod_j ({p_ij} + {1}).
    Over the full set this is D* itself; over a thinned set a lower bound.
    """
    n, m = pts.shape
    grids = [np.unique(np.append(pts[:, j], 1.0)) for j in range(m)]
    cells = math.prod(len(g) for g in grids)
    stride = 1
    if cells > max_cells:
        stride = int(math.ceil((cells / max_cells) ** (1.0 / m)))
        grids = [np.unique(np.append(g[::stride], 1.0)) for g in grids]
    shape = tuple(len(g) for g in grids)

    closed = np.stack(
        [np.searchsorted(grids[j], pts[:, j], side="left") for j in range(m)], axis=1
    )
    open_ = np.stack(
        [np.searchsorted(grids[j], pts[:, j], side="right") for j in range(m)], axis=1
    )
    vol = _volumes(grids)
    count_closed = _anchored_counts(closed, shape) / n
    count_open = _anchored_counts(open_, shape) / n
    local = np.maximum(vol - count_open, count_closed - vol)
    return float(np.max(local)), stride == 1


def _refinement_upper_bound(pts, max_cells):
    """
    Upper bound from a uniform r^m cell grid: for y in the cell [a, b],
    vol(y) - A[0,y)/n <= vol(b) - A[0,a)/n and A[0,y]/n - vol(y) <= A[0,b]/n - vol(a).
    """
    n, m = pts.shape
    r = max(1, int(math.floor(max_cells ** (1.0 / m))) - 1)
    shape = (r + 1,) * m
    nodes = np.arange(r + 1, dtype=float) / r
    below = np.floor(pts * r).astype(np.int64) + 1
    at_or_below = np.ceil(pts * r).astype(np.int64)
    open_counts = _anchored_counts(np.minimum(below, r), shape) / n
    closed_counts = _anchored_counts(at_or_below, shape) / n
    vol = _volumes([nodes] * m)

    lower_corner = tuple(slice(0, r) for _ in range(m))
    upper_corner = tuple(slice(1, r + 1) for _ in range(m))
    excess = vol[upper_corner] - open_counts[lower_corner]
    deficit = closed_counts[upper_corner] - vol[lower_corner]
    return float(max(np.max(excess), np.max(deficit), 0.0))


def star_discrepancy(points, max_cells=DEFAULT_MAX_CELLS):
    """
    Star discrepancy of the sites over anchored boxes [0, y).

    m = 1 uses the closed form 1/(2n) + max_i |x_(i) - (2i-1)/(2n)|. For m = 2, 3
    the critical corners are enumerated (exact when they fit in ``max_cells``);
    otherwise a thinned enumeration gives the lower bound and a uniform grid
    refinement the upper bound.
    """
    pts = wrap_array(as_points(points))
    n, m = pts.shape
    if m == 1:
        value = _star_discrepancy_1d(pts[:, 0])
        return StarDiscrepancy(lower=value, upper=value, exact=True)
    if m > 3:
        raise UnsupportedError(
            f"star discrepancy is only computed for m <= 3 (got m={m}); "
            "use discrepancy_proxy instead"
        )

    lower, complete = _critical_box_bound(pts, max_cells)
    if complete:
        return StarDiscrepancy(lower=lower, upper=lower, exact=True)
    upper = max(_refinement_upper_bound(pts, max_cells), lower)
    _log.warning(
        f"star discrepancy of {n} sites in m={m} only bracketed: [{lower:.4g}, {upper:.4g}]"
    )
    return StarDiscrepancy(lower=lower, upper=upper, exact=False)


def discrepancy_proxy(n, m):
    "(ln n)^m / n."
    if n < 2:
        raise DomainError(f"discrepancy proxy needs n >= 2, got {n}")
    if m < 1:
        raise DomainError(f"dimension m must be >= 1, got {m}")
    return math.log(n) ** m / n
