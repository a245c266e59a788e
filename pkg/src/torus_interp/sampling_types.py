#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

# sampling_types.py - site generators on the torus

import warnings

from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from scipy.stats import qmc

import idaes.logger as idaeslog

from torus_interp.exceptions import DomainError, InputError
from torus_interp.solver import find_duplicates
from torus_interp.torus import as_points, grid_nodes, wrap_array

_log = idaeslog.getLogger(__name__)

_COLLISION_TOL = 1e-12
_NUDGE = 1e-9


class PointSetKind(Enum):
    "Available site generators."
    UNIFORM_RANDOM = "random"
    HALTON = "halton"
    KRONECKER = "kronecker"
    GRID = "grid"
    USER = "user"


class _PointSet(ABC):
    """
    Base class for site generators.

    ``generate(n)`` returns an (n, m) array in [0,1)^m that depends only on the
    generator's parameters and n. Except for the grid, the first n sites of
    ``generate(N)`` equal ``generate(n)``.
    """

    kind = None

    def __init__(self, m, *args, **kwargs):
        m = int(m)
        if m < 1:
            raise DomainError(f"dimension m must be >= 1, got {m}")
        self.m = m
        self.setup(*args, **kwargs)

    @abstractmethod
    def sample(self, n):
        pass

    @abstractmethod
    def setup(self, *args, **kwargs):
        pass

    def generate(self, n):
        n = int(n)
        if n < 1:
            raise DomainError(f"number of sites must be >= 1, got {n}")
        points = wrap_array(self.sample(n))
        _log.debug(f"generated {n} {self.kind.value} sites in m={self.m}")
        return self._separate_collisions(points)

    def _separate_collisions(self, points):
        pairs = find_duplicates(points, _COLLISION_TOL)
        if not pairs:
            return points
        moved = sorted({j for _, j in pairs})
        warnings.warn(
            f"{self.kind.value} generator produced {len(pairs)} colliding site pairs; "
            f"perturbing sites {moved[:10]}"
        )
        rng = np.random.default_rng(points.shape[0])
        for j in moved:
            points[j] = wrap_array(points[j] + _NUDGE * (1.0 + rng.random(self.m)))
        return points


class UniformRandomPointSet(_PointSet):
    "Independent uniform sites from :func:`numpy.random.default_rng`."
    kind = PointSetKind.UNIFORM_RANDOM

    def setup(self, seed=0):
        self.seed = seed

    def sample(self, n):
        return np.random.default_rng(self.seed).random((n, self.m))


class HaltonPointSet(_PointSet):
    "Unscrambled Halton sequence from :class:`scipy.stats.qmc.Halton`."
    kind = PointSetKind.HALTON

    def setup(self):
        pass

    def sample(self, n):
        return qmc.Halton(d=self.m, scramble=False).random(n)


def generalized_golden_ratio(m):
    "The positive root of x^(m+1) = x + 1 (the golden ratio for m = 1)."
    phi = 2.0
    for _ in range(200):
        phi = (1.0 + phi) ** (1.0 / (m + 1))
    return phi


class KroneckerPointSet(_PointSet):
    """
    Kronecker sequence x_j = frac(j alpha), j = 1, 2, ...

    ``alpha`` defaults to (1/phi_m, 1/phi_m^2, ...) with phi_m the generalized
    golden ratio, which for m = 1 is the golden-ratio rotation.
    """

    kind = PointSetKind.KRONECKER

    def setup(self, alpha=None):
        if alpha is None:
            phi = generalized_golden_ratio(self.m)
            alpha = [phi ** -(i + 1) for i in range(self.m)]
        alpha = np.asarray(alpha, dtype=float).reshape(-1)
        if alpha.shape[0] != self.m:
            raise DomainError(f"alpha has {alpha.shape[0]} entries but m={self.m}")
        self.alpha = alpha

    def sample(self, n):
        j = np.arange(1, n + 1, dtype=float)[:, np.newaxis]
        return j * self.alpha


class GridPointSet(_PointSet):
    """
    Uniform tensor grid {(j + offset)/r}; in m > 1 dimensions n must equal r^m.
    ``offset=0.5`` gives the centred grid. Grids for different n are not nested.
    """

    kind = PointSetKind.GRID

    def setup(self, offset=0.0):
        if not (0.0 <= offset < 1.0):
            raise DomainError(f"grid offset must lie in [0,1), got {offset}")
        self.offset = offset

    def sample(self, n):
        r = int(round(n ** (1.0 / self.m)))
        if r**self.m != n:
            raise InputError(f"a grid in m={self.m} needs n = r^{self.m}, got n={n}")
        return grid_nodes((r,) * self.m) + self.offset / r


class PredeterminedPointSet(_PointSet):
    """
    Sites given up front, e.g. read from a data file; ``generate(n)`` returns
    the first n of them.
    """

    kind = PointSetKind.USER

    def setup(self, points):
        self.points = wrap_array(as_points(points, self.m))

    def sample(self, n):
        if n > self.points.shape[0]:
            raise InputError(
                f"requested {n} sites but only {self.points.shape[0]} were supplied"
            )
        return self.points[:n].copy()


_POINT_SETS = {
    PointSetKind.UNIFORM_RANDOM: UniformRandomPointSet,
    PointSetKind.HALTON: HaltonPointSet,
    PointSetKind.KRONECKER: KroneckerPointSet,
    PointSetKind.GRID: GridPointSet,
    PointSetKind.USER: PredeterminedPointSet,
}


def create_point_set(kind, m, **kwargs):
    """
    Build the generator for ``kind`` (a PointSetKind or its value, e.g.
    ``"halton"``). Keyword arguments go to the generator's ``setup``.
    """
    try:
        kind = PointSetKind(kind)
    except ValueError:
        known = ", ".join(k.value for k in PointSetKind)
        raise DomainError(f"unknown point set kind {kind!r}; expected one of {known}")
    return _POINT_SETS[kind](m, **kwargs)


def generate(kind, n, m, **kwargs):
    "n sites of the given kind in [0,1)^m as an (n, m) array."
    return create_point_set(kind, m, **kwargs).generate(n)
