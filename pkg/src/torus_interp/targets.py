#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Test functions of bounded variation on the torus with closed-form Fourier
coefficients, variation and norms.

Jump points take the midpoint of the one-sided limits. Total variation is
per period in 1-D and in the Vitali sense in 2-D.
"""

import math

from abc import ABC, abstractmethod

import numpy as np

from scipy.special import zeta as hurwitz_zeta

import idaes.logger as idaeslog

from torus_interp.exceptions import DomainError, UnsupportedError
from torus_interp.solver import ScatteredData
from torus_interp.torus import (
    FrequencyBound,
    TorusPoint,
    as_points,
    enumerate_box,
    grid_nodes,
    grid_shape,
    norm_2k,
    wrap_array,
)

_log = idaeslog.getLogger(__name__)

DISCONTINUITY_TOL = 1e-9
NUDGE = 1e-6


def _as_bound(omega):
    return omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)


def _periodic_gap(x, c):
    d = np.abs(wrap_array(x - c))
    return np.minimum(d, 1.0 - d)


def _odd_tail(exponent, omega):
    "sum over odd l > omega of l^-exponent."
    first = omega + 1 if omega % 2 == 0 else omega + 2
    return float(hurwitz_zeta(exponent, first / 2.0)) / 2.0**exponent


class _Target(ABC):
    "Base class for registry targets."

    name = None
    m = 1
    total_variation = None
    l2_norm_sq = None
    has_coefficients = True
    discontinuity_set = "none"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        pts = wrap_array(as_points(x, self.m))
        values = self._evaluate(pts)
        if isinstance(x, TorusPoint):
            return float(values[0])
        return values

    @abstractmethod
    def _evaluate(self, pts):
        pass

    @abstractmethod
    def coefficients(self, indices):
        "Complex Fourier coefficients at the integer rows of ``indices``."

    @property
    def integral(self):
        return float(self.coefficients(np.zeros((1, self.m), dtype=np.int64))[0].real)

    def distance_to_discontinuity(self, pts):
        return np.full(pts.shape[0], np.inf)

    def projection_tail(self, omega):
        """
        sum_{l outside omega} |psi_hat(l)|^2, from ||psi||^2 minus the box
        sum unless a subclass has a closed-form tail.
        """
        omega = _as_bound(omega)
        inside = np.abs(self.coefficients(enumerate_box(omega))) ** 2
        return max(0.0, self.l2_norm_sq - math.fsum(inside))

    def seminorm_sq(self, k):
        "sum_l ||l||_2k^2k |psi_hat(l)|^2 (inf when psi is not in the space)."
        return math.inf


class SquareWave(_Target):
    "sign(sin 2 pi x): +1 on (0, 1/2), -1 on (1/2, 1), 0 at the jumps."

    name = "square"
    total_variation = 4.0
    l2_norm_sq = 1.0
    discontinuity_set = "x in {0, 1/2}"

    def _evaluate(self, pts):
        x = pts[:, 0]
        return np.where(x == 0.0, 0.0, np.where(x < 0.5, 1.0, np.where(x == 0.5, 0.0, -1.0)))

    def coefficients(self, indices):
        l = np.asarray(indices, dtype=np.int64)[:, 0]
        out = np.zeros(l.shape[0], dtype=complex)
        odd = l % 2 != 0
        out[odd] = -2j / (np.pi * l[odd])
        return out

    def distance_to_discontinuity(self, pts):
        x = pts[:, 0]
        return np.minimum(_periodic_gap(x, 0.0), _periodic_gap(x, 0.5))

    def projection_tail(self, omega):
        w = _as_bound(omega).omega[0]
        return 2.0 * (4.0 / np.pi**2) * _odd_tail(2, w)


class Sawtooth(_Target):
    "x - 1/2 on (0, 1), 0 at the jump x = 0."

    name = "sawtooth"
    total_variation = 2.0
    l2_norm_sq = 1.0 / 12.0
    discontinuity_set = "x = 0"

    def _evaluate(self, pts):
        x = pts[:, 0]
        return np.where(x == 0.0, 0.0, x - 0.5)

    def coefficients(self, indices):
        l = np.asarray(indices, dtype=np.int64)[:, 0]
        out = np.zeros(l.shape[0], dtype=complex)
        nonzero = l != 0
        out[nonzero] = 1j / (2.0 * np.pi * l[nonzero])
        return out

    def distance_to_discontinuity(self, pts):
        return _periodic_gap(pts[:, 0], 0.0)

    def projection_tail(self, omega):
        w = _as_bound(omega).omega[0]
        return float(hurwitz_zeta(2, w + 1)) / (2.0 * np.pi**2)


class HatWave(_Target):
    "1 - 4|x - 1/2|: continuous, -1 at x = 0 and +1 at x = 1/2."

    name = "hat"
    total_variation = 4.0
    l2_norm_sq = 1.0 / 3.0

    def _evaluate(self, pts):
        return 1.0 - 4.0 * np.abs(pts[:, 0] - 0.5)

    def coefficients(self, indices):
        l = np.asarray(indices, dtype=np.int64)[:, 0]
        out = np.zeros(l.shape[0], dtype=complex)
        odd = l % 2 != 0
        out[odd] = -4.0 / (np.pi**2 * l[odd].astype(float) ** 2)
        return out

    def projection_tail(self, omega):
        w = _as_bound(omega).omega[0]
        return 2.0 * (16.0 / np.pi**4) * _odd_tail(4, w)

    def seminorm_sq(self, k):
        if k == 1:
            # 2 * (16/pi^4) * sum_{odd l > 0} l^-2
            return 4.0 / np.pi**2
        return math.inf


class SmoothTrigPolynomial(_Target):
    "1 + cos(2 pi x) + cos(4 pi x)/2, a member of TP_2."

    name = "smooth_tp"
    total_variation = 5.0
    l2_norm_sq = 1.625
    degree = FrequencyBound((2,))
    _coeffs = {0: 1.0, 1: 0.5, 2: 0.25}

    def _evaluate(self, pts):
        x = pts[:, 0]
        return 1.0 + np.cos(2.0 * np.pi * x) + 0.5 * np.cos(4.0 * np.pi * x)

    def coefficients(self, indices):
        l = np.abs(np.asarray(indices, dtype=np.int64)[:, 0])
        return np.array([self._coeffs.get(int(v), 0.0) for v in l], dtype=complex)

    def projection_tail(self, omega):
        w = _as_bound(omega).omega[0]
        return math.fsum(2.0 * c**2 for l, c in self._coeffs.items() if l > w)

    def seminorm_sq(self, k):
        return math.fsum(2.0 * float(l) ** (2 * k) * c**2 for l, c in self._coeffs.items())


class BoxIndicator(_Target):
    """
    Indicator of [a_1, b_1] x [a_2, b_2]; 1/2 on edges and 1/4 at corners.
    The Vitali variation of a box indicator is 4.
    """

    m = 2
    total_variation = 4.0

    def __init__(self, lower=(0.2, 0.3), upper=(0.7, 0.6), name="box"):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if not np.all((0.0 < self.lower) & (self.lower < self.upper) & (self.upper < 1.0)):
            raise DomainError(f"box must satisfy 0 < lower < upper < 1, got {lower}, {upper}")
        self.name = name
        self.l2_norm_sq = float(np.prod(self.upper - self.lower))
        self.discontinuity_set = f"boundary of {tuple(lower)} x {tuple(upper)}"

    def _evaluate(self, pts):
        inside = np.where(
            (pts > self.lower) & (pts < self.upper),
            1.0,
            np.where((pts == self.lower) | (pts == self.upper), 0.5, 0.0),
        )
        return np.prod(inside, axis=1)

    def coefficients(self, indices):
        l = np.asarray(indices, dtype=np.int64).astype(float)
        out = np.ones(l.shape[0], dtype=complex)
        for axis in range(self.m):
            a, b = self.lower[axis], self.upper[axis]
            la = l[:, axis]
            factor = np.full(la.shape[0], b - a, dtype=complex)
            nz = la != 0
            factor[nz] = (np.exp(-2j * np.pi * la[nz] * a) - np.exp(-2j * np.pi * la[nz] * b)) / (
                2j * np.pi * la[nz]
            )
            out *= factor
        return out

    def distance_to_discontinuity(self, pts):
        outside = np.maximum(np.maximum(self.lower - pts, pts - self.upper), 0.0)
        outer = np.sqrt(np.sum(outside**2, axis=1))
        inner = np.min(np.minimum(pts - self.lower, self.upper - pts), axis=1)
        return np.where(outer > 0.0, outer, np.abs(inner))


class ConstantTarget(_Target):
    "A constant function; zero variation, so it is kept out of the registry."

    total_variation = 0.0
    discontinuity_set = "none"

    def __init__(self, value=1.0, m=1):
        self.value = float(value)
        self.m = int(m)
        self.name = f"constant_{self.value:g}"
        self.l2_norm_sq = self.value**2

    def _evaluate(self, pts):
        return np.full(pts.shape[0], self.value)

    def coefficients(self, indices):
        l = np.asarray(indices, dtype=np.int64)
        return np.where(np.all(l == 0, axis=1), self.value, 0.0).astype(complex)

    def projection_tail(self, omega):
        return 0.0

    def seminorm_sq(self, k):
        return 0.0


def registry():
    "The built-in targets."
    return [SquareWave(), Sawtooth(), BoxIndicator(), SmoothTrigPolynomial(), HatWave()]


def get_target(name):
    for target in registry():
        if target.name == name:
            return target
    known = ", ".join(t.name for t in registry())
    raise DomainError(f"unknown target {name!r}; expected one of {known}")


def sample(target, points):
    """
    Evaluate ``target`` at the sites; sites within 1e-9 of a discontinuity are
    moved by +1e-6 in every coordinate first.
    """
    pts = wrap_array(as_points(points, target.m)).copy()
    near = target.distance_to_discontinuity(pts) < DISCONTINUITY_TOL
    if np.any(near):
        moved = np.flatnonzero(near)
        pts[near] = wrap_array(pts[near] + NUDGE)
        _log.warning(
            f"{moved.size} sites lie on the discontinuities of {target.name!r} "
            f"({target.discontinuity_set}); nudged sites {moved[:10].tolist()} by {NUDGE:g}"
        )
    return ScatteredData(points=pts, values=target.evaluate(pts))


def projection_error(target, omega):
    "||P_omega psi - psi||^2."
    if not target.has_coefficients:
        raise UnsupportedError(f"target {target.name!r} has no closed-form Fourier coefficients")
    omega = _as_bound(omega)
    if omega.dim != target.m:
        raise DomainError(f"omega has {omega.dim} axes but target {target.name!r} has m={target.m}")
    return target.projection_tail(omega)


def sobolev_seminorm_sq(target, k, omega=None):
    """
    sum_l ||l||_2k^2k |psi_hat(l)|^2 over all of Z^m, or over the box ``omega``
    (the seminorm of P_omega psi) when given.
    """
    if omega is None:
        return target.seminorm_sq(k)
    indices = enumerate_box(_as_bound(omega))
    weights = norm_2k(indices, k)
    return math.fsum(weights * np.abs(target.coefficients(indices)) ** 2)


def quadrature_l2_norm_sq(target, resolution):
    "||psi||^2 by the periodic rectangle rule on the grid {j/res}."
    shape = grid_shape(resolution, target.m)
    values = target.evaluate(grid_nodes(shape))
    return math.fsum(values**2) / values.shape[0]
