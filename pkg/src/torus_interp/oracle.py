#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Coefficient-space ground truth for the representer solver.

Functions of TP_omega are held as real amplitudes over the half-space of the
box plus the zero mode,

    u(x) = zero + sum_{l in half} cos[l] cos(2 pi l.x) + sin[l] sin(2 pi l.x),

which is the complex series with u_hat(l) = (cos[l] - i sin[l]) / 2 and
u_hat(-l) its conjugate. The k-seminorm used here is
sum_l ||l||_2k^2k |u_hat(l)|^2, i.e. without (2 pi)^2k factors, matching the
kernel denominators 1 + lam ||l||_2k^2k.
"""

import math

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

import idaes.logger as idaeslog

from pyomo.common.config import ConfigDict, ConfigValue

from torus_interp.exceptions import (
    DomainError,
    NumericalError,
    RangeError,
    UnsupportedError,
)
from torus_interp.kernel import trig_series
from torus_interp.solver import FittedModel, ScatteredData
from torus_interp.torus import (
    FrequencyBound,
    TorusPoint,
    as_points,
    box_count,
    enumerate_box,
    half_box,
    norm_2k,
    wrap_array,
)

_log = idaeslog.getLogger(__name__)


def _as_bound(omega):
    return omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)


def _half_positions(indices, omega):
    "Positions of half-space ``indices`` within the half-space order of ``omega``."
    shape = omega.shape
    flat = np.ravel_multi_index(
        tuple((indices + np.asarray(omega.omega)).T), shape
    )
    return flat - (box_count(omega) - 1) // 2 - 1


@dataclass(frozen=True, eq=False)
class CoeffVector:
    "A real trigonometric polynomial in TP_omega, stored by its real amplitudes."

    omega: FrequencyBound
    zero: float
    cos: np.ndarray = field(repr=False)
    sin: np.ndarray = field(repr=False)

    def __post_init__(self):
        omega = _as_bound(self.omega)
        n_half = (box_count(omega) - 1) // 2
        cos = np.asarray(self.cos, dtype=float).reshape(-1)
        sin = np.asarray(self.sin, dtype=float).reshape(-1)
        if cos.shape[0] != n_half or sin.shape[0] != n_half:
            raise DomainError(
                f"box {omega.omega} has {n_half} half-space modes, got "
                f"{cos.shape[0]} cosine and {sin.shape[0]} sine amplitudes"
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "zero", float(self.zero))
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "sin", sin)

    @classmethod
    def zeros(cls, omega):
        omega = _as_bound(omega)
        n_half = (box_count(omega) - 1) // 2
        return cls(omega, 0.0, np.zeros(n_half), np.zeros(n_half))

    @classmethod
    def from_complex(cls, omega, coeffs, tol=1e-12):
        """
        Build from complex coefficients indexed by ``enumerate_box(omega)``;
        they must satisfy coeff(-l) = conj(coeff(l)).
        """
        omega = _as_bound(omega)
        coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        count = box_count(omega)
        if coeffs.shape[0] != count:
            raise DomainError(f"box {omega.omega} needs {count} coefficients, got {coeffs.shape[0]}")
        mismatch = np.max(np.abs(coeffs - np.conj(coeffs[::-1])))
        if mismatch > tol * max(1.0, np.max(np.abs(coeffs))):
            raise DomainError(
                f"coefficients are not conjugate-symmetric (max mismatch {mismatch:.3e})"
            )
        center = (count - 1) // 2
        upper = coeffs[center + 1 :]
        return cls(omega, coeffs[center].real, 2.0 * upper.real, -2.0 * upper.imag)

    @classmethod
    def from_model(cls, model):
        "Amplitudes of a fitted representer over its own box."
        amplitudes = model.amplitudes
        return cls(model.bound, amplitudes.zero, amplitudes.cos, amplitudes.sin)

    @classmethod
    def random(cls, omega, rng, norm=1.0):
        "A random element of TP_omega with L2 norm ``norm``."
        omega = _as_bound(omega)
        n_half = (box_count(omega) - 1) // 2
        u = cls(
            omega,
            rng.standard_normal(),
            rng.standard_normal(n_half),
            rng.standard_normal(n_half),
        )
        return u.scaled(norm / math.sqrt(u.norm_sq()))

    def to_complex(self):
        "Complex coefficients in ``enumerate_box(omega)`` order."
        count = box_count(self.omega)
        center = (count - 1) // 2
        upper = 0.5 * (self.cos - 1j * self.sin)
        out = np.empty(count, dtype=complex)
        out[center] = self.zero
        out[center + 1 :] = upper
        out[:center] = np.conj(upper[::-1])
        return out

    def scaled(self, factor):
        return CoeffVector(self.omega, factor * self.zero, factor * self.cos, factor * self.sin)

    def restricted(self, omega):
        """
        The same function seen in TP_omega: modes outside ``omega`` are
        dropped (Fourier projection), missing ones are zero.
        """
        omega = _as_bound(omega)
        if omega.dim != self.omega.dim:
            raise DomainError(f"dimension mismatch: {omega.dim} vs {self.omega.dim}")
        target = CoeffVector.zeros(omega)
        indices = half_box(omega)
        inside = np.all(np.abs(indices) <= np.asarray(self.omega.omega), axis=1)
        source = _half_positions(indices[inside], self.omega)
        target.cos[inside] = self.cos[source]
        target.sin[inside] = self.sin[source]
        return CoeffVector(omega, self.zero, target.cos, target.sin)

    def _aligned(self, other):
        if other.omega == self.omega:
            return self, other
        joint = FrequencyBound(tuple(max(a, b) for a, b in zip(self.omega.omega, other.omega.omega)))
        return self.restricted(joint), other.restricted(joint)

    def __add__(self, other):
        a, b = self._aligned(other)
        return CoeffVector(a.omega, a.zero + b.zero, a.cos + b.cos, a.sin + b.sin)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def norm_sq(self):
        "||u||^2 = sum |u_hat(l)|^2 by Parseval."
        return math.fsum(
            [self.zero**2, 0.5 * math.fsum(self.cos**2), 0.5 * math.fsum(self.sin**2)]
        )

    def seminorm_sq(self, k):
        "sum_l ||l||_2k^2k |u_hat(l)|^2."
        if self.cos.size == 0:
            return 0.0
        weights = norm_2k(half_box(self.omega), k)
        return 0.5 * math.fsum(weights * (self.cos**2 + self.sin**2))

    def evaluate(self, x):
        pts = wrap_array(as_points(x, self.omega.dim))
        values = trig_series(pts, self.omega, self.zero, self.cos, self.sin)
        if isinstance(x, TorusPoint):
            return float(values[0])
        return values


def _as_coeff_vector(u):
    if isinstance(u, CoeffVector):
        return u
    if isinstance(u, FittedModel):
        return CoeffVector.from_model(u)
    raise DomainError(f"cannot take the functional of {type(u).__name__}")


def functional_value(u, data, lam, k):
    """
    D(u) = (lam^2/n) sum_i (u(p_i) - q_i)^2 + lam ||grad^k u||^2 + ||u||^2.

    Arguments:
        u : CoeffVector or FittedModel
        data : ScatteredData, or None to drop the data term
        lam : regularization weight
        k : smoothness order
    """
    u = _as_coeff_vector(u)
    parts = [lam * u.seminorm_sq(k), u.norm_sq()]
    if data is not None:
        misfit = u.evaluate(data.points) - data.values
        parts.append(lam**2 / data.n * math.fsum(misfit**2))
    return math.fsum(parts)


class DirectMinimizer:
    CONFIG = ConfigDict()

    CONFIG.declare(
        "max_modes",
        ConfigValue(
            default=100_000,
            domain=int,
            description="Largest box size prod(2 omega_i + 1) the normal equations are formed for.",
        ),
    )

    CONFIG.declare(
        "gradient_tol",
        ConfigValue(
            default=1e-8,
            domain=float,
            description="Relative gradient norm the minimiser must reach.",
        ),
    )

    def __init__(self, **options):
        self.config = self.CONFIG(options)

    def design_matrix(self, points, omega):
        "Columns [1, cos(2 pi l.p), sin(2 pi l.p)] over the half-space of ``omega``."
        indices = half_box(omega).astype(float)
        t = points @ indices.T
        t = t - np.rint(t)
        return np.hstack(
            [np.ones((points.shape[0], 1)), np.cos(2.0 * np.pi * t), np.sin(2.0 * np.pi * t)]
        )

    def minimize(self, data, lam, k, omega):
        """
        Unique minimiser of the functional over TP_omega, from the normal
        equations (D + (lam^2/n) Phi^T Phi) a = (lam^2/n) Phi^T q.
        """
        omega = _as_bound(omega)
        if not isinstance(data, ScatteredData):
            raise DomainError("direct_minimize expects a ScatteredData instance")
        if omega.dim != data.m:
            raise DomainError(f"omega has {omega.dim} axes but the data has m={data.m}")
        count = box_count(omega)
        if count > self.config.max_modes:
            raise RangeError(
                f"box {omega.omega} has {count} modes (> max_modes={self.config.max_modes})"
            )

        n_half = (count - 1) // 2
        reg = 1.0 + lam * norm_2k(half_box(omega), k) if n_half else np.zeros(0)
        diagonal = np.concatenate([[1.0], 0.5 * reg, 0.5 * reg])
        phi = self.design_matrix(data.points, omega)
        scale = lam**2 / data.n
        normal = np.diag(diagonal) + scale * (phi.T @ phi)
        rhs = scale * (phi.T @ data.values)

        try:
            a = scipy.linalg.solve(normal, rhs, assume_a="pos")
        except scipy.linalg.LinAlgError as err:
            raise NumericalError(f"normal equations could not be solved: {err}") from err

        gradient = float(np.max(np.abs(normal @ a - rhs)))
        reference = float(np.max(np.abs(rhs)))
        if gradient > self.config.gradient_tol * reference:
            raise NumericalError(
                f"direct minimiser gradient {gradient:.3e} exceeds "
                f"{self.config.gradient_tol:g} relative to {reference:.3e}"
            )
        _log.debug(f"direct minimisation over {count} modes, gradient {gradient:.3e}")
        return CoeffVector(omega, a[0], a[1 : 1 + n_half], a[1 + n_half :])


def direct_minimize(data, lam, k, omega, **options):
    return DirectMinimizer(**options).minimize(data, lam, k, omega)


def project_target(target, omega):
    "Fourier projection P_omega of a target with closed-form coefficients."
    omega = _as_bound(omega)
    if not getattr(target, "has_coefficients", False):
        raise UnsupportedError(f"target {target.name!r} has no closed-form Fourier coefficients")
    if omega.dim != target.m:
        raise DomainError(f"omega has {omega.dim} axes but target {target.name!r} has m={target.m}")
    return CoeffVector.from_complex(omega, target.coefficients(enumerate_box(omega)))
