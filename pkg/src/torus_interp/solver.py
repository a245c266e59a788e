#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Representer solver for the regularized fitting problem.

Given sites p_i with values q_i, the minimiser of

    (lam^2/n) sum_i (u(p_i) - q_i)^2 + lam ||grad^k u||^2 + ||u||^2

is u(x) = sum_i (c_i/n) kernel(x - p_i) where c solves (W/n + I/lam^2) c = q
and W = [kernel(p_i - p_j)].
"""

import math

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from scipy.spatial import cKDTree

import idaes.logger as idaeslog

from pyomo.common.config import ConfigDict, ConfigValue

from torus_interp.exceptions import (
    DomainError,
    InputError,
    NumericalError,
    RangeError,
)
from torus_interp.kernel import (
    KernelSpec,
    TruncationPolicy,
    fourier_weights,
    kernel_gram,
    site_moments,
    tail_bound,
    trig_series,
)
from torus_interp.torus import (
    FrequencyBound,
    TorusPoint,
    as_points,
    grid_nodes,
    grid_shape,
    half_box,
    wrap_array,
)

_log = idaeslog.getLogger(__name__)

DEFAULT_EIGEN_RADIUS = 1024


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScatteredData:
    """
    Sites p_i (stored wrapped into [0,1)^m) and the values q_i observed there.
    Distinctness is checked by the solver, which owns the tolerance.
    """

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = wrap_array(as_points(self.points))
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if pts.shape[0] < 1:
            raise InputError("scattered data needs at least one site")
        if pts.shape[0] != vals.shape[0]:
            raise InputError(
                f"{pts.shape[0]} sites but {vals.shape[0]} values were given"
            )
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise InputError(
                f"non-finite values at sites {bad.tolist()}", indices=bad.tolist()
            )
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """
    W = [kernel(p_i - p_j)] for the sites ``points``, together with the box
    ``bound`` the kernel was summed over (omega, or the resolved cube of the
    full kernel).
    """

    entries: np.ndarray
    spec: KernelSpec
    points: np.ndarray
    bound: FrequencyBound

    @property
    def n(self):
        return self.entries.shape[0]

    def system_matrix(self):
        "M = W/n + I/lam^2."
        return self.entries / self.n + np.eye(self.n) / self.spec.lam**2


@dataclass(frozen=True)
class ModelAmplitudes:
    """
    Real Fourier amplitudes of a fitted model over the half-space of its box:
    u(x) = zero + sum_l cos[l] cos(2 pi l.x) + sin[l] sin(2 pi l.x).
    """

    zero: float
    cos: np.ndarray = field(repr=False)
    sin: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class FittedModel:
    """
    The representer u(x) = sum_i (c_i/n) kernel(x - p_i).

    ``values`` keeps the data the model was fitted to (None for a model
    loaded without them).
    """

    points: np.ndarray
    coeffs: np.ndarray
    spec: KernelSpec
    bound: FrequencyBound
    values: np.ndarray = None

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.spec.m

    @property
    def truncation_radius(self):
        "Cube radius used for a full-kernel model; None for a truncated one."
        if self.spec.is_truncated:
            return None
        return max(self.bound.omega)

    @cached_property
    def amplitudes(self):
        weights = self.coeffs / self.n
        total, cos_sums, sin_sums = site_moments(self.points, weights, self.bound)
        half_weights = 2.0 * fourier_weights(half_box(self.bound), self.spec)
        return ModelAmplitudes(
            zero=total, cos=half_weights * cos_sums, sin=half_weights * sin_sums
        )


@dataclass(frozen=True)
class ConditionDiagnostics:
    """
    Spectral condition number of M = W/n + I/lam^2 and its a-priori bounds.

    ``kappa_bound`` is 1 + lam^2 kernel(0) (plus the certified tail for the
    full kernel); ``kappa_trace_bound`` is the tighter 1 + lam^2 rho_max(W/n).
    """

    kappa_measured: float
    kappa_bound: float
    kappa_trace_bound: float
    min_eigenvalue: float
    max_eigenvalue: float
    lam: float

    def bound_holds(self, rel_tol=1e-12):
        return self.kappa_measured <= self.kappa_bound * (1.0 + rel_tol)


@dataclass(frozen=True)
class EigenTable:
    """
    Eigenvalues of the full-kernel matrix G = [g(p_i - p_j)], one row per
    lambda, each row sorted in descending order.
    """

    lambdas: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[1]

    def leading_gap(self):
        "|rho_1 - n| * lambda for each lambda."
        return np.abs(self.eigenvalues[:, 0] - self.n) * self.lambdas

    def scaled_tail(self):
        "lambda * rho_l for l > 1, shape (len(lambdas), n - 1)."
        return self.eigenvalues[:, 1:] * self.lambdas[:, np.newaxis]


class RegularizedSolver:
    CONFIG = ConfigDict()

    CONFIG.declare(
        "max_sites",
        ConfigValue(
            default=4096,
            domain=int,
            description="Largest number of sites accepted by the dense solver.",
        ),
    )

    CONFIG.declare(
        "lambda_min",
        ConfigValue(
            default=1e-6,
            domain=float,
            description="Smallest admissible regularization weight lambda.",
        ),
    )

    CONFIG.declare(
        "lambda_max",
        ConfigValue(
            default=1e12,
            domain=float,
            description="Largest admissible regularization weight lambda.",
        ),
    )

    CONFIG.declare(
        "duplicate_tol",
        ConfigValue(
            default=1e-12,
            domain=float,
            description="Sites closer than this (periodic distance) are rejected as duplicates.",
        ),
    )

    CONFIG.declare(
        "residual_tol",
        ConfigValue(
            default=1e-9,
            domain=float,
            description="Relative infinity-norm residual allowed after the linear solve.",
        ),
    )

    CONFIG.declare(
        "indefinite_fallback",
        ConfigValue(
            default=False,
            domain=bool,
            description="Solve with symmetric indefinite pivoting when Cholesky fails instead of raising.",
        ),
    )

    CONFIG.declare(
        "max_grid_points",
        ConfigValue(
            default=2**26,
            domain=int,
            description="Largest number of nodes evaluate_grid may produce.",
        ),
    )

    CONFIG.declare(
        "chunk_elements",
        ConfigValue(
            default=2**22,
            domain=int,
            description="Number of (site, frequency) pairs processed per chunk.",
        ),
    )

    def __init__(self, **options):
        self.config = self.CONFIG(options)

    def _check_lambda(self, lam):
        if not (self.config.lambda_min <= lam <= self.config.lambda_max):
            raise DomainError(
                f"lambda={lam:g} is outside the admissible range "
                f"[{self.config.lambda_min:g}, {self.config.lambda_max:g}]"
            )

    def _check_sites(self, points, spec):
        if isinstance(points, ScatteredData):
            points = points.points
        pts = wrap_array(as_points(points, spec.m))
        n = pts.shape[0]
        if n < 1:
            raise InputError("at least one site is required")
        if n > self.config.max_sites:
            raise RangeError(
                f"{n} sites exceed the dense solver limit max_sites={self.config.max_sites}"
            )
        pairs = find_duplicates(pts, self.config.duplicate_tol)
        if pairs:
            shown = ", ".join(f"({i}, {j})" for i, j in pairs[:10])
            raise InputError(
                f"duplicate sites (periodic distance < {self.config.duplicate_tol:g}): {shown}",
                indices=pairs,
            )
        return pts

    def assemble(self, points, spec):
        """
        Build the kernel matrix W for ``points``.

        Arguments:
            points : ScatteredData, sequence of TorusPoint or (n, m) array
            spec : KernelSpec selecting w_lambda (omega set) or g_lambda
        """
        self._check_lambda(spec.lam)
        pts = self._check_sites(points, spec)
        bound = spec.index_bound()
        entries = kernel_gram(
            pts, spec, bound=bound, chunk_elements=self.config.chunk_elements
        )
        return KernelMatrix(
            entries=_frozen(entries), spec=spec, points=_frozen(pts), bound=bound
        )

    @staticmethod
    def _smallest_pivot(system):
        try:
            _, d, _ = scipy.linalg.ldl(system)
            return float(np.min(scipy.linalg.eigvalsh(d)))
        except (scipy.linalg.LinAlgError, ValueError):
            return float("nan")

    def solve(self, matrix, values):
        "Coefficients c of (W/n + I/lam^2) c = values."
        system = matrix.system_matrix()
        rhs = np.asarray(values, dtype=float).reshape(-1)
        if rhs.shape[0] != matrix.n:
            raise InputError(f"{matrix.n} sites but {rhs.shape[0]} values")

        try:
            factor = scipy.linalg.cho_factor(system, lower=True)
            coeffs = scipy.linalg.cho_solve(factor, rhs)
            _log.debug(f"Cholesky solve of the {matrix.n}x{matrix.n} system")
        except scipy.linalg.LinAlgError:
            pivot = self._smallest_pivot(system)
            if not self.config.indefinite_fallback:
                raise NumericalError(
                    f"Cholesky factorization failed (lambda={matrix.spec.lam:g}, "
                    f"smallest pivot {pivot:.3e}); extreme lambda or near-duplicate sites",
                    smallest_pivot=pivot,
                )
            _log.warning(
                f"Cholesky factorization failed (smallest pivot {pivot:.3e}); "
                "falling back to symmetric indefinite solve"
            )
            coeffs = scipy.linalg.solve(system, rhs, assume_a="sym")

        residual = float(np.max(np.abs(system @ coeffs - rhs)))
        scale = float(np.max(np.abs(rhs)))
        if residual > self.config.residual_tol * scale:
            raise NumericalError(
                f"linear solve residual {residual:.3e} exceeds "
                f"{self.config.residual_tol:g} * ||q||_inf = {self.config.residual_tol * scale:.3e}"
            )
        return coeffs

    def fit(self, data, spec):
        "Fit the representer to ``data`` (ScatteredData) with kernel ``spec``."
        if not isinstance(data, ScatteredData):
            raise DomainError("fit expects a ScatteredData instance")
        return self.fit_assembled(self.assemble(data, spec), data)

    def fit_assembled(self, matrix, data):
        "Fit with an already assembled kernel matrix for the sites of ``data``."
        coeffs = self.solve(matrix, data.values)
        return FittedModel(
            points=matrix.points,
            coeffs=_frozen(coeffs),
            spec=matrix.spec,
            bound=matrix.bound,
            values=data.values,
        )

    def evaluate(self, model, x):
        """
        Value of ``model`` at ``x``: a float for a TorusPoint, an array for an
        (N, m) array or a sequence of points.
        """
        pts = wrap_array(as_points(x, model.m))
        amplitudes = model.amplitudes
        values = trig_series(
            pts,
            model.bound,
            amplitudes.zero,
            amplitudes.cos,
            amplitudes.sin,
            chunk_elements=self.config.chunk_elements,
        )
        if isinstance(x, TorusPoint):
            return float(values[0])
        return values

    def evaluate_grid(self, model, resolution):
        """
        Values at the tensor grid {j/res}; the returned array has shape
        ``res`` per axis, row-major (see torus.grid_nodes).
        """
        shape = grid_shape(resolution, model.m)
        total = math.prod(shape)
        if total > self.config.max_grid_points:
            raise RangeError(
                f"grid {shape} has {total} nodes (> max_grid_points={self.config.max_grid_points})"
            )
        return self.evaluate(model, grid_nodes(shape)).reshape(shape)

    def site_residuals(self, model):
        "u(p_i) - q_i at the fitted sites."
        if model.values is None:
            raise InputError("model carries no data values")
        return self.evaluate(model, model.points) - model.values

    def condition_diagnostics(self, matrix):
        system = matrix.system_matrix()
        try:
            mu = scipy.linalg.eigvalsh(system)
        except scipy.linalg.LinAlgError as err:
            raise NumericalError(f"symmetric eigensolver failed: {err}") from err

        lam = matrix.spec.lam
        mu_min, mu_max = float(mu[0]), float(mu[-1])
        rho_max = max(mu_max - 1.0 / lam**2, 0.0)
        kernel_zero = float(matrix.entries[0, 0])
        if matrix.spec.is_truncated:
            kappa_bound = 1.0 + lam**2 * kernel_zero
        else:
            radius = max(matrix.bound.omega)
            tail = tail_bound(radius, matrix.spec) if radius >= 1 else math.inf
            kappa_bound = 1.0 + lam**2 * (kernel_zero + tail)

        return ConditionDiagnostics(
            kappa_measured=mu_max / mu_min,
            kappa_bound=kappa_bound,
            kappa_trace_bound=1.0 + lam**2 * rho_max,
            min_eigenvalue=mu_min,
            max_eigenvalue=mu_max,
            lam=lam,
        )

    def eigen_diagnostics(self, points, k, lambda_list, truncation=None):
        """
        Eigenvalues of G = [g(p_i - p_j)] for each lambda of ``lambda_list``.

        Arguments:
            points : sites, (n, m) array or sequence of TorusPoint
            k : smoothness order
            lambda_list : strictly ascending lambdas, all > 1
            truncation (optional) : TruncationPolicy for g; defaults to a
                cube of radius 1024
        """
        lambdas = np.asarray(lambda_list, dtype=float).reshape(-1)
        if lambdas.size == 0 or np.any(lambdas <= 1.0):
            raise DomainError("lambda_list must be non-empty with every lambda > 1")
        if np.any(np.diff(lambdas) <= 0):
            raise DomainError("lambda_list must be strictly ascending")
        policy = (
            truncation
            if truncation is not None
            else TruncationPolicy(radius=DEFAULT_EIGEN_RADIUS)
        )
        pts = wrap_array(as_points(points))
        rows = []
        for lam in lambdas:
            self._check_lambda(lam)
            spec = KernelSpec(pts.shape[1], k, lam, truncation=policy)
            gram = kernel_gram(pts, spec, chunk_elements=self.config.chunk_elements)
            try:
                eigenvalues = scipy.linalg.eigvalsh(gram)
            except scipy.linalg.LinAlgError as err:
                raise NumericalError(f"symmetric eigensolver failed: {err}") from err
            rows.append(eigenvalues[::-1])
        return EigenTable(lambdas=lambdas, eigenvalues=np.vstack(rows))


def find_duplicates(points, tol):
    "Index pairs (i, j), i < j, of sites within periodic distance ``tol``."
    pts = wrap_array(as_points(points))
    if pts.shape[0] < 2:
        return []
    tree = cKDTree(pts, boxsize=1.0)
    return sorted(tree.query_pairs(r=tol))


def assemble(points, spec, **options):
    return RegularizedSolver(**options).assemble(points, spec)


def fit(data, spec, **options):
    return RegularizedSolver(**options).fit(data, spec)


def evaluate(model, x, **options):
    return RegularizedSolver(**options).evaluate(model, x)


def evaluate_grid(model, resolution, **options):
    return RegularizedSolver(**options).evaluate_grid(model, resolution)


def condition_diagnostics(matrix, **options):
    return RegularizedSolver(**options).condition_diagnostics(matrix)


def eigen_diagnostics(points, k, lambda_list, truncation=None, **options):
    return RegularizedSolver(**options).eigen_diagnostics(
        points, k, lambda_list, truncation=truncation
    )
