#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Reproducing kernels of the regularized fitting problem on the torus.

The full kernel is

    g(x) = sum_{l in Z^m} cos(2 pi l.x) / (1 + lam ||l||_2k^2k)

and the truncated kernel w = P_omega g keeps only the indices of the box
-omega <= l <= omega. The full kernel is evaluated on a cube ||l||_inf <= R
whose radius either is given or is the smallest one whose certified tail bound
meets a tolerance.

Kernels accept any real representative of a torus difference; nothing here
wraps its input, so evaluating at ``x`` and ``-x`` gives bit-identical
results.
"""

import math

from dataclasses import dataclass, field, replace

import numpy as np

import idaes.logger as idaeslog

from torus_interp.exceptions import DomainError, TruncationError
from torus_interp.torus import (
    FrequencyBound,
    TorusPoint,
    as_points,
    box_count,
    iter_half_box,
    norm_2k,
)

_log = idaeslog.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_TERMS = 20_000_000
DEFAULT_CHUNK_ELEMENTS = 2**22


@dataclass(frozen=True)
class TruncationPolicy:
    """
    How the infinite series of the full kernel is cut.

    Give either ``radius`` (explicit cube bound R) or ``tol`` (smallest R whose
    tail bound is <= tol). ``max_terms`` caps the number of cube entries that an
    auto-selected radius may use.
    """

    radius: int = None
    tol: float = None
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if self.radius is not None and self.tol is not None:
            raise DomainError("TruncationPolicy takes either radius or tol, not both")
        if self.radius is None and self.tol is None:
            object.__setattr__(self, "tol", DEFAULT_TOL)
        if self.radius is not None:
            if int(self.radius) < 0:
                raise DomainError(f"truncation radius must be >= 0, got {self.radius}")
            object.__setattr__(self, "radius", int(self.radius))
        if self.tol is not None and not (self.tol > 0):
            raise DomainError(f"truncation tol must be > 0, got {self.tol}")

    def max_radius(self, m):
        "Largest R with (2R+1)^m <= max_terms."
        side = int(math.floor(self.max_terms ** (1.0 / m) + 1e-9))
        while side**m > self.max_terms:
            side -= 1
        return max(0, (side - 1) // 2)


@dataclass(frozen=True)
class KernelSpec:
    """
    Parameters of a kernel: dimension m, smoothness k, weight lam and an
    optional frequency bound omega. With omega the kernel is the truncated
    w_lambda, without it the full g_lambda cut by ``truncation``.
    """

    m: int
    k: int
    lam: float
    omega: FrequencyBound = None
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "lam", float(self.lam))
        if self.m < 1:
            raise DomainError(f"dimension m must be >= 1, got {self.m}")
        if 2 * self.k <= self.m:
            raise DomainError(f"smoothness must satisfy k > m/2, got k={self.k}, m={self.m}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lambda must be a positive real, got {self.lam}")
        if self.omega is not None:
            omega = self.omega
            if not isinstance(omega, FrequencyBound):
                omega = FrequencyBound(omega)
            if omega.dim != self.m:
                raise DomainError(f"omega has {omega.dim} axes but m={self.m}")
            object.__setattr__(self, "omega", omega)

    @property
    def is_truncated(self):
        return self.omega is not None

    def with_lambda(self, lam):
        return replace(self, lam=lam)

    def with_omega(self, omega):
        return replace(self, omega=omega)

    def index_bound(self):
        "The box summed over: omega itself, or the resolved cube of the full kernel."
        if self.omega is not None:
            return self.omega
        return FrequencyBound.uniform(resolve_radius(self), self.m)


class _CompensatedSum:
    "Kahan accumulation of equally shaped float arrays, in call order."

    def __init__(self, shape):
        self.total = np.zeros(shape, dtype=float)
        self._carry = np.zeros(shape, dtype=float)

    def add(self, values):
        y = values - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t


def fourier_weights(indices, spec):
    "1 / (1 + lam ||l||_2k^2k) for each row of ``indices``."
    return 1.0 / (1.0 + spec.lam * norm_2k(indices, spec.k))


def _chunk_rows(n_points, chunk_elements):
    return max(1, int(chunk_elements) // max(1, n_points))


def _phase_cos_sin(x, indices, need_sin=False):
    t = x @ indices.T.astype(float)
    t = t - np.rint(t)
    if need_sin:
        return np.cos(2.0 * np.pi * t), np.sin(2.0 * np.pi * t)
    return np.cos(2.0 * np.pi * t), None


def cosine_series(x, omega, weight_fn, zero_weight, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    sum over the box ``omega`` of weight(l) cos(2 pi l.x) for each row of ``x``.

    The box is folded onto its half-space (the summand is even in l), so the
    result is ``zero_weight + 2 * sum_{l in half} weight(l) cos(2 pi l.x)``,
    accumulated chunk by chunk with compensated summation.
    """
    x = np.asarray(x, dtype=float)
    acc = _CompensatedSum(x.shape[0])
    acc.add(np.full(x.shape[0], float(zero_weight)))
    n_chunks = 0
    for indices in iter_half_box(omega, _chunk_rows(x.shape[0], chunk_elements)):
        cos_part, _ = _phase_cos_sin(x, indices)
        acc.add(2.0 * (cos_part @ weight_fn(indices)))
        n_chunks += 1
    _log.debug(f"cosine series over box {omega.omega}: {n_chunks} chunks")
    return acc.total


def cube_tail_bound(radius, m, exponent, scale=1.0):
    """
    Upper bound on sum_{||l||_inf > radius} scale / ||l||_2k^(exponent) style
    tails, where the summand is majorised by scale / ||l||_inf^exponent.

    Shells ||l||_inf = j hold (2j+1)^m - (2j-1)^m <= 2m (3j)^(m-1) indices, and
    the remaining sum over j > R is bounded by the integral from R.
    """
    radius = int(radius)
    if radius < 1:
        raise DomainError(f"tail bounds need radius >= 1, got {radius}")
    if exponent <= m:
        raise DomainError(f"series with exponent {exponent} <= m={m} does not converge")
    constant = 2.0 * m * 3.0 ** (m - 1)
    return scale * constant * float(radius) ** (m - exponent) / (exponent - m)


def tail_bound(radius, spec):
    "Certified bound on |g_lambda(x) - (cube-R truncated sum)|, uniform in x."
    return cube_tail_bound(radius, spec.m, 2 * spec.k, scale=1.0 / spec.lam)


def _smallest_radius(bound_fn, tol, max_radius):
    if bound_fn(1) <= tol:
        return 1
    if max_radius < 1 or bound_fn(max_radius) > tol:
        achieved = bound_fn(max(1, max_radius))
        raise TruncationError(
            f"truncation tolerance {tol:g} is unattainable within the term budget; "
            f"best achievable bound is {achieved:.3e} at radius {max_radius}",
            achieved_bound=achieved,
            radius=max_radius,
        )
    lo, hi = 1, max_radius
    # invariant: bound(lo) > tol >= bound(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound_fn(mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def resolve_radius(spec, truncation=None, exponent=None, scale=None):
    """
    Cube radius for a full-kernel style series.

    ``exponent``/``scale`` default to those of g_lambda (2k, 1/lam); the
    asymptotic series terms s_r pass their own.
    """
    policy = truncation if truncation is not None else spec.truncation
    if policy.radius is not None:
        return policy.radius
    exponent = 2 * spec.k if exponent is None else exponent
    scale = 1.0 / spec.lam if scale is None else scale
    radius = _smallest_radius(
        lambda r: cube_tail_bound(r, spec.m, exponent, scale),
        policy.tol,
        policy.max_radius(spec.m),
    )
    _log.debug(
        f"auto-selected truncation radius {radius} for tol={policy.tol:g} "
        f"(m={spec.m}, exponent={exponent})"
    )
    return radius


def _scalar_if_single(x, values):
    if isinstance(x, TorusPoint):
        return float(values[0])
    if isinstance(x, (list, tuple)) and len(x) > 0 and isinstance(x[0], TorusPoint):
        return values
    if np.ndim(x) <= 1 and values.size == 1:
        return float(values[0])
    return values


def _eval_on_box(x, spec, bound):
    pts = as_points(x, spec.m)
    values = cosine_series(
        pts, bound, lambda idx: fourier_weights(idx, spec), zero_weight=1.0
    )
    return _scalar_if_single(x, values)


def eval_g(x, spec):
    """
    Full kernel g_lambda at ``x`` (point or (N, m) array), truncated to the
    cube selected by ``spec.truncation``.
    """
    if spec.is_truncated:
        raise DomainError("eval_g takes a full-kernel spec (omega must be None)")
    bound = FrequencyBound.uniform(resolve_radius(spec), spec.m)
    return _eval_on_box(x, spec, bound)


def eval_w(x, spec):
    "Truncated kernel w_lambda = P_omega g_lambda at ``x``; an exact finite sum."
    if not spec.is_truncated:
        raise DomainError("eval_w needs a spec with omega")
    box_count(spec.omega)
    return _eval_on_box(x, spec, spec.omega)


def eval_kernel(x, spec):
    "w_lambda or g_lambda, whichever ``spec`` describes."
    return eval_w(x, spec) if spec.is_truncated else eval_g(x, spec)


def kernel_at_zero(spec):
    return float(eval_kernel(np.zeros((1, spec.m)), spec)[0])


def eval_dirichlet(x, omega):
    """
    Normalised Dirichlet kernel

        D_omega(x) = prod_i(omega_i + 1)^-1 sum_{0 <= r <= omega} cos(2 pi r.x)

    so that D_omega(0) = 1. The sum factorises as the real part of a product of
    one-dimensional geometric sums.
    """
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    if any(w < 1 for w in omega.omega):
        raise DomainError(f"Dirichlet kernel needs omega_i >= 1, got {omega.omega}")
    pts = as_points(x, omega.dim)
    product = np.ones(pts.shape[0], dtype=complex)
    for axis, w in enumerate(omega.omega):
        r = np.arange(w + 1, dtype=float)
        t = np.outer(pts[:, axis], r)
        t = t - np.rint(t)
        product = product * np.exp(2j * np.pi * t).sum(axis=1)
    values = product.real / math.prod(w + 1 for w in omega.omega)
    return _scalar_if_single(x, values)


def dirichlet_interpolant(x, points, values, omega):
    "Gamma(x) = sum_i q_i D_omega(x - p_i), the Dirichlet near-interpolant of the data."
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    pts = as_points(x, omega.dim)
    sites = as_points(points, omega.dim)
    q = np.asarray(values, dtype=float)
    out = np.zeros(pts.shape[0])
    for p_i, q_i in zip(sites, q):
        out += q_i * np.asarray(eval_dirichlet(pts - p_i, omega))
    return _scalar_if_single(x, out)


def eval_s_r(x, r, spec, truncation=None):
    """
    Term s_r(x) = sum_{l != 0} cos(2 pi l.x) / ||l||_2k^(2kr) of the large-lambda
    expansion of g_lambda, truncated with a certified tail (same policy
    semantics as eval_g; lam plays no role).
    """
    r = int(r)
    if r < 1:
        raise DomainError(f"series order r must be >= 1, got {r}")
    exponent = 2 * spec.k * r
    if exponent <= spec.m:
        raise DomainError(f"s_r diverges for 2kr={exponent} <= m={spec.m}")
    radius = resolve_radius(spec, truncation, exponent=exponent, scale=1.0)
    bound = FrequencyBound.uniform(radius, spec.m)
    pts = as_points(x, spec.m)
    values = cosine_series(
        pts, bound, lambda idx: norm_2k(idx, spec.k) ** (-r), zero_weight=0.0
    )
    return _scalar_if_single(x, values)


def asymptotic_g(x, spec, order, truncation=None):
    """
    Partial sum 1 + sum_{r=1}^{order} (-1)^(r+1) lam^-r s_r(x) of the expansion
    of g_lambda, valid for lam > 1.
    """
    if spec.lam <= 1.0:
        raise DomainError(f"the large-lambda expansion needs lam > 1, got {spec.lam}")
    order = int(order)
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    pts = as_points(x, spec.m)
    acc = _CompensatedSum(pts.shape[0])
    acc.add(np.ones(pts.shape[0]))
    for r in range(1, order + 1):
        term = np.asarray(eval_s_r(pts, r, spec, truncation), dtype=float)
        acc.add((-1.0) ** (r + 1) * spec.lam ** (-r) * term)
    return _scalar_if_single(x, acc.total)


def site_moments(points, weights, omega, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Sums sum_i v_i cos(2 pi l.p_i) and sum_i v_i sin(2 pi l.p_i) for every l in
    the half-space of ``omega`` (lexicographic order), plus sum_i v_i.
    """
    pts = np.asarray(points, dtype=float)
    v = np.asarray(weights, dtype=float)
    cos_parts, sin_parts = [], []
    for indices in iter_half_box(omega, _chunk_rows(pts.shape[0], chunk_elements)):
        c, s = _phase_cos_sin(pts, indices, need_sin=True)
        cos_parts.append(v @ c)
        sin_parts.append(v @ s)
    if cos_parts:
        return float(math.fsum(v)), np.concatenate(cos_parts), np.concatenate(sin_parts)
    return float(math.fsum(v)), np.zeros(0), np.zeros(0)


def trig_series(x, omega, zero, a_cos, a_sin, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Evaluate zero + sum_{l in half} a_cos[l] cos(2 pi l.x) + a_sin[l] sin(2 pi l.x)
    at the rows of ``x``; ``a_cos``/``a_sin`` follow the half-space order of
    ``omega``.
    """
    x = np.asarray(x, dtype=float)
    acc = _CompensatedSum(x.shape[0])
    acc.add(np.full(x.shape[0], float(zero)))
    offset = 0
    for indices in iter_half_box(omega, _chunk_rows(x.shape[0], chunk_elements)):
        stop = offset + indices.shape[0]
        c, s = _phase_cos_sin(x, indices, need_sin=True)
        acc.add(c @ a_cos[offset:stop] + s @ a_sin[offset:stop])
        offset = stop
    return acc.total


def kernel_gram(points, spec, bound=None, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Matrix [kernel(p_i - p_j)] over the sites ``points`` (N, m).

    The box sum is split over the half-space as
    1 + sum_l 2 w_l (cos_i cos_j + sin_i sin_j), one rank-update per chunk,
    so no pairwise differences are formed. The result is symmetrised and its
    diagonal set to kernel(0).
    """
    pts = as_points(points, spec.m)
    bound = spec.index_bound() if bound is None else bound
    n = pts.shape[0]
    acc = _CompensatedSum((n, n))
    acc.add(np.ones((n, n)))
    diagonal = _CompensatedSum(1)
    diagonal.add(np.ones(1))
    n_chunks = 0
    for indices in iter_half_box(bound, _chunk_rows(n, chunk_elements)):
        c, s = _phase_cos_sin(pts, indices, need_sin=True)
        weights = 2.0 * fourier_weights(indices, spec)
        acc.add((c * weights) @ c.T + (s * weights) @ s.T)
        diagonal.add(np.array([math.fsum(weights)]))
        n_chunks += 1
    _log.debug(f"assembled {n}x{n} kernel matrix over box {bound.omega} in {n_chunks} chunks")
    entries = 0.5 * (acc.total + acc.total.T)
    np.fill_diagonal(entries, diagonal.total[0])
    return entries
