#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Points on the unit torus [0,1)^m, integer frequency vectors and the index
boxes every kernel and coefficient sum runs over.

Index boxes are enumerated in lexicographic order (first axis slowest). Since
each box is symmetric about the origin, position ``i`` and position
``count - 1 - i`` hold ``l`` and ``-l``; the zero index sits in the middle and
the entries after it form a half-space (first non-zero entry positive).
"""

import math

from dataclasses import dataclass

import numpy as np

from torus_interp.exceptions import DomainError, RangeError

# largest exactly representable value we allow for sum_i l_i^(2k)
_NORM_LIMIT = 2**62
_COUNT_LIMIT = 2**63 - 1


@dataclass(frozen=True)
class TorusPoint:
    "A point of the torus stored by its canonical representative in [0,1)^m."

    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        for c in coords:
            if not (0.0 <= c < 1.0):
                raise DomainError(
                    f"TorusPoint coordinates must lie in [0,1), got {coords}; use wrap()"
                )
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self):
        return len(self.coords)

    def as_array(self):
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class MultiIndex:
    "An integer frequency vector l in Z^m."

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @property
    def dim(self):
        return len(self.entries)

    def __neg__(self):
        return MultiIndex(tuple(-e for e in self.entries))

    def as_array(self):
        return np.asarray(self.entries, dtype=np.int64)


@dataclass(frozen=True)
class FrequencyBound:
    "Per-axis degree bound omega of the trigonometric space TP_omega."

    omega: tuple

    def __post_init__(self):
        omega = tuple(int(w) for w in self.omega)
        if len(omega) == 0:
            raise DomainError("FrequencyBound needs at least one axis")
        if any(w < 0 for w in omega):
            raise DomainError(f"FrequencyBound entries must be >= 0, got {omega}")
        object.__setattr__(self, "omega", omega)

    @classmethod
    def uniform(cls, value, m):
        return cls((int(value),) * m)

    @property
    def dim(self):
        return len(self.omega)

    @property
    def shape(self):
        return tuple(2 * w + 1 for w in self.omega)

    @property
    def count(self):
        return box_count(self)

    def doubled(self):
        return FrequencyBound(tuple(2 * w for w in self.omega))


def as_points(x, m=None):
    """
    Coerce ``x`` (TorusPoint, sequence of TorusPoint, 1-D or 2-D array) to a
    float array of shape (N, m). Coordinates are *not* wrapped, so kernels can
    be fed any real representative of a torus difference.
    """
    if isinstance(x, TorusPoint):
        arr = x.as_array()[np.newaxis, :]
    elif isinstance(x, (list, tuple)) and len(x) > 0 and isinstance(x[0], TorusPoint):
        arr = np.array([p.coords for p in x], dtype=float)
    else:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1) if m is None or arr.size == m else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DomainError(f"expected points of shape (N, m), got shape {arr.shape}")
    if m is not None and arr.shape[1] != m:
        raise DomainError(f"dimension mismatch: expected m={m}, got m={arr.shape[1]}")
    return arr


def wrap_array(x):
    "Reduce every entry of ``x`` modulo 1 into [0,1)."
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("cannot wrap non-finite coordinates")
    out = x - np.floor(x)
    # tiny negatives round to exactly 1.0
    out[out >= 1.0] = 0.0
    return out


def wrap(x):
    "Canonical torus representative of the real vector ``x``."
    coords = np.atleast_1d(np.asarray(x, dtype=float))
    if coords.ndim != 1:
        raise DomainError("wrap() takes a single vector; use wrap_array() for batches")
    return TorusPoint(tuple(wrap_array(coords)))


def periodic_diff(a, b):
    "wrap(a - b) for two torus points of the same dimension."
    a = a if isinstance(a, TorusPoint) else wrap(a)
    b = b if isinstance(b, TorusPoint) else wrap(b)
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return wrap(a.as_array() - b.as_array())


def periodic_distance(a, b):
    """
    Euclidean distance on the torus between rows of ``a`` (N, m) and ``b`` (N, m)
    (broadcasting allowed).
    """
    d = np.abs(wrap_array(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


def _check_norm_range(max_abs, m, k):
    if m * int(max_abs) ** (2 * k) > _NORM_LIMIT:
        raise RangeError(
            f"||l||_2k^2k overflows the exact range for max |l_i|={max_abs}, k={k}, m={m}"
        )


def norm_2k(l, k):
    """
    ||l||_{2k}^{2k} = sum_i l_i^{2k}.

    ``l`` may be a MultiIndex, a single integer vector, or an integer array of
    shape (..., m); the result is a float (or float array) that is exact.
    """
    k = int(k)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if isinstance(l, MultiIndex):
        l = l.entries
    arr = np.asarray(l, dtype=np.int64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    m = arr.shape[-1] if arr.size else 1
    max_abs = int(np.max(np.abs(arr))) if arr.size else 0
    _check_norm_range(max_abs, m, k)
    result = np.sum(arr ** (2 * k), axis=-1).astype(float)
    if result.ndim == 0:
        return float(result)
    return result


def box_count(omega):
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    count = math.prod(omega.shape)
    if count > _COUNT_LIMIT:
        raise RangeError(f"index box {omega.omega} has {count} entries (> 2^63 - 1)")
    return count


def _rows(omega, start, stop):
    positions = np.arange(start, stop, dtype=np.int64)
    digits = np.unravel_index(positions, omega.shape)
    return np.stack(digits, axis=1).astype(np.int64) - np.asarray(
        omega.omega, dtype=np.int64
    )


def enumerate_box(omega):
    """
    All l with -omega <= l <= omega as an int64 array of shape (count, m), in
    lexicographic order.
    """
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    return _rows(omega, 0, box_count(omega))


def enumerate_cube(radius, m):
    "All l in Z^m with max_i |l_i| <= radius, lexicographic."
    radius = int(radius)
    if radius < 0:
        raise DomainError(f"cube radius must be >= 0, got {radius}")
    return enumerate_box(FrequencyBound.uniform(radius, int(m)))


def half_box(omega):
    "The half-space part of ``enumerate_box(omega)`` (rows after the zero index)."
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    count = box_count(omega)
    return _rows(omega, (count - 1) // 2 + 1, count)


def iter_half_box(omega, chunk_size):
    """
    Yield the half-space indices of ``omega`` in lexicographic chunks of at
    most ``chunk_size`` rows without materialising the whole box.
    """
    omega = omega if isinstance(omega, FrequencyBound) else FrequencyBound(omega)
    count = box_count(omega)
    chunk_size = max(1, int(chunk_size))
    for start in range((count - 1) // 2 + 1, count, chunk_size):
        yield _rows(omega, start, min(start + chunk_size, count))


def grid_shape(resolution, m):
    "Per-axis resolution of a uniform grid; an int applies to every axis."
    if np.ndim(resolution) == 0:
        shape = (int(resolution),) * int(m)
    else:
        shape = tuple(int(r) for r in resolution)
    if len(shape) != m:
        raise DomainError(f"grid resolution {shape} does not have m={m} axes")
    if any(r < 2 for r in shape):
        raise DomainError(f"grid resolution must be >= 2 per axis, got {shape}")
    return shape


def grid_nodes(shape):
    """
    Nodes {j/res} of the uniform tensor grid with per-axis resolution
    ``shape``, as an (N, m) array in row-major order (last axis fastest), so
    ``values.reshape(shape)`` lines up with ``numpy.meshgrid(..., indexing="ij")``.
    """
    axes = [np.arange(r, dtype=float) / r for r in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in mesh], axis=1)
