#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Parameter schedules lam = zeta^-beta, omega_i = kappa_i zeta^-alpha tied to
the discrepancy zeta of the site set, and the margin r whose positivity
certifies L2 convergence of the fitted sequence.
"""

import math
import warnings

from dataclasses import dataclass

import idaes.logger as idaeslog

from torus_interp.exceptions import DomainError, ScheduleError
from torus_interp.solver import RegularizedSolver
from torus_interp.torus import FrequencyBound

_log = idaeslog.getLogger(__name__)

MARGIN_TERM_NAMES = (
    "1+2a-b",
    "2-(a+b)",
    "1-a(2k-1)",
    "1+b",
    "1-a",
    "b-a(2k-1)",
    "2b",
)

_GRID_STEPS = 100


def margin_terms(alpha, beta, k):
    "The seven exponents whose minimum is the margin, in MARGIN_TERM_NAMES order."
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"alpha and beta must be > 0, got alpha={alpha}, beta={beta}")
    if int(k) < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    spread = 2 * int(k) - 1
    return (
        1 + 2 * alpha - beta,
        2 - (alpha + beta),
        1 - alpha * spread,
        1 + beta,
        1 - alpha,
        beta - alpha * spread,
        2 * beta,
    )


def margin(alpha, beta, k):
    return min(margin_terms(alpha, beta, k))


@dataclass(frozen=True)
class ScheduleParams:
    """
    Exponents of the schedule and per-axis prefactors ``kappa``; the dimension
    is ``len(kappa)`` and must satisfy 2k > m.
    """

    alpha: float
    beta: float
    k: int
    kappa: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "kappa", tuple(float(c) for c in self.kappa))
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(
                f"alpha and beta must be > 0, got alpha={self.alpha}, beta={self.beta}"
            )
        if len(self.kappa) == 0 or any(not (c > 0) for c in self.kappa):
            raise DomainError(f"kappa must be a non-empty vector of positive reals, got {self.kappa}")
        if 2 * self.k <= self.m:
            raise DomainError(f"smoothness must satisfy k > m/2, got k={self.k}, m={self.m}")

    @property
    def m(self):
        return len(self.kappa)

    @property
    def margin(self):
        return margin(self.alpha, self.beta, self.k)

    def terms(self):
        return dict(zip(MARGIN_TERM_NAMES, margin_terms(self.alpha, self.beta, self.k)))


@dataclass(frozen=True)
class ScheduleInstance:
    "lam and omega for one discrepancy value; ``clamped`` when lam hit the solver range."

    lam: float
    omega: FrequencyBound
    zeta: float
    clamped: bool = False


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def instantiate(params, zeta, force=False, lambda_min=None, lambda_max=None):
    """
    lam = zeta^-beta and omega_i = max(1, round(kappa_i zeta^-alpha)).

    Arguments:
        params : ScheduleParams
        zeta : discrepancy (or proxy) in (0, 1)
        force : run a schedule with margin <= 0 anyway (with a warning)
        lambda_min, lambda_max (optional) : clamp range, defaults to the
            solver's admissible range
    """
    if not (0.0 < zeta < 1.0):
        raise DomainError(f"zeta must lie in (0, 1), got {zeta}")
    r = params.margin
    if r <= 0:
        message = (
            f"schedule alpha={params.alpha}, beta={params.beta}, k={params.k} has "
            f"margin r={r:.6g} <= 0 and does not certify convergence"
        )
        if not force:
            raise ScheduleError(message, margin=r)
        warnings.warn(message + "; continuing because force is set")

    lambda_min = RegularizedSolver.CONFIG.lambda_min if lambda_min is None else lambda_min
    lambda_max = RegularizedSolver.CONFIG.lambda_max if lambda_max is None else lambda_max
    lam = zeta ** (-params.beta)
    clamped = not (lambda_min <= lam <= lambda_max)
    if clamped:
        bounded = min(max(lam, lambda_min), lambda_max)
        _log.warning(f"schedule lambda {lam:.6g} clamped to {bounded:.6g}")
        lam = bounded
    omega = FrequencyBound(
        tuple(max(1, _round_half_up(c * zeta ** (-params.alpha))) for c in params.kappa)
    )
    return ScheduleInstance(lam=lam, omega=omega, zeta=zeta, clamped=clamped)


def suggest(m):
    """
    Feasible schedule with the largest margin over alpha, beta in
    {0.01, ..., 0.99} at the smallest admissible k = floor(m/2) + 1; ties go
    to the smaller alpha, then the smaller beta.
    """
    m = int(m)
    if m < 1:
        raise DomainError(f"dimension m must be >= 1, got {m}")
    k = m // 2 + 1
    spread = 2 * k - 1
    steps = _GRID_STEPS
    best = None
    # integer hundredths keep the search exact
    for a in range(1, steps):
        for b in range(1, steps):
            r = min(
                steps + 2 * a - b,
                2 * steps - (a + b),
                steps - a * spread,
                steps + b,
                steps - a,
                b - a * spread,
                2 * b,
            )
            if best is None or r > best[0]:
                best = (r, a, b)
    r, a, b = best
    _log.debug(f"suggested schedule for m={m}: alpha={a / steps}, beta={b / steps}, r={r / steps}")
    return ScheduleParams(alpha=a / steps, beta=b / steps, k=k, kappa=(1.0,) * m)
