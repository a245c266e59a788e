#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Desk-scale studies: L2 convergence under a discrepancy-driven schedule, the
interpolation limit in lambda, condition number growth, Koksma-Hlawka checks
and the Sobolev approximation certificate.

Every study produces a :class:`~torus_interp.writer.StudyReport` whose rows
are computed independently (and possibly in parallel) and merged back in
sweep order, so serial and parallel runs give identical reports.
"""

import math
import time
import warnings

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

import idaes.logger as idaeslog

from pyomo.common.config import ConfigValue, In

from torus_interp import __version__
from torus_interp.discrepancy import (
    DEFAULT_PROBE_RESOLUTION,
    discrepancy_proxy,
    mesh_norm,
    star_discrepancy,
)
from torus_interp.exceptions import (
    DomainError,
    ScheduleError,
    TorusInterpError,
    UnsupportedError,
)
from torus_interp.kernel import KernelSpec, dirichlet_interpolant
from torus_interp.oracle import functional_value, project_target
from torus_interp.parallel.parallel_manager_factory import create_parallel_manager
from torus_interp.parallel.results import merge_batches
from torus_interp.sampling_types import _PointSet, create_point_set
from torus_interp.schedule import ScheduleParams, instantiate
from torus_interp.solver import RegularizedSolver, ScatteredData
from torus_interp.targets import (
    get_target,
    projection_error,
    quadrature_l2_norm_sq,
    sample,
    sobolev_seminorm_sq,
)
from torus_interp.torus import as_points, grid_nodes, grid_shape, wrap_array
from torus_interp.writer import ReportWriter, StudyReport, config_hash

_log = idaeslog.getLogger(__name__)

CONVERGENCE_COLUMNS = (
    "n",
    "zeta_proxy",
    "zeta_measured",
    "lambda",
    "omega",
    "l2_error",
    "linf_error",
    "data_rmse",
    "kappa_measured",
    "kappa_bound",
    "wall_ms",
)

INTERPOLATION_LIMIT_COLUMNS = (
    "lambda",
    "max_residual",
    "rms_residual",
    "floor_energy",
    "dirichlet_residual",
    "wall_ms",
)

CONDITION_COLUMNS = (
    "lambda",
    "n",
    "kappa_measured",
    "kappa_bound",
    "kappa_trace_bound",
    "min_eigenvalue",
    "wall_ms",
)

KH_COLUMNS = ("n", "qmc_error", "discrepancy", "variation", "bound", "holds", "wall_ms")

SOBOLEV_COLUMNS = (
    "n",
    "mesh_norm",
    "lambda",
    "l2_error",
    "linf_error",
    "data_rmse",
    "certificate",
    "certified",
    "wall_ms",
)

DEFAULT_GRID_RESOLUTION = {1: 8192, 2: 512}
FALLBACK_GRID_RESOLUTION = 64
KH_SLACK = 1e-12
APRIORI_RTOL = 1e-9


def _loglog_slope(x, y):
    "Least-squares slope of log y against log x; nan with fewer than two usable points."
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    usable = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if np.count_nonzero(usable) < 2 or np.unique(x[usable]).size < 2:
        return math.nan
    return float(np.polyfit(np.log(x[usable]), np.log(y[usable]), 1)[0])


def _describe_sampler(sampler):
    description = {"kind": sampler.kind.value, "m": sampler.m}
    for key, value in vars(sampler).items():
        if key not in ("m", "points"):
            description[key] = value
    return description


def _as_target(target):
    return get_target(target) if isinstance(target, str) else target


def _error_norms(values, reference):
    diff = values - reference
    return math.sqrt(math.fsum(diff**2) / diff.size), float(np.max(np.abs(diff)))


class _StudyBase(ABC):
    "Base class for studies."
    CONFIG = ReportWriter.CONFIG()

    CONFIG.declare(
        "seed",
        ConfigValue(
            default=0,
            domain=int,
            description="Seed for the random site generator.",
        ),
    )

    CONFIG.declare(
        "grid_resolution",
        ConfigValue(
            default=None,
            description="Quadrature grid nodes per axis for error norms; defaults to 8192 (m=1), 512 (m=2), 64 otherwise.",
        ),
    )

    CONFIG.declare(
        "zeta_source",
        ConfigValue(
            default="proxy",
            domain=In(["proxy", "measured"]),
            description="Drive schedules with the (ln n)^m/n proxy or with the measured star discrepancy.",
        ),
    )

    CONFIG.declare(
        "force",
        ConfigValue(
            default=False,
            domain=bool,
            description="Run schedules whose margin is not positive.",
        ),
    )

    CONFIG.declare(
        "record_wall_time",
        ConfigValue(
            default=False,
            domain=bool,
            description="Write per-row wall time; when off the column is 0 so reports are bit-reproducible.",
        ),
    )

    CONFIG.declare(
        "number_of_subprocesses",
        ConfigValue(
            default=1,
            domain=int,
            description="Number of processes to fan out to locally.",
        ),
    )

    CONFIG.declare(
        "parallel_back_end",
        ConfigValue(
            default="ConcurrentFutures",
            domain=str,
            description="Backend for parallelization.",
        ),
    )

    CONFIG.declare(
        "solver_options",
        ConfigValue(
            default=dict(),
            domain=dict,
            description="Keyword arguments for the RegularizedSolver configuration.",
        ),
    )

    study_name = None
    columns = ()
    key_columns = ()

    def __init__(
        self,
        **options,
    ):
        parallel_manager_class = options.pop("parallel_manager_class", None)
        self.config = self.CONFIG(options)
        self.parallel_manager = create_parallel_manager(
            parallel_manager_class=parallel_manager_class,
            number_of_subprocesses=self.config.number_of_subprocesses,
            parallel_back_end=self.config.parallel_back_end,
        )

        self.writer = ReportWriter(
            self.parallel_manager,
            csv_results_file_name=self.config.csv_results_file_name,
            h5_results_file_name=self.config.h5_results_file_name,
            h5_parent_group_name=self.config.h5_parent_group_name,
            metadata_file_name=self.config.metadata_file_name,
        )
        self.solver = RegularizedSolver(**self.config.solver_options)
        self._tasks = []

    @classmethod
    def remove_unpicklable_state(cls, study):
        saved_state = {
            "parallel_manager": study.parallel_manager,
            "writer": study.writer,
        }
        study.parallel_manager = None
        study.writer = None
        return saved_state

    @classmethod
    def restore_unpicklable_state(cls, study, state):
        study.parallel_manager = state.get("parallel_manager")
        study.writer = state.get("writer")

    def grid_resolution(self, m):
        if self.config.grid_resolution is not None:
            return self.config.grid_resolution
        return DEFAULT_GRID_RESOLUTION.get(m, FALLBACK_GRID_RESOLUTION)

    def _sampler(self, sampler, m):
        if isinstance(sampler, _PointSet):
            if sampler.m != m:
                raise DomainError(f"sampler generates m={sampler.m} sites, expected m={m}")
            return sampler
        kwargs = {"seed": self.config.seed} if sampler == "random" else {}
        return create_point_set(sampler, m, **kwargs)

    def _wall_ms(self, start):
        if not self.config.record_wall_time:
            return 0.0
        return (time.perf_counter() - start) * 1000.0

    @abstractmethod
    def _run_row(self, task):
        pass

    def _failed_row(self, task, err):
        row = {name: math.nan for name in self.columns}
        for name in self.key_columns:
            row[name] = task[name]
        row["wall_ms"] = 0.0
        row["status"] = "failed"
        row["error"] = f"{type(err).__name__}: {err}"
        return row

    def _safe_row(self, index):
        task = self._tasks[index]
        try:
            row = self._run_row(task)
        except TorusInterpError as err:
            _log.warning(f"{self.study_name} row {index} ({task}) failed: {err}")
            return self._failed_row(task, err)
        row.setdefault("status", "ok")
        _log.info(f"{self.study_name} row {index + 1}/{len(self._tasks)} done")
        return row

    def run_scatter_gather(self, all_indices):
        # keep the parallel manager; it is dropped with the other unpicklable state
        parallel_manager = self.parallel_manager
        saved_state = self.remove_unpicklable_state(self)
        try:
            parallel_manager.scatter(
                do_build,
                {"study": self},
                do_execute,
                all_indices,
            )
            all_results = parallel_manager.gather()
        finally:
            self.restore_unpicklable_state(self, saved_state)
        return all_results

    def _run_rows(self, tasks):
        self._tasks = list(tasks)
        all_indices = list(range(len(self._tasks)))
        batches = self.run_scatter_gather(all_indices)

        by_index, missing = merge_batches(batches, len(all_indices))
        errors = {int(i): batch.error for batch in batches if batch.failed for i in batch.indices}
        for index in missing:
            by_index[index] = self._failed_row(
                self._tasks[index], RuntimeError(errors.get(index, "worker returned no result"))
            )
        return [by_index[i] for i in all_indices]

    def _finish(self, rows, inputs, metadata):
        run_config = {
            "study": self.study_name,
            "inputs": inputs,
            "config": self._config_record(),
        }
        report_metadata = {
            "study": self.study_name,
            "version": __version__,
            "run_config": run_config,
            "config_hash": config_hash(run_config),
        }
        report_metadata.update(metadata)
        report = StudyReport(columns=self.columns, rows=rows, metadata=report_metadata)
        self.writer.save_report(report)
        return report

    def _config_record(self):
        record = self.config.value()
        for name in ReportWriter.CONFIG:
            record.pop(name, None)
        return record


def do_build(study):
    """
    Used to pass into the parallel manager to build the arguments of the row
    function. Defined at the top level so it's picklable.
    """
    return [study]


def do_execute(local_indices, study):
    """
    Used to pass into the parallel manager in order to compute a set of rows.
    Defined at the top level so it's picklable.
    """
    return [study._safe_row(int(index)) for index in local_indices]


class ConvergenceStudy(_StudyBase):
    """
    Fit a target on growing site sets with lambda and omega tied to the
    discrepancy of each set, and record the L2 error of every fit.
    """

    study_name = "convergence"
    columns = CONVERGENCE_COLUMNS
    key_columns = ("n",)

    def run(self, target, params, n_list, sampler="halton"):
        """
        Arguments:
            target : target name or target instance
            params : ScheduleParams; its margin must be positive unless the
                study's ``force`` option is set
            n_list : site counts (rows are sorted by n)
            sampler : point set kind or a point set instance

        Returns:
            StudyReport with the CONVERGENCE_COLUMNS rows
        """
        self._target = _as_target(target)
        if not isinstance(params, ScheduleParams):
            raise DomainError("run_convergence expects ScheduleParams")
        if params.m != self._target.m:
            raise DomainError(
                f"schedule has m={params.m} but target {self._target.name!r} has m={self._target.m}"
            )
        if params.margin <= 0 and not self.config.force:
            raise ScheduleError(
                f"schedule alpha={params.alpha}, beta={params.beta}, k={params.k} has "
                f"margin r={params.margin:.6g} <= 0; rerun with force to override",
                margin=params.margin,
            )
        self._params = params
        self._point_set = self._sampler(sampler, params.m)
        n_list = sorted(int(n) for n in n_list)
        if not n_list:
            raise DomainError("n_list must not be empty")

        self._nodes = grid_nodes(grid_shape(self.grid_resolution(params.m), params.m))
        self._reference = self._target.evaluate(self._nodes)

        rows = self._run_rows([{"n": n} for n in n_list])

        resolution = self.grid_resolution(params.m)
        quadrature_gap = abs(
            quadrature_l2_norm_sq(self._target, resolution) - self._target.l2_norm_sq
        )
        inputs = {
            "target": self._target.name,
            "schedule": {
                "alpha": params.alpha,
                "beta": params.beta,
                "k": params.k,
                "kappa": list(params.kappa),
            },
            "n_list": n_list,
            "sampler": _describe_sampler(self._point_set),
        }
        metadata = {
            "target": self._target.name,
            "margin": params.margin,
            "margin_terms": params.terms(),
            "grid_resolution": resolution,
            "quadrature_norm_gap": quadrature_gap,
            "seed": self.config.seed,
        }
        return self._finish(rows, inputs, metadata)

    def _run_row(self, task):
        start = time.perf_counter()
        n = task["n"]
        params = self._params
        m = params.m
        points = self._point_set.generate(n)

        zeta_proxy = discrepancy_proxy(n, m)
        if m == 1 or self.config.zeta_source == "measured":
            zeta_measured = star_discrepancy(points).value
        else:
            zeta_measured = math.nan
        zeta = zeta_measured if self.config.zeta_source == "measured" else zeta_proxy

        instance = instantiate(
            params,
            zeta,
            force=self.config.force,
            lambda_min=self.solver.config.lambda_min,
            lambda_max=self.solver.config.lambda_max,
        )
        data = sample(self._target, points)
        spec = KernelSpec(m, params.k, instance.lam, omega=instance.omega)
        matrix = self.solver.assemble(data, spec)
        model = self.solver.fit_assembled(matrix, data)
        diagnostics = self.solver.condition_diagnostics(matrix)

        approx = self.solver.evaluate(model, self._nodes)
        l2_error, linf_error = _error_norms(approx, self._reference)
        residuals = self.solver.site_residuals(model)
        data_rmse = math.sqrt(math.fsum(residuals**2) / n)

        row = {
            "n": n,
            "zeta_proxy": zeta_proxy,
            "zeta_measured": zeta_measured,
            "lambda": instance.lam,
            "omega": max(instance.omega.omega),
            "l2_error": l2_error,
            "linf_error": linf_error,
            "data_rmse": data_rmse,
            "kappa_measured": diagnostics.kappa_measured,
            "kappa_bound": diagnostics.kappa_bound,
            "omega_per_axis": list(instance.omega.omega),
            "lambda_clamped": instance.clamped,
            "kappa_trace_bound": diagnostics.kappa_trace_bound,
            "kappa_ok": diagnostics.bound_holds(),
        }
        if self._target.has_coefficients:
            # u lies in TP_omega, so l2_error cannot fall below this
            row["projection_floor"] = math.sqrt(projection_error(self._target, instance.omega))
        row.update(self._apriori_chain(model, data, spec))
        row["wall_ms"] = self._wall_ms(start)
        return row

    def _apriori_chain(self, model, data, spec):
        "lam ||grad^k u||^2 + ||u||^2 <= D(u) <= D(P_omega psi)."
        if not self._target.has_coefficients:
            return {}
        lam, k = spec.lam, spec.k
        lhs = functional_value(model, None, lam, k)
        fitted = functional_value(model, data, lam, k)
        rhs = functional_value(project_target(self._target, spec.omega), data, lam, k)
        ok = fitted <= rhs * (1.0 + APRIORI_RTOL) + 1e-12
        if not ok:
            _log.warning(
                f"a-priori chain violated at n={data.n}: D(u)={fitted:.6g} > D(P psi)={rhs:.6g}"
            )
        return {
            "apriori_lhs": lhs,
            "apriori_functional": fitted,
            "apriori_rhs": rhs,
            "apriori_ok": ok,
        }


class InterpolationLimitStudy(_StudyBase):
    """
    Site residuals of fits to fixed data with fixed omega as lambda grows,
    and the residual floor as omega is doubled at the largest lambda.
    """

    study_name = "interpolation_limit"
    columns = INTERPOLATION_LIMIT_COLUMNS
    key_columns = ("lambda",)

    def run(self, data, spec, lambda_list, floor_doublings=1):
        """
        Arguments:
            data : ScatteredData held fixed across the sweep
            spec : KernelSpec with omega set; its lambda is replaced per row
            lambda_list : strictly ascending, every lambda > 1
            floor_doublings : number of omega doublings at the largest lambda

        Returns:
            StudyReport; ``metadata["decay_slope"]`` is the log-log slope of
            the max residual in lambda and ``metadata["floor"]`` lists the
            residuals for omega, 2 omega, ...
        """
        if not isinstance(data, ScatteredData):
            raise DomainError("run_interpolation_limit expects ScatteredData")
        if not spec.is_truncated:
            raise DomainError("run_interpolation_limit needs a spec with a fixed omega")
        lambdas = [float(lam) for lam in lambda_list]
        if not lambdas or any(lam <= 1.0 for lam in lambdas):
            raise DomainError("lambda_list must be non-empty with every lambda > 1")
        if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
            raise DomainError("lambda_list must be strictly ascending")
        self._data = data
        self._spec = spec
        self._dirichlet_residual = self._dirichlet_site_residual(spec.omega)

        rows = self._run_rows([{"lambda": lam} for lam in lambdas])

        max_residuals = [row["max_residual"] for row in rows]
        floor = []
        omega = spec.omega
        for _ in range(int(floor_doublings) + 1):
            floor_row = self._residuals(spec.with_lambda(lambdas[-1]).with_omega(omega))
            floor_row["omega"] = list(omega.omega)
            floor_row["dirichlet_residual"] = self._dirichlet_site_residual(omega)
            floor.append(floor_row)
            omega = omega.doubled()

        inputs = {
            "n": data.n,
            "m": data.m,
            "k": spec.k,
            "omega": list(spec.omega.omega),
            "lambda_list": lambdas,
            "floor_doublings": int(floor_doublings),
        }
        metadata = {
            "decay_slope": _loglog_slope(lambdas, max_residuals),
            "nonincreasing_within_5pct": all(
                b <= 1.05 * a for a, b in zip(max_residuals, max_residuals[1:])
            ),
            "floor": floor,
        }
        return self._finish(rows, inputs, metadata)

    def _dirichlet_site_residual(self, omega):
        if min(omega.omega) < 1:
            return math.nan
        near = dirichlet_interpolant(self._data.points, self._data.points, self._data.values, omega)
        return float(np.max(np.abs(near - self._data.values)))

    def _residuals(self, spec):
        model = self.solver.fit(self._data, spec)
        residuals = self._data.values - self.solver.evaluate(model, self._data.points)
        n = self._data.n
        return {
            "max_residual": float(np.max(np.abs(residuals))),
            "rms_residual": math.sqrt(math.fsum(residuals**2) / n),
            "floor_energy": math.fsum(self._data.values * residuals) / n,
        }

    def _run_row(self, task):
        start = time.perf_counter()
        row = {"lambda": task["lambda"]}
        row.update(self._residuals(self._spec.with_lambda(task["lambda"])))
        row["dirichlet_residual"] = self._dirichlet_residual
        row["wall_ms"] = self._wall_ms(start)
        return row


class ConditionStudy(_StudyBase):
    "Measured and bounded condition numbers of the system matrix per (lambda, n)."

    study_name = "condition"
    columns = CONDITION_COLUMNS
    key_columns = ("lambda", "n")

    def run(self, spec, lambda_list, n_list, sampler="halton"):
        """
        Arguments:
            spec : KernelSpec giving m, k, omega (or truncation); lambda is
                replaced per row
            lambda_list : lambdas to sweep
            n_list : site counts to sweep
            sampler : point set kind or a point set instance

        Returns:
            StudyReport with rows ordered lambda-major; the metadata carries
            the fitted growth exponents ``slope_in_n`` (per lambda) and
            ``slope_in_lambda`` (per n)
        """
        self._spec = spec
        self._point_set = self._sampler(sampler, spec.m)
        lambdas = [float(lam) for lam in lambda_list]
        n_list = [int(n) for n in n_list]
        if not lambdas or not n_list:
            raise DomainError("lambda_list and n_list must not be empty")

        tasks = [{"lambda": lam, "n": n} for lam in lambdas for n in n_list]
        rows = self._run_rows(tasks)

        def column(rows_, name):
            return [row[name] for row in rows_]

        slope_in_n = {}
        for lam in lambdas:
            subset = [row for row in rows if row["lambda"] == lam]
            slope_in_n[repr(lam)] = _loglog_slope(column(subset, "n"), column(subset, "kappa_measured"))
        slope_in_lambda = {}
        for n in n_list:
            subset = [row for row in rows if row["n"] == n]
            slope_in_lambda[str(n)] = _loglog_slope(
                column(subset, "lambda"), column(subset, "kappa_measured")
            )

        inputs = {
            "m": spec.m,
            "k": spec.k,
            "omega": list(spec.omega.omega) if spec.is_truncated else None,
            "lambda_list": lambdas,
            "n_list": n_list,
            "sampler": _describe_sampler(self._point_set),
        }
        metadata = {
            "slope_in_n": slope_in_n,
            "slope_in_lambda": slope_in_lambda,
            "bound_holds": all(row.get("bound_holds", True) for row in rows),
        }
        return self._finish(rows, inputs, metadata)

    def _run_row(self, task):
        start = time.perf_counter()
        points = self._point_set.generate(task["n"])
        spec = self._spec.with_lambda(task["lambda"])
        diagnostics = self.solver.condition_diagnostics(self.solver.assemble(points, spec))
        return {
            "lambda": task["lambda"],
            "n": task["n"],
            "kappa_measured": diagnostics.kappa_measured,
            "kappa_bound": diagnostics.kappa_bound,
            "kappa_trace_bound": diagnostics.kappa_trace_bound,
            "min_eigenvalue": diagnostics.min_eigenvalue,
            "bound_holds": diagnostics.bound_holds(),
            "wall_ms": self._wall_ms(start),
        }


@dataclass(frozen=True)
class KHResult:
    "One Koksma-Hlawka check: |mean - integral| <= D* V."

    qmc_error: float
    bound: float
    holds: bool
    discrepancy: float
    variation: float
    integral: float


def kh_check(target, points):
    """
    Compare the quasi-Monte Carlo error of the site mean of ``target`` with
    the Koksma-Hlawka bound D*(points) V(target).

    Sites are used as given (no nudging at discontinuities). A violation is
    reported through ``holds`` and a warning, not raised.
    """
    target = _as_target(target)
    variation = target.total_variation
    if variation is None or not math.isfinite(variation):
        raise UnsupportedError(f"target {target.name!r} has no finite variation")
    if target.m > 2:
        raise UnsupportedError(f"Koksma-Hlawka checks are limited to m <= 2, got m={target.m}")

    pts = wrap_array(as_points(points, target.m))
    mean = math.fsum(target.evaluate(pts)) / pts.shape[0]
    if target.has_coefficients:
        integral = target.integral
    else:
        nodes = grid_nodes(grid_shape(DEFAULT_GRID_RESOLUTION[target.m], target.m))
        integral = math.fsum(target.evaluate(nodes)) / nodes.shape[0]
    discrepancy = star_discrepancy(pts).value
    qmc_error = abs(mean - integral)
    bound = discrepancy * variation
    holds = qmc_error <= bound + KH_SLACK
    if not holds:
        _log.warning(
            f"Koksma-Hlawka violated for {target.name!r} with n={pts.shape[0]}: "
            f"error {qmc_error:.6g} > D* V = {bound:.6g}"
        )
    return KHResult(
        qmc_error=qmc_error,
        bound=bound,
        holds=holds,
        discrepancy=discrepancy,
        variation=float(variation),
        integral=integral,
    )


class KoksmaHlawkaStudy(_StudyBase):
    "kh_check over the prefixes of a site sequence."

    study_name = "koksma_hlawka"
    columns = KH_COLUMNS
    key_columns = ("n",)

    def run(self, target, n_list, sampler="halton"):
        self._target = _as_target(target)
        self._point_set = self._sampler(sampler, self._target.m)
        n_list = [int(n) for n in n_list]
        rows = self._run_rows([{"n": n} for n in n_list])
        inputs = {
            "target": self._target.name,
            "n_list": n_list,
            "sampler": _describe_sampler(self._point_set),
        }
        metadata = {
            "variation": self._target.total_variation,
            "violations": sum(1 for row in rows if row.get("holds") == 0.0),
        }
        return self._finish(rows, inputs, metadata)

    def _run_row(self, task):
        start = time.perf_counter()
        result = kh_check(self._target, self._point_set.generate(task["n"]))
        return {
            "n": task["n"],
            "qmc_error": result.qmc_error,
            "discrepancy": result.discrepancy,
            "variation": result.variation,
            "bound": result.bound,
            "holds": 1.0 if result.holds else 0.0,
            "integral": result.integral,
            "wall_ms": self._wall_ms(start),
        }


class SobolevApproximationStudy(_StudyBase):
    """
    Fits of a smooth target at a fixed lambda on growing site sets: errors
    against the mesh norm, and the data-misfit certificate

        data_rmse <= sqrt(||grad^k psi||^2 / lam + ||psi||^2 / lam^2)

    which holds whenever psi lies in the space the kernel minimises over.
    """

    study_name = "sobolev"
    columns = SOBOLEV_COLUMNS
    key_columns = ("n",)

    def run(self, target, spec, n_list, sampler="halton"):
        self._target = _as_target(target)
        if spec.m != self._target.m:
            raise DomainError(f"spec has m={spec.m} but target {self._target.name!r} has m={self._target.m}")
        self._spec = spec
        self._point_set = self._sampler(sampler, spec.m)
        n_list = sorted(int(n) for n in n_list)

        seminorm = sobolev_seminorm_sq(self._target, spec.k)
        self._certificate = math.sqrt(seminorm / spec.lam + self._target.l2_norm_sq / spec.lam**2)
        if spec.is_truncated:
            self._certificate_applies = (
                math.isfinite(seminorm) and projection_error(self._target, spec.omega) <= 1e-24
            )
        else:
            self._certificate_applies = math.isfinite(seminorm)
        if not self._certificate_applies:
            warnings.warn(
                f"target {self._target.name!r} is not in the kernel's space; "
                "the data-misfit certificate does not apply"
            )

        self._nodes = grid_nodes(grid_shape(self.grid_resolution(spec.m), spec.m))
        self._reference = self._target.evaluate(self._nodes)
        rows = self._run_rows([{"n": n} for n in n_list])

        inputs = {
            "target": self._target.name,
            "m": spec.m,
            "k": spec.k,
            "lambda": spec.lam,
            "omega": list(spec.omega.omega) if spec.is_truncated else None,
            "n_list": n_list,
            "sampler": _describe_sampler(self._point_set),
        }
        metadata = {
            "seminorm_sq": seminorm,
            "certificate_applies": self._certificate_applies,
            "l2_slope_in_mesh_norm": _loglog_slope(
                [row["mesh_norm"] for row in rows], [row["l2_error"] for row in rows]
            ),
        }
        return self._finish(rows, inputs, metadata)

    def _probe_resolution(self, n):
        m = self._spec.m
        per_axis = 8 * math.ceil(n ** (1.0 / m))
        if m == 1:
            return max(DEFAULT_PROBE_RESOLUTION, min(per_axis, 2**16))
        return DEFAULT_PROBE_RESOLUTION

    def _run_row(self, task):
        start = time.perf_counter()
        n = task["n"]
        points = self._point_set.generate(n)
        data = sample(self._target, points)
        model = self.solver.fit(data, self._spec)
        approx = self.solver.evaluate(model, self._nodes)
        l2_error, linf_error = _error_norms(approx, self._reference)
        residuals = self.solver.site_residuals(model)
        data_rmse = math.sqrt(math.fsum(residuals**2) / n)
        certified = self._certificate_applies and data_rmse <= self._certificate * (1.0 + APRIORI_RTOL)
        return {
            "n": n,
            "mesh_norm": mesh_norm(points, self._probe_resolution(n)),
            "lambda": self._spec.lam,
            "l2_error": l2_error,
            "linf_error": linf_error,
            "data_rmse": data_rmse,
            "certificate": self._certificate,
            "certified": 1.0 if certified else 0.0,
            "wall_ms": self._wall_ms(start),
        }
