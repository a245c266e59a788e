#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Command line front end: ``torus-interp <command> [options]``.

Exit codes: 0 success, 2 input/domain error, 3 numerical error, 4 infeasible
schedule.
"""

import argparse
import sys

import numpy as np

import idaes.logger as idaeslog

from pyomo.common.config import ConfigDict, ConfigValue

from torus_interp import __version__
from torus_interp.exceptions import DomainError, InputError, TorusInterpError, TruncationError
from torus_interp.experiments import (
    ConditionStudy,
    ConvergenceStudy,
    InterpolationLimitStudy,
    KoksmaHlawkaStudy,
    SobolevApproximationStudy,
    kh_check,
)
from torus_interp.kernel import KernelSpec, TruncationPolicy
from torus_interp.reader import (
    RunConfigReader,
    load_model,
    read_data_file,
    read_query_file,
)
from torus_interp.sampling_types import create_point_set
from torus_interp.schedule import MARGIN_TERM_NAMES, ScheduleParams, margin_terms, suggest
from torus_interp.solver import RegularizedSolver
from torus_interp.targets import get_target, sample
from torus_interp.torus import grid_nodes, grid_shape
from torus_interp.writer import atomic_write, config_hash, save_model

_log = idaeslog.getLogger(__name__)

EXIT_SCHEDULE = 4

_FLAGS = {"lam": "lambda"}

RUN_CONFIG = ConfigDict(implicit=True)
RUN_CONFIG.declare(
    "command", ConfigValue(default=None, domain=str, description="Sub-command name.")
)
RUN_CONFIG.declare(
    "seed", ConfigValue(default=0, domain=int, description="Seed of the random sampler.")
)
RUN_CONFIG.declare(
    "grid_res",
    ConfigValue(default=None, description="Quadrature or evaluation grid nodes per axis."),
)
RUN_CONFIG.declare(
    "out", ConfigValue(default=None, description="Output file (model, values or CSV report).")
)
RUN_CONFIG.declare(
    "force",
    ConfigValue(default=False, domain=bool, description="Run schedules with margin <= 0."),
)
RUN_CONFIG.declare(
    "timing",
    ConfigValue(default=False, domain=bool, description="Record per-row wall time."),
)
RUN_CONFIG.declare(
    "jobs", ConfigValue(default=1, domain=int, description="Number of local processes.")
)


def _list_of(kind):
    def parse(text):
        if isinstance(text, (list, tuple)):
            return [kind(v) for v in text]
        try:
            return [kind(v) for v in str(text).replace(" ", "").split(",") if v]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")

    return parse


_int_list = _list_of(int)
_float_list = _list_of(float)


def _add_global_options(parser):
    parser.add_argument("--config", help="YAML run configuration; flags override its values")
    parser.add_argument("--seed", type=int, help="seed of the random sampler")
    parser.add_argument("--grid-res", type=int, dest="grid_res", help="grid nodes per axis")
    parser.add_argument("--out", help="output file")
    parser.add_argument("--force", action="store_true", default=None, help="run infeasible schedules")
    parser.add_argument("--timing", action="store_true", default=None, help="record wall time in reports")
    parser.add_argument("--jobs", type=int, help="number of local processes for sweeps")


def _add_kernel_options(parser):
    parser.add_argument("--k", type=int, help="smoothness order k > m/2")
    parser.add_argument("--lambda", type=float, dest="lam", help="regularization weight")
    parser.add_argument("--omega", type=_int_list, help="frequency bound w1,w2,...; full kernel when omitted")
    parser.add_argument("--radius", type=int, help="cube radius R of the full kernel series")
    parser.add_argument("--tol", type=float, help="tail tolerance that picks R for the full kernel")


def _add_sweep_options(parser):
    parser.add_argument("--sampler", choices=["halton", "kronecker", "random", "grid"], help="site generator")
    parser.add_argument("--n-list", type=_int_list, dest="n_list", help="site counts n1,n2,...")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torus-interp",
        description="Regularized scattered-data fitting on the torus",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", help="fit a data file and save the model")
    sp.add_argument("data", help="data file: m coordinates then the value per line")
    _add_kernel_options(sp)
    _add_global_options(sp)

    sp = sub.add_parser("eval", help="evaluate a saved model")
    sp.add_argument("model", help="model file written by fit")
    sp.add_argument("--points", help="query file: m coordinates per line")
    _add_global_options(sp)

    sp = sub.add_parser("convergence", help="L2 convergence under a schedule")
    sp.add_argument("--target", help="target name")
    sp.add_argument("--alpha", type=float, help="omega exponent")
    sp.add_argument("--beta", type=float, help="lambda exponent")
    sp.add_argument("--k", type=int, help="smoothness order")
    sp.add_argument("--kappa", type=_float_list, help="per-axis omega prefactors")
    sp.add_argument("--zeta-source", dest="zeta_source", choices=["proxy", "measured"])
    _add_sweep_options(sp)
    _add_global_options(sp)

    sp = sub.add_parser("cond", help="condition numbers over lambda and n")
    _add_kernel_options(sp)
    sp.add_argument("--m", type=int, help="dimension when --omega is omitted")
    sp.add_argument("--lambda-list", type=_float_list, dest="lambda_list")
    _add_sweep_options(sp)
    _add_global_options(sp)

    sp = sub.add_parser("limit", help="site residuals as lambda grows")
    _add_kernel_options(sp)
    sp.add_argument("--data", help="data file; otherwise sites from --sampler on --target")
    sp.add_argument("--target", help="target name")
    sp.add_argument("--n", type=int, help="number of generated sites")
    sp.add_argument("--sampler", choices=["halton", "kronecker", "random", "grid"])
    sp.add_argument("--lambda-list", type=_float_list, dest="lambda_list")
    sp.add_argument("--floor-doublings", type=int, dest="floor_doublings")
    _add_global_options(sp)

    sp = sub.add_parser("kh", help="Koksma-Hlawka checks")
    sp.add_argument("--target", help="target name")
    sp.add_argument("--points", help="site file; otherwise --sampler prefixes of --n-list")
    _add_sweep_options(sp)
    _add_global_options(sp)

    sp = sub.add_parser("feasibility", help="schedule margin terms")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int, help="dimension for a suggested schedule")
    _add_global_options(sp)

    sp = sub.add_parser("sobolev", help="Sobolev approximation study at fixed lambda")
    sp.add_argument("--target", help="target name")
    _add_kernel_options(sp)
    _add_sweep_options(sp)
    _add_global_options(sp)
    return parser


def _settings(args):
    settings = {}
    if args.config:
        settings.update(RunConfigReader().read(args.config))
        if "lambda" in settings:
            settings["lam"] = settings.pop("lambda")
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "verbose"):
            settings[key] = value
    run_config = RUN_CONFIG(settings)
    return run_config.value()


def _require(settings, *names):
    missing = [name for name in names if settings.get(name) is None]
    if missing:
        flags = ", ".join("--" + _FLAGS.get(name, name).replace("_", "-") for name in missing)
        raise InputError(f"{settings['command']} needs {flags}")


def _omega(settings):
    omega = settings.get("omega")
    if omega is None:
        return None
    return tuple(_int_list(omega))


def _truncation(settings):
    radius, tol = settings.get("radius"), settings.get("tol")
    if radius is None and tol is None:
        return TruncationPolicy()
    return TruncationPolicy(radius=radius, tol=tol)


def _kernel_spec(settings, m):
    k = settings.get("k") or m // 2 + 1
    omega = _omega(settings)
    return KernelSpec(m, k, settings["lam"], omega=omega, truncation=_truncation(settings))


def _study_options(settings):
    return {
        "csv_results_file_name": settings.get("out"),
        "seed": settings["seed"],
        "grid_resolution": settings.get("grid_res"),
        "force": settings["force"],
        "record_wall_time": settings["timing"],
        "number_of_subprocesses": settings["jobs"],
    }


def _report_summary(report):
    print(",".join(report.columns))
    for row in report.rows:
        print(",".join(f"{float(row[name]):.6g}" for name in report.columns))
    print(f"config_hash={report.metadata['config_hash']}")


def cmd_fit(settings):
    _require(settings, "lam", "out")
    data = read_data_file(settings["data"])
    spec = _kernel_spec(settings, data.m)
    solver = RegularizedSolver()
    matrix = solver.assemble(data, spec)
    model = solver.fit_assembled(matrix, data)
    diagnostics = solver.condition_diagnostics(matrix)
    residuals = solver.site_residuals(model)
    save_model(model, settings["out"], run_config=settings)

    omega = list(spec.omega.omega) if spec.is_truncated else f"full (R={model.truncation_radius})"
    print(f"n={data.n}")
    print(f"lambda={spec.lam!r}")
    print(f"omega={omega}")
    print(f"max_residual={float(np.max(np.abs(residuals))):.6g}")
    print(f"rms_residual={float(np.sqrt(np.mean(residuals**2))):.6g}")
    print(f"kappa_measured={diagnostics.kappa_measured:.6g}")
    print(f"kappa_bound={diagnostics.kappa_bound:.6g}")
    return 0


def cmd_eval(settings):
    model = load_model(settings["model"])
    if settings.get("points") is not None:
        queries = read_query_file(settings["points"], model.m)
    elif settings.get("grid_res") is not None:
        queries = grid_nodes(grid_shape(settings["grid_res"], model.m))
    else:
        raise InputError("eval needs --points FILE or --grid-res R")
    values = RegularizedSolver().evaluate(model, queries)

    if settings.get("out") is None:
        for value in values:
            print(f"{value:.17g}")
    else:
        atomic_write(settings["out"], lambda handle: np.savetxt(handle, values, fmt="%.17g"))
        _log.info(f"wrote {values.size} values to {settings['out']}")
    return 0


def cmd_convergence(settings):
    _require(settings, "target", "n_list")
    target = get_target(settings["target"])
    if settings.get("alpha") is None and settings.get("beta") is None:
        params = suggest(target.m)
    else:
        _require(settings, "alpha", "beta")
        params = ScheduleParams(
            alpha=settings["alpha"],
            beta=settings["beta"],
            k=settings.get("k") or target.m // 2 + 1,
            kappa=tuple(_float_list(settings.get("kappa") or [1.0] * target.m)),
        )
    options = _study_options(settings)
    options["zeta_source"] = settings.get("zeta_source") or "proxy"
    report = ConvergenceStudy(**options).run(
        target, params, _int_list(settings["n_list"]), sampler=settings.get("sampler") or "halton"
    )
    _report_summary(report)
    return 0


def cmd_cond(settings):
    _require(settings, "lambda_list", "n_list")
    omega = _omega(settings)
    m = len(omega) if omega is not None else int(settings.get("m") or 1)
    k = settings.get("k") or m // 2 + 1
    lambdas = _float_list(settings["lambda_list"])
    spec = KernelSpec(m, k, lambdas[0], omega=omega, truncation=_truncation(settings))
    options = _study_options(settings)
    report = ConditionStudy(**options).run(
        spec, lambdas, _int_list(settings["n_list"]), sampler=settings.get("sampler") or "halton"
    )
    _report_summary(report)
    print(f"slope_in_n={report.metadata['slope_in_n']}")
    print(f"slope_in_lambda={report.metadata['slope_in_lambda']}")
    return 0


def cmd_limit(settings):
    _require(settings, "omega", "lambda_list")
    if settings.get("data") is not None:
        data = read_data_file(settings["data"])
    else:
        _require(settings, "target", "n")
        target = get_target(settings["target"])
        kwargs = {"seed": settings["seed"]} if settings.get("sampler") == "random" else {}
        point_set = create_point_set(settings.get("sampler") or "halton", target.m, **kwargs)
        data = sample(target, point_set.generate(settings["n"]))
    lambdas = _float_list(settings["lambda_list"])
    omega = _omega(settings)
    spec = KernelSpec(data.m, settings.get("k") or data.m // 2 + 1, lambdas[0], omega=omega)
    options = _study_options(settings)
    report = InterpolationLimitStudy(**options).run(
        data, spec, lambdas, floor_doublings=settings.get("floor_doublings") or 1
    )
    _report_summary(report)
    print(f"decay_slope={report.metadata['decay_slope']:.6g}")
    for floor in report.metadata["floor"]:
        print(f"floor omega={floor['omega']} max_residual={floor['max_residual']:.6g}")
    return 0


def cmd_kh(settings):
    _require(settings, "target")
    target = get_target(settings["target"])
    if settings.get("points") is not None:
        result = kh_check(target, read_query_file(settings["points"], target.m))
        print(f"qmc_error={result.qmc_error:.6g}")
        print(f"discrepancy={result.discrepancy:.6g}")
        print(f"bound={result.bound:.6g}")
        print(f"holds={result.holds}")
        return 0
    _require(settings, "n_list")
    options = _study_options(settings)
    report = KoksmaHlawkaStudy(**options).run(
        target, _int_list(settings["n_list"]), sampler=settings.get("sampler") or "halton"
    )
    _report_summary(report)
    return 0


def cmd_feasibility(settings):
    if settings.get("alpha") is None and settings.get("beta") is None:
        params = suggest(int(settings.get("m") or 1))
        alpha, beta, k = params.alpha, params.beta, params.k
        print(f"suggested alpha={alpha!r} beta={beta!r} k={k}")
    else:
        _require(settings, "alpha", "beta", "k")
        alpha, beta, k = settings["alpha"], settings["beta"], settings["k"]
    terms = margin_terms(alpha, beta, k)
    for name, value in zip(MARGIN_TERM_NAMES, terms):
        print(f"{name} = {value:.6g}")
    r = min(terms)
    print(f"r={r:.6g}")
    if r <= 0 and not settings["force"]:
        print("schedule is infeasible (r <= 0)", file=sys.stderr)
        return EXIT_SCHEDULE
    return 0


def cmd_sobolev(settings):
    _require(settings, "target", "lam", "n_list")
    target = get_target(settings["target"])
    spec = _kernel_spec(settings, target.m)
    options = _study_options(settings)
    report = SobolevApproximationStudy(**options).run(
        target, spec, _int_list(settings["n_list"]), sampler=settings.get("sampler") or "halton"
    )
    _report_summary(report)
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "eval": cmd_eval,
    "convergence": cmd_convergence,
    "cond": cmd_cond,
    "limit": cmd_limit,
    "kh": cmd_kh,
    "feasibility": cmd_feasibility,
    "sobolev": cmd_sobolev,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        level = idaeslog.DEBUG if args.verbose > 1 else idaeslog.INFO
        idaeslog.getLogger("torus_interp").setLevel(level)
    try:
        settings = _settings(args)
        _log.debug(f"run configuration hash {config_hash(settings)}")
        return COMMANDS[settings["command"]](settings)
    except (TorusInterpError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        if isinstance(err, TruncationError):
            print("hint: pass --radius R or a looser --tol", file=sys.stderr)
        return getattr(err, "exit_code", DomainError.exit_code)


if __name__ == "__main__":
    sys.exit(main())
