#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
from torus_interp import (
    KernelSpec,
    ScheduleParams,
    get_target,
    run_condition_study,
    run_convergence,
    run_interpolation_limit,
    run_kh_study,
    sample,
    suggest,
)
from torus_interp.sampling_types import create_point_set


def build_schedule(scenario="suggested"):
    # alpha: exponent of the frequency bound omega = kappa zeta^-alpha
    # beta: exponent of the regularization weight lambda = zeta^-beta
    # k: smoothness order of the penalty

    if scenario == "suggested":
        return suggest(1)
    elif scenario == "fast_lambda":
        return ScheduleParams(alpha=0.2, beta=0.5, k=1)
    elif scenario == "square_2d":
        return ScheduleParams(alpha=0.2, beta=0.9, k=2, kappa=(1.0, 1.0))
    else:
        raise NotImplementedError


def run_convergence_demo(
    target="square", scenario="suggested", n_list=(64, 256, 1024, 4096), num_procs=1
):
    report = run_convergence(
        target,
        build_schedule(scenario),
        n_list,
        sampler="halton",
        csv_results_file_name=f"convergence_{target}_{scenario}.csv",
        number_of_subprocesses=num_procs,
    )
    errors = report.column("l2_error")
    for n, error in zip(report.column("n"), errors):
        print(f"n={int(n):6d}  l2_error={error:.4e}")
    return report


def run_interpolation_limit_demo(n=16, omega=32):
    target = get_target("square")
    data = sample(target, create_point_set("halton", 1).generate(n))
    spec = KernelSpec(1, 1, 16.0, omega=(omega,))
    lambdas = [2.0**j for j in range(4, 15, 2)]
    report = run_interpolation_limit(data, spec, lambdas, floor_doublings=2)
    print(f"decay slope {report.metadata['decay_slope']:.3f}")
    for floor in report.metadata["floor"]:
        print(f"omega={floor['omega']}  floor={floor['max_residual']:.3e}")
    return report


def run_condition_demo(num_procs=1):
    spec = KernelSpec(1, 1, 1.0, omega=(16,))
    report = run_condition_study(
        spec,
        [1.0, 10.0, 100.0, 1000.0],
        [32, 64, 128, 256],
        number_of_subprocesses=num_procs,
    )
    for lam, slope in report.metadata["slope_in_n"].items():
        print(f"lambda={lam}  slope in n {slope:.3f}")
    for n, slope in report.metadata["slope_in_lambda"].items():
        print(f"n={n}  slope in lambda {slope:.3f}")
    return report


def run_kh_demo(target="sawtooth"):
    report = run_kh_study(target, [16, 64, 256, 1024], sampler="halton")
    for row in report.rows:
        print(f"n={int(row['n']):5d}  error={row['qmc_error']:.3e}  bound={row['bound']:.3e}")
    return report


if __name__ == "__main__":
    run_convergence_demo()
    run_interpolation_limit_demo()
    run_condition_demo()
    run_kh_demo()
