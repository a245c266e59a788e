#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

from torus_interp.experiments import (
    ConditionStudy,
    ConvergenceStudy,
    InterpolationLimitStudy,
    KoksmaHlawkaStudy,
    SobolevApproximationStudy,
    kh_check,
)


def _study_kwargs(
    csv_results_file_name,
    h5_results_file_name,
    h5_parent_group_name,
    number_of_subprocesses,
    solver_options,
    **extra,
):
    kwargs = {}
    kwargs["csv_results_file_name"] = csv_results_file_name
    kwargs["h5_results_file_name"] = h5_results_file_name
    kwargs["h5_parent_group_name"] = h5_parent_group_name
    if number_of_subprocesses is not None:
        kwargs["number_of_subprocesses"] = number_of_subprocesses
    if solver_options is not None:
        kwargs["solver_options"] = solver_options
    for key, value in extra.items():
        if value is not None:
            kwargs[key] = value
    return kwargs


def run_convergence(
    target,
    params,
    n_list,
    sampler="halton",
    csv_results_file_name=None,
    h5_results_file_name=None,
    h5_parent_group_name=None,
    seed=None,
    grid_resolution=None,
    zeta_source=None,
    force=None,
    record_wall_time=None,
    number_of_subprocesses=None,
    solver_options=None,
):
    """
    Fit ``target`` on the first n sites of ``sampler`` for every n of
    ``n_list`` with lambda = zeta^-beta and omega = kappa zeta^-alpha, and
    report the L2/Linf errors, the data misfit and the condition numbers.

    Arguments:

        target : A target name from :func:`torus_interp.targets.registry` or a target instance.

        params : :class:`~torus_interp.schedule.ScheduleParams`. Schedules with a margin
                 r <= 0 are refused with a ScheduleError unless ``force`` is set.

        n_list : Site counts; rows are reported in ascending n.

        sampler (optional) : Point set kind (``"halton"``, ``"kronecker"``, ``"random"``,
                             ``"grid"``) or a point set instance. The default is ``"halton"``.

        csv_results_file_name (optional) : The path and file name to write a csv file; a JSON
                                           metadata sidecar is written next to it. The default
                                           `None` does not write a csv file.

        h5_results_file_name (optional) : The path and file name to write a h5 copy of the report.

        h5_parent_group_name (optional) : Parent h5 group for the report to be embedded in.

        seed (optional) : Seed of the random point set.

        grid_resolution (optional) : Quadrature nodes per axis for the error norms.

        zeta_source (optional) : ``"proxy"`` (default) drives the schedule with (ln n)^m/n,
                                 ``"measured"`` with the star discrepancy of the sites.

        force (optional) : Run a schedule whose margin is not positive.

        record_wall_time (optional) : Fill the ``wall_ms`` column; off by default so that
                                      identical configurations give identical reports.

        number_of_subprocesses (optional) : Rows are computed on this many local processes.

        solver_options (optional) : Dictionary of :class:`~torus_interp.solver.RegularizedSolver`
                                    options.

    Returns:
        :class:`~torus_interp.writer.StudyReport`
    """
    kwargs = _study_kwargs(
        csv_results_file_name,
        h5_results_file_name,
        h5_parent_group_name,
        number_of_subprocesses,
        solver_options,
        seed=seed,
        grid_resolution=grid_resolution,
        zeta_source=zeta_source,
        force=force,
        record_wall_time=record_wall_time,
    )
    study = ConvergenceStudy(**kwargs)
    return study.run(target, params, n_list, sampler=sampler)


def run_interpolation_limit(
    data,
    spec,
    lambda_list,
    floor_doublings=1,
    csv_results_file_name=None,
    h5_results_file_name=None,
    h5_parent_group_name=None,
    record_wall_time=None,
    number_of_subprocesses=None,
    solver_options=None,
):
    """
    Site residuals max_i |u_lambda(p_i) - q_i| of fits to fixed ``data`` as
    lambda grows, with the fitted log-log decay slope and the residual floor
    for omega, 2 omega, ... at the largest lambda in the report metadata.

    Arguments:

        data : :class:`~torus_interp.solver.ScatteredData`.

        spec : :class:`~torus_interp.kernel.KernelSpec` with omega set.

        lambda_list : Strictly ascending lambdas, all > 1.

        floor_doublings (optional) : Number of omega doublings for the floor rows.

    The remaining arguments are as for :func:`run_convergence`.
    """
    kwargs = _study_kwargs(
        csv_results_file_name,
        h5_results_file_name,
        h5_parent_group_name,
        number_of_subprocesses,
        solver_options,
        record_wall_time=record_wall_time,
    )
    study = InterpolationLimitStudy(**kwargs)
    return study.run(data, spec, lambda_list, floor_doublings=floor_doublings)


def run_condition_study(
    spec,
    lambda_list,
    n_list,
    sampler="halton",
    csv_results_file_name=None,
    h5_results_file_name=None,
    h5_parent_group_name=None,
    seed=None,
    record_wall_time=None,
    number_of_subprocesses=None,
    solver_options=None,
):
    """
    Measured and bounded condition numbers of W/n + I/lambda^2 for every
    (lambda, n), with growth exponents in n and in lambda in the metadata.

    Arguments:

        spec : :class:`~torus_interp.kernel.KernelSpec`; its lambda is replaced per row.

        lambda_list : Lambdas to sweep.

        n_list : Site counts to sweep.

    The remaining arguments are as for :func:`run_convergence`.
    """
    kwargs = _study_kwargs(
        csv_results_file_name,
        h5_results_file_name,
        h5_parent_group_name,
        number_of_subprocesses,
        solver_options,
        seed=seed,
        record_wall_time=record_wall_time,
    )
    study = ConditionStudy(**kwargs)
    return study.run(spec, lambda_list, n_list, sampler=sampler)


def run_kh_check(target, points):
    """
    Koksma-Hlawka check of one site set: ``qmc_error = |mean psi(p_i) - int psi|``
    against ``bound = D*(points) V(psi)``.

    Returns:
        :class:`~torus_interp.experiments.KHResult`
    """
    return kh_check(target, points)


def run_kh_study(
    target,
    n_list,
    sampler="halton",
    csv_results_file_name=None,
    h5_results_file_name=None,
    h5_parent_group_name=None,
    seed=None,
    record_wall_time=None,
    number_of_subprocesses=None,
):
    "Koksma-Hlawka checks on the prefixes of ``sampler``; see :func:`run_kh_check`."
    kwargs = _study_kwargs(
        csv_results_file_name,
        h5_results_file_name,
        h5_parent_group_name,
        number_of_subprocesses,
        None,
        seed=seed,
        record_wall_time=record_wall_time,
    )
    study = KoksmaHlawkaStudy(**kwargs)
    return study.run(target, n_list, sampler=sampler)


def run_sobolev_approximation(
    target,
    spec,
    n_list,
    sampler="halton",
    csv_results_file_name=None,
    h5_results_file_name=None,
    h5_parent_group_name=None,
    seed=None,
    grid_resolution=None,
    record_wall_time=None,
    number_of_subprocesses=None,
    solver_options=None,
):
    """
    Fits of a smooth ``target`` at the fixed lambda of ``spec`` on growing
    site sets, reporting the mesh norm, the errors and whether the data
    misfit meets sqrt(||grad^k psi||^2/lambda + ||psi||^2/lambda^2).

    The remaining arguments are as for :func:`run_convergence`.
    """
    kwargs = _study_kwargs(
        csv_results_file_name,
        h5_results_file_name,
        h5_parent_group_name,
        number_of_subprocesses,
        solver_options,
        seed=seed,
        grid_resolution=grid_resolution,
        record_wall_time=record_wall_time,
    )
    study = SobolevApproximationStudy(**kwargs)
    return study.run(target, spec, n_list, sampler=sampler)
