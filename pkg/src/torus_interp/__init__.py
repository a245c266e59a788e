#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("torus-interp")
except PackageNotFoundError:
    __version__ = "0.0.0"

from torus_interp.torus import (
    TorusPoint,
    MultiIndex,
    FrequencyBound,
    wrap,
    periodic_diff,
    norm_2k,
    enumerate_box,
    enumerate_cube,
)
from torus_interp.kernel import (
    KernelSpec,
    TruncationPolicy,
    eval_g,
    eval_w,
    eval_dirichlet,
    eval_s_r,
    asymptotic_g,
    tail_bound,
)
from torus_interp.solver import (
    ScatteredData,
    FittedModel,
    RegularizedSolver,
    assemble,
    fit,
    evaluate,
    evaluate_grid,
    condition_diagnostics,
    eigen_diagnostics,
)
from torus_interp.oracle import (
    CoeffVector,
    functional_value,
    direct_minimize,
    project_target,
)
from torus_interp.sampling_types import PointSetKind, generate
from torus_interp.discrepancy import mesh_norm, star_discrepancy, discrepancy_proxy
from torus_interp.schedule import ScheduleParams, margin, instantiate, suggest
from torus_interp.targets import registry, get_target, sample, projection_error
from torus_interp.functions import (
    run_convergence,
    run_interpolation_limit,
    run_condition_study,
    run_kh_check,
    run_kh_study,
    run_sobolev_approximation,
)
from torus_interp.reader import load_model, read_data_file
from torus_interp.writer import save_model
