#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

from torus_interp.parallel.concurrent_futures_parallel_manager import (
    ConcurrentFuturesParallelManager,
)
from torus_interp.parallel.single_process_parallel_manager import (
    SingleProcessParallelManager,
)

_BACK_ENDS = {
    "concurrentfutures": ConcurrentFuturesParallelManager,
    "concurrent.futures": ConcurrentFuturesParallelManager,
}


def create_parallel_manager(
    parallel_manager_class=None,
    number_of_subprocesses=1,
    parallel_back_end="ConcurrentFutures",
):
    """
    Parallel manager for a study.

    Arguments:
        parallel_manager_class (optional) : ParallelManager subclass to instantiate
                                            instead of choosing one by back end.
        number_of_subprocesses (optional) : rows are fanned out to local processes
                                            when this is more than one.
        parallel_back_end (optional) : name of the fan-out back end.
    """
    if parallel_manager_class is not None:
        return parallel_manager_class(number_of_subprocesses=number_of_subprocesses)
    if number_of_subprocesses is None or number_of_subprocesses <= 1:
        return SingleProcessParallelManager()
    back_end = _BACK_ENDS.get(str(parallel_back_end).lower())
    if back_end is None:
        raise NotImplementedError(f"ParallelManager {parallel_back_end} is not yet implemented")
    return back_end(number_of_subprocesses)
