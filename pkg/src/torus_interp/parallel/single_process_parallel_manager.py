#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

from torus_interp.parallel.parallel_manager import ParallelManager, run_batch


class SingleProcessParallelManager(ParallelManager):
    "Computes every row in the calling process, as one block."

    def __init__(self, **kwargs):
        self._batch = None

    def number_of_worker_processes(self):
        return 1

    def scatter(self, do_build, do_build_kwargs, do_execute, all_indices):
        # exceptions propagate; rows that may fail are handled by do_execute
        self._batch = run_batch(
            self.ROOT_PROCESS_RANK, do_build, do_build_kwargs, do_execute, list(all_indices)
        )

    def gather(self):
        batch, self._batch = self._batch, None
        return [] if batch is None else [batch]
