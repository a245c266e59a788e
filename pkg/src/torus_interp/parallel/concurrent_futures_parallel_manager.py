#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

from concurrent import futures

import idaes.logger as idaeslog

from torus_interp.parallel.parallel_manager import ParallelManager, run_batch, split_tasks
from torus_interp.parallel.results import RowBatch

_log = idaeslog.getLogger(__name__)


class ConcurrentFuturesParallelManager(ParallelManager):
    """
    Splits the tasks into contiguous blocks and runs each block on a worker of
    a :class:`concurrent.futures.ProcessPoolExecutor`. A worker that raises
    yields an empty batch carrying the error instead of aborting the gather.
    """

    def __init__(self, number_of_subprocesses=1, **kwargs):
        self.max_number_of_subprocesses = int(number_of_subprocesses)
        self._blocks = []
        self._futures = {}
        self._executor = None

    def number_of_worker_processes(self):
        if self._blocks:
            return len(self._blocks)
        return self.max_number_of_subprocesses

    def scatter(self, do_build, do_build_kwargs, do_execute, all_indices):
        self._blocks = split_tasks(all_indices, self.max_number_of_subprocesses)
        self._executor = futures.ProcessPoolExecutor(max_workers=len(self._blocks))
        self._futures = {
            self._executor.submit(
                run_batch, number, do_build, do_build_kwargs, do_execute, block
            ): number
            for number, block in enumerate(self._blocks)
        }
        _log.debug(
            f"scattered {sum(len(block) for block in self._blocks)} tasks "
            f"over {len(self._blocks)} processes"
        )

    def gather(self):
        batches = []
        try:
            for future in futures.as_completed(self._futures):
                number = self._futures[future]
                try:
                    batches.append(future.result())
                except Exception as err:
                    _log.warning(f"process {number} failed on tasks {self._blocks[number]}: {err}")
                    batches.append(
                        RowBatch(number, self._blocks[number], error=f"{type(err).__name__}: {err}")
                    )
        finally:
            self._executor.shutdown()
            self._executor = None
            self._futures = {}

        batches.sort(key=lambda batch: batch.process_number)
        return batches
