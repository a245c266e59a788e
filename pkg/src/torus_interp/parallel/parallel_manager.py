#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

from abc import abstractmethod, ABC

from torus_interp.parallel.results import RowBatch


class ParallelManager(ABC):
    """
    Runs the rows of a study. Tasks are scattered as a list of indices and
    come back from gather() as one RowBatch per block, in block order.
    """

    ROOT_PROCESS_RANK = 0

    def is_root_process(self):
        "Only the root process writes reports; every local back end runs on the root."
        return True

    @abstractmethod
    def number_of_worker_processes(self):
        raise NotImplementedError

    @abstractmethod
    def scatter(self, do_build, do_build_kwargs, do_execute, all_indices):
        """
        Start computing the rows for all_indices.

        Arguments:
            do_build : called once per worker with do_build_kwargs; returns the
                       list of extra arguments for do_execute
            do_build_kwargs : keyword arguments of do_build
            do_execute : called as do_execute(block, *built); returns one row
                         per index of block
            all_indices : every task index of the study
        """
        raise NotImplementedError

    @abstractmethod
    def gather(self):
        "RowBatch list of the last scatter, sorted by process number."
        raise NotImplementedError


def split_tasks(indices, parts):
    """
    Contiguous blocks of near-equal size, the longer blocks first. Never more
    blocks than tasks, and a single (possibly empty) block for no tasks.
    """
    indices = list(indices)
    parts = max(1, min(int(parts), len(indices)))
    size, extra = divmod(len(indices), parts)
    blocks = []
    start = 0
    for part in range(parts):
        stop = start + size + (1 if part < extra else 0)
        blocks.append(indices[start:stop])
        start = stop
    return blocks


def run_batch(process_number, do_build, do_build_kwargs, do_execute, indices):
    """
    Worker entry point: build once, then compute the block. Defined at the top
    level so that it's picklable.
    """
    execute_args = do_build(**do_build_kwargs)
    rows = do_execute(indices, *execute_args)
    return RowBatch(process_number, indices, rows)
