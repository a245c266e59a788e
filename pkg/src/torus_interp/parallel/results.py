#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
from dataclasses import dataclass, field


@dataclass
class RowBatch:
    """
    Rows one worker computed for its block of tasks.

    Arguments:
        process_number : position of the block in the scatter order
        indices : the task indices of the block
        rows : one row per index, empty when the worker failed
        error : message of the exception that stopped the worker, if any
    """

    process_number: int
    indices: list
    rows: list = field(default_factory=list)
    error: str = None

    def __post_init__(self):
        self.indices = list(self.indices)
        self.rows = list(self.rows)
        if self.error is None and len(self.rows) != len(self.indices):
            raise ValueError(
                f"batch {self.process_number} returned {len(self.rows)} rows "
                f"for {len(self.indices)} tasks"
            )

    @property
    def failed(self):
        return self.error is not None


def merge_batches(batches, number_of_tasks):
    """
    Rows keyed by task index, independent of the order workers finished in,
    and the sorted indices no batch delivered a row for.
    """
    by_index = {}
    for batch in sorted(batches, key=lambda batch: batch.process_number):
        for index, row in zip(batch.indices, batch.rows):
            by_index[int(index)] = row
    missing = [index for index in range(number_of_tasks) if index not in by_index]
    return by_index, missing
