#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
from torus_interp.parallel.parallel_manager import ParallelManager, split_tasks
from torus_interp.parallel.parallel_manager_factory import create_parallel_manager
from torus_interp.parallel.results import RowBatch, merge_batches
