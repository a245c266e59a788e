#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################
"""
Exception types raised by torus_interp.

Every class also derives from the builtin a caller would naturally catch, so
``except ValueError`` keeps working around code that raises ``DomainError``.
"""


class TorusInterpError(Exception):
    "Base class for all torus_interp errors."

    exit_code = 1


class DomainError(TorusInterpError, ValueError):
    "An argument lies outside the domain of the operation."

    exit_code = 2


class InputError(TorusInterpError, ValueError):
    """
    Malformed or inconsistent user input.

    Arguments:
        indices (optional) : indices of the offending sites (e.g. colliding points)
        line (optional) : 1-based line number in the input file
    """

    exit_code = 2

    def __init__(self, message, indices=None, line=None):
        super().__init__(message)
        self.indices = indices
        self.line = line


class RangeError(TorusInterpError, OverflowError):
    "A count or value exceeds what can be represented or allocated."

    exit_code = 2


class UnsupportedError(TorusInterpError, NotImplementedError):
    "The requested computation is not available for this input."

    exit_code = 2


class TruncationError(TorusInterpError, RuntimeError):
    """
    A truncation tolerance cannot be met within the configured term budget.

    Arguments:
        achieved_bound : the tail bound reached at the largest admissible radius
        radius : that radius
    """

    exit_code = 3

    def __init__(self, message, achieved_bound=None, radius=None):
        super().__init__(message)
        self.achieved_bound = achieved_bound
        self.radius = radius


class NumericalError(TorusInterpError, RuntimeError):
    """
    A factorization, eigensolve or linear solve failed.

    Arguments:
        smallest_pivot (optional) : smallest pivot seen by the fallback factorization
    """

    exit_code = 3

    def __init__(self, message, smallest_pivot=None):
        super().__init__(message)
        self.smallest_pivot = smallest_pivot


class ScheduleError(TorusInterpError, ValueError):
    """
    A parameter schedule does not certify convergence (margin r <= 0).

    Arguments:
        margin : the computed margin
    """

    exit_code = 4

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin
