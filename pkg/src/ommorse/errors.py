"""Exception hierarchy.

Input problems (bad files, bad sign vectors, non-simple arrangements) are
kept strictly apart from theorem violations: the latter fire only when a
runtime assertion backed by a proved statement fails, which indicates
either an invalid linear extension smuggled past validation or a bug.
"""


class OmmorseError(Exception):
    """Base class for all library errors."""


class InputError(OmmorseError):
    """Invalid user input: files, sign strings, dimensions, orderings."""


class DimensionError(InputError):
    """Operands indexed by different ground sets."""


class ValidationError(InputError):
    """An object failed its structural invariants (axioms, simplicity...)."""


class LimitError(OmmorseError):
    """A configured size limit would be exceeded."""


class StructureError(OmmorseError):
    """Internal structural inconsistency (bad oracle, broken partition)."""


class TheoremViolationError(OmmorseError):
    """A runtime check of a proved statement failed on supposedly valid input."""
