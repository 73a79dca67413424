"""Exception types and the debug-check switch shared by all twinmat modules."""

import os


class TwinmatError(Exception):
    """Base class for all errors raised by this package."""


class BoundsError(TwinmatError):
    """A coordinate, index, or interval lies outside its valid range."""


class OverlapError(TwinmatError):
    """Two rectangles that must be disjoint intersect."""


class MalformedSequence(TwinmatError):
    """A contraction sequence does not reduce the finest division to the coarsest."""


class ContractViolation(TwinmatError):
    """A caller broke an operation's contract (e.g. cover() beyond extend_right())."""


class EmptyError(TwinmatError):
    """An operation that requires an uncovered cell was called on a full cover."""


class FormatError(TwinmatError):
    """A serialized stream or text file is malformed."""


class InvalidN(TwinmatError):
    """A size parameter that must be a power of two is not."""


class ConstructionInvariantError(TwinmatError):
    """An internal invariant of the construction pipeline failed."""


def debug_checks() -> bool:
    """True when TWINMAT_DEBUG=1; enables optional invariant assertions."""
    return os.environ.get("TWINMAT_DEBUG") == "1"
