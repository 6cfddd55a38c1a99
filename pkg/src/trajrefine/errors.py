"""Exception types raised across the package."""


class TrajRefineError(Exception):
    """Base class for all package errors."""


class OutOfMapError(TrajRefineError, ValueError):
    """A query position lies outside the grid bounds."""


class NoBoundaryError(TrajRefineError):
    """The map holds only one occupancy class, so no boundary exists."""


class DegenerateGradientError(TrajRefineError):
    """The SDF gradient vanishes (or is undefined) at the query cell."""


class DegenerateDirectionError(TrajRefineError):
    """A separation direction cannot be formed (zero-length vector)."""


class NoCorrectionNeeded(TrajRefineError):
    """The pose is already clear of obstacles by at least half the robot size."""


class CorrectionFailed(TrajRefineError):
    """Hill-climbing along the separation ray did not reach a collision-free cell."""


class RejectedInput(TrajRefineError, ValueError):
    """Refinement was handed a trajectory that violates its preconditions."""


class NoPathError(TrajRefineError):
    """The global planner found no connection between start and goal."""


class MapFormatError(TrajRefineError, ValueError):
    """A map file could not be parsed."""


class SchemaError(TrajRefineError, ValueError):
    """A scenario or trajectory document does not match its schema."""
