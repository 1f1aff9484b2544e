"""Exception hierarchy shared across the package."""


class GridspectError(Exception):
    """Base class for all errors raised by this package."""


class MapFormatError(GridspectError):
    """Unreadable, unsupported or inconsistent map file / metadata."""


class NonSquareMapError(GridspectError):
    """Operation requires a square map; pad first."""


class AsymmetricMaskError(GridspectError):
    """Masked spectrum lost conjugate symmetry; inverse is not real."""


class ConstantProfileError(GridspectError):
    """Directional profile is constant; the spectrum carries no direction."""


class NotALocalMaximumError(GridspectError):
    """Prominence requested at an index that is not a local maximum."""


class NoStructureError(GridspectError):
    """No dominant directions found; map is unsuitable for reconstruction."""


class NoSeparationError(GridspectError):
    """Mixture component means coincide; no usable score threshold."""


class TooFewSamplesError(GridspectError):
    """Not enough score samples to fit the two-component mixture."""


class PlacementError(GridspectError):
    """Could not place an obstacle; the map has too little free space."""


class ZeroVarianceError(GridspectError):
    """Correlation undefined: one of the variables has zero variance."""
