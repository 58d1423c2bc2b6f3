"""Exception types shared across the package."""


class PdcError(Exception):
    """Base class for all package-specific errors."""


class OutOfValidityRange(PdcError):
    """Wavelength falls outside the Sellmeier fit's validity window."""


class NoSignChange(PdcError):
    """A bracketed root search found no sign change over the scan range."""


class DegenerateInput(PdcError):
    """Signal frequency outside the open interval (0, omega_pump)."""


class NonUniformGrid(PdcError):
    """Axis spacing is not uniform where a uniform grid is required."""


class AllZeroField(PdcError):
    """Field grid is identically zero, so no normalization exists."""


class GridTooLarge(PdcError):
    """Grid exceeds the size limit of the brute-force reference path."""


class EmptyOverlap(PdcError):
    """Requested resampling window has no overlap with the source grid."""


class AlreadyWeighted(PdcError):
    """Mode-density weighting was already applied to this map."""


class PeakNotResolved(PdcError):
    """A width measurement spans fewer grid cells than the resolvable minimum."""
