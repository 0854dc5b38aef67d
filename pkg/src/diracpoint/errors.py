"""Exception types shared across the package."""


class DiracPointError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DiracPointError):
    """Malformed or inconsistent configuration input."""


class DegenerateNonlinearity(DiracPointError):
    """Polynomial potential is not strictly nonlinear or not confining."""


class LinearCouplingTooLarge(DiracPointError):
    """Linear coupling constant at or above the 2m threshold."""


class RWindowTooLarge(DiracPointError):
    """Requested local-norm window exceeds the domain half-length."""


class OmegaOutsideGap(DiracPointError):
    """Frequency outside the open gap (-m, m)."""


class BranchPoint(DiracPointError):
    """Evaluation requested at a dispersion branch point (omega = +-m)."""


class NonFiniteValue(DiracPointError):
    """Field or point value became non-finite (time step too large)."""


class EnergyDriftExceeded(DiracPointError):
    """Relative energy drift exceeded the configured tolerance."""


class TraceResolutionTooCoarse(DiracPointError):
    """Recorded source trace is too coarse for the requested quadrature."""


class WindowTooShort(DiracPointError):
    """Spectral window holds too few samples."""


class NoGapPeak(DiracPointError):
    """Trace spectrum has no detectable peak inside the gap."""


class UnknownSpec(DiracPointError):
    """Unrecognized initial-data specification."""
