"""Exception hierarchy for the frequency-regulation toolkit.

Three families map onto distinct CLI exit codes: configuration problems
(ValueError, exit 2), numeric-regime problems (exit 3), and unsatisfiable
or infeasible sizing/allocation problems (exit 4).
"""


class VppFreqError(Exception):
    """Base class for domain errors raised by this package."""


class OverdampedError(VppFreqError):
    """Damping ratio >= 1: the oscillatory closed form does not apply."""


class NeverActivatesError(VppFreqError):
    """The disturbance is too small for the frequency to leave a dead band."""


class NonFiniteError(VppFreqError):
    """A simulated state became NaN or infinite (step size too large)."""


class UnsatisfiableError(VppFreqError):
    """No admissible (inertia, damping) pair meets the security limits."""


class DeadbandExceedsLimitError(UnsatisfiableError):
    """The quasi-steady-state limit lies inside the VPP droop dead band."""


class InfeasibleError(VppFreqError):
    """Box constraints cannot absorb the required total inertia or damping."""


class MissingCompensationError(VppFreqError):
    """Profit was requested but no compensation prices are configured."""


class EmptyFrontError(VppFreqError):
    """Bargaining was requested over an empty candidate front."""
