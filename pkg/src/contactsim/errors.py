"""Exception hierarchy for contactsim.

Numerical failure modes get their own classes so callers can react to a
singular Hessian differently from, say, a grazing contact. Precondition
violations that indicate caller bugs (wrong dimensions, exterior starts)
also raise from here rather than from bare asserts.
"""


class ContactSimError(Exception):
    """Base class for all contactsim errors."""


class DimensionMismatch(ContactSimError):
    """State dimensions do not match the system's configuration dimension."""


class NonFiniteValue(ContactSimError):
    """An evaluator produced NaN or infinity."""


class SingularHessian(ContactSimError):
    """The velocity Hessian of the Lagrangian is singular at the given state."""


class SingularMassMatrix(ContactSimError):
    """The mass matrix cannot be inverted."""


class NoConvergence(ContactSimError):
    """An iterative solve exhausted its iteration budget."""


class StepSizeUnderflow(ContactSimError):
    """Adaptive step control drove the step size below machine resolution."""


class MaxStepsExceeded(ContactSimError):
    """The integration step budget was exhausted before the horizon."""


class NoSignChange(ContactSimError):
    """Event localization was requested on a segment without a sign change."""


class GrazingContact(ContactSimError):
    """Boundary encounter with numerically zero normal velocity."""


class DegenerateNormal(ContactSimError):
    """The boundary gradient vanishes at the impact point."""


class ConvergedToIdentity(ContactSimError):
    """The impact solve found only the trivial (no reflection) root."""


class ExteriorState(ContactSimError):
    """A state left the admissible region outside of an impact event."""


class TimeOutOfRange(ContactSimError):
    """A sample time lies outside the trajectory's time span."""


class ConfigError(ContactSimError):
    """A run configuration failed validation; message names the field."""
