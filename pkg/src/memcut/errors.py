"""Exception types raised by the solvers."""


class DegenerateState(ArithmeticError):
    """A barrier quantity was requested at a point with a nonpositive slack or singular Hessian."""


class CenteringFailure(RuntimeError):
    """Newton centering did not reach tolerance within its iteration limit."""


class CenteringPreconditionError(RuntimeError):
    """Centering was entered from a point that is not close enough to the center."""


class ReplayError(RuntimeError):
    """The second pass of a replayed cutting-plane run diverged from the first."""


class CertificateError(RuntimeError):
    """A dual certificate failed one of its guaranteed inequalities."""


class LedgerError(KeyError):
    """A memory placement was released without having been charged."""


class InvariantViolation(AssertionError):
    """An in-loop invariant of a solver was broken."""
