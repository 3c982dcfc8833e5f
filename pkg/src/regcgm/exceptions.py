"""Exception hierarchy shared by the solvers, problems and harness."""


class CGMError(Exception):
    """Base class for every error raised by :mod:`regcgm`."""


class NotDescent(CGMError, ValueError):
    """The search direction is not a descent direction (g.dx >= 0)."""


class LineSearchFailure(CGMError, RuntimeError):
    """No Strong Wolfe point was found within the trial budget."""


class DegenerateDenominator(CGMError, ArithmeticError):
    """A beta formula was asked to divide by (numerically) zero."""


class CurvatureViolation(CGMError, ArithmeticError):
    """A step pair violates p.y > 0, so no positive definite update exists."""


class ZeroGradient(CGMError, ArithmeticError):
    """A ratio normalised by ||g||^2 was requested at a stationary point."""


class DegenerateScalars(CGMError, ArithmeticError):
    """The restart memory produced non-positive regularisation scalars."""


class DegenerateD(CGMError, ArithmeticError):
    """The denominator of the regularised rank-1 correction vanished."""


class Singular(CGMError, ArithmeticError):
    """A dense matrix handed to the oracle is rank deficient."""


class NoTrace(CGMError, ValueError):
    """A diagnostic needs a per-iteration trace but none was recorded."""


class ConfigError(CGMError, ValueError):
    """A benchmark configuration or CLI argument is invalid."""
