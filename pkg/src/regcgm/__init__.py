"""Memoryless-BFGS conjugate gradient with hybrid cubic regularisation."""
from .cgm import (
    RestartMemory,
    SolveOptions,
    SolveReport,
    SolverState,
    Status,
    apply_Ht,
    beta_pr,
    dir_memoryless,
    dir_restart,
    dir_scaled,
    powell_fraction,
    powell_triggered,
    solve_cgm,
)
from .cubic import (
    CubicOptions,
    RegScalars,
    apply_Ht_lambda,
    cubic_weight,
    dir_regularized,
    lambda_init,
    p_tilde,
    powell_fraction_curve,
    solve_hybrid,
)
from .exceptions import (
    CGMError,
    ConfigError,
    CurvatureViolation,
    DegenerateD,
    DegenerateDenominator,
    DegenerateScalars,
    LineSearchFailure,
    NotDescent,
    NoTrace,
    Singular,
    ZeroGradient,
)
from .linesearch import LineSearchParams, LineSearchResult, line_search
from .problems.analytic import PROBLEMS, get_problem
from .problems.base import Problem, quadratic

__version__ = "0.1.0"
