"""Test problems: analytic CUTEr-style functions and random ML instances."""
from .analytic import PROBLEMS, QUADRATIC, get_problem
from .base import Problem, quadratic
from .ml import (
    GroupLassoInstance,
    HuberInstance,
    gen_glasso,
    gen_huber,
    glasso_problem,
    glasso_value_grad,
    huber_problem,
    huber_value_grad,
)
