"""Exact generator calculus, chaos grades and four-moment bounds for Pearson diffusions."""

from .polycalc import MPoly, Poly
from .pearson import (
    PearsonClass,
    PearsonParams,
    beta_law,
    classify,
    f_law,
    gamma_law,
    gaussian,
    inverse_gamma,
    moments,
    skew_t,
    student_t,
)

__version__ = "0.1.0"
