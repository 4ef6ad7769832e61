"""Tropical rational regression.

Fits ``f(x) = p(c x) - q(c x)``, a difference of max-plus polynomials with a
fixed exponent set, to data under the sup norm by alternating closed-form
polynomial fits, and converts fitted models to equivalent ReLU networks.
"""

from .semiring import (DegenerateColumnError, ShapeError, chebyshev_solution,
                       greatest_subsolution, maxplus_mvp, minplus_mvp)
from .poly import (EvaluationError, ExponentSet, TropicalPolynomial, build_design_matrix,
                   eval_naive, eval_stream, fit_polynomial_linf)
from .ratfit import (Certificate, FitConfig, FitTrace, TropicalRational, alternating_fit,
                     certificate, loss, relative_error, update_denominator, update_numerator)
from .relu import ReluNetwork, max_combine, rational_to_relu, relu_forward
from .data import Dataset, load_model, read_csv, save_model, write_csv

__version__ = "0.1.0"
