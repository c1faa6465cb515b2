"""Units, ambiguous classes and capitulation for k = Q(sqrt(2pq), i)."""
from .capitulation import (application_profile, genus_kernel, kappa, kappa_K1, kappa_K2,
                           kappa_K3, kernel_size)
from .errors import InconsistencyError, PreconditionError
from .genus import ambiguous_report, ambiguous_sizes, find_auxiliary_prime
from .oracle import fixtures, imag_class_group, kuroda_h_k, real_class_number
from .quadfield import fundamental_unit, square_class_case
from .units import fsu, unit_index

__version__ = "0.1.0"

__all__ = [
    "InconsistencyError", "PreconditionError", "ambiguous_report", "ambiguous_sizes",
    "application_profile", "find_auxiliary_prime", "fixtures", "fsu", "fundamental_unit",
    "genus_kernel", "imag_class_group", "kappa", "kappa_K1", "kappa_K2", "kappa_K3",
    "kernel_size", "kuroda_h_k", "real_class_number", "square_class_case", "unit_index",
]
