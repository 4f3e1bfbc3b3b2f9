"""Green's functions, resolvent kernels and finite-rank perturbations of the nonlocal operator
-1/2 int |x-y| f(y) dy for -u'' on [0,1] with self-adjoint real-coupled boundary conditions."""

from .bc import BoundaryCondition, discriminant, gsarc, has_zero_eigenvalue, named
from .greens import green_kernel, riesz_kernel, verify_green
from .perturbation import perturbation_kernel, perturbation_matrix, perturbation_spectrum, rank
from .resolvent import characteristic_roots, laurent_contour, laurent_limits, resolvent_eval
from .spectral import nystrom_eigs

__all__ = [
    "BoundaryCondition",
    "characteristic_roots",
    "discriminant",
    "green_kernel",
    "gsarc",
    "has_zero_eigenvalue",
    "laurent_contour",
    "laurent_limits",
    "named",
    "nystrom_eigs",
    "perturbation_kernel",
    "perturbation_matrix",
    "perturbation_spectrum",
    "rank",
    "resolvent_eval",
    "riesz_kernel",
    "verify_green",
]
