"""Harmonic analysis on homogeneous trees: Poisson transform, spherical
functions, Helgason-Fourier inversion, boundary martingales, Lorentz norms."""

__version__ = "0.1.0"

from .boundary import (CylinderFunction, Martingale, cond_expect, cylinder_measure, diff,
                       inner, integrate, maximal, refine)
from .exceptions import CalibrationError, NotEigenfunction, PoleError, SingularSystem
from .lorentz import boundary_lp_norm, lorentz_norm, weak_norm, weak_norm_growth
from .poisson import (b_coeff, ball_maximal_M, check_eigen, epsilon_n, epsilon_star, laplacian,
                      martingale_from_eigenfunction, poisson_kernel_pow, poisson_transform)
from .spectral import (SpectralParam, StripParams, c_func, calibrate_plancherel, gamma,
                       plancherel_density, spherical, tau)
from .transforms import (SpectralSample, hf_transform, invert, parseval, restriction_lhs,
                         spherical_transform, symmetry_residual)
from .tree import ROOT, Tree, TreeFunction, Vertex, format_vertex, parse_vertex
