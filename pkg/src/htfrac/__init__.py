"""Numerical verification toolkit for conformal fractional sub-Laplacians on H-type groups."""
__version__ = "0.1.0"

from ._dispatch import backend
from .config import RunConfig, parse_config
from .errors import (CalibrationError, ConfigError, DivergenceError, DomainError, HtfracError,
                     InvalidInputError, PreconditionError, PrecisionWarning, SingularityError,
                     UnsupportedFeatureError)
from .fields import (ScalarField, bump, constant, gauge_power, gaussian, koranyi_profile,
                     plateau_bump, polynomial, rescale, translate, zero)
from .forms import quadratic_form, seminorm, sobolev_quotient, weak_residual
from .groups import (GroupPoint, GroupSpec, custom_group, dilate, euclidean, gauge,
                     group_from_id, heisenberg, inverse, make_point, multiply, quaternionic,
                     validate_htype)
from .haar import gauge_annulus_integral, omega_Q, sigma_Q, unit_ball_volume
from .heat import HeatKernelQuery, heat_kernel, riesz_norm_kernel
from .limits import one_limit, zero_limit
from .lorentz import LorentzCutoffSpec, lorentz_cutoff_norm
from .operator import apply_Ls, sub_laplacian, tail, tail_profile
from .quadrature import QuadratureConfig
from .report import CheckRecord, VerificationReport
from .special import kernel_constants, log_gamma
from .yamabe import (ExplicitSolutionSpec, bubble, calibrate_alpha, decay_fit,
                     explicit_solution, intertwining_check, tail_decay_check)

__all__ = [n for n in dir() if not n.startswith("_")]
