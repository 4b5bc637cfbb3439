"""Index transforms with the kernel |K_{(alpha + i tau)/2}(x)|^2.

Forward and adjoint transforms, their inversions, norm-inequality checks
and the associated boundary-value field, all with error estimates.
"""

from .errors import (BoundConstraintError, ConvergenceError, DomainError, IntegrandError, KLError,
                     NonIntegrableError, PoleError, PreconditionError, TailModelError)
from .functions import RealFunction, exp_decay, gauss_half, gauss_line, sech_line, xgauss, zero
from .inversion import (AdjointInversion, EpsilonSchedule, SampledFunction, inv_kernel, invert_adjoint,
                        invert_adjoint_alpha1_limit, invert_forward, invert_forward_alpha0,
                        invert_forward_alpha1, lemma3_check, moment_matched_test_function, sample_forward)
from .kernel import (KernelParams, phi, phi_cosh_route, phi_derivatives, phi_direct, phi_integral,
                     phi_mellin_barnes, ode_residual)
from .pde import PdeConfig, pde_residual, residual_convergence, solve_ivp, u_field
from .quadrature import QuadConfig, QuadResult
from .specfun import beta, bessel_i, bessel_k, gamma, hyp1f2, hyp2f3, recip_gamma
from .transforms import (BoundParams, TransformResult, adjoint, bound_values, forward, forward_via_composition,
                         forward_via_mellin, hs_norm_f0, meijer_k)

__version__ = "0.1.0"
