"""Finite-scale computations around H^1-projectivity of Banach spaces.

Sequence spaces and quotients, vector-valued trigonometric polynomials,
summability kernels, roots-of-unity sampling, operator symbols and their
bounded extensions, Hardy martingales and Riesz-projection lifting.
"""

from .errors import (DimensionMismatch, GridTooSmall, HardyProjError, InconsistentLift,
                     LacunaryError, PreconditionError)
from .spaces import (INF, LinearMap, QuotientSpace, SequenceSpace, bm_witness, dual_exponent,
                     norm, op_norm, quotient_norm)
from .trigpoly import VecTrigPoly, convolve, evaluate, lp_norm, riesz_minus, riesz_plus
from .kernels import KernelSpec, fejer, kernel_coeff, kernel_eval, kernel_l1, poisson, vdp
from .sampling import exact_mean_check, lemma52_bounds, prop53_bounds
from .extension import (OperatorSymbol, eta_lower_certificate, eta_upper, extend_min,
                        h1_op_norm_lower, tensor_norm_bounds)
from .martingale import (HardyMartingale, lacunary_pack, sample_path, square_fn_check,
                         steinhaus_vs_rademacher, substitute_freq, uhmd_estimate, weyl_check)
from .lifting import LiftReport, lift, riesz_lower_L1_Lhalf

__version__ = "0.1.0"
