"""Mixed-state Schmidt decompositions and Schmidt-coefficient separability criteria."""

from .bases import (CoefficientMatrix, OperatorBasis, bloch_form, coefficient_matrix, gell_mann_basis,
                    matrix_unit_basis, reconstruct)
from .channels import (QuantumChannel, apply_channel, channel_coeff_matrix, choi_state, depolarizing_channel,
                       eb_check, identity_channel, make_channel, random_channel)
from .criteria import (CriterionReport, SuperOperatorSpec, TransformSpec, Verdict, apply_product_superop,
                       e_transform, estimate_eps, filter_check, filter_transform, identity_transform, rc_check,
                       sympoly_check, theta_check, theta_transform, transform_check, zhang_check)
from .errors import (DimensionError, FilterNotContractiveError, InvalidDensityError, NegativeRadicandError,
                     NotTracePreservingError, NumericError, SchmidtScopeError)
from .linalg import (BipartiteState, Tolerances, hs_inner, kron, partial_trace, singular_values, trace_norm,
                     unvec, validate_density, vec)
from .schmidt import (SchmidtDecomposition, SchmidtSpectrum, SymmetricPolynomials, ccn, realign,
                      schmidt_decomposition, schmidt_equivalent, schmidt_observables, schmidt_spectrum,
                      symmetric_polynomials)
from .states import (isotropic, max_entangled, product_state, random_density, random_pure, random_separable,
                     random_state, werner)

__version__ = "0.1.0"
