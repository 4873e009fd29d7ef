"""Numerical workbench for amplitude-damping-adapted quantum codes.

Builds damping channels and the permutation-invariant code family, checks
the grouped (probabilistic) error-correction conditions by direct matrix
computation, synthesizes the post-selected recovery channel, evaluates
fidelity/success-probability figures of merit, and evaluates the
noise-adapted packing bound in exact arithmetic.
"""

from .channels import (ErrorGrouping, KrausChannel, ad_code_channel,
                       ad_qubit_kraus, ad_qudit_kraus, apply_channel,
                       extend_with_identity, tensor_channel, truncate_to_order)
from .codes import (QuantumCode, bare_qubit_code, build_bosonic_code,
                    build_family_code, build_literature_41_code,
                    build_two_qutrit_code, code_to_document, load_code,
                    pis_state)
from .errors import (AdqecError, ChiZero, ConditionsNotMet, DimensionCap,
                     InsufficientSamples, LevelOverflow, NotContraction,
                     NotOrthonormal, NotPSD, OutOfRange, SchemaError,
                     ShapeMismatch, SingularSupport, UnsupportedK)
from .fidelity import (FidelityCurve, FitResult, RobustnessConfig,
                       curves_to_csv, entanglement_fidelity, fidelity_curve,
                       fit_leading_order, logical_bloch_state,
                       robust_entanglement_fidelity, state_fidelity,
                       success_probability, worst_case_fidelity)
from .hamming import (BoundReport, binomial_identity_holds, check_bound,
                      verify_family_optimality, zeta, zeta_polynomial)
from .linalg import (DEFAULT_TOL, dag, is_hermitian, is_psd, is_unitary, ket,
                     kron, largest_eigenvalue_psd, principal_sqrt_psd)
from .recovery import (DilationCircuit, RecoveryPlan, build_dilation_channel,
                       build_nonunitary_gate, correct_state, petz_recovery,
                       run_gate_dilated_recovery, standard_recovery,
                       synthesize_recovery, three_qubit_success_probability)
from .verifier import (AqecReport, SubspaceAtlas, ad_grouped_channel,
                       build_subspace_atlas, check_theorem1, check_theoremS2,
                       chi_closed_form)

__version__ = "0.1.0"
