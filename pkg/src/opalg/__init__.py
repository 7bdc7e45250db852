"""opalg: numerical workbench for states on finite-dimensional operator algebras.

Core objects: :class:`StarAlgebra` (direct sums of matrix blocks),
:class:`State` (blockwise densities), the GNS construction with its
equivalence criteria, qubit-chain product states, finite group
representations, Gaussian/Fock CCR structure, a discretized free scalar
field, and automorphism actions with symmetry-breaking diagnostics.
"""

from .algebra import (
    AlgebraElement,
    StarAlgebra,
    State,
    compose_algebras,
    dual_norm_distance,
    evaluate_state,
    operator_norm,
    tensor_elements,
)
from .ccr import (
    CcrSpace,
    ConstantEigenvalues,
    FiniteEigenvalues,
    FockTruncation,
    PowerTailEigenvalues,
    VacuumShift,
    build_fock_operators,
    gaussian_density,
    gaussian_equivalence_verdict,
    moment_oracle,
    pair_partitions,
    quasi_invariance_factor,
    shifted_vacuum_means,
    wick_moment,
)
from .errors import (
    InvalidStateError,
    NumericalError,
    OpalgError,
    ShapeMismatchError,
    ValidationError,
)
from .fields import (
    EuclideanLattice,
    MassShellGrid,
    TestFunction,
    WightmanEvaluator,
    chronological_reorder,
    commutator_identity_check,
    euclidean_propagator,
    klein_gordon_residual,
    l_form,
    mass_kernel_witness,
    pauli_jordan,
    pauli_jordan_minus,
    shell_bilinear_form,
    tau_decompose,
    three_momentum_form,
    wightman_n_point,
)
from .gns import (
    EquivalenceReport,
    GnsRep,
    commutant_basis,
    equivalence_check,
    gns_construct,
    pure_unitary_intertwiner,
    purity_check,
    summed_generator_matrices,
    superselection_operator,
    transition_elements,
)
from .groups import (
    FiniteGroup,
    GroupRep,
    convolve,
    cyclic_group,
    delta,
    gns_from_group_function,
    group_algebra_action,
    involution,
    irreducible_characters,
    is_positive_definite,
    left_regular_representation,
    orthogonality_check,
    symmetric_group,
)
from .qubits import (
    PowerTail,
    QubitConfig,
    equivalence_verdict,
    finite_marginal_state,
    local_transition_element,
    overlap_defect,
)
from .scenarios import Scenario, parse_scenario, run_scenario
from .series import SeriesVerdict
from .symmetry import (
    AutomorphismGroup,
    InnerAutomorphism,
    one_parameter_flow,
    pushforward_state,
    stabilizer_orbit,
    stationarity_check,
    unitary_implementer,
)

__version__ = "0.1.0"
