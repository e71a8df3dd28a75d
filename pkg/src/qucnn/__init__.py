"""SWAP-test quantum convolution with on-device backpropagation.

Qubit 0 is the least-significant bit of every basis index.
"""

from .conv import (
    FeatureMap,
    FilterParams,
    FilterState,
    build_filter_state,
    conv_forward,
    swap_test,
)
from .encoding import (
    EncodedPatch,
    ImageGrid,
    Patch,
    encode_patch,
    extract_patches,
    normalize_patch,
    preparation_unitary,
)
from .gradients import (
    AncillaAngle,
    GradientReport,
    UpstreamGradient,
    ancilla_scaled_probability,
    chain_grad_host,
    entangled_grad,
    finite_diff_grad,
    gradient_report,
    param_shift_grad,
    range_map_upstream,
    theta_beta,
)
from .oracle import (
    ClassicalFilter,
    ComparisonStats,
    classical_conv,
    compare_maps,
    normalized_similarity_map,
)
from .statevector import (
    MeasurementResult,
    Shots,
    StateVector,
    UnitaryMatrix,
    apply_cnot,
    apply_cswap,
    apply_h,
    apply_ry,
    apply_rz,
    apply_unitary,
    fidelity,
    new_state,
    prob_zero,
    sample_measure,
)
from .training import TrainingConfig, TrainingTrajectory, state_fidelity_loss, train_filter

__version__ = "0.1.0"
