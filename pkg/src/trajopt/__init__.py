"""Optimal unitary trajectories under commuting target and cost observables.

Given a state spectrum and the diagonals of two commuting observables, the
package constructs the trajectory of states minimizing the cost at every
attainable target value, lifts it to doubly-stochastic matrices and
two-level unitaries, supports a third conserved observable, and verifies
everything against brute-force polytope oracles.
"""

from .core import (
    COEFF_EPS,
    PreferredOrder,
    ProblemInstance,
    cost_value,
    preferred_order,
    target_value,
    validate,
)
from .polytope import (
    AvSwap,
    VertexSet,
    av_swaps,
    enumerate_vertices,
    is_edge,
    majorizes,
)
from .trajectory import (
    MinimalCostFunction,
    MinimumUniqueness,
    OptimalTrajectory,
    SwapStep,
    build,
    entry_point,
    maximal_vertex,
    minimal_vertex,
    next_step,
    omega_opt,
    state_at,
    swap_candidates,
    uniqueness_at_minimum,
)
from .lift import (
    LiftedPoint,
    TTransform,
    TwoLevelRotation,
    lift_point,
    rotation_matrix,
    t_transform_matrix,
    unistochastic_of,
)
from .conserved import (
    BlockStructure,
    GeneralizedInstance,
    block_decompose,
    block_spectra,
    build_generalized,
    coherence_mass,
    dephase,
    from_density_matrix,
    from_populations,
    generalized_vertex_count,
    swap_candidates_generalized,
)
from .cooling import (
    CoolingInstance,
    SystemSpec,
    coherent_instance,
    cooling_steps,
    demo_coherent_erasure,
    demo_incoherent_cooling,
    free_energy_bound,
    incoherent_instance,
    qubit_gradient,
    subspace_passive,
    thermal_populations,
)
from .oracle import (
    AuditReport,
    InducedPolygon,
    envelope_min_cost,
    induced_polygon,
    monte_carlo_audit,
    sample_doubly_stochastic,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "av_swaps",
    "AvSwap",
    "block_decompose",
    "block_spectra",
    "BlockStructure",
    "build",
    "build_generalized",
    "COEFF_EPS",
    "coherence_mass",
    "coherent_instance",
    "cooling_steps",
    "CoolingInstance",
    "cost_value",
    "demo_coherent_erasure",
    "demo_incoherent_cooling",
    "dephase",
    "entry_point",
    "enumerate_vertices",
    "envelope_min_cost",
    "free_energy_bound",
    "from_density_matrix",
    "from_populations",
    "generalized_vertex_count",
    "GeneralizedInstance",
    "incoherent_instance",
    "induced_polygon",
    "InducedPolygon",
    "is_edge",
    "lift_point",
    "LiftedPoint",
    "majorizes",
    "maximal_vertex",
    "minimal_vertex",
    "MinimalCostFunction",
    "MinimumUniqueness",
    "monte_carlo_audit",
    "next_step",
    "omega_opt",
    "OptimalTrajectory",
    "preferred_order",
    "PreferredOrder",
    "ProblemInstance",
    "qubit_gradient",
    "rotation_matrix",
    "sample_doubly_stochastic",
    "state_at",
    "subspace_passive",
    "swap_candidates",
    "swap_candidates_generalized",
    "SwapStep",
    "SystemSpec",
    "t_transform_matrix",
    "target_value",
    "thermal_populations",
    "TTransform",
    "TwoLevelRotation",
    "uniqueness_at_minimum",
    "unistochastic_of",
    "validate",
    "VertexSet",
]
