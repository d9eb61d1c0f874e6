"""Simulator for photon-mediated quantum gates on cavity-coupled NV-center spins.

A single photon, prepared in an equal R/L polarization superposition, is
routed through polarizing interferometers enclosing NV-cavity reflections,
measured in the F/S basis, and outcome-conditioned single-spin corrections
complete a deterministic CNOT, Toffoli, or Fredkin gate on the electron
spins.  The package simulates both the ideal regime and lossy cavities,
parses circuits from a small netlist format, and reproduces the closed-form
fidelity/efficiency curves of the scheme.
"""

from .cavity import (
    CavityParams,
    IDEAL_PAIR,
    ParameterError,
    ReflectionPair,
    coupling_ratio_to_r,
    kappa_from_quality_factor,
    quality_factor_conversions,
    reflection_at_ratio,
    reflection_coefficient,
    resonant_pair,
    scatter,
)
from .elements import (
    Element,
    Kind,
    Pauli,
    WiringError,
    apply_bs,
    apply_element,
    apply_hwp,
    apply_pbs_fs,
    apply_pbs_rl,
    apply_spin_hadamard,
    apply_spin_pauli,
)
from .gates import (
    GATE_NAMES,
    TargetGate,
    build_gate_circuit,
    build_mz_block,
    build_two_nv_mz_block,
    feedforward_table,
    ideal_gate_unitary,
    load_shipped_circuit,
)
from .netlist import (
    DiagnosticKind,
    Netlist,
    NetlistError,
    Outcome,
    apply_elements,
    apply_spin_ops,
    balanced_product_input,
    iter_element_states,
    load_netlist,
    max_nv_path_depth,
    nv_element_count,
    parse_netlist,
    product_input,
    run_netlist,
    serialize_netlist,
)
from .state import (
    DimensionMismatchError,
    HybridState,
    L,
    MINUS,
    ModeError,
    NormalizationError,
    PLUS,
    R,
    SpinState,
    StateError,
    make_product_state,
    overlap,
    partial_trace_photon_collapse,
    phase_aligned_deviation,
    spin_config_bits,
    spin_config_index,
    states_close,
)

__version__ = "0.1.0"
