"""Exact simulation of cross-Kerr, homodyne-heralded photonic quantum gates."""

from .circuit import (
    Circuit,
    DetectPolarization,
    Element,
    Feedforward,
    Homodyne,
    Leaf,
    Postselect,
    circuit_from_dict,
    circuit_to_dict,
    dumps,
    loads,
    run_circuit,
)
from .elements import apply_element, mixer
from .errors import (
    CircuitError,
    NonUnitaryError,
    OccupationError,
    OracleLimitError,
    RegistryError,
    SimulationError,
    ZeroNormError,
)
from .gates import (
    Gate,
    GateSpec,
    build_gate,
    cnot_gate,
    controlled_gate,
    cpath_gate,
    cu_condition,
    cu_gate,
    fredkin_gate,
    mcu_gate,
    povm_transfer,
    synthetic_inner,
    toffoli_gate,
)
from .measurement import detect_polarization, discrimination_error, homodyne_x, postselect_paths
from .oracle import compare_with_engine, enumerate_oracle, ideal_gate_matrix, logical_fidelity, truth_table
from .state import (
    ModeId,
    OccupationConfig,
    PhotonicState,
    ProbeSpec,
    declare_state,
    inner_product,
    logical_state,
    normalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
