"""Partition-based truth-table logic locking toolkit."""

from .netlist import (
    BenchParseError,
    GateKind,
    Netlist,
    NetlistBuilder,
    NetlistError,
    TopoOrder,
    emit_bench,
    fanin_cone,
    fanout_cone,
    parse_bench,
    topo_order,
)
from .simulate import Assignment, EquivReport, PortMismatchError, equivalence_check, simulate
from .hypergraph import (
    Hypergraph,
    PartitionSet,
    build_hypergraph,
    compute_partition_size,
    cut_size,
    partition,
)
from .aig import to_aig
from .tables import BooleanFunction
from .locking import (
    ComplexityStats,
    LockResult,
    NothingLockedError,
    PartitionView,
    TransformKind,
    TransformSpec,
    assign_dummy_inputs,
    complexity_stats,
    evaluate_partition,
    extract_function,
    hex_to_key,
    key_to_hex,
    lock_netlist,
    lock_partition,
    partition_views,
    synthesize_function,
    transform,
    xor_lock,
)
from .metrics import (
    MetricsReport,
    composite_score,
    coverage_index,
    formality_index,
    key_entry_nodes,
    metrics_report,
    sample_wrong_keys,
    scatter_index,
)
from .optimize import eliminate_dead, estimate, overhead_report, propagate_constants
from .attacks import (
    AttackLimitError,
    AttackResult,
    brute_force_keys,
    dip_attack,
    hill_climb,
    sweep_attack,
)
from .generate import random_netlist

__version__ = "0.1.0"
