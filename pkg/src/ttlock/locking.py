"""Per-partition truth-table locking: the core obfuscation pass.

Each locked partition's output functions are replaced by keyed families
that reproduce the original outputs under the partition's correct key
slice and a documented corruption (rotation, bus subtraction, inversion,
dummy substitution, or a seeded random table) under every wrong slice
value. Dummy inputs borrowed from elsewhere in the circuit widen the
table space; their selection rules keep the result acyclic.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .aig import to_aig
from .hypergraph import PartitionSet, build_hypergraph, compute_partition_size, partition
from .netlist import GateKind, Netlist, NetlistBuilder, TopoOrder, topo_order
from .tables import BooleanFunction, TableSynthesizer, lift

MAX_TT_INPUTS = 12        # per-output extraction cone arity cap
SYNTH_ARITY_BUDGET = 16   # inputs + dummies + keys per resynthesized output


class LockError(Exception):
    pass


class NothingLockedError(LockError):
    pass


class ArityOverflowError(LockError):
    pass


class TransformError(LockError):
    pass


class IneffectiveTransformError(TransformError):
    pass


class TransformKind(enum.Enum):
    SHUFFLED_OUTPUTS = "shuffled_outputs"
    ARITHMETIC = "arithmetic"
    INVERTED_OUTPUTS = "inverted_outputs"
    DUMMY_SUBSTITUTION = "dummy_substitution"
    RANDOM_FUNCTION = "random_function"


@dataclass(frozen=True)
class PartitionView:
    """One partition seen as a standalone block: gates, ports, cone shape."""

    index: int
    gates: frozenset[int]
    local_inputs: tuple[int, ...]          # net ids entering the partition, ascending
    local_outputs: tuple[int, ...]         # net ids leaving or driving POs, ascending
    max_logic_depth: int
    fanin_coverage: tuple[float, ...]      # per output: |cone inputs| / |I|
    cone_inputs: tuple[tuple[int, ...], ...]
    cone_gates: tuple[frozenset[int], ...]
    min_input_level: int

    @property
    def n_inputs(self) -> int:
        return len(self.local_inputs)

    @property
    def n_outputs(self) -> int:
        return len(self.local_outputs)


@dataclass(frozen=True)
class TransformSpec:
    kind: TransformKind
    key_bits: tuple[int, ...]          # correct slice values, LSB first
    key_offset: int = 0                # slice occupies keyinput<offset>...
    dummy_nets: tuple[int, ...] = ()
    seed: int = 0

    @property
    def width(self) -> int:
        return len(self.key_bits)

    @property
    def correct_value(self) -> int:
        return sum(b << j for j, b in enumerate(self.key_bits))


@dataclass(eq=False)
class KeyedFunction:
    """One output's keyed truth table over (inputs..., dummies..., keys...)."""

    input_nets: tuple[int, ...]
    dummy_nets: tuple[int, ...]
    n_keys: int
    correct_key: int
    table: np.ndarray

    @property
    def arity(self) -> int:
        return len(self.input_nets) + len(self.dummy_nets) + self.n_keys

    def as_function(self) -> BooleanFunction:
        return BooleanFunction.from_array(self.table)


@dataclass(frozen=True)
class ComplexityStats:
    n: int
    k: int
    d: int
    entries: int                 # wrong-key table locations
    f_count: int | None          # exact when entries <= 64
    f_count_log2: int

    def f_count_str(self) -> str:
        if self.f_count is not None:
            return str(self.f_count)
        return f"2^{self.f_count_log2}"


def complexity_stats(n: int, k: int, d: int) -> ComplexityStats:
    """Corrupted-function table capacity for one output: 2^(n+k+d) - 2^(n+d)."""
    if n < 1 or k < 1 or d < 0:
        raise ValueError("need n >= 1, k >= 1, d >= 0")
    entries = (1 << (n + k + d)) - (1 << (n + d))
    return ComplexityStats(
        n=n, k=k, d=d,
        entries=entries,
        f_count=(1 << entries) if entries <= 64 else None,
        f_count_log2=entries,
    )


def key_to_hex(bits: tuple[int, ...] | list[int]) -> str:
    """Key bits to one hex literal; bit (k-1) is the most significant."""
    value = sum(b << i for i, b in enumerate(bits))
    digits = max(1, (len(bits) + 3) // 4)
    return f"0x{value:0{digits}x}"

def hex_to_key(text: str, k_size: int) -> tuple[int, ...]:
    value = int(text.strip(), 16)
    if value >> k_size:
        raise ValueError(f"key value wider than {k_size} bits")
    return tuple((value >> i) & 1 for i in range(k_size))


# ---------------------------------------------------------------------------
# partition views


def partition_views(n: Netlist, topo: TopoOrder, ps: PartitionSet) -> list[PartitionView]:
    """Materialize every partition's port lists, cones, and depth profile."""
    part_of = ps.assignment
    po_nets = set(n.primary_outputs)
    inputs: list[set[int]] = [set() for _ in range(ps.p)]
    outputs: list[set[int]] = [set() for _ in range(ps.p)]
    members: list[list[int]] = [[] for _ in range(ps.p)]
    for g in n.gates:
        p = part_of[g.id]
        members[p].append(g.id)
        for i in g.inputs:
            drv = n.nets[i].driver
            if drv is None or part_of[drv] != p:
                inputs[p].add(i)
        out = g.output
        if out in po_nets or any(part_of[s] != p for s in n.nets[out].sinks):
            outputs[p].add(out)

    views = []
    for p in range(ps.p):
        gate_set = frozenset(members[p])
        ins = tuple(sorted(inputs[p]))
        outs = tuple(sorted(outputs[p]))
        depth = _internal_depth(n, gate_set)
        cone_in: list[tuple[int, ...]] = []
        cone_g: list[frozenset[int]] = []
        cov: list[float] = []
        in_set = set(ins)
        for o in outs:
            cg, ci = _partition_cone(n, gate_set, in_set, o)
            cone_g.append(frozenset(cg))
            cone_in.append(tuple(sorted(ci)))
            cov.append(len(ci) / len(ins) if ins else 0.0)
        min_level = min((topo.net_level(n, i) for i in ins), default=0)
        views.append(PartitionView(
            index=p,
            gates=gate_set,
            local_inputs=ins,
            local_outputs=outs,
            max_logic_depth=depth,
            fanin_coverage=tuple(cov),
            cone_inputs=tuple(cone_in),
            cone_gates=tuple(cone_g),
            min_input_level=min_level,
        ))
    return views


def _internal_depth(n: Netlist, gate_set: frozenset[int]) -> int:
    depth: dict[int, int] = {}
    for gid in sorted(gate_set):
        _gate_depth(n, gate_set, gid, depth)
    return max(depth.values(), default=0)


def _gate_depth(n: Netlist, gate_set: frozenset[int], gid: int, depth: dict[int, int]) -> int:
    got = depth.get(gid)
    if got is not None:
        return got
    best = 0
    for i in n.gates[gid].inputs:
        drv = n.nets[i].driver
        if drv is not None and drv in gate_set:
            best = max(best, _gate_depth(n, gate_set, drv, depth))
    depth[gid] = best + 1
    return best + 1


def _partition_cone(n: Netlist, gate_set: frozenset[int], in_set: set[int], out_net: int):
    """Gates and partition-input nets feeding `out_net` inside the partition."""
    gates: set[int] = set()
    cone_in: set[int] = set()
    stack = [out_net]
    while stack:
        net = stack.pop()
        if net in in_set:
            cone_in.add(net)
            continue
        drv = n.nets[net].driver
        if drv is None or drv not in gate_set or drv in gates:
            continue
        gates.add(drv)
        stack.extend(n.gates[drv].inputs)
    return gates, cone_in


def evaluate_partition(view: PartitionView, min_depth: int = 2, min_coverage: float = 0.5) -> bool:
    """Depth-and-coverage gate; (0, 0) disables the evaluation entirely."""
    if not view.local_outputs:
        return False
    if view.max_logic_depth < min_depth:
        return False
    mean_cov = sum(view.fanin_coverage) / len(view.fanin_coverage)
    return mean_cov >= min_coverage


def extract_function(n: Netlist, view: PartitionView, t: int,
                     max_inputs: int = MAX_TT_INPUTS) -> BooleanFunction:
    """Truth table of output t over its partition-restricted cone inputs."""
    cone_in = view.cone_inputs[t]
    arity = len(cone_in)
    if arity > max_inputs:
        raise ArityOverflowError(
            f"partition {view.index} output {t}: cone arity {arity} exceeds {max_inputs}")
    gate_set = view.cone_gates[t]
    width = 1 << arity
    mask = (1 << width) - 1
    values: dict[int, int] = {}
    for pos, net in enumerate(cone_in):
        values[net] = _var_word(pos, arity)
    for gid in _local_topo(n, gate_set):
        g = n.gates[gid]
        words = [values[i] for i in g.inputs]
        values[g.output] = _eval_gate_word(g.kind, words, mask)
    return BooleanFunction(input_arity=arity, table=values[view.local_outputs[t]])


def _var_word(pos: int, n_vars: int) -> int:
    half = 1 << pos
    block = ((1 << half) - 1) << half
    width = half << 1
    total = 1 << n_vars
    while width < total:
        block |= block << width
        width <<= 1
    return block


def _eval_gate_word(kind: GateKind, words: list[int], mask: int) -> int:
    from .simulate import _eval_gate

    return _eval_gate(kind, words, mask)


def _local_topo(n: Netlist, gate_set: frozenset[int]) -> list[int]:
    order: list[int] = []
    seen: set[int] = set()

    def visit(gid: int) -> None:
        if gid in seen:
            return
        seen.add(gid)
        for i in n.gates[gid].inputs:
            drv = n.nets[i].driver
            if drv is not None and drv in gate_set:
                visit(drv)
        order.append(gid)

    for gid in sorted(gate_set):
        visit(gid)
    return order


# ---------------------------------------------------------------------------
# dummy input selection


def assign_dummy_inputs(
    topo: TopoOrder,
    n: Netlist,
    view: PartitionView,
    d_range: tuple[int, int],
    seed: int,
    allowed: set[int] | None = None,
    partition_of: list[int] | None = None,
) -> tuple[tuple[int, ...], list[str]]:
    """Pick d dummy nets for a partition; returns (nets, notes).

    Constraints: a dummy's driver level never exceeds the lowest level among
    the partition's inputs (which also keeps it outside every output's
    fan-out cone, so no combinational loop can form), and it is not already
    a partition input. Nets driven by other partitions at exactly that
    lowest level are preferred; the rest fill seeded-uniformly.
    """
    rng = random.Random(seed)
    lo, hi = d_range
    if lo < 0 or hi < lo:
        raise ValueError("bad d_range")
    want = rng.randint(lo, hi)
    notes: list[str] = []
    if want == 0:
        return (), notes
    in_set = set(view.local_inputs)
    max_level = view.min_input_level

    def qualifies(net_id: int) -> bool:
        if net_id in in_set:
            return False
        if allowed is not None and net_id not in allowed:
            return False
        return topo.net_level(n, net_id) <= max_level

    pool = [net.id for net in n.nets if qualifies(net.id)]
    preferred = []
    rest = []
    for nid in pool:
        drv = n.nets[nid].driver
        other = drv is not None and (partition_of is None or partition_of[drv] != view.index)
        if other and topo.net_level(n, nid) == max_level:
            preferred.append(nid)
        else:
            rest.append(nid)
    if want > len(pool):
        notes.append(f"dummy count reduced from {want} to {len(pool)}: not enough qualifying nets")
        want = len(pool)
    take = rng.sample(preferred, min(want, len(preferred)))
    if len(take) < want:
        take += rng.sample(rest, want - len(take))
    return tuple(sorted(take)), notes


# ---------------------------------------------------------------------------
# keyed-table construction


def transform(
    funcs: list[BooleanFunction],
    input_nets: list[tuple[int, ...]],
    spec: TransformSpec,
) -> list[KeyedFunction]:
    """Build each output's keyed table per the chosen corruption row.

    Correct slice value reproduces the original outputs for every dummy
    assignment. Raises IneffectiveTransformError when no wrong key would
    corrupt anything (the caller then picks a different kind).
    """
    m = len(funcs)
    if m == 0:
        raise TransformError("no outputs to transform")
    if len(input_nets) != m:
        raise TransformError("funcs and input_nets disagree")
    k = spec.width
    if k < 1:
        raise TransformError("key slice must have at least 1 bit")
    if spec.kind in (TransformKind.SHUFFLED_OUTPUTS, TransformKind.ARITHMETIC) and m < 2:
        raise TransformError(f"{spec.kind.value} requires at least 2 outputs")
    d = len(spec.dummy_nets)
    union_all = tuple(sorted(set().union(*input_nets))) if m > 1 else input_nets[0]

    def needed_inputs(t: int) -> tuple[int, ...]:
        if spec.kind is TransformKind.ARITHMETIC:
            return union_all
        if spec.kind is TransformKind.SHUFFLED_OUTPUTS:
            return tuple(sorted(set(input_nets[t]) | set(input_nets[(t - 1) % m])))
        return input_nets[t]

    for t in range(m):
        arity = len(needed_inputs(t)) + d + k
        if arity > SYNTH_ARITY_BUDGET:
            raise TransformError(
                f"output {t}: keyed arity {arity} exceeds budget {SYNTH_ARITY_BUDGET}")

    rng = random.Random(spec.seed)
    correct = spec.correct_value
    outs: list[KeyedFunction] = []
    effective = False

    def base_block(t: int, vars_in: tuple[int, ...]) -> np.ndarray:
        pos = [vars_in.index(x) for x in input_nets[t]]
        return lift(funcs[t].to_array(), pos, len(vars_in) + d)

    if spec.kind is TransformKind.ARITHMETIC:
        keyword = correct % (1 << m)
        if keyword == 0:
            raise IneffectiveTransformError("key word is 0 mod 2^m; subtraction is identity")

    for t in range(m):
        vars_in = needed_inputs(t)
        nb = len(vars_in) + d
        base = base_block(t, vars_in)
        if spec.kind is TransformKind.INVERTED_OUTPUTS:
            wrong = (1 - base).astype(np.uint8)
        elif spec.kind is TransformKind.SHUFFLED_OUTPUTS:
            prev = (t - 1) % m
            pos = [vars_in.index(x) for x in input_nets[prev]]
            wrong = lift(funcs[prev].to_array(), pos, nb)
        elif spec.kind is TransformKind.ARITHMETIC:
            word = np.zeros(1 << nb, dtype=np.int64)
            for j in range(m):
                pos = [vars_in.index(x) for x in input_nets[j]]
                word |= lift(funcs[j].to_array(), pos, nb).astype(np.int64) << j
            corrupted = (word - keyword) % (1 << m)
            wrong = ((corrupted >> t) & 1).astype(np.uint8)
        elif spec.kind is TransformKind.DUMMY_SUBSTITUTION:
            c = len(vars_in)
            idx = np.arange(1 << nb, dtype=np.uint32)
            src = np.zeros(1 << nb, dtype=np.uint32)
            for slot in range(c):
                p = c + slot if slot < d else slot  # dummies sit above the inputs
                src |= ((idx >> p) & 1) << slot
            wrong = funcs[t].to_array()[src]
        else:  # RANDOM_FUNCTION: per-wrong-cofactor seeded tables
            wrong = None
        if wrong is not None:
            table = np.tile(wrong, 1 << k)
            if not np.array_equal(wrong, base):
                effective = True
        else:
            blocks = []
            for w in range(1 << k):
                if w == correct:
                    blocks.append(base)
                    continue
                blk = None
                for _ in range(8):
                    cand = np.frombuffer(rng.randbytes(1 << nb), dtype=np.uint8) % 2
                    if not np.array_equal(cand, base):
                        blk = cand
                        break
                if blk is None:
                    blk = base.copy()
                    blk[0] ^= 1
                blocks.append(blk.astype(np.uint8))
            table = np.concatenate(blocks)
            effective = True
        table[correct << nb:(correct + 1) << nb] = base
        outs.append(KeyedFunction(
            input_nets=vars_in,
            dummy_nets=spec.dummy_nets,
            n_keys=k,
            correct_key=correct,
            table=table.astype(np.uint8),
        ))
    if not effective:
        raise IneffectiveTransformError(
            f"{spec.kind.value}: wrong keys never alter any output")
    return outs


def synthesize_function(family: list[KeyedFunction], name: str = "family") -> Netlist:
    """Standalone gate network for a keyed family (ports named x*/d*/keyinput*).

    Realization is Shannon decomposition with key bits decomposed first and
    constant-leaf pruning; exactness is checked by the caller's simulation.
    """
    if not family:
        raise TransformError("empty family")
    b = NetlistBuilder(name)
    net_map: dict[int, int] = {}
    all_inputs = sorted({x for f in family for x in f.input_nets})
    for j, src in enumerate(all_inputs):
        net_map[src] = b.add_input(f"x{j}")
    dummies = family[0].dummy_nets
    dmap = {src: b.add_input(f"d{j}") for j, src in enumerate(dummies)}
    k = family[0].n_keys
    keys = [b.add_input(f"keyinput{j}") for j in range(k)]
    anchor = net_map[all_inputs[0]] if all_inputs else (list(dmap.values()) + keys)[0]
    synth = TableSynthesizer(b, anchor_input=anchor)
    for t, f in enumerate(family):
        var_nets = tuple(net_map[x] for x in f.input_nets) \
            + tuple(dmap[x] for x in f.dummy_nets) + tuple(keys)
        b.mark_output(synth.synth(f.table, var_nets, out_name=b.fresh_name(f"y{t}")))
    return b.build()


# ---------------------------------------------------------------------------
# the lock pipeline


@dataclass
class PartitionRecord:
    index: int
    locked: bool
    reason: str | None = None
    gates: list[str] = field(default_factory=list)
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    transform: str | None = None
    key_offset: int | None = None
    key_width: int | None = None
    key_bits: list[int] | None = None
    dummy_nets: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    cone_arities: list[int] = field(default_factory=list)
    wrong_key_effective: bool = False  # lock-time exhaustive difference check

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "locked": self.locked,
            "reason": self.reason,
            "gates": self.gates,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "transform": self.transform,
            "key_offset": self.key_offset,
            "key_width": self.key_width,
            "key_bits": self.key_bits,
            "dummy_nets": self.dummy_nets,
            "notes": self.notes,
            "cone_arities": self.cone_arities,
            "wrong_key_effective": self.wrong_key_effective,
        }


@dataclass
class LockResult:
    netlist: Netlist
    key_bits: tuple[int, ...]
    manifest: dict

    @property
    def key_hex(self) -> str:
        return key_to_hex(self.key_bits)


def lock_netlist(
    n: Netlist,
    k_size: int,
    seed: int = 0,
    aig: bool = False,
    partition_size: int | None = None,
    min_depth: int = 2,
    min_coverage: float = 0.5,
    dummy_max: int = 4,
    balance_tol: float = 0.25,
) -> LockResult:
    """Full pipeline: partition the netlist and lock each eligible partition.

    Key bits are split over locked partitions as contiguous slices covering
    bits 0..k_size-1 in processing order. Raises NothingLockedError when no
    partition survives eligibility.
    """
    if k_size < 1:
        raise ValueError("k_size must be >= 1")
    if n.key_inputs:
        raise LockError("netlist already carries keyinput nets; refusing to re-lock")
    if not n.primary_inputs:
        raise LockError("netlist has no primary inputs")
    if not n.gates:
        raise LockError("netlist has no gates")
    rng = random.Random(seed)
    target = partition_size if partition_size is not None else compute_partition_size(n.gate_count, k_size)

    work = to_aig(n) if aig else n
    topo = topo_order(work)
    h = build_hypergraph(work)
    ps = partition(h, target, balance_tol=balance_tol, seed=rng.getrandbits(32))
    views = partition_views(work, topo, ps)

    order = list(range(ps.p))
    rng.shuffle(order)

    records: dict[int, PartitionRecord] = {}
    eligible: list[PartitionView] = []
    for pi in order:
        view = views[pi]
        rec = PartitionRecord(
            index=pi,
            locked=False,
            gates=[work.nets[work.gates[g].output].name for g in sorted(view.gates)],
            inputs=[work.nets[i].name for i in view.local_inputs],
            outputs=[work.nets[o].name for o in view.local_outputs],
            cone_arities=[len(c) for c in view.cone_inputs],
        )
        records[pi] = rec
        if not view.local_outputs:
            rec.reason = "no live outputs"
            continue
        if not evaluate_partition(view, min_depth, min_coverage):
            rec.reason = "failed depth/coverage evaluation"
            continue
        if max(rec.cone_arities) > MAX_TT_INPUTS:
            rec.reason = f"cone arity exceeds {MAX_TT_INPUTS}"
            continue
        eligible.append(view)
    if not eligible:
        raise NothingLockedError("no partition is eligible for locking")

    widths = _key_slice_widths(eligible, k_size, records)
    locked_views = [v for v in eligible if widths.get(v.index, 0) > 0]
    if not locked_views:
        raise NothingLockedError("no key bits could be assigned")

    # nets that disappear: internals of locked partitions (outputs survive)
    removed_gates: set[int] = set()
    for v in locked_views:
        removed_gates |= v.gates
    surviving_net: list[bool] = [True] * len(work.nets)
    for v in locked_views:
        out_set = set(v.local_outputs)
        for gid in v.gates:
            out = work.gates[gid].output
            if out not in out_set:
                surviving_net[out] = False
    allowed = {net.id for net in work.nets if surviving_net[net.id]}

    nb = NetlistBuilder(work.name)
    for nid in work.primary_inputs:
        nb.add_input(work.nets[nid].name)
    key_nets = [nb.add_input(f"keyinput{i}") for i in range(k_size)]
    # pre-register surviving names in net-id order so synthesis cannot
    # hand out a fresh name that an original net still needs
    for net in work.nets:
        if surviving_net[net.id]:
            nb.ensure_net(net.name)
    for g in work.gates:
        if g.id in removed_gates:
            continue
        nb.add_gate(g.kind, [nb.ensure_net(work.nets[i].name) for i in g.inputs],
                    work.nets[g.output].name)

    synth = TableSynthesizer(nb, anchor_input=nb.net_id(work.nets[work.primary_inputs[0]].name))
    key_bits_all: list[int] = [0] * k_size
    offset = 0
    for v in locked_views:
        rec = records[v.index]
        width = widths[v.index]
        slice_bits = tuple(rng.getrandbits(1) for _ in range(width))
        d_cap = SYNTH_ARITY_BUDGET - max(rec.cone_arities) - width
        d_hi = max(0, min(dummy_max, v.n_inputs, d_cap))
        dummies, notes = assign_dummy_inputs(
            topo, work, v, (0, d_hi), seed=rng.getrandbits(32),
            allowed=allowed, partition_of=ps.assignment,
        )
        rec.notes.extend(notes)
        spec_seed = rng.getrandbits(32)
        funcs = [extract_function(work, v, t) for t in range(v.n_outputs)]
        input_nets = [v.cone_inputs[t] for t in range(v.n_outputs)]
        kinds = _eligible_kinds(work, topo, v, input_nets, width, len(dummies), slice_bits)
        family = None
        chosen = None
        while kinds:
            chosen = kinds.pop(rng.randrange(len(kinds)))
            spec = TransformSpec(kind=chosen, key_bits=slice_bits, key_offset=offset,
                                 dummy_nets=dummies, seed=spec_seed)
            try:
                family = transform(funcs, input_nets, spec)
                break
            except TransformError:
                family = None
        if family is None:
            rec.reason = "no effective transform available"
            continue
        slice_nets = key_nets[offset:offset + width]
        for t, kf in enumerate(family):
            var_nets = tuple(nb.ensure_net(work.nets[x].name) for x in kf.input_nets) \
                + tuple(nb.ensure_net(work.nets[x].name) for x in kf.dummy_nets) \
                + tuple(slice_nets)
            synth.synth(kf.table, var_nets, out_name=work.nets[v.local_outputs[t]].name)
        for j, bit in enumerate(slice_bits):
            key_bits_all[offset + j] = bit
        rec.locked = True
        rec.transform = chosen.value
        rec.key_offset = offset
        rec.key_width = width
        rec.key_bits = list(slice_bits)
        rec.dummy_nets = [work.nets[x].name for x in dummies]
        rec.wrong_key_effective = True  # transform() raised otherwise
        offset += width
    if not any(rec.locked for rec in records.values()):
        raise NothingLockedError("every eligible partition failed to lock")
    unassigned = k_size - offset
    for j in range(offset, k_size):
        key_bits_all[j] = rng.getrandbits(1)

    for nid in work.primary_outputs:
        nb.mark_output(nb.ensure_net(work.nets[nid].name))
    locked = nb.build()
    key_bits = tuple(key_bits_all)
    manifest = {
        "schema_version": 1,
        "kind": "lock_manifest",
        "name": n.name,
        "seed": seed,
        "key_size": k_size,
        "aig": aig,
        "partition_size": target,
        "balance_tol": balance_tol,
        "min_depth": min_depth,
        "min_coverage": min_coverage,
        "dummy_max": dummy_max,
        "partition_count": ps.p,
        "gates_total_original": n.gate_count,
        "gates_total_working": work.gate_count,
        "gates_total_locked": locked.gate_count,
        "correct_key_hex": key_to_hex(key_bits),
        "unassigned_key_bits": unassigned,
        "partitions_locked": sum(1 for r in records.values() if r.locked),
        "partitions_skipped": sum(1 for r in records.values() if not r.locked),
        "partitions": [records[pi].to_json() for pi in order],
    }
    return LockResult(netlist=locked, key_bits=key_bits, manifest=manifest)


def _key_slice_widths(eligible: list[PartitionView], k_size: int,
                      records: dict[int, PartitionRecord]) -> dict[int, int]:
    """Contiguous slice widths per eligible partition, capped by table budget."""
    widths: dict[int, int] = {}
    if k_size < len(eligible):
        for rank, v in enumerate(eligible):
            if rank < k_size:
                widths[v.index] = 1
            else:
                records[v.index].reason = "no key bits left"
        return widths
    base = k_size // len(eligible)
    rem = k_size % len(eligible)
    caps = {
        v.index: max(1, SYNTH_ARITY_BUDGET - max(records[v.index].cone_arities))
        for v in eligible
    }
    carry = 0
    for rank, v in enumerate(eligible):
        want = base + (1 if rank < rem else 0) + carry
        got = min(want, caps[v.index])
        widths[v.index] = got
        carry = want - got
    if carry:
        for v in eligible:
            room = caps[v.index] - widths[v.index]
            if room > 0:
                add = min(room, carry)
                widths[v.index] += add
                carry -= add
                if carry == 0:
                    break
    return widths


def _eligible_kinds(
    work: Netlist,
    topo: TopoOrder,
    view: PartitionView,
    input_nets: list[tuple[int, ...]],
    width: int,
    d: int,
    slice_bits: tuple[int, ...],
) -> list[TransformKind]:
    """Kinds whose arity fits the budget and whose wiring stays acyclic."""
    m = view.n_outputs
    kinds: list[TransformKind] = []
    base_ok = max(len(c) for c in input_nets) + d + width <= SYNTH_ARITY_BUDGET
    if base_ok:
        kinds += [TransformKind.INVERTED_OUTPUTS, TransformKind.RANDOM_FUNCTION]
        if d > 0:
            kinds.append(TransformKind.DUMMY_SUBSTITUTION)
    if m >= 2:
        union_all = tuple(sorted(set().union(*input_nets)))
        if len(union_all) + d + width <= SYNTH_ARITY_BUDGET and \
                _cross_cone_safe(work, topo, view, [union_all] * m):
            correct = sum(b << j for j, b in enumerate(slice_bits))
            if correct % (1 << m) != 0:
                kinds.append(TransformKind.ARITHMETIC)
        shuffle_sets = [
            tuple(sorted(set(input_nets[t]) | set(input_nets[(t - 1) % m])))
            for t in range(m)
        ]
        if max(len(s) for s in shuffle_sets) + d + width <= SYNTH_ARITY_BUDGET and \
                _cross_cone_safe(work, topo, view, shuffle_sets):
            kinds.append(TransformKind.SHUFFLED_OUTPUTS)
    return sorted(kinds, key=lambda k: k.value)


def _cross_cone_safe(work: Netlist, topo: TopoOrder, view: PartitionView,
                     var_sets: list[tuple[int, ...]]) -> bool:
    """Every borrowed input must sit strictly below the output it now feeds;
    levels are a potential function, so this guarantees global acyclicity."""
    for t, vars_in in enumerate(var_sets):
        out_level = topo.net_level(work, view.local_outputs[t])
        own = set(view.cone_inputs[t])
        for x in vars_in:
            if x in own:
                continue
            if topo.net_level(work, x) >= out_level:
                return False
    return True


def lock_partition(
    n: Netlist,
    view: PartitionView,
    spec: TransformSpec,
    topo: TopoOrder,
) -> Netlist:
    """Lock exactly one partition with an explicit TransformSpec.

    Creates the slice's keyinput nets; raises TransformError/LockError on
    any failure, leaving the caller's netlist untouched.
    """
    if n.key_inputs:
        raise LockError("netlist already carries keyinput nets")
    funcs = [extract_function(n, view, t) for t in range(view.n_outputs)]
    input_nets = [view.cone_inputs[t] for t in range(view.n_outputs)]
    family = transform(funcs, input_nets, spec)

    nb = NetlistBuilder(n.name)
    for nid in n.primary_inputs:
        nb.add_input(n.nets[nid].name)
    key_nets = [nb.add_input(f"keyinput{spec.key_offset + j}") for j in range(spec.width)]
    for g in n.gates:
        if g.id in view.gates:
            continue
        nb.add_gate(g.kind, [nb.ensure_net(n.nets[i].name) for i in g.inputs],
                    n.nets[g.output].name)
    synth = TableSynthesizer(nb, anchor_input=nb.net_id(n.nets[n.primary_inputs[0]].name))
    for t, kf in enumerate(family):
        var_nets = tuple(nb.ensure_net(n.nets[x].name) for x in kf.input_nets) \
            + tuple(nb.ensure_net(n.nets[x].name) for x in kf.dummy_nets) \
            + tuple(key_nets)
        synth.synth(kf.table, var_nets, out_name=n.nets[view.local_outputs[t]].name)
    for nid in n.primary_outputs:
        nb.mark_output(nb.ensure_net(n.nets[nid].name))
    return nb.build()


# ---------------------------------------------------------------------------
# baseline XOR/XNOR key-gate locking (attack calibration corpus)


def xor_lock(n: Netlist, key_size: int, seed: int = 0) -> tuple[Netlist, tuple[int, ...]]:
    """Classic key-gate insertion: XOR (correct 0) or XNOR (correct 1) on
    randomly chosen gate-output nets."""
    if n.key_inputs:
        raise LockError("netlist already carries keyinput nets")
    candidates = [net.id for net in n.nets if net.driver is not None]
    if key_size > len(candidates):
        raise LockError(f"only {len(candidates)} lockable nets for {key_size} key bits")
    rng = random.Random(seed)
    chosen = sorted(rng.sample(candidates, key_size))
    bits = tuple(rng.getrandbits(1) for _ in chosen)

    nb = NetlistBuilder(n.name)
    taken = {net.name for net in n.nets}
    for nid in n.primary_inputs:
        nb.add_input(n.nets[nid].name)
    key_nets = [nb.add_input(f"keyinput{i}") for i in range(key_size)]
    # locked net w: original driver now feeds w__raw; key gate drives w
    raw_name = {}
    for i, nid in enumerate(chosen):
        base = f"{n.nets[nid].name}__raw"
        while base in taken:
            base += "_"
        taken.add(base)
        raw_name[nid] = base
    for g in n.gates:
        out = g.output
        out_name = raw_name.get(out, n.nets[out].name)
        nb.add_gate(g.kind, [nb.ensure_net(n.nets[i].name) for i in g.inputs], out_name)
    for i, nid in enumerate(chosen):
        kind = GateKind.XNOR if bits[i] else GateKind.XOR
        nb.add_gate(kind, (nb.ensure_net(raw_name[nid]), key_nets[i]), n.nets[nid].name)
    for nid in n.primary_outputs:
        nb.mark_output(nb.ensure_net(n.nets[nid].name))
    return nb.build(), bits
