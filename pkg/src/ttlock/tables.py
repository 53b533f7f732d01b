"""Truth-table representation and table-to-gate-network synthesis.

Tables live in two forms: a packed int bit-vector (bit j = output under
input pattern j, LSB = first variable) on the public `BooleanFunction`
surface, and numpy uint8 arrays inside the transform/synthesis engine where
vectorized index arithmetic matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import GateKind, NetlistBuilder


@dataclass(frozen=True)
class BooleanFunction:
    input_arity: int
    table: int  # bit-vector of length 2^input_arity

    def __post_init__(self):
        if self.input_arity < 0:
            raise ValueError("negative arity")
        if self.table < 0 or self.table >> (1 << self.input_arity):
            raise ValueError("table wider than 2^arity")

    def evaluate(self, pattern: int) -> int:
        return (self.table >> pattern) & 1

    def to_array(self) -> np.ndarray:
        size = 1 << self.input_arity
        raw = self.table.to_bytes((size + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little", count=size)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BooleanFunction":
        size = len(arr)
        arity = size.bit_length() - 1
        if 1 << arity != size:
            raise ValueError("table length must be a power of two")
        packed = np.packbits(arr.astype(np.uint8), bitorder="little").tobytes()
        return cls(input_arity=arity, table=int.from_bytes(packed, "little"))


def index_bits(nbits: int, pos: int) -> np.ndarray:
    """Column of variable `pos` over all 2^nbits table indices."""
    idx = np.arange(1 << nbits, dtype=np.uint32)
    return ((idx >> pos) & 1).astype(np.uint8)


def lift(src: np.ndarray, positions: list[int], nbits: int) -> np.ndarray:
    """Re-index a table over `len(positions)` vars onto a 2^nbits var space.

    positions[i] is the target bit position of source variable i.
    """
    idx = np.arange(1 << nbits, dtype=np.uint32)
    src_idx = np.zeros(1 << nbits, dtype=np.uint32)
    for i, p in enumerate(positions):
        src_idx |= ((idx >> p) & 1) << i
    return src[src_idx]


_XOR_TABLE = (0, 1, 1, 0)
_XNOR_TABLE = (1, 0, 0, 1)


class TableSynthesizer:
    """Shannon-decomposes tables into {AND, OR, NOT, XOR} gates in a builder.

    Variables are decomposed from the last list element down, so callers
    order each variable list (inputs..., dummies..., keys...) to put key
    bits at the top of the tree: the correct-key cofactor then embeds the
    original function's logic. Equal cofactors collapse through memoization
    and constant leaves prune the usual mux simplifications.
    """

    def __init__(self, builder: NetlistBuilder, anchor_input: int, name_stem: str = "s"):
        self.b = builder
        self.anchor = anchor_input
        self.stem = name_stem
        self._counter = 0
        self._memo: dict[tuple[tuple[int, ...], bytes], int] = {}
        self._not_cache: dict[int, int] = {}
        self._const: dict[int, int] = {}

    def _fresh(self) -> str:
        self._counter += 1
        return self.b.fresh_name(f"{self.stem}{self._counter}")

    def const_net(self, bit: int) -> int:
        if bit not in self._const:
            if bit == 0:
                na = self.mk_not(self.anchor)
                self._const[0] = self.b.add_gate(GateKind.AND, (self.anchor, na), self._fresh())
            else:
                self._const[1] = self.mk_not(self.const_net(0))
        return self._const[bit]

    def mk_not(self, src: int, out_name: str | None = None) -> int:
        if out_name is None and src in self._not_cache:
            return self._not_cache[src]
        net = self.b.add_gate(GateKind.NOT, (src,), out_name or self._fresh())
        if out_name is None:
            self._not_cache[src] = net
        return net

    def _gate(self, kind: GateKind, a: int, b: int, out_name: str | None = None) -> int:
        return self.b.add_gate(kind, (a, b), out_name or self._fresh())

    def _is_const(self, net: int, bit: int) -> bool:
        return self._const.get(bit) == net

    def _mux(self, sel: int, hi: int, lo: int, out_name: str | None) -> int:
        if hi == lo:
            return self._as_named(hi, out_name)
        if self._is_const(hi, 1) and self._is_const(lo, 0):
            return self._as_named(sel, out_name)
        if self._is_const(hi, 0) and self._is_const(lo, 1):
            return self.mk_not(sel, out_name)
        if self._is_const(hi, 1):
            return self._gate(GateKind.OR, sel, lo, out_name)
        if self._is_const(hi, 0):
            return self._gate(GateKind.AND, self.mk_not(sel), lo, out_name)
        if self._is_const(lo, 1):
            return self._gate(GateKind.OR, self.mk_not(sel), hi, out_name)
        if self._is_const(lo, 0):
            return self._gate(GateKind.AND, sel, hi, out_name)
        a = self._gate(GateKind.AND, sel, hi)
        b = self._gate(GateKind.AND, self.mk_not(sel), lo)
        return self._gate(GateKind.OR, a, b, out_name)

    def _as_named(self, net: int, out_name: str | None) -> int:
        """Force an existing net's value onto a named output via two inverters."""
        if out_name is None:
            return net
        return self.mk_not(self.mk_not(net), out_name)

    def synth(self, table: np.ndarray, var_nets: tuple[int, ...], out_name: str | None = None) -> int:
        """Realize `table` over `var_nets`; returns the driving net id.

        With `out_name` the root gate drives a net of that exact name.
        """
        if len(table) != 1 << len(var_nets):
            raise ValueError("table length does not match variable count")
        if not table.any():
            return self._as_named(self.const_net(0), out_name) if out_name else self.const_net(0)
        if table.all():
            return self._as_named(self.const_net(1), out_name) if out_name else self.const_net(1)
        key = (var_nets, table.tobytes())
        hit = self._memo.get(key)
        if hit is not None:
            return self._as_named(hit, out_name)
        net = self._synth_inner(table, var_nets, out_name)
        if out_name is None:
            self._memo[key] = net
        return net

    def _synth_inner(self, table: np.ndarray, var_nets: tuple[int, ...], out_name: str | None) -> int:
        nvars = len(var_nets)
        if nvars == 1:
            if table[0] == 0 and table[1] == 1:
                return self._as_named(var_nets[0], out_name)
            return self.mk_not(var_nets[0], out_name)
        if nvars == 2:
            quad = tuple(int(x) for x in table)
            if quad == _XOR_TABLE:
                return self._gate(GateKind.XOR, var_nets[0], var_nets[1], out_name)
            if quad == _XNOR_TABLE:
                return self.mk_not(self._gate(GateKind.XOR, var_nets[0], var_nets[1]), out_name)
        half = 1 << (nvars - 1)
        rest = var_nets[:-1]
        lo = self.synth(table[:half], rest)
        hi = self.synth(table[half:], rest)
        return self._mux(var_nets[-1], hi, lo, out_name)
