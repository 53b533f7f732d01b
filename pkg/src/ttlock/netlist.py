"""Gate-level combinational netlist IR with BENCH parse/emit and cone queries."""

from __future__ import annotations

import enum
import heapq
import re
from dataclasses import dataclass, field

_KEY_INPUT_RE = re.compile(r"keyinput(\d+)\Z")
_NAME_RE = re.compile(r"[A-Za-z0-9_.\[\]$]+\Z")
_GATE_LINE_RE = re.compile(r"(?P<out>[^=\s]+)\s*=\s*(?P<kind>[A-Za-z]+)\s*\((?P<ins>[^()]*)\)\s*\Z")
_PORT_LINE_RE = re.compile(r"(?P<dir>INPUT|OUTPUT)\s*\((?P<name>[^()]+)\)\s*\Z")


class NetlistError(ValueError):
    """Structural violation: bad arity, duplicate driver, cycle, unknown net."""


class BenchParseError(NetlistError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class GateKind(enum.Enum):
    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"

    @property
    def is_unary(self) -> bool:
        return self in (GateKind.NOT, GateKind.BUF)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    inputs: tuple[int, ...]  # net ids
    output: int              # net id


@dataclass(frozen=True)
class Net:
    id: int
    name: str
    driver: int | None             # gate id; None for primary/key inputs
    sinks: tuple[int, ...] = ()    # gate ids, ascending


@dataclass(frozen=True)
class Netlist:
    """Immutable combinational netlist.

    Net and gate ids are dense non-negative integers in construction order.
    Key inputs are the nets named ``keyinput<i>``, held in ascending index
    order; all other declared inputs are primary inputs.
    """

    name: str
    nets: tuple[Net, ...]
    gates: tuple[Gate, ...]
    primary_inputs: tuple[int, ...]
    key_inputs: tuple[int, ...]
    primary_outputs: tuple[int, ...]
    _by_name: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def key_size(self) -> int:
        return len(self.key_inputs)

    def net_named(self, name: str) -> Net:
        try:
            return self.nets[self._by_name[name]]
        except KeyError:
            raise NetlistError(f"unknown net {name!r}") from None

    def input_net_ids(self) -> tuple[int, ...]:
        return self.primary_inputs + self.key_inputs

    def pi_names(self) -> list[str]:
        return [self.nets[i].name for i in self.primary_inputs]

    def po_names(self) -> list[str]:
        return [self.nets[i].name for i in self.primary_outputs]

    def key_names(self) -> list[str]:
        return [self.nets[i].name for i in self.key_inputs]


@dataclass(frozen=True)
class TopoOrder:
    """Gate levels and a level-consistent evaluation order.

    Inputs sit at level 0; every gate is one deeper than its deepest driver.
    Ties within a level break by ascending gate id.
    """

    level: dict[int, int]
    order: tuple[int, ...]

    def net_level(self, n: Netlist, net_id: int) -> int:
        drv = n.nets[net_id].driver
        return 0 if drv is None else self.level[drv]


class NetlistBuilder:
    """Accumulates nets/gates and validates the result into a Netlist."""

    def __init__(self, name: str = "top"):
        self.name = name
        self._net_names: list[str] = []
        self._drivers: list[int | None] = []
        self._sinks: list[list[int]] = []
        self._by_name: dict[str, int] = {}
        self._gates: list[tuple[GateKind, tuple[int, ...], int]] = []
        self._pis: list[int] = []
        self._keys: list[int] = []
        self._pos: list[int] = []

    def _new_net(self, name: str) -> int:
        if name in self._by_name:
            raise NetlistError(f"duplicate net name {name!r}")
        nid = len(self._net_names)
        self._net_names.append(name)
        self._drivers.append(None)
        self._sinks.append([])
        self._by_name[name] = nid
        return nid

    def fresh_name(self, stem: str) -> str:
        if stem not in self._by_name:
            return stem
        i = 0
        while f"{stem}_{i}" in self._by_name:
            i += 1
        return f"{stem}_{i}"

    def net_id(self, name: str) -> int | None:
        return self._by_name.get(name)

    def ensure_net(self, name: str) -> int:
        """Net id for `name`, creating an (as yet) undriven net on demand."""
        nid = self._by_name.get(name)
        return nid if nid is not None else self._new_net(name)

    def add_input(self, name: str) -> int:
        nid = self._new_net(name)
        m = _KEY_INPUT_RE.match(name)
        if m:
            self._keys.append(nid)
        else:
            self._pis.append(nid)
        return nid

    def add_gate(self, kind: GateKind, inputs: list[int] | tuple[int, ...], out_name: str) -> int:
        inputs = tuple(inputs)
        if kind.is_unary:
            if len(inputs) != 1:
                raise NetlistError(f"{kind.value} takes exactly 1 input, got {len(inputs)}")
        elif len(inputs) < 2:
            raise NetlistError(f"{kind.value} takes >= 2 inputs, got {len(inputs)}")
        out = self._by_name.get(out_name)
        if out is None:
            out = self._new_net(out_name)
        elif self._drivers[out] is not None or out in self._pis or out in self._keys:
            raise NetlistError(f"net {out_name!r} has multiple drivers")
        gid = len(self._gates)
        self._gates.append((kind, inputs, out))
        self._drivers[out] = gid
        for i in inputs:
            self._sinks[i].append(gid)
        return out

    def mark_output(self, net_id: int) -> None:
        self._pos.append(net_id)

    def build(self) -> Netlist:
        inputs = set(self._pis) | set(self._keys)
        for nid, drv in enumerate(self._drivers):
            if drv is None and nid not in inputs:
                raise NetlistError(f"net {self._net_names[nid]!r} is undriven and not an input")
        self._keys.sort(key=lambda nid: int(_KEY_INPUT_RE.match(self._net_names[nid]).group(1)))
        nets = tuple(
            Net(nid, self._net_names[nid], self._drivers[nid],
                tuple(s) if len(s) < 2 else tuple(sorted(set(s))))
            for nid, s in enumerate(self._sinks)
        )
        gates = tuple(Gate(gid, k, ins, out) for gid, (k, ins, out) in enumerate(self._gates))
        n = Netlist(
            name=self.name,
            nets=nets,
            gates=gates,
            primary_inputs=tuple(self._pis),
            key_inputs=tuple(self._keys),
            primary_outputs=tuple(self._pos),
            _by_name=dict(self._by_name),
        )
        topo_order(n)  # raises on combinational cycles
        return n


def parse_bench(text: str, name: str = "top") -> Netlist:
    """Parse BENCH text (``INPUT(x)``, ``OUTPUT(y)``, ``y = KIND(a, b)``, ``#`` comments).

    Nets named ``keyinput<i>`` are classified as key inputs. Net and gate ids
    follow declaration order: inputs first, then gate outputs.
    """
    inputs: list[tuple[int, str]] = []
    outputs: list[tuple[int, str]] = []
    gate_lines: list[tuple[int, str, GateKind, list[str]]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip().rstrip("\r")
        if not line:
            continue
        m = _PORT_LINE_RE.match(line)
        if m:
            port = m.group("name").strip()
            if not _NAME_RE.match(port):
                raise BenchParseError(f"bad net name {port!r}", line_no)
            (inputs if m.group("dir") == "INPUT" else outputs).append((line_no, port))
            continue
        m = _GATE_LINE_RE.match(line)
        if m:
            out = m.group("out").strip()
            kind_name = m.group("kind").upper()
            if kind_name == "BUFF":
                kind_name = "BUF"
            try:
                kind = GateKind(kind_name)
            except ValueError:
                raise BenchParseError(f"unknown gate kind {m.group('kind')!r}", line_no) from None
            ins = [s.strip() for s in m.group("ins").split(",") if s.strip()]
            if not _NAME_RE.match(out) or not all(_NAME_RE.match(i) for i in ins):
                raise BenchParseError("bad net name in gate statement", line_no)
            gate_lines.append((line_no, out, kind, ins))
            continue
        raise BenchParseError(f"unrecognized statement {line!r}", line_no)

    b = NetlistBuilder(name)
    for line_no, port in inputs:
        try:
            b.add_input(port)
        except NetlistError as e:
            raise BenchParseError(str(e), line_no) from None
    defined = {port for _, port in inputs} | {out for _, out, _, _ in gate_lines}
    for line_no, out, kind, ins in gate_lines:
        for i in ins:
            if i not in defined:
                raise BenchParseError(f"undefined net {i!r}", line_no)
    for line_no, out, kind, ins in gate_lines:
        try:
            b.add_gate(kind, [b.net_id(i) if b.net_id(i) is not None else b._new_net(i) for i in ins], out)
        except NetlistError as e:
            raise BenchParseError(str(e), line_no) from None
    for line_no, port in outputs:
        nid = b.net_id(port)
        if nid is None:
            raise BenchParseError(f"undefined net {port!r}", line_no)
        b.mark_output(nid)
    try:
        return b.build()
    except NetlistError as e:
        raise BenchParseError(str(e)) from None


def emit_bench(n: Netlist) -> str:
    """Emit BENCH text; parse_bench(emit_bench(n)) is isomorphic to n."""
    lines = []
    for nid in n.primary_inputs:
        lines.append(f"INPUT({n.nets[nid].name})")
    if n.key_inputs:
        lines.append("# key input")
        for nid in n.key_inputs:
            lines.append(f"INPUT({n.nets[nid].name})")
    for nid in n.primary_outputs:
        lines.append(f"OUTPUT({n.nets[nid].name})")
    lines.append("")
    for g in n.gates:
        ins = ", ".join(n.nets[i].name for i in g.inputs)
        lines.append(f"{n.nets[g.output].name} = {g.kind.value}({ins})")
    return "\n".join(lines) + "\n"


def topo_order(n: Netlist) -> TopoOrder:
    """Levelize gates (inputs at 0); raises NetlistError on a cycle."""
    indeg = [0] * len(n.gates)
    for g in n.gates:
        # distinct nets only: relaxation walks deduplicated sink lists
        indeg[g.id] = sum(1 for i in set(g.inputs) if n.nets[i].driver is not None)
    level: dict[int, int] = {}
    ready = sorted(g.id for g in n.gates if indeg[g.id] == 0)
    for gid in ready:
        level[gid] = 1
    order: list[int] = []
    # Kahn with (level, gate id) priority keeps the order deterministic.
    heap = [(1, gid) for gid in ready]
    heapq.heapify(heap)
    while heap:
        lvl, gid = heapq.heappop(heap)
        order.append(gid)
        for sink in n.nets[n.gates[gid].output].sinks:
            indeg[sink] -= 1
            cand = lvl + 1
            if cand > level.get(sink, 0):
                level[sink] = cand
            if indeg[sink] == 0:
                heapq.heappush(heap, (level[sink], sink))
    if len(order) != len(n.gates):
        raise NetlistError("combinational cycle detected")
    return TopoOrder(level=level, order=tuple(order))


def fanin_cone(n: Netlist, net_id: int) -> set[int]:
    """Gates transitively driving a net, including the net's own driver."""
    _check_net(n, net_id)
    seen: set[int] = set()
    stack = [net_id]
    while stack:
        drv = n.nets[stack.pop()].driver
        if drv is None or drv in seen:
            continue
        seen.add(drv)
        stack.extend(n.gates[drv].inputs)
    return seen


def fanout_cone(n: Netlist, net_id: int) -> set[int]:
    """Gates transitively driven by a net (its own driver excluded)."""
    _check_net(n, net_id)
    seen: set[int] = set()
    stack = list(n.nets[net_id].sinks)
    while stack:
        gid = stack.pop()
        if gid in seen:
            continue
        seen.add(gid)
        stack.extend(n.nets[n.gates[gid].output].sinks)
    return seen


def _check_net(n: Netlist, net_id: int) -> None:
    if not 0 <= net_id < len(n.nets):
        raise NetlistError(f"unknown net id {net_id}")


def structurally_equal(a: Netlist, b: Netlist) -> bool:
    """Name-based isomorphism: same ports in order, same gate set."""
    if a.pi_names() != b.pi_names() or a.key_names() != b.key_names():
        return False
    if a.po_names() != b.po_names():
        return False
    def gate_set(n: Netlist):
        return {
            (n.nets[g.output].name, g.kind, tuple(n.nets[i].name for i in g.inputs))
            for g in n.gates
        }
    return gate_set(a) == gate_set(b)
