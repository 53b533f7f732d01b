"""Netlist-to-hypergraph conversion and multilevel balanced min-cut partitioning.

The partitioner follows the classic multilevel recipe: greedy heavy-edge
coarsening down to ~100 vertices, seeded region-growing bisection of the
coarsest graph, projection back through the levels, and move-based
refinement at every level plus a final k-way pass. Partition counts above
two come from recursive bisection.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from .netlist import Netlist

COARSE_TARGET = 100  # stop coarsening near this vertex count
_BISECT_TRIES = 4
_FM_PASSES = 4


@dataclass(frozen=True)
class Hypergraph:
    vertex_count: int
    hyperedges: tuple[tuple[int, ...], ...]

    def validate(self) -> None:
        for e in self.hyperedges:
            if not e:
                raise ValueError("empty hyperedge")
            if any(v < 0 or v >= self.vertex_count for v in e):
                raise ValueError("hyperedge references unknown vertex")


@dataclass
class PartitionSet:
    assignment: list[int]
    p: int
    target_size: int
    balance_tol: float
    warning: str | None = None
    initial_cut: int = 0

    def part_sizes(self) -> list[int]:
        sizes = [0] * self.p
        for part in self.assignment:
            sizes[part] += 1
        return sizes

    def max_size_bound(self) -> int:
        return math.ceil(self.target_size * (1.0 + self.balance_tol))

    def vertices_of(self, part: int) -> list[int]:
        return [v for v, q in enumerate(self.assignment) if q == part]


def compute_partition_size(gates_total: int, k_size: int) -> int:
    """Gates per partition: floor(total/key bits), clamped to at least 1."""
    if gates_total < 1 or k_size < 1:
        raise ValueError("gates_total and k_size must be positive")
    return max(1, gates_total // k_size)


def build_hypergraph(n: Netlist) -> Hypergraph:
    """One vertex per gate (gate-id order); one hyperedge per net with gates."""
    edges = []
    for net in n.nets:
        pins = set(net.sinks)
        if net.driver is not None:
            pins.add(net.driver)
        if pins:
            edges.append(tuple(sorted(pins)))
    return Hypergraph(vertex_count=len(n.gates), hyperedges=tuple(edges))


def cut_size(h: Hypergraph, ps: PartitionSet) -> int:
    """Number of hyperedges spanning two or more partitions."""
    cut = 0
    for e in h.hyperedges:
        first = ps.assignment[e[0]]
        if any(ps.assignment[v] != first for v in e[1:]):
            cut += 1
    return cut


def hmetis_text(h: Hypergraph) -> str:
    lines = [f"{len(h.hyperedges)} {h.vertex_count}"]
    for e in h.hyperedges:
        lines.append(" ".join(str(v + 1) for v in e))
    return "\n".join(lines) + "\n"


def partition_text(ps: PartitionSet) -> str:
    return "\n".join(str(part) for part in ps.assignment) + "\n"


# ---------------------------------------------------------------------------
# internal working representation: unit/summed vertex weights, weighted edges


@dataclass
class _Graph:
    n: int
    edges: list[tuple[int, ...]]
    edge_w: list[int]
    vertex_w: list[int]
    incident: list[list[int]] = field(default_factory=list)

    def build_incidence(self) -> None:
        self.incident = [[] for _ in range(self.n)]
        for ei, e in enumerate(self.edges):
            for v in e:
                self.incident[v].append(ei)


def _make_graph(n: int, raw_edges: list[tuple[int, ...]]) -> _Graph:
    merged: dict[tuple[int, ...], int] = {}
    for e in raw_edges:
        pins = tuple(sorted(set(e)))
        if len(pins) < 2:
            continue  # single-pin edges can never be cut
        merged[pins] = merged.get(pins, 0) + 1
    edges = sorted(merged)
    g = _Graph(n=n, edges=edges, edge_w=[merged[e] for e in edges], vertex_w=[1] * n)
    g.build_incidence()
    return g


def _coarsen_level(g: _Graph, rng: random.Random) -> tuple[_Graph, list[int]] | None:
    """Heavy-edge matching pass; returns (coarser graph, vertex map) or None on stall."""
    order = list(range(g.n))
    rng.shuffle(order)
    match = [-1] * g.n
    for v in order:
        if match[v] != -1:
            continue
        best, best_w = -1, 0.0
        score: dict[int, float] = {}
        for ei in g.incident[v]:
            e = g.edges[ei]
            w = g.edge_w[ei] / (len(e) - 1)
            for u in e:
                if u != v and match[u] == -1:
                    score[u] = score.get(u, 0.0) + w
        for u in sorted(score):
            if score[u] > best_w:
                best, best_w = u, score[u]
        if best != -1:
            match[v] = best
            match[best] = v
        else:
            match[v] = v
    vmap = [-1] * g.n
    nxt = 0
    for v in range(g.n):
        if vmap[v] == -1:
            vmap[v] = nxt
            if match[v] != v and match[v] != -1:
                vmap[match[v]] = nxt
            nxt += 1
    if nxt >= g.n * 0.95:
        return None
    coarse_edges: dict[tuple[int, ...], int] = {}
    for ei, e in enumerate(g.edges):
        pins = tuple(sorted({vmap[v] for v in e}))
        if len(pins) >= 2:
            coarse_edges[pins] = coarse_edges.get(pins, 0) + g.edge_w[ei]
    edges = sorted(coarse_edges)
    cg = _Graph(
        n=nxt,
        edges=edges,
        edge_w=[coarse_edges[e] for e in edges],
        vertex_w=[0] * nxt,
    )
    for v in range(g.n):
        cg.vertex_w[vmap[v]] += g.vertex_w[v]
    cg.build_incidence()
    return cg, vmap


def _bisection_cut(g: _Graph, side: list[int]) -> int:
    cut = 0
    for ei, e in enumerate(g.edges):
        s0 = side[e[0]]
        if any(side[v] != s0 for v in e[1:]):
            cut += g.edge_w[ei]
    return cut


def _grow_bisection(g: _Graph, target_left: int, rng: random.Random) -> list[int]:
    """Seeded BFS-style region growth: side 0 collects ~target_left weight.

    Boundary selection (max connectivity, ties to the lowest vertex id)
    runs through a lazily invalidated heap.
    """
    side = [1] * g.n
    start = rng.randrange(g.n)
    side[start] = 0
    w_left = g.vertex_w[start]
    conn: dict[int, float] = {}
    heap: list[tuple[float, int]] = []

    def absorb(v: int) -> None:
        for ei in g.incident[v]:
            e = g.edges[ei]
            w = g.edge_w[ei] / (len(e) - 1) if len(e) > 1 else 0.0
            for u in e:
                if side[u] == 1:
                    nw = conn.get(u, 0.0) + w
                    conn[u] = nw
                    heapq.heappush(heap, (-nw, u))

    absorb(start)
    while w_left < target_left:
        pick = -1
        while heap:
            negw, u = heapq.heappop(heap)
            if side[u] == 1 and conn.get(u) == -negw:
                pick = u
                break
        if pick == -1:
            rest = [u for u in range(g.n) if side[u] == 1]
            if not rest:
                break
            pick = rest[rng.randrange(len(rest))]
        side[pick] = 0
        w_left += g.vertex_w[pick]
        conn.pop(pick, None)
        absorb(pick)
    return side


def _fm_refine_bisection(
    g: _Graph,
    side: list[int],
    min_w: tuple[int, int],
    max_w: tuple[int, int],
    passes: int = _FM_PASSES,
) -> None:
    """Boundary FM with per-pass rollback to the best seen prefix.

    Only vertices touching a cut edge enter the move heap (interior moves
    can never gain), and a pass aborts after a stall window of moves that
    fail to improve the best prefix - both standard devices for keeping
    refinement near-linear.
    """
    pin_count = [[0, 0] for _ in g.edges]
    side_w = [0, 0]
    for v in range(g.n):
        side_w[side[v]] += g.vertex_w[v]
    for ei, e in enumerate(g.edges):
        for v in e:
            pin_count[ei][side[v]] += 1
    stall_limit = max(64, g.n // 32)

    def gain(v: int) -> int:
        s = side[v]
        gn = 0
        for ei in g.incident[v]:
            pc = pin_count[ei]
            pins = len(g.edges[ei])
            if pc[s] == pins:
                gn -= g.edge_w[ei]
            elif pc[s] == 1:
                gn += g.edge_w[ei]
        return gn

    for _ in range(passes):
        locked = [False] * g.n
        boundary = set()
        for ei, e in enumerate(g.edges):
            pc = pin_count[ei]
            if pc[0] and pc[1]:
                boundary.update(e)
        heap = [(-gain(v), v) for v in sorted(boundary)]
        heapq.heapify(heap)
        trail: list[int] = []
        cum = 0
        best_cum, best_len = 0, 0
        while heap:
            if len(trail) - best_len > stall_limit:
                break
            negg, v = heapq.heappop(heap)
            if locked[v]:
                continue
            cur = gain(v)
            if -negg != cur:
                heapq.heappush(heap, (-cur, v))
                continue
            s, t = side[v], 1 - side[v]
            if side_w[t] + g.vertex_w[v] > max_w[t] or side_w[s] - g.vertex_w[v] < min_w[s]:
                locked[v] = True
                continue
            locked[v] = True
            side[v] = t
            side_w[s] -= g.vertex_w[v]
            side_w[t] += g.vertex_w[v]
            for ei in g.incident[v]:
                pc = pin_count[ei]
                pc[s] -= 1
                pc[t] += 1
                for u in g.edges[ei]:
                    if not locked[u]:
                        heapq.heappush(heap, (-gain(u), u))
            trail.append(v)
            cum += cur
            if cum > best_cum:
                best_cum, best_len = cum, len(trail)
        for v in reversed(trail[best_len:]):
            t = side[v]
            s = 1 - t
            side[v] = s
            side_w[t] -= g.vertex_w[v]
            side_w[s] += g.vertex_w[v]
            for ei in g.incident[v]:
                pin_count[ei][t] -= 1
                pin_count[ei][s] += 1
        if best_cum == 0:
            break


def _bisect(g: _Graph, parts_left: int, parts_right: int, bound: int, rng: random.Random) -> list[int]:
    """Multilevel bisection of g; returns side labels (0 = left)."""
    total_w = sum(g.vertex_w)
    target_left = round(total_w * parts_left / (parts_left + parts_right))
    min_w = (parts_left, parts_right)  # every final part needs >= 1 vertex
    max_w = (
        min(parts_left * bound, total_w - parts_right),
        min(parts_right * bound, total_w - parts_left),
    )

    levels: list[tuple[_Graph, list[int]]] = []
    cur = g
    while cur.n > COARSE_TARGET:
        step = _coarsen_level(cur, rng)
        if step is None:
            break
        cur, vmap = step
        levels.append((cur, vmap))

    best_side: list[int] | None = None
    best_cut = None
    for _ in range(_BISECT_TRIES):
        side = _grow_bisection(cur, target_left, rng)
        _fm_refine_bisection(cur, side, min_w, max_w)
        c = _bisection_cut(cur, side)
        if best_cut is None or c < best_cut:
            best_side, best_cut = list(side), c
    side = best_side or [0] * cur.n

    for finer_idx in range(len(levels) - 1, -1, -1):
        finer = levels[finer_idx - 1][0] if finer_idx > 0 else g
        vmap = levels[finer_idx][1]
        side = [side[vmap[v]] for v in range(finer.n)]
        _fm_refine_bisection(finer, side, min_w, max_w, passes=2)
    if not levels:
        _fm_refine_bisection(g, side, min_w, max_w, passes=2)
    return side


def _recursive_partition(g: _Graph, vertices: list[int], parts: int, bound: int,
                         rng: random.Random, out: list[int], first_label: int) -> None:
    if parts == 1 or g.n == 1:
        for v in range(g.n):
            out[vertices[v]] = first_label
        return
    pl = (parts + 1) // 2
    pr = parts - pl
    side = _bisect(g, pl, pr, bound, rng)
    for side_val, sub_parts, label in ((0, pl, first_label), (1, pr, first_label + pl)):
        sub_vs = [v for v in range(g.n) if side[v] == side_val]
        remap = {v: i for i, v in enumerate(sub_vs)}
        sub_edges = []
        sub_w = []
        for ei, e in enumerate(g.edges):
            pins = tuple(sorted(remap[v] for v in e if v in remap))
            if len(pins) >= 2:
                sub_edges.append(pins)
                sub_w.append(g.edge_w[ei])
        sg = _Graph(
            n=len(sub_vs),
            edges=sub_edges,
            edge_w=sub_w,
            vertex_w=[g.vertex_w[v] for v in sub_vs],
        )
        sg.build_incidence()
        _recursive_partition(sg, [vertices[v] for v in sub_vs], sub_parts, bound, rng, out, label)


def _kway_refine(h: Hypergraph, assignment: list[int], p: int, bound: int, passes: int = 3) -> None:
    """Greedy positive-gain vertex moves; cut is non-increasing by construction."""
    sizes = [0] * p
    for part in assignment:
        sizes[part] += 1
    edges = [e for e in h.hyperedges if len(set(e)) >= 2]
    incident: dict[int, list[int]] = {}
    counts: list[dict[int, int]] = []
    for ei, e in enumerate(edges):
        cnt: dict[int, int] = {}
        for v in set(e):
            incident.setdefault(v, []).append(ei)
            cnt[assignment[v]] = cnt.get(assignment[v], 0) + 1
        counts.append(cnt)

    def best_move(v: int) -> tuple[int, int] | None:
        src = assignment[v]
        if sizes[src] <= 1:
            return None  # never empty a partition
        gains: dict[int, int] = {}
        loss = 0
        for ei in incident.get(v, []):
            cnt = counts[ei]
            pins = sum(cnt.values())
            if cnt.get(src, 0) == pins:
                loss += 1  # uncut edge becomes cut under any move
                continue
            for q, c in cnt.items():
                # cnt[q] == pins-1 forces cnt[src] == 1, so the edge uncuts
                if q != src and c == pins - 1:
                    gains[q] = gains.get(q, 0) + 1
        best = None
        for q in sorted(gains):
            if sizes[q] + 1 > bound:
                continue
            net = gains[q] - loss
            if net > 0 and (best is None or net > best[1]):
                best = (q, net)
        return best

    for _ in range(passes):
        moved = 0
        for v in sorted(incident):
            mv = best_move(v)
            if mv is None:
                continue
            q, _net = mv
            src = assignment[v]
            assignment[v] = q
            sizes[src] -= 1
            sizes[q] += 1
            for ei in incident[v]:
                cnt = counts[ei]
                cnt[src] -= 1
                if cnt[src] == 0:
                    del cnt[src]
                cnt[q] = cnt.get(q, 0) + 1
            moved += 1
        if moved == 0:
            break


def partition(h: Hypergraph, target_size: int, balance_tol: float = 0.25, seed: int = 0) -> PartitionSet:
    """Split vertices into ceil(V/target_size) partitions minimizing hyperedge cut.

    Every partition is non-empty and no partition exceeds
    ceil(target_size * (1 + balance_tol)) vertices. Deterministic per seed.
    """
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    h.validate()
    v = h.vertex_count
    if v == 0:
        raise ValueError("empty hypergraph")
    warning = None
    if target_size > v:
        warning = f"target_size {target_size} exceeds vertex count {v}; single partition"
        target_size = v
    p = math.ceil(v / target_size)
    bound = math.ceil(target_size * (1.0 + balance_tol))
    rng = random.Random(seed)
    assignment = [0] * v
    if p > 1:
        g = _make_graph(v, list(h.hyperedges))
        _recursive_partition(g, list(range(v)), p, bound, rng, assignment, 0)
    ps = PartitionSet(assignment=assignment, p=p, target_size=target_size,
                      balance_tol=balance_tol, warning=warning)
    ps.initial_cut = cut_size(h, ps)
    if p > 1:
        _kway_refine(h, assignment, p, bound)
    return ps
