import time
from ttlock.generate import random_netlist
from ttlock.hypergraph import build_hypergraph, partition
for g in (10000, 40000, 100000):
    n = random_netlist(g, g // 100, seed=g)
    h = build_hypergraph(n)
    t0 = time.perf_counter()
    ps = partition(h, 7, seed=1)
    print(f"g={g}: partition {time.perf_counter()-t0:.1f}s p={ps.p}", flush=True)
