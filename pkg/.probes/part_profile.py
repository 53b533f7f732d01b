import time
from ttlock.generate import random_netlist
from ttlock.hypergraph import build_hypergraph, partition
from ttlock.netlist import topo_order

for g in (10000, 100000):
    n = random_netlist(g, max(16, g // 100), seed=g)
    t0 = time.perf_counter()
    topo = topo_order(n)
    t1 = time.perf_counter()
    h = build_hypergraph(n)
    t2 = time.perf_counter()
    ps = partition(h, 7, seed=1)
    t3 = time.perf_counter()
    print(f"g={g}: topo {t1-t0:.1f}s hypergraph {t2-t1:.1f}s partition {t3-t2:.1f}s p={ps.p}", flush=True)
