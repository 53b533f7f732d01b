import time
import numpy as np
from ttlock.generate import random_netlist
from ttlock.locking import lock_netlist

sizes = [1000, 10000, 100000]
times = []
for g in sizes:
    k = max(4, g // 40)
    n = random_netlist(g, max(16, g // 100), seed=g)
    t0 = time.perf_counter()
    res = lock_netlist(n, k_size=k, seed=1, dummy_max=2, partition_size=7)
    dt = time.perf_counter() - t0
    times.append(dt)
    print(f"gates {g}: key {k} lock {dt:.1f}s locked_gates {res.netlist.gate_count} "
          f"locked_parts {res.manifest['partitions_locked']}", flush=True)
slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
print(f"log-log slope: {slope:.3f}")
