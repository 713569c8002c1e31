"""Build a small supergate library and look at what it contains.

Run with ``python3 demos/supergates.py``.
"""

from sgmap import bundled_liberty, read_liberty
from sgmap.sglib import GenParams, collect_root_gates, estimate_level_sizes, generate_library

cells = read_liberty(bundled_liberty("tiny"))
params = GenParams(k=3, max_level=2, root_input_limit=2)

sizes, _ = estimate_level_sizes(params.k, collect_root_gates(cells, 2), params.max_level)
print("projected pool size by depth:", sizes)

lib, stats = generate_library(cells, params)
print(f"generated {stats.generated} candidates, kept {stats.kept}, "
      f"{lib.count} final gates over {len(lib.index)} functions")

# the fastest realization of a 3-input AND needs two levels of AND2
and3 = 0x8080808080808080
best = lib.index[and3][0]
print("AND3:", best.describe(), "delay", best.max_delay)

# functions that only exist thanks to composition
single = {g.table for g in lib.finals() if len(g.cells()) == 1}
print(len(set(lib.index) - single), "functions need more than one cell")
