"""Map a random circuit with and without supergates, then check the result.

Run with ``python3 demos/map_and_verify.py [nodes]``.
"""

import random
import sys

from sgmap import bundled_liberty, read_liberty
from sgmap.aig import random_aig, simulate_aig
from sgmap.mapper import MapParams, map_aig
from sgmap.netlist import simulate_netlist, write_verilog
from sgmap.sglib import GenParams, generate_library

nodes = int(sys.argv[1]) if len(sys.argv) > 1 else 200
cells = read_liberty(bundled_liberty("demo"))
circuit = random_aig(8, nodes, 4, seed=7, locality=6)

for level in (1, 2):
    lib, _ = generate_library(cells, GenParams(k=3, max_level=level, root_input_limit=2))
    result = map_aig(circuit, lib, MapParams(cut_size=3), cells, name="demo")
    print(f"level {level}: {lib.count:4d} gates  {result.report.line()}")
    print("   area per round:", [round(a, 3) for a in result.round_areas])

rng = random.Random(0)
words = [rng.getrandbits(64) for _ in range(circuit.num_pis)]
assert simulate_aig(circuit, words) == simulate_netlist(result.netlist, words)
print("64 random vectors agree")
print("\n".join(write_verilog(result.netlist).splitlines()[:12]))
