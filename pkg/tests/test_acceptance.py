"""Acceptance gate: one test per criterion, each with its own time limit.

Every test records a PASS/FAIL line; conftest prints them all at the end
of the session.  Set SGMAP_EPFL_DIR to a directory of .aig/.aag files to
add larger benchmark circuits to criterion 8.
"""

import contextlib
import io
import os
import random
import time

import pytest

from sgmap import bundled_liberty, cli, tt
from sgmap.aig import random_aig, write_aag
from sgmap.cuts import enumerate_cuts
from sgmap.liberty import read_liberty, synthetic_library
from sgmap.mapper import MapParams, map_aig
from sgmap.sglib import (GenParams, LibraryLoadError, SupergateGenerator, brute_force_library,
                         collect_root_gates, estimate_candidate_count, generate_library,
                         parse_library, serialize_library)
from conftest import sample_aig, minterm_table, random_expr, tiny_cells
from oracles import all_cuts, optimal_arrivals

RESULTS = {}


@contextlib.contextmanager
def criterion(num, title, limit):
    start = time.perf_counter()
    ok, note = False, ""
    try:
        yield
        ok = True
    except AssertionError as exc:
        note = str(exc).splitlines()[0] if str(exc) else "assertion failed"
        raise
    finally:
        took = time.perf_counter() - start
        if ok and took > limit:
            ok, note = False, f"over time limit {limit:g}s"
        RESULTS[num] = f"criterion {num:2d} {'PASS' if ok else 'FAIL'} {title} ({took:.2f}s)" \
            + (f": {note}" if note else "")
        print(RESULTS[num])
    assert took <= limit, f"took {took:.2f}s, limit {limit:g}s"


def corpus(count, max_nodes, seed):
    rng = random.Random(seed)
    return [random_aig(rng.randint(3, 10), rng.randint(5, max_nodes), rng.randint(1, 6),
                       seed=seed * 1000 + i, locality=rng.choice([0, 6]))
            for i in range(count)]


def run_cli(*argv):
    buf = io.StringIO()
    return cli.main([str(a) for a in argv], buf), buf.getvalue()


def test_c01_truth_table_kernel():
    with criterion(1, "simulate == minterm evaluator on 1000 expressions", 5):
        rng = random.Random(1)
        bad = 0
        for _ in range(1000):
            n = rng.randint(1, 6)
            e = random_expr(rng, n, rng.randint(1, 6))
            if tt.simulate(e, tt.ELEMENTARY[:n]) != minterm_table(e, n):
                bad += 1
        assert bad == 0, f"{bad} mismatches"


def test_c02_cut_enumeration():
    with criterion(2, "cut sets == fixed point on 50 AIGs, sample-circuit cuts", 30):
        rng = random.Random(2)
        for i in range(50):
            a = random_aig(rng.randint(2, 8), rng.randint(1, 60), rng.randint(1, 4), seed=200 + i)
            k = rng.randint(2, 6)
            sets = enumerate_cuts(a, k, None, with_tables=False)
            phi = all_cuts(a, k)
            for n in range(1, a.num_nodes):
                assert {frozenset(c.leaves) for c in sets[n]} == phi[n], f"aig {i} node {n}"
        a = sample_aig()
        sets = enumerate_cuts(a, 4, None)
        top = {c.leaves for c in sets[9]}
        assert (1, 2, 3, 4, 5) not in top
        assert (3, 4, 5) in {c.leaves for c in sets[8]}
        assert top == {(9,), (6, 8), (1, 2, 8), (3, 6, 7), (1, 2, 3, 7), (3, 4, 5, 6)}


def test_c03_supergate_oracle():
    with criterion(3, "tiny k=3 level 2 library == brute force", 10):
        cells = tiny_cells()
        lib, _ = generate_library(cells, GenParams(k=3, max_level=2, root_input_limit=2, workers=1))
        oracle = brute_force_library(collect_root_gates(cells, 2), 3, 2)
        assert lib.table_delays() == oracle


def test_c04_candidate_bound():
    with criterion(4, "generated <= estimate with dedup off", 10):
        cells = tiny_cells()
        params = GenParams(k=3, max_level=2, root_input_limit=2, dedup=False)
        _, stats = generate_library(cells, params)
        bound = estimate_candidate_count(params, collect_root_gates(cells, 2))
        assert stats.generated <= bound, f"{stats.generated} > {bound}"


def test_c05_filtering_soundness():
    with criterion(5, "no discontinuous finals in 100 runs, gapped fanin observed", 60):
        rng = random.Random(5)
        for run in range(100):
            cells = synthetic_library(rng.randint(2, 6), seed=rng.randrange(10 ** 6))
            k = rng.randint(2, 4)
            lib, _ = generate_library(cells, GenParams(k=k, max_level=rng.randint(1, 2),
                                                       root_input_limit=2))
            for g in lib.finals():
                used = g.used_vars
                assert used and used & (used + 1) == 0, f"run {run}: gate {g.id} uses {used:b}"
        gen = SupergateGenerator(collect_root_gates(tiny_cells(), 2),
                                 GenParams(k=3, max_level=2, root_input_limit=2))
        gen.run()
        lib, _ = generate_library(tiny_cells(), GenParams(k=3, max_level=2, root_input_limit=2))
        gapped = [g for g in gen.retained() if not g.is_elementary and not g.is_continuous]
        completed = [g for g in lib.finals()
                     if any(not f.is_elementary and not f.is_continuous for f in g.fanins)]
        assert gapped and completed


def test_c06_worker_equivalence():
    with criterion(6, "same (table, delay) set for N in 1,2,4,8", 60):
        for cells in (tiny_cells(), synthetic_library(20, seed=0)):
            ref = None
            for n in (1, 2, 4, 8):
                lib, _ = generate_library(cells, GenParams(k=3, max_level=2, root_input_limit=2,
                                                           workers=n))
                sig = sorted((t, lst[0].max_delay) for t, lst in lib.index.items())
                ref = ref if ref is not None else sig
                assert sig == ref, f"{cells.name}: N={n} differs"


def test_c07_parallel_speedup():
    with criterion(7, "speedup at N=4 >= 2.0", 120):
        cells = synthetic_library(8, seed=0)
        times = {}
        for n in (1, 4):
            runs = []
            for _ in range(5):
                _, stats = generate_library(cells, GenParams(k=3, max_level=2,
                                                             root_input_limit=3, workers=n))
                runs.append(stats.wall_time)
            times[n] = sum(runs) / len(runs)
        assert times[1] >= 2.0, f"N=1 took only {times[1]:.2f}s"
        speedup = times[1] / times[4]
        assert speedup >= 2.0, (f"speedup {speedup:.2f} (N=1 {times[1]:.2f}s, "
                                f"N=4 {times[4]:.2f}s, {os.cpu_count()} cpu)")


def test_c08_end_to_end(tmp_path):
    with criterion(8, "map + verify on 30 AIGs (demo library)", 120):
        sg = tmp_path / "demo.sg"
        code, _ = run_cli("gen", "--liberty", "demo", "--k", 3, "--level", 2, "--root-limit", 2,
                          "--out", sg)
        assert code == 0
        circuits = []
        for i, a in enumerate(corpus(30, 500, seed=8)):
            p = tmp_path / f"r{i}.aag"
            p.write_text(write_aag(a))
            circuits.append(p)
        epfl = os.environ.get("SGMAP_EPFL_DIR")
        if epfl:
            circuits += [os.path.join(epfl, f) for f in sorted(os.listdir(epfl))
                         if f.endswith((".aig", ".aag"))]
        failures = []
        for p in circuits:
            net = tmp_path / "out.gnl"
            code, _ = run_cli("map", "--liberty", "demo", "--sglib", sg, "--aig", p,
                              "--cut-size", 3, "--out", net)
            if code == 0:
                code, _ = run_cli("verify", "--liberty", "demo", "--aig", p, "--netlist", net,
                                  "--vectors", 10000, "--seed", 1)
            if code != 0:
                failures.append((os.path.basename(str(p)), code))
        assert not failures, f"failures: {failures}"


def test_c09_delay_optimality(cells, tiny_level2):
    with criterion(9, "delay pass == exhaustive optimum on 20 AIGs", 60):
        params = MapParams(cut_size=4, cuts_per_node=None, matches_per_cut=None, rounds=("delay",))
        for i, a in enumerate(corpus(20, 40, seed=9)):
            r = map_aig(a, tiny_level2, params, cells)
            assert r.po_arrivals == optimal_arrivals(a, tiny_level2, 4, 1.0), f"aig {i}"


def test_c10_supergate_benefit(cells, tiny_level2):
    with criterion(10, "level-2 delay <= level-1 always, < on >= 5 of 20", 60):
        level1, _ = generate_library(cells, GenParams(k=4, max_level=1, root_input_limit=2))
        params = MapParams(cut_size=4, matches_per_cut=None)
        better = 0
        for i, a in enumerate(corpus(20, 40, seed=10)):
            d1 = map_aig(a, level1, params, cells).report.delay
            d2 = map_aig(a, tiny_level2, params, cells).report.delay
            assert d2 <= d1 + 1e-9, f"aig {i}: {d2} > {d1}"
            better += d2 < d1 - 1e-9
        assert better >= 5, f"strictly better on only {better}"


def test_c11_library_round_trip(cells, tiny_level2):
    with criterion(11, "serialize/parse/serialize identical, tampered tt rejected", 5):
        text = serialize_library(tiny_level2)
        assert serialize_library(parse_library(text, cells)) == text
        line = next(ln for ln in text.splitlines() if " GATE " in ln)
        hexv = line.split("tt=")[1].split()[0]
        tampered = text.replace(line, line.replace(hexv, tt.to_hex(tt.from_hex(hexv) ^ 2)), 1)
        with pytest.raises(LibraryLoadError):
            parse_library(tampered, cells)
