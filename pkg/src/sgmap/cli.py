"""Command-line front end: ``sgmap {gen,map,verify,bench,estimate}``.

Every option can also be set through an environment variable named
``SGMAP_<OPTION>`` (dashes become underscores), e.g. ``SGMAP_WORKERS=4``.
Command-line values win over the environment.
"""

import argparse
import os
import random
import statistics
import sys
import time
from typing import List, Optional, Sequence

from . import __version__, bundled_liberty
from .aig import AigerParseError, read_aiger, simulate_aig
from .liberty import (CellLibrary, FunctionParseError, LibertyParseError, read_liberty,
                      synthetic_library)
from .mapper import MapParams, MappingError, map_aig
from .netlist import (NetlistError, parse_gnl, parse_verilog, simulate_netlist, write_gnl,
                      write_verilog)
from .sglib import (GenParams, LibraryLoadError, NoRootsError, collect_root_gates,
                    estimate_level_sizes, generate_library, read_library, serialize_library)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_MAPPING = 3
EXIT_VERIFY = 4

ENV_PREFIX = "SGMAP_"
DEFAULT_VECTORS = 10_000


class _EnvDefaults(argparse.ArgumentParser):
    """Argument parser whose option defaults come from the environment when set."""

    def add_argument(self, *names, **kw):
        long = next((n for n in names if n.startswith("--")), None)
        if long is not None:
            env = ENV_PREFIX + long[2:].upper().replace("-", "_")
            if env in os.environ:
                raw = os.environ[env]
                if kw.get("action") == "store_true":
                    kw["default"] = raw.strip().lower() in ("1", "true", "yes", "on")
                else:
                    conv = kw.get("type", str)
                    kw["default"] = conv(raw)
                kw["required"] = False
        return super().add_argument(*names, **kw)


def _limit(text: str) -> Optional[int]:
    """Integer limit where 0 or 'none' means unlimited."""
    if str(text).strip().lower() in ("0", "none", "unlimited"):
        return None
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("limit must be non-negative")
    return value


def _int_list(text: str) -> List[int]:
    return [int(x) for x in str(text).replace(",", " ").split()]


def load_cells(spec: str, seed: int = 0) -> CellLibrary:
    """``tiny``/``demo`` name a bundled file, ``synth:N`` a seeded synthetic library."""
    if spec.startswith("synth:"):
        return synthetic_library(int(spec.split(":", 1)[1]), seed=seed)
    if spec in ("tiny", "demo") and not os.path.exists(spec):
        spec = bundled_liberty(spec)
    return read_liberty(spec)


def _kv(**fields) -> str:
    return "#kv " + " ".join(f"{k}={v}" for k, v in fields.items())


def _gen_params(args, workers: Optional[int] = None) -> GenParams:
    return GenParams(k=args.k, max_level=args.level, root_input_limit=args.root_limit,
                     workers=workers or args.workers, wall_clock_budget=args.budget_secs,
                     dedup=not args.no_dedup)


def cmd_gen(args, out=sys.stdout) -> int:
    cells = load_cells(args.liberty, args.seed)
    params = _gen_params(args)
    lib, stats = generate_library(cells, params)
    text = serialize_library(lib)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    print(f"generated={stats.generated} kept={stats.kept} final={lib.count} "
          f"tables={len(lib.index)} time={stats.wall_time:.3f}s workers={stats.workers}"
          + (" truncated" if stats.truncated else ""), file=sys.stderr if not args.out else out)
    print(_kv(cmd="gen", generated=stats.generated, kept=stats.kept, final=lib.count,
              tables=len(lib.index), wall=f"{stats.wall_time:.6f}", workers=stats.workers,
              truncated=int(stats.truncated)), file=sys.stderr if not args.out else out)
    return EXIT_OK


def _map_params(args) -> MapParams:
    rounds = tuple(r.strip() for r in args.rounds.split(",") if r.strip())
    return MapParams(cut_size=args.cut_size, cuts_per_node=args.cut_limit,
                     matches_per_cut=args.match_limit, rounds=rounds)


def cmd_map(args, out=sys.stdout) -> int:
    cells = load_cells(args.liberty, args.seed)
    sglib = read_library(args.sglib, cells)
    circuit = read_aiger(args.aig)
    name = os.path.splitext(os.path.basename(args.aig))[0].replace("-", "_") or "top"
    if not name[0].isalpha():
        name = "c_" + name
    result = map_aig(circuit, sglib, _map_params(args), cells, name)
    text = write_verilog(result.netlist) if args.format == "verilog" else write_gnl(result.netlist)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    rep = result.report
    print(rep.line(), file=out)
    print(rep.kv() + f" target={result.delay_target!r}", file=out)
    return EXIT_OK


def _read_netlist(path: str, cells: CellLibrary):
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".v") or text.lstrip().startswith("module"):
        return parse_verilog(text, cells)
    return parse_gnl(text, cells)


def verify(circuit, netlist, vectors: int = DEFAULT_VECTORS, seed: int = 0):
    """Random-simulation equivalence.  Returns None or a counterexample dict."""
    if len(netlist.inputs) != circuit.num_pis or len(netlist.outputs) != circuit.num_pos:
        return {"reason": "interface mismatch"}
    rng = random.Random(seed)
    done = 0
    while done < vectors:
        width = min(64, vectors - done)
        words = [rng.getrandbits(64) for _ in range(circuit.num_pis)]
        mask = (1 << width) - 1
        want = simulate_aig(circuit, words)
        got = simulate_netlist(netlist, words)
        for po, (w, g) in enumerate(zip(want, got)):
            diff = (w ^ g) & mask
            if diff:
                bit = (diff & -diff).bit_length() - 1
                vec = "".join(str(x >> bit & 1) for x in words)
                return {"vector": done + bit, "output": po, "inputs": vec,
                        "expected": w >> bit & 1, "got": g >> bit & 1}
        done += width
    return None


def cmd_verify(args, out=sys.stdout) -> int:
    cells = load_cells(args.liberty, args.seed)
    circuit = read_aiger(args.aig)
    netlist = _read_netlist(args.netlist, cells)
    cex = verify(circuit, netlist, args.vectors, args.seed)
    if cex is None:
        print(f"PASS {args.vectors} vectors", file=out)
        print(_kv(cmd="verify", result="pass", vectors=args.vectors, seed=args.seed), file=out)
        return EXIT_OK
    print("FAIL " + " ".join(f"{k}={v}" for k, v in cex.items()), file=out)
    print(_kv(cmd="verify", result="fail", **cex), file=out)
    return EXIT_VERIFY


def run_bench(cells: CellLibrary, args, workers_list: Sequence[int], reps: int):
    rows = []
    base = None
    reference = None
    for n in workers_list:
        times = []
        counts = None
        for _ in range(reps):
            lib, stats = generate_library(cells, _gen_params(args, workers=n))
            times.append(stats.wall_time)
            counts = (stats.generated, lib.count)
            sig = sorted((t, g[0].max_delay) for t, g in lib.index.items())
            if reference is None:
                reference = sig
            elif sig != reference:
                raise MappingError(f"library differs with {n} workers")
        mean = statistics.fmean(times)
        if base is None:
            base = mean
        rows.append({"workers": n, "mean": mean, "speedup": base / mean if mean else 0.0,
                     "generated": counts[0], "final": counts[1]})
    return rows


def cmd_bench(args, out=sys.stdout) -> int:
    cells = load_cells(args.liberty, args.seed)
    workers_list = _int_list(args.workers_list) if args.workers_list else [1, 2, 4]
    rows = run_bench(cells, args, workers_list, args.reps)
    print(f"{'workers':>8} {'mean_s':>10} {'speedup':>8} {'generated':>10} {'final':>8}", file=out)
    for r in rows:
        print(f"{r['workers']:>8} {r['mean']:>10.4f} {r['speedup']:>8.2f} "
              f"{r['generated']:>10} {r['final']:>8}", file=out)
    for r in rows:
        print(_kv(cmd="bench", workers=r["workers"], mean=f"{r['mean']:.6f}",
                  speedup=f"{r['speedup']:.4f}", generated=r["generated"], final=r["final"],
                  reps=args.reps), file=out)
    return EXIT_OK


def cmd_estimate(args, out=sys.stdout) -> int:
    cells = load_cells(args.liberty, args.seed)
    roots = collect_root_gates(cells, args.root_limit)
    sizes, saturated = estimate_level_sizes(args.k, roots, args.level)
    # depth 0 holds the k variables; depth d composes d layers of cells
    for depth, size in enumerate(sizes):
        print(f"depth {depth}: {size}", file=out)
        print(_kv(cmd="estimate", depth=depth, size=size), file=out)
    if saturated:
        print("note: estimate saturated", file=out)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "map": cmd_map, "verify": cmd_verify, "bench": cmd_bench,
            "estimate": cmd_estimate}


def build_parser() -> argparse.ArgumentParser:
    p = _EnvDefaults(prog="sgmap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_EnvDefaults)

    def common(sp, need_lib=True):
        sp.add_argument("--liberty", required=need_lib,
                        help="Liberty file, 'tiny', 'demo', or 'synth:N'")
        sp.add_argument("--seed", type=int, default=0)

    def gen_opts(sp):
        sp.add_argument("--k", type=int, default=6)
        sp.add_argument("--level", type=int, default=2)
        sp.add_argument("--root-limit", type=int, default=5)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--budget-secs", type=float, default=None)
        sp.add_argument("--no-dedup", action="store_true")

    sp = sub.add_parser("gen", help="generate a supergate library")
    common(sp)
    gen_opts(sp)
    sp.add_argument("--out")

    sp = sub.add_parser("map", help="map an AIG with a supergate library")
    common(sp)
    sp.add_argument("--sglib", required=True)
    sp.add_argument("--aig", required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("gnl", "verilog"), default="gnl")
    sp.add_argument("--cut-size", type=int, default=6)
    sp.add_argument("--cut-limit", type=_limit, default=24)
    sp.add_argument("--match-limit", type=_limit, default=30)
    sp.add_argument("--rounds", default="delay,area,area")

    sp = sub.add_parser("verify", help="check a netlist against its AIG by simulation")
    common(sp)
    sp.add_argument("--aig", required=True)
    sp.add_argument("--netlist", required=True)
    sp.add_argument("--vectors", type=int, default=DEFAULT_VECTORS)

    sp = sub.add_parser("bench", help="time generation for several worker counts")
    common(sp)
    gen_opts(sp)
    sp.add_argument("--workers-list", default="1,2,4")
    sp.add_argument("--reps", type=int, default=5)

    sp = sub.add_parser("estimate", help="projected candidate count per level")
    common(sp)
    sp.add_argument("--k", type=int, default=6)
    sp.add_argument("--level", type=int, default=2)
    sp.add_argument("--root-limit", type=int, default=5)
    return p


def main(argv: Optional[Sequence[str]] = None, out=sys.stdout) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, out)
    except (LibertyParseError, FunctionParseError, AigerParseError, LibraryLoadError,
            NetlistError) as exc:
        print(f"sgmap: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MappingError, NoRootsError) as exc:
        print(f"sgmap: mapping error: {exc}", file=sys.stderr)
        return EXIT_MAPPING
    except (OSError, ValueError) as exc:
        print(f"sgmap: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command != "gen" or args.out:
        print(_kv(cmd=args.command, elapsed=f"{time.perf_counter() - t0:.6f}"), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
