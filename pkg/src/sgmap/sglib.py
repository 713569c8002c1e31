"""Parallel supergate library generation.

Generation runs level by level.  Every level combines each root cell with
ordered fanin assignments drawn from the candidates kept so far, computes the
composite table/area/delays, and keeps a candidate only if no faster gate
with the same table is known.  Root cells are spread across worker processes;
the table-keyed dedup table is sharded into buckets with one lock each.
After the last level, only continuous-input candidates (variables exactly
``x1..xn``) enter the library.
"""

import hashlib
import logging
import math
import multiprocessing
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import tt
from .liberty import CellLibrary, StandardCell

log = logging.getLogger(__name__)

ABSENT = float("-inf")
FORMAT_VERSION = "v1"
_SATURATION = (1 << 63) - 1


class NoRootsError(ValueError):
    pass


class LibraryLoadError(ValueError):
    pass


@dataclass
class GenParams:
    k: int = 6
    max_level: int = 2
    root_input_limit: int = 5
    workers: int = 1
    key_space: int = 4096
    tie_cap: int = 8
    wall_clock_budget: Optional[float] = None
    dedup: bool = True
    symmetry_pruning: bool = True

    def __post_init__(self):
        if not 1 <= self.root_input_limit <= self.k <= tt.MAX_VARS:
            raise ValueError("need 1 <= root_input_limit <= k <= 6")
        if self.max_level < 0:
            raise ValueError("max_level must be non-negative")
        if self.workers < 1 or self.key_space < 1 or self.tie_cap < 1:
            raise ValueError("workers, key_space and tie_cap must be positive")


@dataclass(eq=False)
class Supergate:
    id: int
    root: Optional[StandardCell]
    fanins: Tuple["Supergate", ...]
    table: int
    area: float
    delays: Tuple[float, ...]
    max_delay: float
    used_vars: int
    level: int
    sig: int
    var: int = 0  # 1-based variable for elementary gates

    @property
    def is_elementary(self) -> bool:
        return self.root is None

    @property
    def num_vars(self) -> int:
        return self.used_vars.bit_length()

    @property
    def var_delays(self) -> Tuple[Optional[float], ...]:
        return tuple(None if d == ABSENT else d for d in self.delays)

    @property
    def is_continuous(self) -> bool:
        return self.used_vars != 0 and self.used_vars & (self.used_vars + 1) == 0

    def cells(self) -> List[StandardCell]:
        """Every cell instance of the gate, duplicated fanins counted twice."""
        if self.root is None:
            return []
        out = [self.root]
        for f in self.fanins:
            out.extend(f.cells())
        return out

    def describe(self) -> str:
        if self.root is None:
            return f"x{self.var}"
        return f"{self.root.name}({', '.join(f.describe() for f in self.fanins)})"

    def __repr__(self):
        return f"Supergate({self.id}: {self.describe()} tt={tt.to_hex(self.table)} d={self.max_delay})"


def _name_hash(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "little")


def init_elementary(k: int) -> List[Supergate]:
    if not 1 <= k <= tt.MAX_VARS:
        raise ValueError(f"k={k} outside 1..{tt.MAX_VARS}")
    gates = []
    for j in range(1, k + 1):
        delays = tuple(0.0 if i == j - 1 else ABSENT for i in range(tt.MAX_VARS))
        gates.append(Supergate(j - 1, None, (), tt.elementary_pattern(j), 0.0, delays, 0.0,
                               1 << (j - 1), 0, tt.mix(0, j), var=j))
    return gates


def collect_root_gates(lib, root_input_limit: int) -> List[StandardCell]:
    """Usable root cells, one per distinct table (the fastest)."""
    cells = lib.cells if isinstance(lib, CellLibrary) else list(lib)
    best: Dict[int, StandardCell] = {}
    for c in cells:
        if not 1 <= c.num_inputs <= root_input_limit or c.is_constant:
            continue
        cur = best.get(c.table)
        if cur is None or (c.max_delay, c.area, c.name) < (cur.max_delay, cur.area, cur.name):
            best[c.table] = c
    if not best:
        raise NoRootsError("no cell qualifies as a supergate root")
    return sorted(best.values(), key=lambda c: c.name)


def compose_candidate(root: StandardCell, fanins: Sequence[Supergate]):
    """(area, per-variable delays, table) of ``root`` driven by ``fanins``."""
    if len(fanins) != root.num_inputs:
        raise ValueError(f"{root.name} needs {root.num_inputs} fanins, got {len(fanins)}")
    table = root.evaluate(*(f.table for f in fanins))
    area = root.area + sum(f.area for f in fanins)
    delays = tuple(
        max(f.delays[j] + pd for f, pd in zip(fanins, root.pin_delays))
        for j in range(tt.MAX_VARS)
    )
    return area, delays, table


def compose(root: StandardCell, fanins: Sequence[Supergate], gate_id: int = -1) -> Supergate:
    area, delays, table = compose_candidate(root, fanins)
    used = 0
    for f in fanins:
        used |= f.used_vars
    return Supergate(gate_id, root, tuple(fanins), table, area, delays, max(delays), used,
                     1 + max(f.level for f in fanins),
                     tt.mix(1, _name_hash(root.name), *(f.sig for f in fanins)))


def symmetric_pin_classes(root: StandardCell) -> List[int]:
    """For each pin, the previous pin in its symmetry class, or -1.

    Pins ``i`` and ``j`` are symmetric when swapping them leaves the table
    unchanged; pairwise swap symmetry is transitive, so classes are well defined.
    """
    n = root.num_inputs
    base = tt.ELEMENTARY[:n]
    cls = list(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            swapped = list(base)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            if root.evaluate(*swapped) == root.table and cls[j] == j:
                cls[j] = cls[i]
    prev = []
    for p in range(n):
        earlier = [q for q in range(p) if cls[q] == cls[p]]
        prev.append(earlier[-1] if earlier else -1)
    return prev


# ---------------------------------------------------------------------------
# Dedup table


@dataclass
class DedupEntry:
    best_delay: float
    gates: list = field(default_factory=list)


def _tie_rank(g) -> Tuple[float, int]:
    return (g.area, g.sig)


class DedupTable:
    """Table -> fastest candidates, in ``key_space`` buckets with one lock each.

    A bucket is only read or written while holding its lock, so workers
    touching different tables rarely contend.
    """

    def __init__(self, key_space: int = 4096, tie_cap: int = 8):
        self.key_space = key_space
        self.tie_cap = tie_cap
        self.buckets: List[Dict[int, DedupEntry]] = [dict() for _ in range(key_space)]
        self.locks = [threading.Lock() for _ in range(key_space)]

    def key(self, table: int) -> int:
        return tt.hash_key(table, self.key_space)

    def try_keep(self, cand) -> bool:
        """Insert ``cand`` if it is at least as fast as the best known gate."""
        b = self.key(cand.table)
        with self.locks[b]:
            entry = self.buckets[b].get(cand.table)
            if entry is None:
                self.buckets[b][cand.table] = DedupEntry(cand.max_delay, [cand])
                return True
            if cand.max_delay < entry.best_delay:
                entry.best_delay = cand.max_delay
                entry.gates = [cand]
                return True
            if cand.max_delay > entry.best_delay:
                return False
            gates = entry.gates
            if len(gates) < self.tie_cap:
                gates.append(cand)
                gates.sort(key=_tie_rank)
                return True
            if _tie_rank(cand) < _tie_rank(gates[-1]):
                gates[-1] = cand
                gates.sort(key=_tie_rank)
                return True
            return False

    def best_delay(self, table: int) -> Optional[float]:
        entry = self.buckets[self.key(table)].get(table)
        return None if entry is None else entry.best_delay

    def entries(self):
        for bucket in self.buckets:
            yield from bucket.items()

    def gates(self) -> List:
        return [g for _, e in self.entries() for g in e.gates]

    def __len__(self):
        return sum(len(b) for b in self.buckets)


def try_keep(cand, table: DedupTable, store: Optional["CandidateStore"] = None, worker: int = 0) -> bool:
    kept = table.try_keep(cand)
    if kept and store is not None:
        store.queues.setdefault(worker, []).append(cand)
    return kept


@dataclass
class CandidateStore:
    queues: Dict[int, list] = field(default_factory=dict)
    levels: List[Tuple[Supergate, ...]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Enumeration kernel (runs inside workers)


# A raw candidate is a plain tuple, cheap to pickle between processes:
# (table, max_delay, area, sig, root index, fanin pool indices)
_T, _D, _A, _S, _R, _F = range(6)


def _raw_rank(c) -> Tuple[float, int]:
    return (c[_A], c[_S])


class _Pool:
    """Flat per-field arrays of the fanin pool, cheap to index in hot loops."""

    def __init__(self, gates: Sequence[Supergate]):
        self.tables = [g.table for g in gates]
        self.maxd = [g.max_delay for g in gates]
        self.areas = [g.area for g in gates]
        self.sigs = [g.sig for g in gates]

    def __len__(self):
        return len(self.tables)


# Process-global state for worker processes (inherited through fork).
_JOB: Dict[str, object] = {}


def recur_enum(root: StandardCell, pool: _Pool, fa: List[int], idx: int, prev_sym: Sequence[int],
               emit) -> None:
    """Depth-first walk over ordered fanin assignments of ``root``.

    Pins in one symmetry class take non-decreasing pool indices, which skips
    assignments that only permute fanins among interchangeable pins.
    """
    if idx == root.num_inputs:
        emit(fa)
        return
    start = fa[prev_sym[idx]] if prev_sym[idx] >= 0 else 0
    for f in range(start, len(pool)):
        fa[idx] = f
        recur_enum(root, pool, fa, idx + 1, prev_sym, emit)


def _enumerate_root(root_idx: int, roots: Sequence[StandardCell], pool: _Pool,
                    best_known: Dict[int, float], params: GenParams,
                    deadline: Optional[float]):
    """All candidates of one root that survive local dedup.

    Returns ``(candidates, generated, truncated)``.
    """
    if deadline is not None and time.monotonic() > deadline:
        return [], 0, True
    root = roots[root_idx]
    m = root.num_inputs
    fn = root.evaluate
    pds = root.pin_delays
    prev = symmetric_pin_classes(root) if params.symmetry_pruning else [-1] * m
    tables = pool.tables
    maxd = pool.maxd
    areas = pool.areas
    sigs = pool.sigs
    shifted = [[d + pd for d in maxd] for pd in pds]
    name_h = _name_hash(root.name)
    dedup = params.dedup
    tie_cap = params.tie_cap
    local: Dict[int, list] = {}
    out_all: list = []
    generated = 0

    def emit(fa):
        nonlocal generated
        generated += 1
        table = fn(*[tables[i] for i in fa])
        delay = max(shifted[p][fa[p]] for p in range(m))
        if not dedup:
            out_all.append((table, delay, root.area + sum(areas[i] for i in fa),
                            tt.mix(1, name_h, *[sigs[i] for i in fa]), root_idx, tuple(fa)))
            return
        known = best_known.get(table)
        if known is not None and delay > known:
            return
        entry = local.get(table)
        if entry is not None and delay > entry[0]:
            return
        cand = (table, delay, root.area + sum(areas[i] for i in fa),
                tt.mix(1, name_h, *[sigs[i] for i in fa]), root_idx, tuple(fa))
        if entry is None or delay < entry[0]:
            local[table] = [delay, [cand]]
            return
        ties = entry[1]
        ties.append(cand)
        if len(ties) > tie_cap:
            ties.sort(key=_raw_rank)
            del ties[tie_cap:]

    recur_enum(root, pool, [0] * m, 0, prev, emit)
    if not dedup:
        return out_all, generated, False
    return [c for _, ties in local.values() for c in ties], generated, False


def _worker_task(root_idx: int):
    job = _JOB
    cands, generated, truncated = _enumerate_root(root_idx, job["roots"], job["pool"], job["best"],
                                                  job["params"], job["deadline"])
    return root_idx, os.getpid(), cands, generated, truncated


def _root_cost(root: StandardCell, pool_size: int, symmetry: bool) -> float:
    n = root.num_inputs
    if not symmetry:
        return float(pool_size) ** n
    prev = symmetric_pin_classes(root)
    sizes: Dict[int, int] = {}
    for p in range(n):
        head = p
        while prev[head] >= 0:
            head = prev[head]
        sizes[head] = sizes.get(head, 0) + 1
    cost = 1.0
    for s in sizes.values():
        cost *= math.comb(pool_size + s - 1, s)
    return cost


# ---------------------------------------------------------------------------
# Driver


@dataclass
class GenStats:
    levels: List[dict] = field(default_factory=list)
    generated: int = 0
    kept: int = 0
    final: int = 0
    truncated: bool = False
    wall_time: float = 0.0
    workers: int = 1


class SupergateGenerator:
    """Stateful level-by-level generator; :func:`generate_library` wraps it."""

    def __init__(self, roots: Sequence[StandardCell], params: GenParams):
        self.roots = list(roots)
        self.params = params
        self.table = DedupTable(params.key_space, params.tie_cap)
        self.store = CandidateStore()
        self.stats = GenStats(workers=params.workers)
        self.all_gates: List[Supergate] = []
        self.next_id = 0
        self._deadline = None
        elementary = init_elementary(params.k)
        for g in elementary:
            self.table.try_keep(g)
        self._register(elementary)
        self.store.levels.append(tuple(elementary))
        self._undeduped: List[Supergate] = list(elementary)

    def _register(self, gates: Sequence[Supergate]):
        for g in gates:
            g.id = self.next_id
            self.next_id += 1
            self.all_gates.append(g)

    def fanin_pool(self) -> List[Supergate]:
        """Fastest known gates per table (ties kept), in id order."""
        if not self.params.dedup:
            return list(self._undeduped)
        return sorted(self.table.gates(), key=lambda g: g.id)

    def generate_level(self) -> List[Supergate]:
        params = self.params
        level = len(self.store.levels)
        started = time.monotonic()
        if self._deadline is None and params.wall_clock_budget is not None:
            self._deadline = started + params.wall_clock_budget
        pool_gates = self.fanin_pool()
        pool = _Pool(pool_gates)
        roots = [r for r in self.roots if r.num_inputs <= params.root_input_limit]
        best = {t: e.best_delay for t, e in self.table.entries()} if params.dedup else {}
        order = sorted(range(len(roots)),
                       key=lambda i: -_root_cost(roots[i], len(pool), params.symmetry_pruning))
        results = self._run(order, roots, pool, best)

        generated = 0
        truncated = False
        fresh: List[Supergate] = []
        raw_by_worker: Dict[int, list] = {}
        for root_idx, worker, cands, gen, trunc in results:
            generated += gen
            truncated |= trunc
            raw_by_worker.setdefault(worker, []).extend(cands)
        workers = {w: i for i, w in enumerate(sorted(raw_by_worker))}
        for worker, cands in raw_by_worker.items():
            for c in cands:
                g = self._materialize(c, roots, pool_gates)
                if params.dedup:
                    if try_keep(g, self.table):
                        fresh.append(g)
                else:
                    fresh.append(g)
        if params.dedup:
            survivors = {id(g) for g in self.table.gates()}
            fresh = [g for g in fresh if id(g) in survivors]
        fresh.sort(key=lambda g: (g.table, g.max_delay, g.area, g.sig))
        self._register(fresh)
        if not params.dedup:
            self._undeduped.extend(fresh)
        by_gate_worker = {}
        for worker, cands in raw_by_worker.items():
            for c in cands:
                by_gate_worker[c[_S]] = workers[worker]
        for g in fresh:
            self.store.queues.setdefault(by_gate_worker.get(g.sig, 0), []).append(g)
        self.store.levels.append(tuple(fresh))
        self.stats.generated += generated
        self.stats.truncated |= truncated
        self.stats.levels.append({
            "level": level, "pool": len(pool), "roots": len(roots), "generated": generated,
            "kept": len(fresh), "seconds": time.monotonic() - started, "truncated": truncated,
        })
        log.info("level %d: pool=%d generated=%d kept=%d", level, len(pool), generated, len(fresh))
        return fresh

    def _materialize(self, c, roots, pool_gates) -> Supergate:
        table, max_delay, area, sig, root_idx, fanin_idx = c
        root = roots[root_idx]
        fanins = tuple(pool_gates[i] for i in fanin_idx)
        delays = tuple(
            max(f.delays[j] + pd for f, pd in zip(fanins, root.pin_delays))
            for j in range(tt.MAX_VARS)
        )
        used = 0
        for f in fanins:
            used |= f.used_vars
        return Supergate(-1, root, fanins, table, area, delays, max_delay, used,
                         1 + max(f.level for f in fanins), sig)

    def _run(self, order, roots, pool, best):
        params = self.params
        if params.workers == 1 or len(order) <= 1:
            return [(i, 0) + _enumerate_root(i, roots, pool, best, params, self._deadline)
                    for i in order]
        _JOB.update(roots=roots, pool=pool, best=best, params=params, deadline=self._deadline)
        try:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(params.workers) as workers:
                return list(workers.imap_unordered(_worker_task, order, chunksize=1))
        finally:
            _JOB.clear()

    def run(self) -> "SupergateLibrary":
        started = time.monotonic()
        for _ in range(self.params.max_level):
            self.generate_level()
        lib = filter_valid(self.retained(), self.params)
        self.stats.kept = len(self.retained())
        self.stats.final = lib.count
        self.stats.wall_time = time.monotonic() - started
        return lib

    def retained(self) -> List[Supergate]:
        if self.params.dedup:
            return sorted(self.table.gates(), key=lambda g: g.id)
        return list(self._undeduped)


# ---------------------------------------------------------------------------
# Library


def _closure(gates: Sequence[Supergate]) -> List[Supergate]:
    seen: Dict[int, Supergate] = {}
    stack = list(gates)
    while stack:
        g = stack.pop()
        if g.id in seen:
            continue
        seen[g.id] = g
        stack.extend(g.fanins)
    return sorted(seen.values(), key=lambda g: g.id)


def _final_rank(g: Supergate):
    return (g.max_delay, g.area, g.id)


@dataclass
class SupergateLibrary:
    k: int
    level: int
    cells_name: str
    index: Dict[int, List[Supergate]]
    gates: List[Supergate]  # every gate needed to describe the finals, id order

    @property
    def count(self) -> int:
        return sum(len(v) for v in self.index.values())

    def finals(self) -> List[Supergate]:
        return sorted((g for v in self.index.values() for g in v), key=lambda g: g.id)

    def lookup(self, table: int) -> List[Supergate]:
        return self.index.get(table, [])

    def table_delays(self) -> Dict[int, float]:
        return {t: v[0].max_delay for t, v in self.index.items()}


def filter_valid(candidates: Sequence[Supergate], params: Optional[GenParams] = None,
                 cells_name: str = "") -> SupergateLibrary:
    """Index the continuous-input composed gates that are fastest for their table.

    ``candidates`` are the retained gates; their fanins are pulled in too.
    The per-table best delay is taken over all of them (discontinuous and
    elementary gates included), so a gate that was superseded after being used
    as a fanin does not re-enter the library.
    """
    params = params or GenParams()
    every = _closure(candidates)
    best: Dict[int, float] = {}
    for g in every:
        if g.table not in best or g.max_delay < best[g.table]:
            best[g.table] = g.max_delay
    index: Dict[int, List[Supergate]] = {}
    for g in every:
        if g.is_elementary or not g.is_continuous or g.max_delay != best[g.table]:
            continue
        if g.table in (tt.CONST0, tt.CONST1):
            continue  # constant cuts never reach library lookup
        index.setdefault(g.table, []).append(g)
    for lst in index.values():
        lst.sort(key=_final_rank)
    return SupergateLibrary(params.k, params.max_level, cells_name, index, every)


def generate_library(lib, params: GenParams, roots: Optional[Sequence[StandardCell]] = None):
    """Full flow: roots -> levels -> continuity filter.  Returns ``(library, stats)``."""
    if roots is None:
        roots = collect_root_gates(lib, params.root_input_limit)
    gen = SupergateGenerator(roots, params)
    library = gen.run()
    library.cells_name = lib.source_name if isinstance(lib, CellLibrary) else ""
    return library, gen.stats


# ---------------------------------------------------------------------------
# Candidate-count estimate


def falling_factorial(n: int, i: int) -> int:
    if i > n:
        return 0
    return math.perm(n, i)


def estimate_level_sizes(k: int, roots: Sequence[StandardCell], max_level: int):
    """Projected candidate counts per level; level 0 holds the ``k`` variables.

    Returns ``(sizes, saturated)`` where ``sizes[l]`` sums, over roots with
    ``n`` inputs, the ordered selections of 1..n distinct gates from level l-1.
    """
    sizes = [k]
    saturated = False
    for _ in range(max_level):
        prev = sizes[-1]
        total = 0
        for r in roots:
            for i in range(1, r.num_inputs + 1):
                total += falling_factorial(prev, i)
                if total > _SATURATION:
                    break
            if total > _SATURATION:
                break
        if total > _SATURATION:
            saturated = True
            total = _SATURATION
        sizes.append(total)
    return sizes, saturated


def estimate_candidate_count(params: GenParams, roots: Sequence[StandardCell]) -> int:
    roots = [r for r in roots if r.num_inputs <= params.root_input_limit]
    sizes, _ = estimate_level_sizes(params.k, roots, params.max_level)
    return sizes[-1]


# ---------------------------------------------------------------------------
# Serialization


def _fmt_delay(d: float) -> str:
    return "-" if d == ABSENT else repr(d)


def serialize_library(lib: SupergateLibrary) -> str:
    lines = [f"SGLIB {FORMAT_VERSION} k={lib.k} level={lib.level} cells={lib.cells_name or '-'} "
             f"count={lib.count}"]
    for g in lib.gates:
        if g.is_elementary:
            lines.append(f"{g.id} VAR {g.var}")
            continue
        fanins = " ".join(str(f.id) for f in g.fanins)
        delays = ",".join(_fmt_delay(d) for d in g.delays)
        lines.append(f"{g.id} GATE {g.root.name} {fanins} tt={tt.to_hex(g.table)} "
                     f"area={g.area!r} d={delays}")
    return "\n".join(lines) + "\n"


def parse_library(text: str, cells: CellLibrary) -> SupergateLibrary:
    """Load a library file, re-deriving every gate from its structure."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LibraryLoadError("empty library file")
    head = lines[0].split()
    if len(head) < 2 or head[0] != "SGLIB":
        raise LibraryLoadError("missing SGLIB header")
    if head[1] != FORMAT_VERSION:
        raise LibraryLoadError(f"unsupported version {head[1]!r}")
    try:
        fields = dict(item.split("=", 1) for item in head[2:])
        k = int(fields["k"])
        level = int(fields["level"])
        count = int(fields["count"])
        cells_name = fields.get("cells", "-")
    except (KeyError, ValueError) as exc:
        raise LibraryLoadError(f"bad header: {exc}") from None
    cells_name = "" if cells_name == "-" else cells_name
    by_id: Dict[int, Supergate] = {}
    order: List[Supergate] = []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split()
        try:
            gid = int(parts[0])
        except (ValueError, IndexError):
            raise LibraryLoadError(f"line {lineno}: bad id") from None
        if order and gid <= order[-1].id:
            raise LibraryLoadError(f"line {lineno}: ids must be ascending")
        if len(parts) < 2:
            raise LibraryLoadError(f"line {lineno}: truncated record")
        if parts[1] == "VAR":
            try:
                j = int(parts[2])
            except (ValueError, IndexError):
                raise LibraryLoadError(f"line {lineno}: bad variable record") from None
            if not 1 <= j <= k:
                raise LibraryLoadError(f"line {lineno}: variable {j} outside 1..{k}")
            g = init_elementary(tt.MAX_VARS)[j - 1]
            g.id = gid
        elif parts[1] == "GATE":
            name = parts[2]
            if name not in cells:
                raise LibraryLoadError(f"line {lineno}: unknown cell {name!r}")
            cell = cells[name]
            attrs = {}
            fanin_ids = []
            for p in parts[3:]:
                if "=" in p:
                    key, value = p.split("=", 1)
                    attrs[key] = value
                elif p.isdigit():
                    fanin_ids.append(int(p))
                else:
                    raise LibraryLoadError(f"line {lineno}: bad fanin id {p!r}")
            if len(fanin_ids) != cell.num_inputs:
                raise LibraryLoadError(f"line {lineno}: {name} expects {cell.num_inputs} fanins")
            missing = [f for f in fanin_ids if f not in by_id]
            if missing:
                raise LibraryLoadError(f"line {lineno}: dangling fanin id {missing[0]}")
            g = compose(cell, [by_id[f] for f in fanin_ids], gid)
            try:
                stored_table = tt.from_hex(attrs["tt"])
                stored_area = float(attrs["area"])
                stored_delays = tuple(ABSENT if d == "-" else float(d) for d in attrs["d"].split(","))
            except (KeyError, ValueError) as exc:
                raise LibraryLoadError(f"line {lineno}: bad attributes ({exc})") from None
            if stored_table != g.table:
                raise LibraryLoadError(
                    f"line {lineno}: stored tt {attrs['tt']} disagrees with structure {tt.to_hex(g.table)}")
            if stored_area != g.area or stored_delays != g.delays:
                raise LibraryLoadError(f"line {lineno}: stored area/delays disagree with structure")
        else:
            raise LibraryLoadError(f"line {lineno}: unknown record kind {parts[1]!r}")
        by_id[gid] = g
        order.append(g)
    lib = filter_valid(order, GenParams(k=k, root_input_limit=1, max_level=level), cells_name)
    if lib.count != count:
        raise LibraryLoadError(f"header count {count} but file holds {lib.count} supergates")
    return lib


def write_library(lib: SupergateLibrary, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_library(lib))


def read_library(path, cells: CellLibrary) -> SupergateLibrary:
    with open(path) as fh:
        return parse_library(fh.read(), cells)


# ---------------------------------------------------------------------------
# Brute-force reference


def brute_force_library(roots: Sequence[StandardCell], k: int, max_level: int) -> Dict[int, float]:
    """Fastest delay per table over every continuous gate, by plain enumeration.

    Enumerates all ordered fanin tuples without symmetry pruning, keeping per
    table every delay vector that achieves the fastest delay.  Only usable on
    tiny libraries.
    """
    # table -> {(delay vector, used-variable mask, composed?)}
    known: Dict[int, set] = {}
    for j in range(1, k + 1):
        vec = tuple(0.0 if i == j - 1 else ABSENT for i in range(tt.MAX_VARS))
        known.setdefault(tt.elementary_pattern(j), set()).add((vec, 1 << (j - 1), False))
    for _ in range(max_level):
        items = [(t, vec, used) for t, vs in known.items() for vec, used, _ in vs]
        new: Dict[int, set] = {}
        for r in roots:
            for combo in _product(items, r.num_inputs):
                table = r.evaluate(*(c[0] for c in combo))
                vec = tuple(max(c[1][j] + pd for c, pd in zip(combo, r.pin_delays))
                            for j in range(tt.MAX_VARS))
                used = 0
                for c in combo:
                    used |= c[2]
                new.setdefault(table, set()).add((vec, used, True))
        for t, vs in new.items():
            known.setdefault(t, set()).update(vs)
        for t in list(known):
            best = min(max(v) for v, _, _ in known[t])
            known[t] = {e for e in known[t] if max(e[0]) == best}
    out = {}
    for t, vs in known.items():
        for vec, used, composed in vs:
            if composed and used & (used + 1) == 0 and t not in (tt.CONST0, tt.CONST1):
                out[t] = max(vec)
    return out


def _product(items, n):
    if n == 0:
        yield ()
        return
    for head in items:
        for tail in _product(items, n - 1):
            yield (head,) + tail


__all__ = [
    "ABSENT", "CandidateStore", "DedupTable", "GenParams", "GenStats", "LibraryLoadError",
    "NoRootsError", "Supergate", "SupergateGenerator", "SupergateLibrary", "brute_force_library",
    "collect_root_gates", "compose", "compose_candidate", "estimate_candidate_count",
    "estimate_level_sizes", "filter_valid", "generate_library", "init_elementary",
    "parse_library", "read_library", "recur_enum", "serialize_library",
    "symmetric_pin_classes", "try_keep", "write_library",
]
