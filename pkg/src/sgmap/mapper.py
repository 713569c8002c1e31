"""Cut-based mapping of an AIG onto a supergate library.

Flow: enumerate cuts once, match every non-trivial cut against the library,
run a delay-oriented pass, then area-recovery passes under the delay target,
and finally walk from the outputs to build the gate-level netlist.

Leaf ``i`` of a cut (leaves sorted ascending) drives gate variable
``x_{i+1}``.  A cut function is looked up as is, then complemented (output
inverter), and only when both miss, through its N-canonical class with
explicit input inverters.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import tt
from .aig import Aig, lit_id, lit_neg
from .cuts import Cut, cut_function, enumerate_cuts
from .liberty import CellLibrary, StandardCell
from .netlist import Instance, Netlist, Report, report
from .sglib import ABSENT, Supergate, SupergateLibrary

DELAY = "delay"
AREA = "area"
EPS = 1e-9


class MappingError(RuntimeError):
    pass


class CoverError(MappingError):
    pass


@dataclass
class MapParams:
    cut_size: int = 6
    cuts_per_node: Optional[int] = 24
    matches_per_cut: Optional[int] = 30
    rounds: Tuple[str, ...] = (DELAY, AREA, AREA)

    def __post_init__(self):
        if self.matches_per_cut is not None and self.matches_per_cut < 1:
            raise ValueError("matches_per_cut must be at least 1")
        self.rounds = tuple(r.lower() for r in self.rounds)
        for r in self.rounds:
            if r not in (DELAY, AREA):
                raise ValueError(f"unknown round kind {r!r}")
        if not self.rounds or self.rounds[0] != DELAY:
            raise ValueError("the first round must be a delay round")


@dataclass
class Match:
    """One way to realize a cut.

    ``gate`` is None for a wire (the cut function is its single leaf) or a
    constant.  ``binding[j]`` is the leaf node driving gate variable ``j``;
    ``input_neg`` marks variables fed through an inverter.
    """
    cut: Cut
    gate: Optional[Supergate]
    output_complemented: bool
    arrival: float
    area_est: float
    input_neg: int = 0
    binding: Tuple[int, ...] = ()
    const: Optional[bool] = None
    pins: Tuple[Tuple[int, float], ...] = ()  # (leaf, delay offset) for used variables
    out_delay: float = 0.0

    @property
    def used_leaves(self) -> Tuple[int, ...]:
        return tuple(leaf for leaf, _ in self.pins)

    def arrival_at(self, arrivals: Sequence[float]) -> float:
        if not self.pins:
            return 0.0 if self.const is not None else self.out_delay
        return max(arrivals[leaf] + off for leaf, off in self.pins) + self.out_delay

    def describe(self) -> str:
        if self.const is not None:
            return f"const{int(self.const)}"
        body = "wire" if self.gate is None else self.gate.describe()
        negs = f" neg={self.input_neg:#x}" if self.input_neg else ""
        out = " !out" if self.output_complemented else ""
        return f"{body}{negs}{out} leaves={list(self.binding)}"


@dataclass
class NodeChoice:
    node: int
    best_match: Match
    arrival: float
    required: float = float("inf")
    area_flow: float = 0.0


@dataclass
class MapResult:
    netlist: Netlist
    report: Report
    choices: Dict[int, NodeChoice]
    po_arrivals: List[float]
    delay_target: float
    round_areas: List[float] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Library-side match tables


@lru_cache(maxsize=1 << 16)
def _canon(table: int) -> tt.NCanonical:
    return tt.n_canonicalize(table, tt.MAX_VARS)


def negation_symmetries(g: Supergate) -> List[Tuple[int, bool]]:
    """Every (input mask, output flag) leaving the gate's table unchanged."""
    sup = tt.support(g.table)
    out = []
    sub = sup
    while True:
        for o in (False, True):
            if tt.apply_negations(g.table, sub, o) == g.table:
                out.append((sub, o))
        if sub == 0:
            break
        sub = (sub - 1) & sup
    return sorted(out)


class MatchLibrary:
    """Lookup structures over a supergate library plus the inverter cell."""

    def __init__(self, lib: SupergateLibrary, cells: Optional[CellLibrary] = None,
                 inverter: Optional[StandardCell] = None):
        self.lib = lib
        if inverter is None and cells is not None:
            inverter = cells.inverter()
        if inverter is None:
            inverter = _find_inverter(lib)
        self.inverter = inverter
        self.inv_delay = inverter.max_delay if inverter else 0.0
        self.inv_area = inverter.area if inverter else 0.0
        self._nclass: Optional[Dict[int, List[Tuple[Supergate, int, bool]]]] = None
        self._syms: Dict[int, List[Tuple[int, bool]]] = {}

    def exact(self, table: int) -> List[Supergate]:
        return self.lib.lookup(table)

    def nclass(self, canon: int) -> List[Tuple[Supergate, int, bool]]:
        if self._nclass is None:
            idx: Dict[int, List[Tuple[Supergate, int, bool]]] = {}
            for g in self.lib.finals():
                c = _canon(g.table)
                idx.setdefault(c.canon, []).append((g, c.input_neg_mask, c.output_neg))
            for lst in idx.values():
                lst.sort(key=lambda e: (e[0].max_delay, e[0].area, e[0].id))
            self._nclass = idx
        return self._nclass.get(canon, [])

    def symmetries(self, g: Supergate) -> List[Tuple[int, bool]]:
        if g.id not in self._syms:
            self._syms[g.id] = negation_symmetries(g)
        return self._syms[g.id]


def _find_inverter(lib: SupergateLibrary) -> Optional[StandardCell]:
    invs = {g.root.name: g.root for g in lib.gates
            if g.root is not None and g.root.num_inputs == 1
            and g.root.table == tt.complement(tt.ELEMENTARY[0])}
    if not invs:
        return None
    return min(invs.values(), key=lambda c: (c.max_delay, c.area, c.name))


def _limit(seq, n):
    return seq if n is None else seq[:n]


def _gate_match(c: Cut, g: Supergate, neg: int, out: bool, ml: MatchLibrary,
                arrivals: Sequence[float]) -> Match:
    pins = []
    for j in range(g.num_vars):
        d = g.delays[j]
        if d == ABSENT:
            continue
        inv = neg >> j & 1
        pins.append((c.leaves[j], d + (ml.inv_delay if inv else 0.0)))
    out_delay = ml.inv_delay if out else 0.0
    n_inv = tt.popcount(neg) + int(out)
    m = Match(c, g, out, 0.0, g.area + n_inv * ml.inv_area, neg, tuple(c.leaves[:g.num_vars]),
              None, tuple(pins), out_delay)
    m.arrival = m.arrival_at(arrivals)
    return m


def match_cut(c: Cut, ml: MatchLibrary, arrivals: Sequence[float],
              matches_per_cut: Optional[int] = 30) -> List[Match]:
    """Every match of one cut, at most ``matches_per_cut`` gates per lookup list."""
    if len(c.leaves) > tt.MAX_VARS:
        raise ValueError(f"cut with {len(c.leaves)} leaves exceeds {tt.MAX_VARS}")
    t = c.table
    n = len(c.leaves)
    if t in (tt.CONST0, tt.CONST1):
        return [Match(c, None, False, 0.0, 0.0, const=t == tt.CONST1)]
    out = []
    if n == 1 and t == tt.ELEMENTARY[0]:
        m = Match(c, None, False, 0.0, 0.0, 0, c.leaves, None, ((c.leaves[0], 0.0),))
        m.arrival = m.arrival_at(arrivals)
        out.append(m)
    out += [_gate_match(c, g, 0, False, ml, arrivals)
            for g in _limit(ml.exact(t), matches_per_cut) if g.num_vars <= n]
    if ml.inverter is None:
        return out
    comp = tt.complement(t)
    out += [_gate_match(c, g, 0, True, ml, arrivals)
            for g in _limit(ml.exact(comp), matches_per_cut) if g.num_vars <= n]
    if out:
        return out
    ct = _canon(t)
    for g, mg, og in _limit(ml.nclass(ct.canon), matches_per_cut):
        if g.num_vars > n:
            continue
        sup = tt.support(g.table)
        base_m = (ct.input_neg_mask ^ mg) & sup
        base_o = ct.output_neg ^ og
        seen = set()
        for s, so in ml.symmetries(g):
            key = (base_m ^ s, base_o ^ so)
            if key in seen:
                continue
            seen.add(key)
            out.append(_gate_match(c, g, key[0], key[1], ml, arrivals))
    return out


# ---------------------------------------------------------------------------
# Passes


def _structural_cut(a: Aig, node: int) -> Cut:
    l0, l1 = a.fanins(node)
    leaves = tuple(sorted({lit_id(l0), lit_id(l1)} - {0}))
    c = Cut(node, leaves)
    c.table = cut_function(a, c)
    return c


def node_matches(a: Aig, cuts, ml: MatchLibrary, params: MapParams,
                 arrivals: Sequence[float]) -> Dict[int, List[Match]]:
    """Candidate matches per AND node; falls back to the fanin cut when nothing matches."""
    out: Dict[int, List[Match]] = {}
    for node in a.and_ids():
        ms = []
        for c in cuts[node].cuts:
            if not c.is_trivial:
                ms.extend(match_cut(c, ml, arrivals, params.matches_per_cut))
        if not ms:
            c = _structural_cut(a, node)
            if all(c.leaves != x.leaves for x in cuts[node].cuts):
                ms = match_cut(c, ml, arrivals, params.matches_per_cut)
        if not ms:
            raise MappingError(f"node {node} has no match and the library offers no fallback gate")
        out[node] = ms
    return out


def _area_flow(m: Match, flows: Sequence[float], refs: Sequence[float]) -> float:
    return m.area_est + sum(flows[leaf] / max(1.0, refs[leaf]) for leaf in m.used_leaves)


def delay_pass(a: Aig, matches: Dict[int, List[Match]]) -> Dict[int, NodeChoice]:
    """Minimum-arrival match per node (ties: smaller area, then fewer leaves)."""
    arrivals = [0.0] * a.num_nodes
    flows = [0.0] * a.num_nodes
    fanouts = a.fanout_counts()
    choices: Dict[int, NodeChoice] = {}
    for node in a.and_ids():
        best = None
        for m in matches[node]:
            arr = m.arrival_at(arrivals)
            key = (arr, m.area_est, len(m.cut.leaves))
            if best is None or key < best[0]:
                best = (key, m)
        (arr, _, _), m = best
        m = replace(m, arrival=arr)
        arrivals[node] = arr
        flows[node] = _area_flow(m, flows, fanouts)
        choices[node] = NodeChoice(node, m, arr, float("inf"), flows[node])
    return choices


def _is_const(node: int, choices: Dict[int, NodeChoice]) -> bool:
    while node in choices:
        m = choices[node].best_match
        if m.const is not None:
            return True
        if m.gate is not None:
            return False
        node = m.binding[0]
    return node == 0


def _po_offset(lit: int, choices: Dict[int, NodeChoice], ml: MatchLibrary) -> float:
    # a complemented constant is just the other constant
    return ml.inv_delay if lit_neg(lit) and not _is_const(lit_id(lit), choices) else 0.0


def po_arrivals(a: Aig, choices: Dict[int, NodeChoice], ml: MatchLibrary) -> List[float]:
    out = []
    for lit in a.pos:
        node = lit_id(lit)
        base = choices[node].arrival if node in choices else 0.0
        out.append(base + _po_offset(lit, choices, ml))
    return out


def cover_refs(a: Aig, choices: Dict[int, NodeChoice]) -> List[int]:
    """Reference counts of the current cover (outputs included); 0 means unused."""
    refs = [0] * a.num_nodes
    stack = []
    for lit in a.pos:
        node = lit_id(lit)
        refs[node] += 1
        if refs[node] == 1 and node in choices:
            stack.append(node)
    while stack:
        node = stack.pop()
        for leaf in choices[node].best_match.used_leaves:
            refs[leaf] += 1
            if refs[leaf] == 1 and leaf in choices:
                stack.append(leaf)
    return refs


def required_times(a: Aig, choices: Dict[int, NodeChoice], ml: MatchLibrary,
                   target: float) -> List[float]:
    req = [float("inf")] * a.num_nodes
    refs = cover_refs(a, choices)
    for lit in a.pos:
        node = lit_id(lit)
        req[node] = min(req[node], target - _po_offset(lit, choices, ml))
    for node in reversed(a.and_ids()):
        if not refs[node]:
            continue
        m = choices[node].best_match
        r = req[node] - m.out_delay
        for leaf, off in m.pins:
            req[leaf] = min(req[leaf], r - off)
    return req


def area_pass(a: Aig, matches: Dict[int, List[Match]], prior: Dict[int, NodeChoice],
              ml: MatchLibrary, target: float) -> Dict[int, NodeChoice]:
    """Re-select by area flow among matches that keep every required time."""
    req = required_times(a, prior, ml, target)
    refs = cover_refs(a, prior)
    arrivals = [0.0] * a.num_nodes
    flows = [0.0] * a.num_nodes
    choices: Dict[int, NodeChoice] = {}
    for node in a.and_ids():
        best = None
        fastest = None
        for m in matches[node]:
            arr = m.arrival_at(arrivals)
            af = _area_flow(m, flows, refs)
            if fastest is None or (arr, af) < fastest[0]:
                fastest = ((arr, af), m)
            if arr <= req[node] + EPS:
                key = (af, arr, len(m.cut.leaves))
                if best is None or key < best[0]:
                    best = (key, m)
        if best is not None:
            (af, arr, _), m = best
        else:
            (arr, af), m = fastest
        arrivals[node] = arr
        flows[node] = af
        choices[node] = NodeChoice(node, replace(m, arrival=arr), arr, req[node], af)
    return choices


# ---------------------------------------------------------------------------
# Cover


def _node_net(a: Aig, node: int, choices: Dict[int, NodeChoice]) -> str:
    if node == 0:
        return "1'b0"
    if a.is_pi(node):
        return f"pi{node}"
    m = choices[node].best_match
    if m.const is not None:
        return "1'b1" if m.const else "1'b0"
    if m.gate is None:
        return _node_net(a, m.binding[0], choices)
    return f"n{node}"


class _Builder:
    def __init__(self, ml: MatchLibrary, name: str):
        self.ml = ml
        self.instances: List[Instance] = []
        self.inverted: Dict[str, str] = {}
        self.count = 0

    def add(self, cell: StandardCell, inputs, output: str, inverter: bool = False) -> str:
        self.instances.append(Instance(f"inst{len(self.instances)}", cell, tuple(inputs), output,
                                       inverter))
        return output

    def invert(self, net: str) -> str:
        if net == "1'b0":
            return "1'b1"
        if net == "1'b1":
            return "1'b0"
        if net not in self.inverted:
            if self.ml.inverter is None:
                raise CoverError(f"an inverter is required on net {net} but the library has none")
            self.inverted[net] = self.add(self.ml.inverter, [net], f"{net}_b", True)
        return self.inverted[net]

    def tree(self, g: Supergate, leaf_nets: Sequence[str], out_net: Optional[str], stem: str) -> str:
        if g.is_elementary:
            return leaf_nets[g.var - 1]
        ins = [self.tree(f, leaf_nets, None, stem) for f in g.fanins]
        if out_net is None:
            self.count += 1
            out_net = f"{stem}_{self.count}"
        return self.add(g.root, ins, out_net)


def extract_cover(a: Aig, choices: Dict[int, NodeChoice], ml: MatchLibrary,
                  name: str = "top") -> Netlist:
    refs = cover_refs(a, choices)
    b = _Builder(ml, name)
    for node in a.and_ids():
        if not refs[node]:
            continue
        m = choices[node].best_match
        if m.gate is None:
            continue  # constants and wires name an existing net
        net = f"n{node}"
        leaf_nets = []
        for j, leaf in enumerate(m.binding):
            src = _node_net(a, leaf, choices)
            leaf_nets.append(b.invert(src) if m.input_neg >> j & 1 else src)
        b.count = 0
        if m.output_complemented:
            inner = b.tree(m.gate, leaf_nets, None, net)
            b.add(ml.inverter, [inner], net, True)
        else:
            b.tree(m.gate, leaf_nets, net, net)
    outputs = []
    for i, lit in enumerate(a.pos):
        src = _node_net(a, lit_id(lit), choices)
        outputs.append((f"po{i}", b.invert(src) if lit_neg(lit) else src))
    inputs = [f"pi{i}" for i in range(1, a.num_pis + 1)]
    return Netlist(name, inputs, outputs, b.instances)


def cover_area(netlist: Netlist) -> float:
    return sum(i.cell.area for i in netlist.instances)


# ---------------------------------------------------------------------------
# Driver


def map_aig(a: Aig, lib: SupergateLibrary, params: Optional[MapParams] = None,
            cells: Optional[CellLibrary] = None, name: str = "top") -> MapResult:
    params = params or MapParams()
    ml = MatchLibrary(lib, cells)
    cuts = enumerate_cuts(a, params.cut_size, params.cuts_per_node)
    matches = node_matches(a, cuts, ml, params, [0.0] * a.num_nodes)
    choices = delay_pass(a, matches)
    target = max(po_arrivals(a, choices, ml), default=0.0)
    best_net = extract_cover(a, choices, ml, name)
    best = (cover_area(best_net), choices, best_net)
    areas = [best[0]]
    for kind in params.rounds[1:]:
        if kind == DELAY:
            choices = delay_pass(a, matches)
        else:
            choices = area_pass(a, matches, best[1], ml, target)
        net = extract_cover(a, choices, ml, name)
        area = cover_area(net)
        areas.append(area)
        if max(po_arrivals(a, choices, ml), default=0.0) <= target + EPS and area < best[0] - EPS:
            best = (area, choices, net)
    _, choices, net = best
    return MapResult(net, report(net), choices, po_arrivals(a, choices, ml), target, areas)
