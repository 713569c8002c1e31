"""Gate-level netlists: simulation, timing report, and text formats.

Nets are plain strings.  Constant nets are written ``1'b0`` and ``1'b1``;
every other net is driven by exactly one primary input or one instance.
"""

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from . import tt
from .liberty import CellLibrary, StandardCell

CONST_NETS = {"1'b0": tt.CONST0, "1'b1": tt.CONST1}


class NetlistError(ValueError):
    pass


@dataclass
class Instance:
    name: str
    cell: StandardCell
    inputs: Tuple[str, ...]
    output: str
    inverter: bool = False  # inserted to realize a complemented edge


@dataclass
class Netlist:
    name: str
    inputs: List[str]
    outputs: List[Tuple[str, str]]  # (port, driving net)
    instances: List[Instance] = field(default_factory=list)

    @property
    def num_inverters(self) -> int:
        return sum(1 for i in self.instances if i.inverter)

    def drivers(self) -> Dict[str, Instance]:
        out = {}
        for inst in self.instances:
            if inst.output in out or inst.output in self.inputs or inst.output in CONST_NETS:
                raise NetlistError(f"net {inst.output} has more than one driver")
            out[inst.output] = inst
        return out

    def topological(self) -> List[Instance]:
        """Instances ordered so every input net is driven earlier."""
        drivers = self.drivers()
        known = set(self.inputs) | set(CONST_NETS)
        pending = {}
        users: Dict[str, List[Instance]] = {}
        ready = deque()
        for inst in self.instances:
            waiting = set()
            for net in inst.inputs:
                if net in known:
                    continue
                if net not in drivers:
                    raise NetlistError(f"net {net} used by {inst.name} is not driven")
                waiting.add(net)
                users.setdefault(net, []).append(inst)
            pending[inst.name] = len(waiting)
            if not waiting:
                ready.append(inst)
        order = []
        while ready:
            inst = ready.popleft()
            order.append(inst)
            for user in users.get(inst.output, ()):
                pending[user.name] -= 1
                if pending[user.name] == 0:
                    ready.append(user)
        if len(order) != len(self.instances):
            raise NetlistError("combinational cycle in netlist")
        for port, net in self.outputs:
            if net not in known and net not in drivers:
                raise NetlistError(f"output {port} is bound to undriven net {net}")
        return order


def simulate_netlist(netlist: Netlist, pi_words: Sequence[int]) -> List[int]:
    if len(pi_words) != len(netlist.inputs):
        raise ValueError(f"expected {len(netlist.inputs)} input words, got {len(pi_words)}")
    words = dict(CONST_NETS)
    words.update(zip(netlist.inputs, (w & tt.MASK for w in pi_words)))
    for inst in netlist.topological():
        words[inst.output] = inst.cell.evaluate(*(words[n] for n in inst.inputs)) & tt.MASK
    return [words[net] for _, net in netlist.outputs]


@dataclass
class Report:
    area: float
    delay: float
    gates: int
    nets: int
    inverters: int = 0

    def line(self) -> str:
        return f"area={self.area:g} delay={self.delay:g} gates={self.gates} nets={self.nets}"

    def kv(self) -> str:
        return (f"#kv area={self.area!r} delay={self.delay!r} gates={self.gates} "
                f"nets={self.nets} inverters={self.inverters}")


def arrival_times(netlist: Netlist) -> Dict[str, float]:
    arr = {net: 0.0 for net in netlist.inputs}
    arr.update({net: 0.0 for net in CONST_NETS})
    for inst in netlist.topological():
        arr[inst.output] = max((arr[n] + d for n, d in zip(inst.inputs, inst.cell.pin_delays)),
                               default=0.0)
    return arr


def report(netlist: Netlist) -> Report:
    """Area is the sum of instance areas; delay is the longest PI-to-PO path."""
    arr = arrival_times(netlist)
    delay = max((arr[net] for _, net in netlist.outputs), default=0.0)
    area = sum(inst.cell.area for inst in netlist.instances)
    return Report(area, delay, len(netlist.instances),
                  len(netlist.inputs) + len(netlist.instances), netlist.num_inverters)


# ---------------------------------------------------------------------------
# Text formats


def write_gnl(netlist: Netlist) -> str:
    lines = [f"# netlist {netlist.name}"]
    lines += [f"input {net}" for net in netlist.inputs]
    lines += [f"output {port} {net}" for port, net in netlist.outputs]
    for inst in netlist.instances:
        lines.append(" ".join([inst.name, inst.cell.name, inst.output, *inst.inputs]))
    return "\n".join(lines) + "\n"


def _is_inverter(cell: StandardCell) -> bool:
    return cell.num_inputs == 1 and cell.table == tt.complement(tt.ELEMENTARY[0])


def parse_gnl(text: str, cells: CellLibrary) -> Netlist:
    name = "top"
    inputs, outputs, instances = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("# netlist "):
            name = line.split(None, 2)[2]
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "input" and len(parts) == 2:
            inputs.append(parts[1])
        elif parts[0] == "output" and len(parts) == 3:
            outputs.append((parts[1], parts[2]))
        elif len(parts) >= 3:
            inst, cell_name, out, *ins = parts
            if cell_name not in cells:
                raise NetlistError(f"line {lineno}: unknown cell {cell_name}")
            cell = cells[cell_name]
            if len(ins) != cell.num_inputs:
                raise NetlistError(f"line {lineno}: {cell_name} takes {cell.num_inputs} inputs")
            instances.append(Instance(inst, cell, tuple(ins), out, _is_inverter(cell)))
        else:
            raise NetlistError(f"line {lineno}: cannot parse {raw!r}")
    return Netlist(name, inputs, outputs, instances)


def _vname(net: str) -> str:
    if net in CONST_NETS or re.fullmatch(r"[A-Za-z_][A-Za-z0-9_$]*", net):
        return net
    return "\\" + net + " "


def write_verilog(netlist: Netlist) -> str:
    ports = list(netlist.inputs) + [p for p, _ in netlist.outputs]
    port_set = set(ports)
    wires = [i.output for i in netlist.instances if i.output not in port_set]
    lines = [f"module {netlist.name} ({', '.join(_vname(p) for p in ports)});"]
    lines += [f"  input {_vname(n)};" for n in netlist.inputs]
    lines += [f"  output {_vname(p)};" for p, _ in netlist.outputs]
    lines += [f"  wire {_vname(w)};" for w in wires]
    for inst in netlist.instances:
        pins = [f".{pin}({_vname(net)})" for pin, net in zip(inst.cell.inputs, inst.inputs)]
        pins.append(f".{inst.cell.output}({_vname(inst.output)})")
        lines.append(f"  {inst.cell.name} {inst.name} ({', '.join(pins)});")
    for port, net in netlist.outputs:
        if port != net:
            lines.append(f"  assign {_vname(port)} = {_vname(net)};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


_INST_RE = re.compile(r"^\s*(\S+)\s+(\S+)\s*\((.*)\)\s*;\s*$")
_PIN_RE = re.compile(r"\.(\w+)\(\s*(\\\S+\s|[^)\s]+)\s*\)")


def parse_verilog(text: str, cells: CellLibrary) -> Netlist:
    """Read the structural subset produced by :func:`write_verilog`."""
    name = "top"
    inputs, outputs, instances, assigns = [], [], {}, []
    insts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line or line == "endmodule" or line.startswith("wire "):
            continue
        if line.startswith("module "):
            name = line.split()[1].split("(")[0]
        elif line.startswith("input "):
            inputs.append(line[6:].rstrip(";").strip().lstrip("\\"))
        elif line.startswith("output "):
            outputs.append(line[7:].rstrip(";").strip().lstrip("\\"))
        elif line.startswith("assign "):
            lhs, rhs = line[7:].rstrip(";").split("=")
            assigns.append((lhs.strip().lstrip("\\"), rhs.strip().lstrip("\\")))
        else:
            m = _INST_RE.match(line)
            if not m or m.group(1) not in cells:
                raise NetlistError(f"line {lineno}: cannot parse {raw!r}")
            cell = cells[m.group(1)]
            pins = {p: n.strip().lstrip("\\") for p, n in _PIN_RE.findall(m.group(3))}
            try:
                ins = tuple(pins[p] for p in cell.inputs)
                out = pins[cell.output]
            except KeyError as exc:
                raise NetlistError(f"line {lineno}: pin {exc} unconnected") from None
            insts.append(Instance(m.group(2), cell, ins, out, _is_inverter(cell)))
    instances = dict(assigns)
    return Netlist(name, inputs, [(p, instances.get(p, p)) for p in outputs], insts)
