"""Combinational And-Inverter Graphs and the AIGER file format.

Node ids: 0 is constant false, ``1..num_pis`` are primary inputs, and AND
nodes follow in topological order.  A literal is ``2*id + complemented``.
"""

import random
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

MASK = (1 << 64) - 1


class AigerParseError(ValueError):
    def __init__(self, message: str, position):
        super().__init__(f"{position}: {message}")
        self.position = position


def lit_id(lit: int) -> int:
    return lit >> 1


def lit_neg(lit: int) -> bool:
    return bool(lit & 1)


@dataclass(frozen=True)
class Aig:
    num_pis: int
    ands: Tuple[Tuple[int, int], ...]
    pos: Tuple[int, ...]

    def __post_init__(self):
        for i, (a, b) in enumerate(self.ands):
            node = self.num_pis + 1 + i
            if lit_id(a) >= node or lit_id(b) >= node:
                raise ValueError(f"AND node {node} has a fanin that is not earlier in id order")
        top = self.num_nodes
        for lit in self.pos:
            if lit_id(lit) >= top:
                raise ValueError(f"output literal {lit} is undefined")

    @property
    def num_pos(self) -> int:
        return len(self.pos)

    @property
    def num_ands(self) -> int:
        return len(self.ands)

    @property
    def num_nodes(self) -> int:
        """Count of ids including the constant node."""
        return 1 + self.num_pis + len(self.ands)

    def is_pi(self, node: int) -> bool:
        return 1 <= node <= self.num_pis

    def is_and(self, node: int) -> bool:
        return node > self.num_pis

    def fanins(self, node: int) -> Tuple[int, int]:
        return self.ands[node - self.num_pis - 1]

    def and_ids(self) -> range:
        return range(self.num_pis + 1, self.num_nodes)

    def fanout_counts(self) -> List[int]:
        counts = [0] * self.num_nodes
        for a, b in self.ands:
            counts[lit_id(a)] += 1
            counts[lit_id(b)] += 1
        for lit in self.pos:
            counts[lit_id(lit)] += 1
        return counts


# ---------------------------------------------------------------------------
# Simulation


def simulate_nodes(a: Aig, pi_words: Sequence[int]) -> List[int]:
    """Word per node id (index 0 is the constant)."""
    if len(pi_words) != a.num_pis:
        raise ValueError(f"expected {a.num_pis} input words, got {len(pi_words)}")
    words = [0] * a.num_nodes
    words[1:a.num_pis + 1] = [w & MASK for w in pi_words]
    base = a.num_pis + 1
    for i, (l0, l1) in enumerate(a.ands):
        w0 = words[l0 >> 1] ^ (MASK if l0 & 1 else 0)
        w1 = words[l1 >> 1] ^ (MASK if l1 & 1 else 0)
        words[base + i] = w0 & w1
    return words


def simulate_aig(a: Aig, pi_words: Sequence[int]) -> List[int]:
    words = simulate_nodes(a, pi_words)
    return [words[lit >> 1] ^ (MASK if lit & 1 else 0) for lit in a.pos]


# ---------------------------------------------------------------------------
# Reading


def _renumber(num_pis: int, input_vars: Sequence[int], and_defs: Dict[int, Tuple[int, int]],
              outputs: Sequence[int], where) -> Aig:
    """Map arbitrary AIGER variable numbers onto topologically ordered ids."""
    new_id = {0: 0}
    for i, v in enumerate(input_vars):
        new_id[v] = i + 1
    ands: List[Tuple[int, int]] = []

    def lit(old: int) -> int:
        return 2 * new_id[old >> 1] + (old & 1)

    def visit(root: int):
        stack = [(root, False)]
        on_stack = set()
        while stack:
            var, expanded = stack.pop()
            if var in new_id:
                continue
            if var not in and_defs:
                raise AigerParseError(f"dangling literal for variable {var}", where)
            if expanded:
                on_stack.discard(var)
                r0, r1 = and_defs[var]
                new_id[var] = num_pis + 1 + len(ands)
                ands.append((lit(r0), lit(r1)))
                continue
            if var in on_stack:
                raise AigerParseError(f"combinational cycle through variable {var}", where)
            on_stack.add(var)
            stack.append((var, True))
            for r in reversed(and_defs[var]):
                if (r >> 1) not in new_id:
                    stack.append((r >> 1, False))

    for var in sorted(and_defs):
        visit(var)
    for o in outputs:
        if (o >> 1) not in new_id:
            raise AigerParseError(f"dangling output literal {o}", where)
    return Aig(num_pis, tuple(ands), tuple(lit(o) for o in outputs))


def _header(line: str, where) -> Tuple[str, List[int]]:
    parts = line.split()
    if len(parts) < 6 or parts[0] not in ("aag", "aig"):
        raise AigerParseError(f"malformed header {line!r}", where)
    try:
        m, i, l, o, a = (int(x) for x in parts[1:6])
    except ValueError:
        raise AigerParseError(f"malformed header {line!r}", where) from None
    if l > 0:
        raise AigerParseError("latches are not supported (combinational AIGs only)", where)
    if len(parts) > 6 and any(int(x) for x in parts[6:]):
        raise AigerParseError("bad/constraint/justice/fairness sections are not supported", where)
    return parts[0], [m, i, l, o, a]


def parse_aag(text: str) -> Aig:
    lines = text.splitlines()
    if not lines:
        raise AigerParseError("empty input", "line 1")
    _, (m, ni, _, no, na) = _header(lines[0], "line 1")
    if len(lines) < 1 + ni + no + na:
        raise AigerParseError("truncated body", f"line {len(lines)}")

    def ints(idx: int, count: int) -> List[int]:
        try:
            vals = [int(x) for x in lines[idx].split()]
        except ValueError:
            raise AigerParseError(f"non-integer field in {lines[idx]!r}", f"line {idx + 1}") from None
        if len(vals) != count:
            raise AigerParseError(f"expected {count} fields", f"line {idx + 1}")
        for v in vals:
            if v < 0 or v >> 1 > m:
                raise AigerParseError(f"literal {v} exceeds maximum variable {m}", f"line {idx + 1}")
        return vals

    row = 1
    inputs = []
    for _ in range(ni):
        (lit,) = ints(row, 1)
        if lit & 1 or lit == 0:
            raise AigerParseError(f"input literal {lit} must be positive and even", f"line {row + 1}")
        inputs.append(lit >> 1)
        row += 1
    outputs = []
    for _ in range(no):
        outputs.append(ints(row, 1)[0])
        row += 1
    and_defs: Dict[int, Tuple[int, int]] = {}
    for _ in range(na):
        lhs, r0, r1 = ints(row, 3)
        if lhs & 1 or (lhs >> 1) in and_defs or (lhs >> 1) in inputs:
            raise AigerParseError(f"bad AND left-hand side {lhs}", f"line {row + 1}")
        and_defs[lhs >> 1] = (r0, r1)
        row += 1
    return _renumber(ni, inputs, and_defs, outputs, "body")


def _read_varint(data: bytes, pos: int) -> Tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise AigerParseError("truncated delta encoding", f"byte {pos}")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def parse_aig_binary(data: bytes) -> Aig:
    end = data.find(b"\n")
    if end < 0:
        raise AigerParseError("missing header line", "byte 0")
    _, (m, ni, _, no, na) = _header(data[:end].decode("ascii", "replace"), "byte 0")
    if m < ni + na:
        raise AigerParseError("header M smaller than I + A", "byte 0")
    pos = end + 1
    outputs = []
    for _ in range(no):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise AigerParseError("truncated output section", f"byte {pos}")
        try:
            outputs.append(int(data[pos:nl]))
        except ValueError:
            raise AigerParseError("bad output literal", f"byte {pos}") from None
        pos = nl + 1
    and_defs = {}
    for i in range(na):
        lhs = 2 * (ni + 1 + i)
        start = pos
        d0, pos = _read_varint(data, pos)
        d1, pos = _read_varint(data, pos)
        r0 = lhs - d0
        r1 = r0 - d1
        if d0 == 0 or r1 < 0:
            raise AigerParseError("invalid delta encoding", f"byte {start}")
        and_defs[ni + 1 + i] = (r0, r1)
    return _renumber(ni, list(range(1, ni + 1)), and_defs, outputs, "binary body")


def parse_aiger(source: Union[str, bytes]) -> Aig:
    """Read ASCII ``aag`` or binary ``aig`` content."""
    if isinstance(source, str):
        source = source.encode()
    if source.startswith(b"aag"):
        return parse_aag(source.decode())
    if source.startswith(b"aig"):
        return parse_aig_binary(source)
    raise AigerParseError("stream does not begin with an 'aag' or 'aig' header", "byte 0")


def read_aiger(path) -> Aig:
    with open(path, "rb") as fh:
        return parse_aiger(fh.read())


# ---------------------------------------------------------------------------
# Writing


def write_aag(a: Aig) -> str:
    lines = [f"aag {a.num_nodes - 1} {a.num_pis} 0 {a.num_pos} {a.num_ands}"]
    lines += [str(2 * i) for i in range(1, a.num_pis + 1)]
    lines += [str(lit) for lit in a.pos]
    for node in a.and_ids():
        l0, l1 = a.fanins(node)
        lines.append(f"{2 * node} {l0} {l1}")
    return "\n".join(lines) + "\n"


def _varint(value: int) -> bytes:
    out = bytearray()
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def write_aig_binary(a: Aig) -> bytes:
    out = bytearray(f"aig {a.num_nodes - 1} {a.num_pis} 0 {a.num_pos} {a.num_ands}\n".encode())
    for lit in a.pos:
        out += f"{lit}\n".encode()
    for node in a.and_ids():
        r0, r1 = sorted(a.fanins(node), reverse=True)
        out += _varint(2 * node - r0) + _varint(r0 - r1)
    return bytes(out)


# ---------------------------------------------------------------------------
# Random circuits for tests and demos


def random_aig(num_pis: int, num_ands: int, num_pos: int, seed=None,
               allow_degenerate: bool = False, locality: int = 0) -> Aig:
    """Random combinational AIG.

    Fanins are drawn from earlier nodes (from the last ``locality`` nodes plus
    the PIs when ``locality > 0``, which yields deeper circuits).  Unless
    ``allow_degenerate`` is set, constant fanins and AND nodes whose two
    fanins share a node are avoided.
    """
    rng = random.Random(seed)
    ands = []
    for i in range(num_ands):
        node = num_pis + 1 + i
        lo = 0 if allow_degenerate else 1
        pool = list(range(lo, node))
        if locality and node - 1 - num_pis > locality:
            pool = list(range(lo, num_pis + 1)) + list(range(node - locality, node))
        a = rng.choice(pool)
        b = rng.choice(pool)
        while not allow_degenerate and b == a and len(pool) > 1:
            b = rng.choice(pool)
        ands.append((2 * a + rng.randint(0, 1), 2 * b + rng.randint(0, 1)))
    top = num_pis + num_ands
    pos = []
    for k in range(num_pos):
        # favour late nodes so outputs see deep logic
        node = top - k if top - k > num_pis and k < num_ands else rng.randint(1, top)
        pos.append(2 * node + rng.randint(0, 1))
    return Aig(num_pis, tuple(ands), tuple(pos))
