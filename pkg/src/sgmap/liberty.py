"""Reader for the combinational subset of the Liberty cell-library format.

Only ``cell``, ``pin``, ``area``, ``function``, ``direction`` and ``timing``
are interpreted; every other group or attribute is skipped structurally.
Pin delays use a load-independent estimate: for each input pin, the largest
rise/fall table entry at the smallest characterized load/slew point.
"""

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import tt
from .tt import And, Const, Expr, Not, Or, Var, Xor

DEFAULT_PIN_DELAY = 1.0
MAX_INPUTS = tt.MAX_VARS

_DELAY_TABLES = ("cell_rise", "cell_fall")
_SCALAR_DELAYS = ("intrinsic_rise", "intrinsic_fall")
_SEQUENTIAL_GROUPS = ("ff", "latch", "ff_bank", "latch_bank", "statetable")


class LibertyParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FunctionParseError(ValueError):
    def __init__(self, message: str, token: str):
        super().__init__(f"{message}: {token!r}")
        self.token = token


@lru_cache(maxsize=None)
def _compiled(function: Expr, arity: int):
    return tt.compile_expr(function, arity)


@dataclass(frozen=True)
class StandardCell:
    name: str
    inputs: Tuple[str, ...]
    output: str
    function: Expr
    table: int
    area: float
    pin_delays: Tuple[float, ...]

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def max_delay(self) -> float:
        return max(self.pin_delays, default=0.0)

    @property
    def is_constant(self) -> bool:
        return self.table in (tt.CONST0, tt.CONST1)

    def evaluate(self, *words: int) -> int:
        return _compiled(self.function, len(self.inputs))(*words)

    def summary(self) -> str:
        delays = ",".join(repr(d) for d in self.pin_delays)
        return f"{self.name}  {self.num_inputs}  {self.area!r}  {tt.to_hex(self.table)}  {delays}"


def make_cell(name: str, inputs: Sequence[str], function, area: float = 1.0,
              pin_delays: Optional[Sequence[float]] = None, output: str = "Y") -> StandardCell:
    """Build a cell from a function string or expression tree.

    Convenience for tests and synthetic libraries; derives the table.
    """
    inputs = tuple(inputs)
    if isinstance(function, str):
        function = parse_function(function, inputs)
    if pin_delays is None:
        pin_delays = [DEFAULT_PIN_DELAY] * len(inputs)
    table = tt.simulate(function, tt.ELEMENTARY[:len(inputs)])
    return StandardCell(name, inputs, output, function, table, float(area),
                        tuple(float(d) for d in pin_delays))


@dataclass
class CellLibrary:
    cells: List[StandardCell]
    source_name: str = ""
    skipped: List[Tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for cell in self.cells:
            if cell.name in seen:
                raise ValueError(f"duplicate cell name {cell.name}")
            seen.add(cell.name)
        self._by_name = {c.name: c for c in self.cells}

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, name: str) -> StandardCell:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def inverter(self) -> Optional[StandardCell]:
        """Fastest single-input cell computing NOT, or None."""
        invs = [c for c in self.cells
                if c.num_inputs == 1 and c.table == tt.complement(tt.ELEMENTARY[0])]
        if not invs:
            return None
        return min(invs, key=lambda c: (c.max_delay, c.area, c.name))

    def summary(self) -> str:
        return "".join(c.summary() + "\n" for c in self.cells)


# ---------------------------------------------------------------------------
# Boolean function strings

_FUNC_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_\[\]\.]*)|([01])|(.))")


def _tokenize_function(text: str) -> List[str]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _FUNC_TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None or tok.isspace():
            continue
        tokens.append(tok)
    return tokens


class _FunctionParser:
    # precedence: NOT > AND > XOR > OR

    def __init__(self, tokens: List[str], pins: Sequence[str]):
        self.tokens = tokens
        self.pos = 0
        self.pins = {p: i for i, p in enumerate(pins)}

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FunctionParseError("unexpected end of expression", "<end>")
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        expr = self.or_expr()
        if self.peek() is not None:
            raise FunctionParseError("unexpected token", self.peek())
        return expr

    def or_expr(self) -> Expr:
        expr = self.xor_expr()
        while self.peek() in ("+", "|"):
            self.take()
            expr = Or(expr, self.xor_expr())
        return expr

    def xor_expr(self) -> Expr:
        expr = self.and_expr()
        while self.peek() == "^":
            self.take()
            expr = Xor(expr, self.and_expr())
        return expr

    def _starts_operand(self, tok: Optional[str]) -> bool:
        return tok is not None and (tok in ("(", "!") or tok[0].isalnum() or tok[0] == "_")

    def and_expr(self) -> Expr:
        expr = self.unary()
        while True:
            tok = self.peek()
            if tok in ("&", "*"):
                self.take()
            elif not self._starts_operand(tok):
                return expr
            expr = And(expr, self.unary())

    def unary(self) -> Expr:
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        expr = self.primary()
        while self.peek() == "'":
            self.take()
            expr = Not(expr)
        return expr

    def primary(self) -> Expr:
        tok = self.take()
        if tok == "(":
            expr = self.or_expr()
            if self.peek() != ")":
                raise FunctionParseError("unbalanced parenthesis", self.peek() or "<end>")
            self.take()
            return expr
        if tok in ("0", "1"):
            return Const(tok == "1")
        if tok[0].isalpha() or tok[0] == "_":
            if tok not in self.pins:
                raise FunctionParseError("unknown pin", tok)
            return Var(self.pins[tok])
        raise FunctionParseError("dangling operator", tok)


def parse_function(expr_text: str, pins: Sequence[str]) -> Expr:
    """Parse a Liberty ``function`` string into an expression over ``pins``."""
    tokens = _tokenize_function(expr_text)
    if not tokens:
        raise FunctionParseError("empty function", expr_text)
    return _FunctionParser(tokens, pins).parse()


# ---------------------------------------------------------------------------
# Generic group syntax


@dataclass
class Group:
    kind: str
    args: List[str]
    line: int
    attrs: Dict[str, object] = field(default_factory=dict)
    groups: List["Group"] = field(default_factory=list)

    def subgroups(self, kind: str) -> List["Group"]:
        return [g for g in self.groups if g.kind == kind]


_LIB_TOKEN = re.compile(r'"(?:\\.|[^"\\])*"|[A-Za-z0-9_.\-+\[\]!\'&|^*$/]+|[(){};,:]')


def _lex_liberty(text: str):
    text = re.sub(r"\\\r?\n", " ", text)
    line = 1
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            line += 1
            pos += 1
        elif ch.isspace():
            pos += 1
        elif text.startswith("/*", pos):
            end = text.find("*/", pos + 2)
            if end < 0:
                raise LibertyParseError("unterminated comment", line)
            line += text.count("\n", pos, end)
            pos = end + 2
        elif text.startswith("//", pos):
            end = text.find("\n", pos)
            pos = n if end < 0 else end
        else:
            m = _LIB_TOKEN.match(text, pos)
            if m is None:
                raise LibertyParseError(f"unexpected character {ch!r}", line)
            tok = m.group(0)
            yield tok, line
            line += tok.count("\n")
            pos += len(tok)


def _unquote(tok: str) -> str:
    if len(tok) >= 2 and tok[0] == '"' and tok[-1] == '"':
        return tok[1:-1]
    return tok


def parse_groups(text: str) -> List[Group]:
    """Parse brace-structured Liberty text into a forest of :class:`Group`."""
    tokens = list(_lex_liberty(text))
    pos = 0
    last_line = tokens[-1][1] if tokens else 1

    def expect(value):
        nonlocal pos
        if pos >= len(tokens):
            raise LibertyParseError(f"unexpected end of input, expected {value!r}", last_line)
        tok, line = tokens[pos]
        if tok != value:
            raise LibertyParseError(f"expected {value!r}, got {tok!r}", line)
        pos += 1

    def parse_args():
        nonlocal pos
        args = []
        expect("(")
        while True:
            if pos >= len(tokens):
                raise LibertyParseError("unterminated argument list", last_line)
            tok, _ = tokens[pos]
            pos += 1
            if tok == ")":
                return args
            if tok != ",":
                args.append(_unquote(tok))

    def parse_body(group: Group):
        nonlocal pos
        while True:
            if pos >= len(tokens):
                raise LibertyParseError(f"unbalanced braces in {group.kind} group", last_line)
            tok, line = tokens[pos]
            if tok == "}":
                pos += 1
                return
            parse_statement(group)

    def parse_statement(parent: Group):
        nonlocal pos
        name, line = tokens[pos]
        if name in "(){};,:":
            raise LibertyParseError(f"unexpected {name!r}", line)
        pos += 1
        if pos >= len(tokens):
            raise LibertyParseError("truncated statement", line)
        tok, _ = tokens[pos]
        if tok == ":":
            pos += 1
            values = []
            while pos < len(tokens) and tokens[pos][0] not in (";", "}"):
                if tokens[pos][1] != line and values:
                    break
                values.append(_unquote(tokens[pos][0]))
                pos += 1
            if pos < len(tokens) and tokens[pos][0] == ";":
                pos += 1
            parent.attrs[name] = " ".join(values)
        elif tok == "(":
            args = parse_args()
            if pos < len(tokens) and tokens[pos][0] == "{":
                pos += 1
                group = Group(name, args, line)
                parse_body(group)
                parent.groups.append(group)
            else:
                if pos < len(tokens) and tokens[pos][0] == ";":
                    pos += 1
                parent.attrs[name] = args
        else:
            raise LibertyParseError(f"expected ':' or '(' after {name!r}", line)

    root = Group("<root>", [], 1)
    while pos < len(tokens):
        if tokens[pos][0] == "}":
            raise LibertyParseError("unbalanced closing brace", tokens[pos][1])
        parse_statement(root)
    return root.groups


# ---------------------------------------------------------------------------
# Cells


def _numbers(values) -> List[float]:
    if isinstance(values, str):
        values = [values]
    out = []
    for v in values:
        out.extend(float(x) for x in re.split(r"[,\s]+", v.strip()) if x)
    return out


def _table_min_point(table: Group) -> Optional[float]:
    """Entry of a delay table at its smallest characterized index point."""
    values = table.attrs.get("values")
    if values is None:
        return None
    if isinstance(values, str):
        values = [values]
    rows = [_numbers(v) for v in values]
    rows = [r for r in rows if r]
    if not rows:
        return None
    row = 0
    col = 0
    idx1 = table.attrs.get("index_1")
    idx2 = table.attrs.get("index_2")
    if len(rows) == 1:
        # one row: index_1 runs along it
        if idx1 is not None:
            xs = _numbers(idx1)
            if len(xs) == len(rows[0]):
                col = xs.index(min(xs))
        return rows[0][col]
    if idx1 is not None:
        xs = _numbers(idx1)
        if len(xs) == len(rows):
            row = xs.index(min(xs))
    if idx2 is not None:
        ys = _numbers(idx2)
        if len(ys) == len(rows[row]):
            col = ys.index(min(ys))
    return rows[row][col]


def estimate_pin_delays(inputs: Sequence[str], timing_groups: Sequence[Group]) -> List[float]:
    """Load-independent delay per input pin.

    Pins without any timing data default to ``DEFAULT_PIN_DELAY``.
    """
    found: Dict[str, float] = {}
    for timing in timing_groups:
        related = timing.attrs.get("related_pin")
        if related is None:
            continue
        if isinstance(related, list):
            related = " ".join(related)
        entries = []
        for kind in _DELAY_TABLES:
            for table in timing.subgroups(kind):
                v = _table_min_point(table)
                if v is not None:
                    entries.append(v)
        for kind in _SCALAR_DELAYS:
            if kind in timing.attrs:
                entries.extend(_numbers(timing.attrs[kind]))
        if not entries:
            continue
        for pin in related.split():
            found[pin] = max(found.get(pin, float("-inf")), max(entries))
    return [found.get(p, DEFAULT_PIN_DELAY) for p in inputs]


def _cell_from_group(group: Group) -> Tuple[Optional[StandardCell], str]:
    name = group.args[0] if group.args else "<anonymous>"
    if any(group.subgroups(k) for k in _SEQUENTIAL_GROUPS):
        return None, "sequential"
    inputs: List[str] = []
    outputs: List[Group] = []
    for pin in group.subgroups("pin"):
        direction = str(pin.attrs.get("direction", "")).strip()
        if direction == "input":
            inputs.extend(pin.args)
        elif direction == "output":
            outputs.append(pin)
        elif direction == "inout":
            return None, "tristate or bidirectional pin"
    if group.subgroups("bus") or group.subgroups("bundle"):
        return None, "bus pins"
    if len(outputs) != 1 or len(outputs[0].args) != 1:
        return None, "multi-output" if outputs else "no output pin"
    out = outputs[0]
    text = out.attrs.get("function")
    if text is None:
        return None, "output has no function"
    if "three_state" in out.attrs:
        return None, "tristate output"
    if len(inputs) > MAX_INPUTS:
        return None, f"{len(inputs)} inputs exceeds {MAX_INPUTS}"
    try:
        function = parse_function(str(text), inputs)
    except FunctionParseError as exc:
        return None, f"unparsable function ({exc})"
    try:
        area = float(group.attrs.get("area", 0.0))
    except ValueError:
        return None, "bad area"
    delays = estimate_pin_delays(inputs, out.subgroups("timing"))
    table = tt.simulate(function, tt.ELEMENTARY[:len(inputs)])
    return StandardCell(name, tuple(inputs), out.args[0], function, table, area, tuple(delays)), ""


def parse_liberty(text: str, source_name: str = "") -> CellLibrary:
    """Parse Liberty text into a :class:`CellLibrary`.

    Cells that are not single-output combinational, have more than six
    inputs, or carry an unparsable function are listed in ``skipped``.
    """
    groups = parse_groups(text)
    cells: List[StandardCell] = []
    skipped: List[Tuple[str, str]] = []
    seen = set()
    for top in groups:
        if top.kind == "library":
            source_name = source_name or (top.args[0] if top.args else "")
            cell_groups = top.subgroups("cell")
        elif top.kind == "cell":
            cell_groups = [top]
        else:
            continue
        for g in cell_groups:
            cell, reason = _cell_from_group(g)
            if cell is None:
                skipped.append((g.args[0] if g.args else "<anonymous>", reason))
            elif cell.name in seen:
                skipped.append((cell.name, "duplicate name"))
            else:
                seen.add(cell.name)
                cells.append(cell)
    return CellLibrary(cells, source_name, skipped)


def read_liberty(path) -> CellLibrary:
    with open(path) as fh:
        return parse_liberty(fh.read(), source_name="")


# ---------------------------------------------------------------------------
# Cell summary text (debug format)


def _expr_from_table(table: int, n: int) -> Expr:
    """Shannon-expansion expression realizing ``table`` over ``n`` variables."""
    def build(t: int, j: int) -> Expr:
        t = tt.replicate(t, n) if n else t
        if t == tt.CONST0:
            return Const(False)
        if t == tt.CONST1:
            return Const(True)
        if j < 0:
            raise AssertionError("non-constant table with no variables left")
        pattern = tt.ELEMENTARY[j]
        shift = 1 << j
        hi = (t & pattern) | ((t & pattern) >> shift)
        lo = (t & ~pattern & tt.MASK) | ((t & ~pattern & tt.MASK) << shift) & tt.MASK
        if hi == lo:
            return build(hi, j - 1)
        return Or(And(Var(j), build(hi, j - 1)), And(Not(Var(j)), build(lo, j - 1)))
    return build(table, n - 1)


def parse_cell_summary(text: str) -> CellLibrary:
    """Read the one-line-per-cell summary written by :meth:`CellLibrary.summary`."""
    cells = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) not in (4, 5):
            raise LibertyParseError("expected 'name n area tt delays'", lineno)
        name, n, area, hex_table = parts[:4]
        n = int(n)
        delays = tuple(float(d) for d in parts[4].split(",")) if len(parts) == 5 else ()
        if len(delays) != n:
            raise LibertyParseError(f"{name}: {len(delays)} delays for {n} inputs", lineno)
        table = tt.from_hex(hex_table)
        pins = tuple(chr(ord("A") + i) for i in range(n))
        function = _expr_from_table(table, n)
        cells.append(StandardCell(name, pins, "Y", function, table, float(area), delays))
    return CellLibrary(cells, "summary")


# ---------------------------------------------------------------------------
# Synthetic libraries for tests and benchmarks


def synthetic_library(num_cells: int, max_inputs: int = 3, seed: int = 0) -> CellLibrary:
    """An inverter plus ``num_cells - 1`` random non-degenerate cells.

    Functions depend on every pin; delays and areas are drawn from small
    grids so ties between candidates occur often.
    """
    import random

    rng = random.Random(seed)
    cells = [make_cell("INV", ["A"], "!A", 1.0, [1.0])]
    seen = {cells[0].table}
    pins_all = "ABCDEF"
    while len(cells) < num_cells:
        n = rng.randint(2, max_inputs)
        full = (1 << n) - 1
        bits = rng.getrandbits(1 << n)
        table = tt.replicate(bits, n)
        if table in seen or tt.support(table) != full:
            continue
        seen.add(table)
        pins = list(pins_all[:n])
        delays = [rng.choice((1.0, 1.5, 2.0)) for _ in pins]
        area = float(rng.randint(2, 2 * n + 2))
        cells.append(make_cell(f"G{len(cells)}", pins, _expr_from_table(table, n), area, delays))
    return CellLibrary(cells, f"synth{num_cells}_{seed}")
