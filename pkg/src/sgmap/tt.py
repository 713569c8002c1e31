"""Bit-parallel truth tables packed into one 64-bit word.

A table over ``n <= 6`` variables is a Python ``int`` in ``[0, 2**64)``.
Bit ``i`` holds the function value at minterm ``i`` and variable ``x_j``
(1-based) takes the value of bit ``j-1`` of ``i``.  Tables over fewer than six
variables are replicated across the whole word, so equality of functions is
plain integer equality regardless of the variable count they were built for.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Union

MAX_VARS = 6
MASK = (1 << 64) - 1

ELEMENTARY = (
    0xAAAAAAAAAAAAAAAA,
    0xCCCCCCCCCCCCCCCC,
    0xF0F0F0F0F0F0F0F0,
    0xFF00FF00FF00FF00,
    0xFFFF0000FFFF0000,
    0xFFFFFFFF00000000,
)

CONST0 = 0
CONST1 = MASK


class InvalidVariableError(ValueError):
    pass


class MissingInputError(KeyError):
    pass


def elementary_pattern(j: int, n: int = MAX_VARS) -> int:
    """Table of the projection ``f = x_j``.  ``n`` is accepted for symmetry only."""
    if not 1 <= j <= MAX_VARS:
        raise InvalidVariableError(f"variable index {j} outside 1..{MAX_VARS}")
    return ELEMENTARY[j - 1]


def complement(t: int) -> int:
    return ~t & MASK


def replicate(bits: int, n: int) -> int:
    """Fill a 64-bit word with copies of the low ``2**n`` bits of ``bits``."""
    width = 1 << n
    block = bits & ((1 << width) - 1)
    while width < 64:
        block |= block << width
        width <<= 1
    return block & MASK


def to_hex(t: int) -> str:
    return f"0x{t & MASK:016x}"


def from_hex(text: str) -> int:
    text = text.strip().lower()
    if not text.startswith("0x") or len(text) != 18:
        raise ValueError(f"bad truth table literal {text!r}")
    return int(text, 16)


def popcount(t: int) -> int:
    return bin(t).count("1")


def support(t: int) -> int:
    """Bit mask of the variables the function actually depends on."""
    mask = 0
    for j in range(MAX_VARS):
        shift = 1 << j
        pattern = ELEMENTARY[j]
        if (t & pattern) >> shift != (t & ~pattern & MASK):
            mask |= 1 << j
    return mask


def negate_input(t: int, j: int) -> int:
    """Table of ``f`` with variable ``x_{j+1}`` (0-based ``j``) complemented."""
    shift = 1 << j
    pattern = ELEMENTARY[j]
    return ((t & pattern) >> shift) | ((t << shift) & pattern)


def apply_negations(t: int, input_mask: int, output_neg: bool = False) -> int:
    for j in range(MAX_VARS):
        if input_mask >> j & 1:
            t = negate_input(t, j)
    return complement(t) if output_neg else t


# ---------------------------------------------------------------------------
# Boolean expression trees


@dataclass(frozen=True)
class Var:
    index: int  # 0-based position in the input list


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Xor:
    left: "Expr"
    right: "Expr"


Expr = Union[Var, Const, Not, And, Or, Xor]


def simulate(expr: Expr, inputs: Sequence[int]) -> int:
    """Evaluate ``expr`` bitwise over the input words."""
    if isinstance(expr, Var):
        if not 0 <= expr.index < len(inputs):
            raise MissingInputError(f"no input bound to variable {expr.index}")
        return inputs[expr.index]
    if isinstance(expr, Const):
        return MASK if expr.value else 0
    if isinstance(expr, Not):
        return ~simulate(expr.arg, inputs) & MASK
    left = simulate(expr.left, inputs)
    right = simulate(expr.right, inputs)
    if isinstance(expr, And):
        return left & right
    if isinstance(expr, Or):
        return left | right
    return left ^ right


def evaluate(expr: Expr, values: Sequence[bool]) -> bool:
    """Single-point evaluation; the slow reference for :func:`simulate`."""
    if isinstance(expr, Var):
        return bool(values[expr.index])
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Not):
        return not evaluate(expr.arg, values)
    left = evaluate(expr.left, values)
    right = evaluate(expr.right, values)
    if isinstance(expr, And):
        return left and right
    if isinstance(expr, Or):
        return left or right
    return left != right


def expr_vars(expr: Expr) -> set:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Not):
        return expr_vars(expr.arg)
    return expr_vars(expr.left) | expr_vars(expr.right)


def _source(expr: Expr) -> str:
    if isinstance(expr, Var):
        return f"a{expr.index}"
    if isinstance(expr, Const):
        return str(MASK) if expr.value else "0"
    if isinstance(expr, Not):
        return f"({_source(expr.arg)} ^ {MASK})"
    op = {And: "&", Or: "|", Xor: "^"}[type(expr)]
    return f"({_source(expr.left)} {op} {_source(expr.right)})"


def compile_expr(expr: Expr, arity: int) -> Callable[..., int]:
    """Turn ``expr`` into a plain Python function of ``arity`` word arguments.

    Used on hot paths (supergate enumeration, netlist simulation) where
    walking the tree per call is too slow.
    """
    args = ", ".join(f"a{i}" for i in range(arity))
    return eval(f"lambda {args}: {_source(expr)}", {})


def format_expr(expr: Expr, names: Sequence[str]) -> str:
    if isinstance(expr, Var):
        return names[expr.index]
    if isinstance(expr, Const):
        return "1" if expr.value else "0"
    if isinstance(expr, Not):
        return f"!{format_expr(expr.arg, names)}"
    op = {And: "&", Or: "|", Xor: "^"}[type(expr)]
    return f"({format_expr(expr.left, names)}{op}{format_expr(expr.right, names)})"


# ---------------------------------------------------------------------------
# Negation-canonical forms and hashing


class NCanonical(NamedTuple):
    canon: int
    input_neg_mask: int
    output_neg: bool


def n_canonicalize(t: int, n: int) -> NCanonical:
    """Smallest word over all input/output negations of the first ``n`` variables.

    ``apply_negations(canon, mask, out) == t`` holds for the returned transform
    because both kinds of negation are involutions and commute.
    """
    if not 1 <= n <= MAX_VARS:
        raise InvalidVariableError(f"variable count {n} outside 1..{MAX_VARS}")
    best = None
    # Gray-code walk: each step flips one input.
    current = t
    mask = 0
    for step in range(1 << n):
        if step:
            j = (step & -step).bit_length() - 1
            current = negate_input(current, j)
            mask ^= 1 << j
        for out in (False, True):
            word = complement(current) if out else current
            cand = (word, out, mask)
            if best is None or cand < best:
                best = cand
    word, out, mask = best
    return NCanonical(word, mask, out)


def hash_key(t: int, key_space: int) -> int:
    """Deterministic bucket index in ``[0, key_space)`` (splitmix64 finalizer)."""
    if key_space <= 1:
        return 0
    z = (t + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    z ^= z >> 31
    return z % key_space


def mix(*values: int) -> int:
    """Order-sensitive 64-bit combination of integers, stable across processes."""
    h = 0x243F6A8885A308D3
    for v in values:
        h = hash_key((h ^ (v & MASK)) & MASK, 1 << 64)
    return h
