import random

import pytest

from sgmap import tt
from sgmap.aig import Aig
from sgmap.liberty import CellLibrary, make_cell
from sgmap.sglib import GenParams, generate_library


def tiny_cells() -> CellLibrary:
    return CellLibrary([make_cell("INV", ["A"], "!A", 1.0),
                        make_cell("AND2", ["A", "B"], "A&B", 2.0),
                        make_cell("OR2", ["A", "B"], "A|B", 2.0)], "tiny")


def sample_aig() -> Aig:
    """PIs 1..5; 6 = 1&2, 7 = 4&5, 8 = 3&7, 9 = 6&8 (output 9)."""
    return Aig(5, ((2, 4), (8, 10), (6, 14), (12, 16)), (18,))


def random_expr(rng: random.Random, n: int, depth: int):
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.05:
            return tt.Const(rng.random() < 0.5)
        return tt.Var(rng.randrange(n))
    kind = rng.choice("NAOX")
    if kind == "N":
        return tt.Not(random_expr(rng, n, depth - 1))
    left, right = random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1)
    return {"A": tt.And, "O": tt.Or, "X": tt.Xor}[kind](left, right)


def point_eval(expr, bits) -> int:
    """Independent pointwise evaluator used as a brute-force oracle."""
    if isinstance(expr, tt.Var):
        return bits[expr.index]
    if isinstance(expr, tt.Const):
        return int(expr.value)
    if isinstance(expr, tt.Not):
        return 1 - point_eval(expr.arg, bits)
    a, b = point_eval(expr.left, bits), point_eval(expr.right, bits)
    if isinstance(expr, tt.And):
        return a & b
    if isinstance(expr, tt.Or):
        return a | b
    return a ^ b


def minterm_table(expr, n: int = 6) -> int:
    word = 0
    for i in range(64):
        if point_eval(expr, [(i >> j) & 1 for j in range(n)]):
            word |= 1 << i
    return word


@pytest.fixture(scope="session")
def cells():
    return tiny_cells()


@pytest.fixture(scope="session")
def tiny_level1(cells):
    return generate_library(cells, GenParams(k=6, max_level=1, root_input_limit=2))[0]


@pytest.fixture(scope="session")
def tiny_level2(cells):
    return generate_library(cells, GenParams(k=4, max_level=2, root_input_limit=2))[0]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
