import random

import pytest
from hypothesis import given, settings, strategies as st

from sgmap import tt
from conftest import minterm_table, random_expr

words = st.integers(min_value=0, max_value=tt.MASK)


def test_elementary_patterns():
    assert tt.elementary_pattern(1) == 0xAAAAAAAAAAAAAAAA
    assert tt.elementary_pattern(3) == 0xF0F0F0F0F0F0F0F0
    assert tt.elementary_pattern(6) == 0xFFFFFFFF00000000
    for j in range(1, 7):
        assert tt.popcount(tt.elementary_pattern(j)) == 32
    for bad in (0, 7):
        with pytest.raises(tt.InvalidVariableError):
            tt.elementary_pattern(bad)


def test_simulate_examples():
    x = tt.ELEMENTARY
    assert tt.simulate(tt.And(tt.Var(0), tt.Var(1)), x) == 0x8888888888888888
    e = tt.And(tt.Not(tt.Var(0)), tt.Or(tt.Var(1), tt.Var(2)))
    assert tt.simulate(e, x) == 0x5454545454545454 == minterm_table(e)
    with pytest.raises(tt.MissingInputError):
        tt.simulate(tt.Var(3), x[:2])


def test_simulate_matches_minterm_oracle():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 6)
        e = random_expr(rng, n, 5)
        assert tt.simulate(e, tt.ELEMENTARY[:n]) == minterm_table(e, n)


def test_compiled_expression_agrees():
    rng = random.Random(3)
    for _ in range(100):
        e = random_expr(rng, 6, 4)
        assert tt.compile_expr(e, 6)(*tt.ELEMENTARY) == tt.simulate(e, tt.ELEMENTARY)


@given(words, words)
def test_de_morgan(a, b):
    e = tt.Not(tt.And(tt.Var(0), tt.Var(1)))
    assert tt.simulate(e, [a, b]) == tt.complement(tt.simulate(tt.And(tt.Var(0), tt.Var(1)), [a, b]))


def test_complement_examples():
    assert tt.complement(0) == 0xFFFFFFFFFFFFFFFF
    assert tt.complement(tt.elementary_pattern(1)) == 0x5555555555555555


@given(words)
def test_complement_involution(t):
    assert tt.complement(tt.complement(t)) == t


def test_replication_invariant():
    # x1 AND x2 built over 2 variables, read back as a 4-variable function
    two = tt.replicate(0b1000, 2)
    four = 0
    for i in range(16):
        if i & 1 and i & 2:
            four |= 1 << i
    assert two == tt.replicate(four, 4) == 0x8888888888888888


def test_hex_rendering():
    assert tt.to_hex(0x8888888888888888) == "0x8888888888888888"
    assert tt.to_hex(1) == "0x0000000000000001"
    assert tt.from_hex("0xF0F0F0F0F0F0F0F0") == tt.ELEMENTARY[2]
    for bad in ("8888", "0x123", "0xZZZZZZZZZZZZZZZZ"):
        with pytest.raises(ValueError):
            tt.from_hex(bad)


def _brute_canon(t, n):
    best = None
    for out in (0, 1):
        for mask in range(1 << n):
            # pointwise transform: g(x) = out ^ t(x ^ mask)
            word = 0
            for i in range(64):
                src = i ^ mask
                if ((t >> src) & 1) ^ out:
                    word |= 1 << i
            cand = (word, out, mask)
            best = cand if best is None or cand < best else best
    return best


def test_n_canonical_examples():
    c = tt.n_canonicalize(0, 3)
    assert c == (0, 0, False)
    and2 = 0x8888888888888888
    word, out, mask = _brute_canon(and2, 2)
    assert tt.n_canonicalize(and2, 2) == (word, mask, bool(out))
    with pytest.raises(tt.InvalidVariableError):
        tt.n_canonicalize(and2, 0)


@settings(max_examples=60, deadline=None)
@given(words, st.integers(min_value=1, max_value=6))
def test_n_canonical_properties(t, n):
    c = tt.n_canonicalize(t, n)
    assert tt.apply_negations(c.canon, c.input_neg_mask, c.output_neg) == t
    assert tt.n_canonicalize(tt.complement(t), n).canon == c.canon
    again = tt.n_canonicalize(c.canon, n)
    assert again == (c.canon, 0, False)


@settings(max_examples=20, deadline=None)
@given(words, st.integers(min_value=1, max_value=3))
def test_n_canonical_matches_brute_force(t, n):
    word, out, mask = _brute_canon(t, n)
    assert tt.n_canonicalize(t, n) == (word, mask, bool(out))


def test_hash_key_basics():
    assert tt.hash_key(12345, 1) == 0
    assert tt.hash_key(0xDEAD, 4096) == tt.hash_key(0xDEAD, 4096)
    rng = random.Random(11)
    counts = [0] * 4096
    n = 100_000
    for _ in range(n):
        counts[tt.hash_key(rng.getrandbits(64), 4096)] += 1
    assert max(counts) <= 4 * n / 4096


def test_support():
    assert tt.support(tt.ELEMENTARY[0] & tt.ELEMENTARY[2]) == 0b101
    assert tt.support(0) == 0
