import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from pirpattern import gf
from pirpattern.errors import BadParams, FieldTooSmall, Inconsistent, RankDeficient

PRIMES = [2, 3, 5, 7, 11, 13, 197, 65521, 2147483647]


def sympy_rank(m, q):
    rows = [[GF(q)(int(v)) for v in r] for r in m]
    return DomainMatrix(rows, m.shape, GF(q)).rank()


def test_rank_basics():
    assert gf.rank(np.eye(4, dtype=int), 7) == 4
    assert gf.rank(np.zeros((3, 3), dtype=int), 7) == 0
    assert gf.rank(gf.vandermonde_mds(6, 3, 11), 11) == 3
    assert gf.rank(np.zeros((0, 4), dtype=int), 7) == 0


@given(
    st.sampled_from(PRIMES),
    st.integers(1, 12),
    st.integers(1, 12),
    st.integers(1, 12),
    st.integers(0, 2**32 - 1),
)
def test_rank_matches_sympy(q, r, c, k, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, q, size=(r, k))
    b = rng.integers(0, q, size=(k, c))
    m = gf.matmul(a, b, q)
    assert gf.rank(m, q) == sympy_rank(m, q)


def test_rank_large_blocked_path():
    rng = np.random.default_rng(0)
    q = 197
    a = rng.integers(0, q, size=(120, 70))
    b = rng.integers(0, q, size=(70, 90))
    m = gf.matmul(a, b, q)
    assert gf.rank(m, q) == 70 == sympy_rank(m, q)


@given(st.sampled_from(PRIMES), st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_matmul_exact(q, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, q, size=(3, n))
    b = rng.integers(0, q, size=(n, 2))
    expected = [[sum(int(a[i, t]) * int(b[t, j]) for t in range(n)) % q for j in range(2)] for i in range(3)]
    assert gf.matmul(a, b, q).tolist() == expected


@pytest.mark.parametrize("q", [p for p in range(2, 102) if all(p % d for d in range(2, p))])
def test_field_inverses_exhaustive(q):
    a = np.arange(1, q)
    inv = np.array([gf.inv_scalar(int(v), q) for v in a])
    assert ((a * inv) % q == 1).all()


def test_inverse_zero():
    with pytest.raises(ZeroDivisionError):
        gf.inv_scalar(0, 5)


def test_solve_identity():
    b = np.array([[1, 2], [3, 4], [0, 6]])
    assert gf.solve_linear(np.eye(3, dtype=int), b, 7).tolist() == b.tolist()


def test_solve_interpolation():
    q = 7
    v = gf.vandermonde_mds(3, 3, q)
    values = [5, 1, 3]  # p(0), p(1), p(2)
    coeffs = gf.solve_linear(v, np.array(values), q)
    # independent Lagrange interpolation over the rationals, reduced mod q
    pts = [0, 1, 2]
    poly = [Fraction(0)] * 3
    for i, xi in enumerate(pts):
        others = [x for x in pts if x != xi]
        denom = Fraction(1)
        for x in others:
            denom *= xi - x
        # (t - a)(t - b) = t^2 - (a+b) t + ab
        a, b = others
        basis = [Fraction(a * b), Fraction(-(a + b)), Fraction(1)]
        for d in range(3):
            poly[d] += values[i] * basis[d] / denom
    expected = [int(c.numerator * pow(c.denominator, q - 2, q)) % q for c in poly]
    assert coeffs.tolist() == expected


def test_solve_errors():
    with pytest.raises(RankDeficient):
        gf.solve_linear(np.array([[1, 1], [2, 2]]), np.array([1, 2]), 5)
    with pytest.raises(Inconsistent):
        gf.solve_linear(np.array([[1, 0], [0, 1], [1, 1]]), np.array([1, 1, 0]), 5)
    with pytest.raises(BadParams):
        gf.solve_linear(np.eye(2, dtype=int), np.array([1, 2, 3]), 5)


@given(st.sampled_from([2, 3, 197, 2147483647]), st.integers(1, 25), st.integers(0, 2**32 - 1))
def test_solve_roundtrip(q, n, seed):
    rng = np.random.default_rng(seed)
    a = gf.random_full_rank(n, q, rng)
    x = rng.integers(0, q, size=(n, 3))
    assert np.array_equal(gf.solve_linear(a, gf.matmul(a, x, q), q), x)
    assert np.array_equal(gf.matmul(a, gf.inv(a, q), q), np.eye(n, dtype=np.int64))


def test_random_full_rank_small():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert gf.random_full_rank(1, 2, rng).tolist() == [[1]]
        assert gf.rank(gf.random_full_rank(4, 2, rng), 2) == 4


def test_random_full_rank_deterministic():
    a = gf.random_full_rank(6, 5, np.random.default_rng(9))
    b = gf.random_full_rank(6, 5, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_gl22_uniform():
    group = [
        m for m in (np.array(v).reshape(2, 2) for v in itertools.product((0, 1), repeat=4))
        if gf.rank(m, 2) == 2
    ]
    assert len(group) == 6
    counts = Counter(
        tuple(gf.random_full_rank(2, 2, np.random.default_rng(s)).ravel()) for s in range(60000)
    )
    assert set(counts) == {tuple(m.ravel()) for m in group}
    for c in counts.values():
        assert abs(c / 60000 - 1 / 6) <= 0.05 / 6


def test_batch_sampler_matches_scalar_rank():
    rng = np.random.default_rng(1)
    for q, n in ((2, 4), (3, 3), (5, 2), (197, 3)):
        draws = rng.integers(0, q, size=(3000, n, n))
        mask = gf.batch_invertible(draws, q)
        assert mask.tolist() == [gf.rank(m, q) == n for m in draws]
        out = gf.random_full_rank_batch(500, n, q, rng)
        assert all(gf.rank(m, q) == n for m in out)


def test_batch_sampler_uniform_gl22():
    out = gf.random_full_rank_batch(60000, 2, 2, np.random.default_rng(4))
    counts = Counter(tuple(m.ravel()) for m in out)
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 60000 - 1 / 6) <= 0.05 / 6


def test_vandermonde_small():
    v = gf.vandermonde_mds(4, 2, 5)
    assert v.tolist() == [[1, 0], [1, 1], [1, 2], [1, 3]]
    for rows in itertools.combinations(range(4), 2):
        assert gf.rank(v[list(rows)], 5) == 2


def test_vandermonde_square_and_too_small():
    assert gf.rank(gf.vandermonde_mds(9, 9, 11), 11) == 9
    with pytest.raises(FieldTooSmall):
        gf.vandermonde_mds(5, 2, 3)


def test_vandermonde_196_112_spot_check():
    q = 197
    v = gf.vandermonde_mds(196, 112, q)
    rng = np.random.default_rng(7)
    for _ in range(50):
        rows = np.sort(rng.choice(196, size=112, replace=False))
        assert gf.rank(v[rows], q) == 112


def test_vandermonde_random_subsets():
    q = 31
    v = gf.vandermonde_mds(30, 12, q)
    rng = np.random.default_rng(8)
    for _ in range(1000):
        rows = rng.choice(30, size=12, replace=False)
        assert gf.rank(v[rows], q) == 12


def test_primes():
    assert [gf.next_prime(n) for n in (0, 2, 3, 4, 64, 196, 100)] == [2, 2, 3, 5, 67, 197, 101]
    assert gf.check_prime(197) == 197
    with pytest.raises(BadParams):
        gf.check_prime(4)
