from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import matchings
from wheelperc.dynamics import (
    apply_row, asm_count, dense, hamiltonian, rotation_permutation, s_matrix,
    stationary, transfer_at, transfer_matrix, verify_dynamics,
)
from wheelperc.matchings import apply_e, enumerate_matchings, maximal, minimal, rotate, rotate_inverse

# Frozen from a floating-point eigenvector of T(1/2), rounded after scaling.
ALPHA_3 = [2, 1, 1, 2, 1]
ALPHA_4 = [7, 3, 3, 3, 1, 3, 1, 3, 1, 7, 3, 3, 3, 1]


def test_asm_counts():
    assert [asm_count(n) for n in range(8)] == [1, 1, 2, 7, 42, 429, 7436, 218348]


def test_s_and_h_small():
    assert dense(s_matrix(1)) == [[2]]
    assert dense(s_matrix(2)) == [[2, 2], [2, 2]]
    assert dense(hamiltonian(1)) == [[0]]
    assert dense(hamiltonian(2)) == [[2, -2], [-2, 2]]


@pytest.mark.parametrize("n", range(1, 7))
def test_s_row_sums(n):
    assert all(sum(r.values()) == 2 * n for r in s_matrix(n))


def test_stationary_small():
    assert list(stationary(2).values) == [Fraction(1, 2)] * 2
    assert stationary(3).alphas() == ALPHA_3
    assert stationary(4).alphas() == ALPHA_4
    assert sorted(stationary(3).alphas()) == [1, 1, 1, 2, 2]


def test_stationary_matches_float_eigenvector():
    for n in (3, 4, 5):
        T = np.array([[float(x) for x in r] for r in transfer_at(n, Fraction(1, 2))])
        w, V = np.linalg.eig(T.T)
        v = np.real(V[:, np.argmin(abs(w - 1))])
        v /= v.sum()
        assert np.allclose(v, [float(x) for x in stationary(n).values], atol=1e-12)


@pytest.mark.parametrize("n", range(1, 8))
def test_extreme_weights(n):
    mu = stationary(n)
    a = mu.alphas()
    assert sum(a) == asm_count(n)
    assert min(a) == 1 and mu[minimal(n)] * asm_count(n) == 1
    assert max(a) == asm_count(n - 1) and mu[maximal(n)] * asm_count(n) == asm_count(n - 1)
    perm = rotation_permutation(n)
    assert all(a[perm[i]] == a[i] for i in range(len(a)))


@pytest.mark.parametrize("n", range(1, 7))
def test_verify_dynamics(n):
    rep = verify_dynamics(n)
    assert rep.ok, rep.mismatches[:3]


def test_transfer_trivial_and_stationary():
    assert transfer_at(1, Fraction(1, 3)) == [[1]]
    T = transfer_at(2, Fraction(1, 2))
    mu = list(stationary(2).values)
    assert [sum(mu[i] * T[i][j] for i in range(2)) for j in range(2)] == mu


@given(matchings(max_n=4), st.data())
def test_single_bit_rows(pi, data):
    m = 2 * pi.n
    k = data.draw(st.integers(1, m))
    bits = [0] * m
    bits[k - 1] = 1
    assert apply_row(bits, pi) == rotate(apply_e(k, pi))
    assert apply_row([0] * m, pi) == rotate(pi)
    assert apply_row([1] * m, pi) == rotate_inverse(pi)


def test_transfer_cap():
    with pytest.raises(ValueError):
        transfer_matrix(7)
