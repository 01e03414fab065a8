import itertools

import numpy as np
import pytest
from numpy.linalg import LinAlgError

from netident import (
    Edge,
    NetworkStructure,
    Realization,
    closed_loop,
    determinant,
    kron,
    numerical_rank,
    sample_realization,
)
from netident.network_model import random_structure


def brute_force_det(m):
    """Sum over all permutations with inversion-count signs; independent of LU."""
    n = m.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        inversions = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        term = (-1) ** inversions
        for i in range(n):
            term *= m[i, perm[i]]
        total += term
    return total


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_closed_loop_identity_for_empty_graph():
    s = NetworkStructure(4, (), (0,), (1,))
    t = closed_loop(sample_realization(s, 0))
    assert np.array_equal(t, np.eye(4))


def test_closed_loop_nilpotent_closed_form():
    s = NetworkStructure(2, (Edge(0, 1),), (0,), (1,))
    r = sample_realization(s, 1)
    g = r.matrix[1, 0]
    t = closed_loop(r)
    np.testing.assert_allclose(t, np.array([[1, 0], [g, 1]]), atol=1e-14)


def test_closed_loop_residual_bound():
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = random_structure(5, 0.5, 1, 1, 0, rng)
        r = sample_realization(s, rng)
        t = closed_loop(r)
        residual = np.linalg.norm((np.eye(5) - r.matrix) @ t - np.eye(5), 2)
        assert residual <= 5 * 1e-10


def test_closed_loop_rejects_singular():
    s = NetworkStructure(
        2,
        (Edge(0, 1, known=True, value=1), Edge(1, 0, known=True, value=1)),
        (0,),
        (1,),
    )
    r = Realization.from_values(s, {(0, 1): 1, (1, 0): 1})
    with pytest.raises(LinAlgError):
        closed_loop(r)


def test_kron_identity_block_structure():
    rng = np.random.default_rng(3)
    m = random_complex(rng, (2, 3))
    out = kron(np.eye(2), m)
    assert out.shape == (4, 6)
    np.testing.assert_array_equal(out[:2, :3], m)
    np.testing.assert_array_equal(out[2:, 3:], m)
    np.testing.assert_array_equal(out[:2, 3:], np.zeros((2, 3)))


def test_kron_scalar_is_scaling():
    rng = np.random.default_rng(4)
    m = random_complex(rng, (3, 3))
    np.testing.assert_array_equal(kron(np.array([[2.0]]), m), 2.0 * m)


def test_kron_vec_identity():
    # (A kron B) vec(X) = vec(B X A^T), column-major vec
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = random_complex(rng, (3, 3))
        b = random_complex(rng, (3, 3))
        x = random_complex(rng, (3, 3))
        lhs = kron(a, b) @ x.reshape(-1, order="F")
        rhs = (b @ x @ a.T).reshape(-1, order="F")
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_rank_zero_matrix():
    assert numerical_rank(np.zeros((3, 4))) == 0


def test_rank_identity():
    assert numerical_rank(np.eye(4)) == 4


def test_rank_empty():
    assert numerical_rank(np.zeros((3, 0))) == 0


def test_rank_outer_product_is_one():
    rng = np.random.default_rng(6)
    u = random_complex(rng, 5)
    v = random_complex(rng, 7)
    assert numerical_rank(np.outer(u, v.conj())) == 1


def test_rank_invariant_under_permutation_and_unitary():
    rng = np.random.default_rng(7)
    m = random_complex(rng, (6, 4))
    m[:, 3] = m[:, 0] + m[:, 1]  # force rank 3
    base = numerical_rank(m)
    assert base == 3
    perm = rng.permutation(6)
    assert numerical_rank(m[perm]) == base
    q, _ = np.linalg.qr(random_complex(rng, (6, 6)))
    u, _ = np.linalg.qr(random_complex(rng, (4, 4)))
    assert numerical_rank(q @ m @ u) == base


def test_rank_floor_suppresses_noise():
    noise = np.diag([1e-15, 1e-16])
    assert numerical_rank(noise) == 2  # the pure relative rule sees full rank
    assert numerical_rank(noise, floor=1e-12) == 0


def test_rank_rejects_non_finite():
    with pytest.raises(LinAlgError):
        numerical_rank(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_determinant_identity_and_repeated_row():
    assert determinant(np.eye(5)) == pytest.approx(1.0)
    m = np.array([[1.0, 2.0], [1.0, 2.0]])
    assert abs(determinant(m)) < 1e-12


def test_determinant_matches_permutation_expansion():
    rng = np.random.default_rng(8)
    for _ in range(10):
        m = random_complex(rng, (4, 4))
        d = determinant(m)
        assert abs(d - brute_force_det(m)) <= 1e-10 * abs(d)


def test_determinant_is_multiplicative():
    rng = np.random.default_rng(9)
    for _ in range(10):
        a = random_complex(rng, (5, 5))
        b = random_complex(rng, (5, 5))
        lhs = determinant(a @ b)
        rhs = determinant(a) * determinant(b)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_determinant_requires_square():
    with pytest.raises(ValueError, match="square"):
        determinant(np.zeros((2, 3)))
