import random
from fractions import Fraction as Q

import pytest

from rinehart.qlinalg import (
    ContainmentError,
    QMatrix,
    Subspace,
    image_basis,
    kernel_basis,
    rank,
    restrict_to_coordinates,
    solve_linear,
    subquotient_dim,
    sum_subspaces,
)


def test_rank_examples():
    assert rank(QMatrix.from_rows([[1, 2], [2, 4]])) == 1
    assert rank(QMatrix(3, 3)) == 0
    ident = QMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert rank(ident) == 3


def test_kernel_of_sum_functional():
    m = QMatrix.from_rows([[1, 1, 1]])
    ker = kernel_basis(m)
    assert ker.dim == 2
    # canonical RREF basis of the kernel subspace
    assert ker.basis == ((Q(1), Q(0), Q(-1)), (Q(0), Q(1), Q(-1)))
    assert ker.contains((-1, 1, 0)) and ker.contains((-1, 0, 1))
    for v in ker.basis:
        assert m.mul_vector(v) == (Q(0),)


def test_kernel_of_injective_map_is_zero():
    m = QMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
    assert kernel_basis(m).dim == 0


def test_solve_canonical_particular_solution():
    m = QMatrix.from_rows([[1, 1]])
    assert solve_linear(m, [2]) == (Q(2), Q(0))


def test_solve_inconsistent_returns_none():
    m = QMatrix.from_rows([[1], [1]])
    assert solve_linear(m, [1, 2]) is None


def test_solve_unique():
    m = QMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_linear(m, [1, 1]) == (Q(1, 2), Q(1, 3))


def test_subquotient_plane_mod_line():
    z = Subspace.from_vectors([(1, 0), (0, 1)], 2)
    b = Subspace.from_vectors([(1, 0)], 2)
    dim, reps = subquotient_dim(z, b)
    assert dim == 1
    assert reps == [(Q(0), Q(1))]


def test_subquotient_requires_containment():
    z = Subspace.from_vectors([(1, 0, 0)], 3)
    b = Subspace.from_vectors([(0, 1, 0)], 3)
    with pytest.raises(ContainmentError):
        subquotient_dim(z, b)


def test_subquotient_reps_lie_in_numerator():
    z = Subspace.from_vectors([(1, 1, 0), (0, 0, 1)], 3)
    b = Subspace.from_vectors([(2, 2, 0)], 3)
    dim, reps = subquotient_dim(z, b)
    assert dim == 1
    for r in reps:
        assert z.contains(r)


def test_restrict_to_coordinates():
    s = Subspace.from_vectors([(1, 1, 1), (1, 1, 0)], 3)
    cut = restrict_to_coordinates(s, [2])
    assert cut.basis == ((Q(0), Q(0), Q(1)),)
    s2 = Subspace.from_vectors([(1, 0, 1)], 3)
    assert restrict_to_coordinates(s2, [2]).dim == 0


def test_image_and_sum():
    m = QMatrix.from_rows([[1, 2], [0, 0], [1, 2]])
    img = image_basis(m)
    assert img.basis == ((Q(1), Q(0), Q(1)),)
    both = sum_subspaces(img, Subspace.from_vectors([(0, 1, 0)], 3))
    assert both.dim == 2


def _random_sparse(rng, rows, cols):
    m = QMatrix(rows, cols)
    for _ in range(max(1, rows * cols // 4)):
        i, j = rng.randrange(rows), rng.randrange(cols)
        m[i, j] = Q(rng.randint(-9, 9), rng.randint(1, 4))
    return m


def test_rank_nullity_randomized():
    rng = random.Random(20240811)
    for trial in range(60):
        rows = rng.randint(1, 50)
        cols = rng.randint(1, 50)
        m = _random_sparse(rng, rows, cols)
        r = rank(m)
        ker = kernel_basis(m)
        assert r + ker.dim == cols, f"trial {trial}"
        for v in ker.basis[:3]:
            assert all(x == 0 for x in m.mul_vector(v))


def test_determinism():
    rng1 = random.Random(7)
    rng2 = random.Random(7)
    a = _random_sparse(rng1, 12, 9)
    b = _random_sparse(rng2, 12, 9)
    assert kernel_basis(a).basis == kernel_basis(b).basis
    assert rank(a) == rank(b)


def test_no_stored_zeros():
    m = QMatrix(2, 2)
    m[0, 0] = 5
    m[0, 0] = 0
    assert m.is_zero()
    m[1, 1] = Q(3, 6)
    assert m.entries == {(1, 1): Q(1, 2)}
