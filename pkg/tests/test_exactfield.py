from fractions import Fraction

import pytest
import sympy

from reglab.errors import CompositionError, InconsistentSystemError, ParameterError
from reglab.exactfield import (
    FieldSpec,
    PrimeFieldMatrix,
    hstack,
    kernel_basis,
    rank,
    reference_rank,
    solve,
    vstack,
)

FIELDS = [FieldSpec(0), FieldSpec(2), FieldSpec(3), FieldSpec(101), FieldSpec(2_147_483_647)]


def test_field_spec_validation():
    assert str(FieldSpec(0)) == "QQ"
    assert str(FieldSpec(7)) == "GF(7)"
    for bad in (4, -1, 1, 2**31 + 11):
        with pytest.raises(ParameterError):
            FieldSpec(bad)


def test_field_elements():
    gf5 = FieldSpec(5)
    assert gf5.element(Fraction(1, 2)) == 3
    assert gf5.element(-1) == 4
    assert gf5.inv(2) == 3
    assert FieldSpec(0).element(3) == Fraction(3)
    assert FieldSpec(0).inv(Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(ParameterError):
        gf5.element(Fraction(1, 5))
    with pytest.raises(ZeroDivisionError):
        gf5.inv(0)


def test_small_ranks():
    assert rank(PrimeFieldMatrix.from_rows(FieldSpec(2), [[1, 1], [1, 1]])) == 1
    assert rank(PrimeFieldMatrix.from_rows(FieldSpec(0), [[1, 2], [3, 4]])) == 2
    # det = -2 vanishes mod 2 only
    assert rank(PrimeFieldMatrix.from_rows(FieldSpec(2), [[1, 2], [3, 4]])) == 1
    assert rank(PrimeFieldMatrix.zeros(FieldSpec(3), 0, 5)) == 0
    assert rank(PrimeFieldMatrix.identity(FieldSpec(101), 6)) == 6


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_rank_matches_reference(field, rng):
    # widths past 64 cross a packed GF(2) word boundary
    for rows, cols in [(1, 1), (5, 3), (3, 5), (12, 70), (70, 12), (20, 130)]:
        for density in (0.1, 0.5):
            m = PrimeFieldMatrix.random(field, rows, cols, rng, density=density)
            assert m.rank() == reference_rank(field, [list(row) for row in m.data.tolist()])
            assert m.T.rank() == m.rank()


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_kernel_basis_spans_kernel(field, rng):
    for rows, cols in [(4, 9), (9, 4), (10, 80)]:
        m = PrimeFieldMatrix.random(field, rows, cols, rng, density=0.3)
        basis = kernel_basis(m)
        assert basis.rows == cols
        assert basis.cols == cols - m.rank()
        assert (m @ basis).is_zero()
        assert basis.rank() == basis.cols


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_rref_pivots(field, rng):
    m = PrimeFieldMatrix.random(field, 8, 11, rng, density=0.4)
    reduced, pivots = m.rref()
    assert len(pivots) == m.rank()
    assert pivots == m.pivot_columns()
    for r, pc in enumerate(pivots):
        column = [reduced.data[i, pc] for i in range(reduced.rows)]
        assert column[r] == field.element(1)
        assert sum(1 for value in column if value) == 1


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_solve_consistent_system(field, rng):
    m = PrimeFieldMatrix.random(field, 6, 9, rng, density=0.5)
    x = PrimeFieldMatrix.random(field, 9, 2, rng, density=0.5)
    rhs = m @ x
    solution = solve(m, rhs)
    assert m @ solution == rhs


def test_solve_inconsistent_system():
    field = FieldSpec(3)
    m = PrimeFieldMatrix.from_rows(field, [[1, 1], [1, 1]])
    rhs = PrimeFieldMatrix.from_rows(field, [[1], [2]])
    with pytest.raises(InconsistentSystemError):
        m.solve(rhs)


def test_shape_errors():
    field = FieldSpec(7)
    a = PrimeFieldMatrix.zeros(field, 2, 3)
    with pytest.raises(CompositionError):
        a @ a
    with pytest.raises(CompositionError):
        a @ PrimeFieldMatrix.zeros(FieldSpec(5), 3, 1)
    with pytest.raises(ParameterError):
        PrimeFieldMatrix.from_rows(field, [[1, 2], [3]])


def test_stacking():
    field = FieldSpec(0)
    a = PrimeFieldMatrix.from_rows(field, [[1, 0], [0, 1]])
    b = PrimeFieldMatrix.from_rows(field, [[Fraction(1, 2)], [3]])
    assert hstack([a, b]).shape == (2, 3)
    assert vstack([a, a]).shape == (4, 2)
    assert vstack([a, a]).rank() == 2
    assert hstack([a, b]).entries == (1, 0, Fraction(1, 2), 0, 1, 3)


def test_gf2_packed_rank_on_many_random_matrices(gf2, rng):
    for _ in range(1000):
        rows, cols = rng.randint(1, 12), rng.randint(1, 130)
        m = PrimeFieldMatrix.random(gf2, rows, cols, rng, density=rng.choice((0.05, 0.2, 0.5, 0.9)))
        assert m.rank() == reference_rank(gf2, m.data.tolist())


def test_rational_rref_matches_sympy(qq, rng):
    for rows, cols in [(3, 5), (6, 4), (7, 7)]:
        m = PrimeFieldMatrix.random(qq, rows, cols, rng, density=0.6)
        reduced, pivots = m.rref()
        expected, expected_pivots = sympy.Matrix(m.data.tolist()).rref()
        assert pivots == list(expected_pivots)
        assert reduced.data.tolist() == [[Fraction(int(x.p), int(x.q)) for x in row] for row in expected.tolist()]


def test_reference_rank_on_a_known_matrix():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert reference_rank(FieldSpec(0), rows) == 2
    assert reference_rank(FieldSpec(2), rows) == 1
    assert reference_rank(FieldSpec(0), [[Fraction(1, 2), Fraction(1, 3)], [3, 2]]) == 1
    assert reference_rank(FieldSpec(5), []) == 0
