import itertools
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from bordercollision.matrix_core import (
    FLOAT,
    Matrix,
    Poly,
    adjugate,
    char_poly,
    det,
    det_lemma_check,
    first_row_adjugate,
    inverse,
    solve,
    strict_sign,
    to_scalar,
    unit,
)

from conftest import fractions, square


def leibniz(rows):
    """Permutation expansion in Fractions, independent of the package."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term *= Fraction(rows[i][j])
        total += term
    return total


def as_fraction(v):
    return Fraction(int(v.numerator), int(v.denominator))


def test_to_scalar_reads_decimals_exactly():
    assert to_scalar("0.4") == mpq(2, 5)
    assert to_scalar("-3/2") == mpq(-3, 2)
    assert to_scalar(0.5, FLOAT) == 0.5
    with pytest.raises(ValueError):
        to_scalar(float("nan"))


def test_det_identity_and_one_dim():
    assert det(Matrix.identity(3)) == 1
    assert det(Matrix.identity(1) - Matrix([["0.4"]])) == mpq(3, 5)


@given(square(n=4))
def test_det_matches_permutation_expansion(rows):
    assert as_fraction(det(Matrix(rows))) == leibniz(rows)


@given(st.integers(1, 5).flatmap(lambda n: square(n=n)))
def test_float_det_close_to_exact(rows):
    m = Matrix(rows)
    exact = float(det(m))
    approx = det(m.with_backend(FLOAT))
    assert abs(approx - exact) <= 1e-9 * max(1.0, abs(exact)) + m.zero_band()


def test_adjugate_two_by_two():
    a, b, c, d = map(mpq, (1, 2, 3, 4))
    assert adjugate(Matrix([[a, b], [c, d]])) == Matrix([[d, -b], [-c, a]])
    assert adjugate(Matrix.identity(4)) == Matrix.identity(4)


@given(st.integers(1, 5).flatmap(lambda n: square(n=n)))
def test_adjugate_identity(rows):
    m = Matrix(rows)
    assert m @ adjugate(m) == Matrix.identity(m.n).scale(det(m))


@given(square())
def test_first_row_adjugate_matches_full(rows):
    m = Matrix(rows)
    assert first_row_adjugate(m) == adjugate(m).rows[0]


@given(square())
def test_solve_and_inverse(rows):
    m = Matrix(rows)
    b = tuple(mpq(i + 1) for i in range(m.n))
    if det(m) == 0:
        with pytest.raises(ZeroDivisionError):
            solve(m, b)
        return
    x = solve(m, b)
    assert m @ x == b
    assert m @ inverse(m) == Matrix.identity(m.n)


def test_char_poly_examples():
    p = char_poly(Matrix([[2, 0], [0, "-1.5"]]))
    assert p == Poly([mpq(-3), mpq(-1, 2), mpq(1)])
    assert char_poly(Matrix([["0.4"]])) == Poly([mpq(-2, 5), mpq(1)])


@given(st.integers(1, 5).flatmap(lambda n: square(n=n)))
def test_char_poly_pointwise(rows):
    m = Matrix(rows)
    p = char_poly(m)
    assert p.degree == m.n
    for lam in (-3, -1, 0, 1, Fraction(1, 2), 7):
        shifted = [[Fraction(lam) * (i == j) - Fraction(rows[i][j]) for j in range(m.n)] for i in range(m.n)]
        assert as_fraction(p(mpq(lam))) == leibniz(shifted)


@given(st.integers(1, 5).flatmap(lambda n: square(n=n)))
def test_char_poly_float_agrees(rows):
    m = Matrix(rows)
    exact = char_poly(m).coeffs
    approx = char_poly(m.with_backend(FLOAT)).coeffs
    ref = np.poly(np.array([[float(v) for v in r] for r in rows]))[::-1]
    for e, a, r in zip(exact, approx, ref):
        assert abs(float(e) - a) <= 1e-8 * max(1.0, abs(float(e)))
        assert abs(float(e) - r) <= 1e-6 * max(1.0, abs(float(e)))


def test_det_lemma_trivial():
    e1 = unit(2, 0)
    assert det(Matrix.identity(2) + Matrix.outer(e1, e1, "rational")) == 2
    assert det_lemma_check(Matrix.identity(2), e1, e1)


@given(square(n=3), st.lists(fractions(), min_size=3, max_size=3), st.lists(fractions(), min_size=3, max_size=3))
def test_det_lemma_random(rows, p, q):
    m = Matrix(rows)
    p = tuple(to_scalar(v) for v in p)
    q = tuple(to_scalar(v) for v in q)
    assert det_lemma_check(m, p, q)
    assert det_lemma_check(m.with_backend(FLOAT), tuple(map(float, p)), tuple(map(float, q)))


def test_strict_sign_band():
    assert strict_sign(mpq(-1, 10**30)) == -1
    assert strict_sign(1e-12, 1e-10) == 0
    assert strict_sign(-2.0, 1e-10) == -1


def test_dimension_cap():
    with pytest.raises(ValueError):
        Matrix([[0] * 13 for _ in range(13)])
    assert Matrix([[0] * 13 for _ in range(13)], max_dim=13).n == 13
