import cmath

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from bordercollision.errors import DegenerateEndpoint
from bordercollision.matrix_core import FLOAT, Matrix, Poly, char_poly, det
from bordercollision.spectral import (
    EIG1_L,
    EIGM1_R,
    aberth_roots,
    counts,
    spectral_radius,
    squarefree_factors,
    stability,
    sturm_count,
)

from conftest import square

INF = float("inf")


def test_sturm_examples():
    p = char_poly(Matrix([[2, 0], [0, "-1.5"]]))
    assert sturm_count(p, (1, INF)) == 1
    assert sturm_count(p, (-INF, -1)) == 1
    assert sturm_count(p, (-1, 1)) == 0


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.integers(-7, 7), st.integers(-7, 7))
def test_sturm_counts_known_roots(roots, lo, hi):
    if lo > hi:
        lo, hi = hi, lo
    lo_q, hi_q = mpq(2 * lo + 1, 2), mpq(2 * hi + 3, 2)  # half-integers never hit a root
    p = Poly.from_roots([mpq(r) for r in roots])
    assert sturm_count(p, (lo_q, hi_q)) == sum(1 for r in roots if lo_q < r < hi_q)
    assert sturm_count(p, (-INF, INF)) == len(roots)


def test_sturm_endpoint_root_is_degenerate():
    with pytest.raises(DegenerateEndpoint):
        sturm_count(Poly.from_roots([mpq(1), mpq(3)]), (1, INF))


def test_squarefree_factors_multiplicity():
    p = Poly.from_roots([mpq(2), mpq(2), mpq(2), mpq(-1), mpq(5, 2), mpq(5, 2)])
    mults = sorted(k for _, k in squarefree_factors(p))
    assert mults == [1, 2, 3]


def test_counts_panel_d():
    sc = counts(Matrix([[2]]), Matrix([["-1.5"]]))
    assert (sc.sigma_L_plus, sc.sigma_L_minus, sc.sigma_R_plus, sc.sigma_R_minus) == (1, 0, 0, 1)
    assert (sc.sigma_LR_plus, sc.sigma_LL_plus) == (0, 1)
    assert not sc.degenerate


def test_counts_zero_pair():
    sc = counts(Matrix.zeros(3), Matrix.zeros(3))
    assert sc.as_dict() == {
        "sigma_L_plus": 0, "sigma_L_minus": 0, "sigma_R_plus": 0, "sigma_R_minus": 0,
        "sigma_LR_plus": 0, "sigma_LL_plus": 0, "degenerate": [],
    }


def test_counts_flags_unit_eigenvalues():
    sc = counts(Matrix([[1, 0], [0, 3]]), Matrix([[-1, 0], [0, 3]]))
    assert EIG1_L in sc.degenerate and EIGM1_R in sc.degenerate


def _sign(x):
    return (x > 0) - (x < 0)


@given(square(n=3), square(n=3))
def test_parities_match_determinant_signs(al_rows, tail):
    al = Matrix(al_rows)
    ar = Matrix([[t[0]] + r[1:] for t, r in zip(tail, al_rows)])
    sc = counts(al, ar)
    i = Matrix.identity(3)
    cases = [
        (det(i - al), sc.sigma_L_plus), (det(i + al), sc.sigma_L_minus),
        (det(i - ar), sc.sigma_R_plus), (det(i + ar), sc.sigma_R_minus),
        (det(i - ar @ al), sc.sigma_LR_plus), (det(i - al @ al), sc.sigma_LL_plus),
    ]
    for d, sigma in cases:
        if d != 0:
            assert _sign(d) == (-1) ** sigma


@given(square(n=4))
def test_counts_against_numpy_eigenvalues(rows):
    m = Matrix(rows)
    eig = np.linalg.eigvals(np.array([[float(v) for v in r] for r in rows]))
    real = [e.real for e in eig if abs(e.imag) < 1e-7]
    if any(abs(abs(r) - 1) < 1e-6 for r in real):
        return
    sc = counts(m, m)
    assert sc.sigma_L_plus == sum(1 for r in real if r > 1)
    assert sc.sigma_L_minus == sum(1 for r in real if r < -1)


def test_float_backend_flags_near_unit_eigenvalue():
    sc = counts(Matrix([[1.0 + 1e-14]], FLOAT), Matrix([[0.5]], FLOAT))
    assert EIG1_L in sc.degenerate


def test_spectral_radius_examples():
    assert spectral_radius(Matrix([["0.4"]])) == pytest.approx(0.4, abs=1e-12)
    assert spectral_radius(Matrix([[2, 0], [0, "-1.5"]])) == pytest.approx(2.0, abs=1e-12)
    # companion matrix of λ² + 1/4
    assert spectral_radius(Matrix([[0, 1], ["-1/4", 0]])) == pytest.approx(0.5, abs=1e-12)


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=6))
def test_aberth_recovers_roots(roots):
    coeffs = np.poly(roots)[::-1]
    found = aberth_roots(list(coeffs))
    scale = max(1.0, max(abs(r) for r in roots))
    # clustered roots are ill-conditioned; compare polynomial residuals instead of positions
    for z in found:
        assert abs(np.polyval(coeffs[::-1], z)) <= 1e-6 * scale ** len(roots) * 10
    # a cluster of k roots is only determined to about eps^(1/k)
    k = max(sum(abs(r - q) < 0.5 for q in roots) for r in roots)
    tol = 10 * scale * 1e-12 ** (1 / k)
    assert max(abs(z) for z in found) == pytest.approx(max(abs(r) for r in roots), abs=tol)


def test_repeated_unit_root_is_marginal():
    # (λ+1)³: the raw cubic puts the computed roots about 1e-5 off the unit circle
    m = Matrix([[0, 1, 0], [0, 0, 1], [-1, -3, -3]])
    assert spectral_radius(m) == pytest.approx(1.0, abs=1e-12)
    assert stability(m) == "MARGINAL"


def test_stability_labels():
    assert stability(Matrix([["0.6"]])) == "YES"
    assert stability(Matrix([["-1.5"]])) == "NO"
    assert stability(Matrix([[1]])) == "MARGINAL"
    # complex pair on the unit circle
    c, s = cmath.cos(0.3), cmath.sin(0.3)
    rot = Matrix([[c.real, -s.real], [s.real, c.real]], FLOAT)
    assert stability(rot) == "MARGINAL"
