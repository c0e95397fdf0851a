import pytest
from gmpy2 import mpq
from hypothesis import given

from bordercollision.errors import DegeneracyError, DegenerateDeterminant, EigOneDegenerate
from bordercollision.matrix_core import FLOAT, Matrix, solve
from bordercollision.model import (
    ContinuityError,
    Obj,
    PwlMap,
    Side,
    Stable,
    check_continuity_invariants,
    fixed_points,
    llr_admissible_one_side,
    llr_determinant_signs,
    lr_cycle,
    same_side_period_two_is_fixed_point,
)
from bordercollision.verifier import llr_cycle_brute, two_cycle_direct

from conftest import pwl_maps


def one_dim(al, ar):
    return PwlMap.one_dim(mpq(al), mpq(ar))


def test_continuity_is_enforced():
    with pytest.raises(ContinuityError):
        PwlMap(Matrix([[1, 2], [3, 4]]), Matrix([[1, 5], [3, 4]]), (1, 0))


def test_from_xi_builds_right_piece():
    m = PwlMap.from_xi(Matrix([[1, 2], [3, 4]]), ["1/2", -1], [1, 0])
    assert m.a_right == Matrix([["3/2", 2], [2, 4]])
    assert m.xi == (mpq(1, 2), mpq(-1))
    check_continuity_invariants(m)


def test_panel_a_fixed_points():
    xl, xr = fixed_points(one_dim("0.4", "-0.4"))
    assert xl.s_values == (mpq(5, 3),) and xl.admissible_for is Side.MU_NEG
    assert xr.s_values == (mpq(5, 7),) and xr.admissible_for is Side.MU_POS
    assert xl.points[-1] == ((mpq(-5, 3),),)
    assert xl.stable is Stable.YES


def test_panel_b_fixed_points_fold():
    xl, xr = fixed_points(one_dim(2, "-0.4"))
    assert xl.s_values == (mpq(-1),) and xr.s_values == (mpq(5, 7),)
    assert xl.admissible_for is xr.admissible_for is Side.MU_POS


def test_panel_c_lr_cycle():
    m = one_dim("0.4", "-1.5")
    lr = lr_cycle(m)
    assert lr.s_values == (mpq(-5, 16), mpq(7, 8))
    assert lr.admissible_for is Side.MU_POS
    assert m((mpq(-5, 16),), 1) == (mpq(7, 8),)
    assert m((mpq(7, 8),), 1) == (mpq(-5, 16),)
    assert lr.stable is Stable.YES


def test_panel_a_no_lr_cycle():
    assert lr_cycle(one_dim("0.4", "-0.4")).admissible_for is Side.NEITHER


@given(pwl_maps())
def test_lr_side_flips_with_b(m):
    try:
        lr = lr_cycle(m)
        flipped = lr_cycle(m.negate_b())
    except DegeneracyError:
        return
    swap = {Side.MU_POS: Side.MU_NEG, Side.MU_NEG: Side.MU_POS}
    assert flipped.admissible_for is swap.get(lr.admissible_for, lr.admissible_for)


@given(pwl_maps())
def test_fixed_points_solve_their_equations(m):
    try:
        xl, xr = fixed_points(m)
    except DegeneracyError:
        return
    for rep, side in ((xl, "L"), (xr, "R")):
        (x,) = rep.points[1]
        assert m.half_map(side, x, 1) == x


@given(pwl_maps())
def test_lr_cycle_matches_direct_solve(m):
    try:
        lr = lr_cycle(m)
    except DegeneracyError:
        return
    pts = two_cycle_direct(m)
    assert (pts[0][0], pts[1][0]) == lr.s_values


def test_same_side_period_two():
    assert same_side_period_two_is_fixed_point(one_dim("0.4", "-0.4"))
    assert same_side_period_two_is_fixed_point(PwlMap(Matrix.zeros(2), Matrix.zeros(2), (1, 2)))
    # (f^L)^2 fixed point for a_L = 0.4, mu = 1
    x = solve(Matrix([[1 - mpq(4, 25)]]), (1 + mpq(2, 5),))
    assert x == (mpq(5, 3),)


@given(pwl_maps(max_n=3))
def test_same_side_period_two_random(m):
    try:
        ok = same_side_period_two_is_fixed_point(m)
    except DegeneracyError:
        return
    assert ok


def test_llr_examples():
    assert llr_determinant_signs(one_dim("0.9", -3)) == (-1, -1, 1)
    assert llr_admissible_one_side(one_dim("0.9", -3))
    assert llr_determinant_signs(one_dim("0.4", "-1.5")) == (-1, 1, 1)
    assert not llr_admissible_one_side(one_dim("0.4", "-1.5"))
    assert not llr_admissible_one_side(PwlMap(Matrix.zeros(1), Matrix.zeros(1), (1,)))


@pytest.mark.parametrize("al, ar, expected", [("0.9", -3, True), ("0.4", "-1.5", False), (0, 0, False)])
def test_llr_against_brute_force(al, ar, expected):
    m = one_dim(al, ar)
    brute = any(llr_cycle_brute(m, mu)[1] for mu in (1, -1))
    assert brute is expected is llr_admissible_one_side(m)


def test_llr_zero_determinant():
    # det(I + A_L + A_L^2) = 1 + a + a^2 never vanishes in 1-D; use a_R = -1/(1 + a_L) instead
    m = one_dim(1, "-1/2")
    with pytest.raises(DegenerateDeterminant):
        llr_admissible_one_side(m)


def test_degenerate_fixed_points():
    with pytest.raises(EigOneDegenerate):
        fixed_points(one_dim(1, "-0.5"))


def test_float_backend_matches_rational():
    m = one_dim("0.4", "-1.5")
    f = m.with_backend(FLOAT)
    lr = lr_cycle(f)
    assert lr.s_values == pytest.approx((-0.3125, 0.875), abs=1e-12)
    assert [r.admissible_for for r in fixed_points(f)] == [r.admissible_for for r in fixed_points(m)]


def test_objects_named():
    assert {r.obj for r in fixed_points(one_dim("0.4", "-0.4"))} == {Obj.XL, Obj.XR}
