"""The two-piece continuous piecewise-linear normal form and its branches.

The map is::

    x -> A_L x + b mu   if s = x[0] <= 0
    x -> A_R x + b mu   if s >= 0

with ``A_R = A_L + xi e1ᵀ`` so the pieces agree on ``s = 0``.  Every
object studied here (the two fixed points and the LR-cycle) is linear in
``mu``, so each is described by the sign of its switching coordinate at
``mu = 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import (
    DegenerateDeterminant,
    EigMinusOneDegenerate,
    EigOneDegenerate,
    EigOneDegenerateRL,
    InternalConsistencyError,
    NondegeneracyViolated,
)
from .matrix_core import (
    FLOAT,
    RATIONAL,
    Matrix,
    Scalar,
    Vector,
    det,
    dot,
    first_row_adjugate,
    solve,
    strict_sign,
    to_scalar,
    unit,
)
from .spectral import EIG1_L, EIG1_R, EIG1_RL, EIGM1_L, EIGM1_R, SpectralCounts, counts, exact_char_polys, stability


class ContinuityError(ValueError):
    """``A_L`` and ``A_R`` differ outside their first column."""


class Obj(str, enum.Enum):
    XL = "XL"
    XR = "XR"
    LR_CYCLE = "LR_CYCLE"


class Side(str, enum.Enum):
    MU_NEG = "MU_NEG"
    MU_POS = "MU_POS"
    BOTH_DEGENERATE = "BOTH_DEGENERATE"
    NEITHER = "NEITHER"


class Stable(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    MARGINAL = "MARGINAL"


def _close(a: Scalar, b: Scalar, rel: float = 1e-9) -> bool:
    if not isinstance(a, float) and not isinstance(b, float):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _vclose(u: Sequence[Scalar], v: Sequence[Scalar], rel: float = 1e-9) -> bool:
    return all(_close(a, b, rel) for a, b in zip(u, v))


@dataclass(frozen=True, eq=False)
class PwlMap:
    """Normal form ``(A_L, A_R, b)``; ``xi`` and ``rho`` are derived."""

    a_left: Matrix
    a_right: Matrix
    b: Vector

    def __post_init__(self):
        al, ar = self.a_left, self.a_right
        if al.n != ar.n or al.backend != ar.backend:
            raise ValueError("A_L and A_R must share dimension and backend")
        if len(self.b) != al.n:
            raise ValueError(f"b has length {len(self.b)}, expected {al.n}")
        object.__setattr__(self, "b", tuple(to_scalar(v, al.backend) for v in self.b))
        for i in range(al.n):
            if al.rows[i][1:] != ar.rows[i][1:]:
                raise ContinuityError(
                    f"A_L and A_R differ in row {i + 1} outside the first column"
                )

    @classmethod
    def from_xi(cls, a_left: Matrix, xi: Sequence, b: Sequence) -> PwlMap:
        be = a_left.backend
        xi = tuple(to_scalar(v, be) for v in xi)
        rows = tuple((r[0] + x,) + r[1:] for r, x in zip(a_left.rows, xi))
        return cls(a_left, Matrix(rows, be), tuple(b))

    @classmethod
    def one_dim(cls, a_left, a_right, b=1, backend: str = RATIONAL) -> PwlMap:
        return cls(Matrix([[a_left]], backend), Matrix([[a_right]], backend), (to_scalar(b, backend),))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PwlMap):
            return NotImplemented
        return (self.a_left, self.a_right, self.b) == (other.a_left, other.a_right, other.b)

    def __hash__(self) -> int:
        return hash((self.a_left, self.a_right, self.b))

    @property
    def n(self) -> int:
        return self.a_left.n

    @property
    def backend(self) -> str:
        return self.a_left.backend

    def with_backend(self, backend: str) -> PwlMap:
        if backend == self.backend:
            return self
        return PwlMap(
            self.a_left.with_backend(backend),
            self.a_right.with_backend(backend),
            tuple(to_scalar(v, backend) for v in self.b),
        )

    def negate_b(self) -> PwlMap:
        return PwlMap(self.a_left, self.a_right, tuple(-v for v in self.b))

    @cached_property
    def xi(self) -> Vector:
        return tuple(r[0] - l[0] for r, l in zip(self.a_right.rows, self.a_left.rows))

    @cached_property
    def identity(self) -> Matrix:
        return Matrix.identity(self.n, self.backend)

    @cached_property
    def a_rl(self) -> Matrix:
        """``A_R A_L`` (the LR-cycle's monodromy)."""
        return self.a_right @ self.a_left

    @cached_property
    def i_minus_left(self) -> Matrix:
        return self.identity - self.a_left

    @cached_property
    def i_minus_right(self) -> Matrix:
        return self.identity - self.a_right

    @cached_property
    def rho(self) -> Vector:
        """First row of ``adj(I - A_L)``."""
        return first_row_adjugate(self.i_minus_left)

    @cached_property
    def rho_b(self) -> Scalar:
        return dot(self.rho, self.b)

    @cached_property
    def char_polys(self) -> tuple:
        """Exact characteristic polynomials of ``A_L``, ``A_R``, ``A_RA_L``, ``A_L²``."""
        return exact_char_polys(self.a_left, self.a_right)

    @cached_property
    def spectral_counts(self) -> SpectralCounts:
        return counts(self.a_left, self.a_right, self.char_polys)

    def rho_b_sign(self) -> int:
        cached = self.__dict__.get("_rho_b_sign")
        if cached is not None:
            return cached
        m = self.i_minus_left
        band = 0.0
        if self.backend == FLOAT:
            bnorm = max(1.0, max(abs(v) for v in self.b))
            band = m.zero_band(self.n - 1) * bnorm
        sign = strict_sign(self.rho_b, band)
        self.__dict__["_rho_b_sign"] = sign
        return sign

    def det_sign(self, m: Matrix) -> tuple[Scalar, int]:
        d = det(m)
        return d, strict_sign(d, m.zero_band())

    def half_map(self, side: str, x: Sequence[Scalar], mu: Scalar) -> Vector:
        a = self.a_left if side == "L" else self.a_right
        return tuple(v + bi * mu for v, bi in zip(a @ tuple(x), self.b))

    def __call__(self, x: Sequence[Scalar], mu: Scalar) -> Vector:
        return self.half_map("L" if x[0] <= 0 else "R", x, mu)


def check_continuity_invariants(m: PwlMap) -> None:
    """Raise :class:`InternalConsistencyError` if a structural identity fails."""
    e1 = unit(m.n, 0, m.backend)
    rebuilt = m.a_left + Matrix.outer(m.xi, e1, m.backend)
    if rebuilt != m.a_right:
        raise InternalConsistencyError("A_R != A_L + xi e1ᵀ", {"map": m})
    rho_r = first_row_adjugate(m.i_minus_right)
    if not _vclose(m.rho, rho_r):
        raise InternalConsistencyError(
            "first rows of adj(I-A_L) and adj(I-A_R) differ",
            {"rho_L": m.rho, "rho_R": rho_r},
        )


@dataclass(frozen=True)
class BranchReport:
    """One candidate invariant set (fixed point or LR-cycle).

    ``sign_of_s`` is the sign of the switching coordinate at ``mu = 1``
    (a pair ``(s_LR, s_RL)`` for the cycle).  ``points`` maps ``mu`` in
    ``{1, -1}`` to the tuple of orbit points.
    """

    obj: Obj
    sign_of_s: object
    admissible_for: Side
    points: dict = field(default_factory=dict)
    stable: Stable = Stable.MARGINAL
    s_values: tuple = ()

    def admissible_on(self, mu_sign: int) -> bool:
        if self.admissible_for is Side.MU_POS:
            return mu_sign > 0
        if self.admissible_for is Side.MU_NEG:
            return mu_sign < 0
        return False


def _stable_flag(m: Matrix, poly=None) -> Stable:
    return Stable(stability(m, poly))


def _fixed_point_side(obj: Obj, sign: int) -> Side:
    if sign == 0:
        return Side.BOTH_DEGENERATE
    if obj is Obj.XL:
        return Side.MU_POS if sign < 0 else Side.MU_NEG
    return Side.MU_POS if sign > 0 else Side.MU_NEG


def _points(side: Side, pts: tuple) -> dict:
    out = {1: pts}
    if side is Side.MU_NEG:
        out[-1] = tuple(tuple(-v for v in p) for p in pts)
    return out


def fixed_points(m: PwlMap) -> tuple[BranchReport, BranchReport]:
    """Reports for ``x^L`` and ``x^R``.

    The sign of each switching coordinate is computed from the closed form
    ``rho·b / det(I - A_J)``, from the eigenvalue-parity rule, and from the
    first component of the solved fixed point; all three must agree.
    """
    sc = m.spectral_counts
    if EIG1_L in sc.degenerate:
        raise EigOneDegenerate("1 is an eigenvalue of A_L")
    if EIG1_R in sc.degenerate:
        raise EigOneDegenerate("1 is an eigenvalue of A_R")
    rb_sign = m.rho_b_sign()
    if rb_sign == 0:
        raise NondegeneracyViolated("rho^T b = 0")

    reports = []
    branches = (
        (Obj.XL, m.a_left, m.i_minus_left, sc.sigma_L_plus, m.char_polys[0]),
        (Obj.XR, m.a_right, m.i_minus_right, sc.sigma_R_plus, m.char_polys[1]),
    )
    for obj, a, i_minus, sigma, poly in branches:
        d, d_sign = m.det_sign(i_minus)
        if d_sign == 0:
            raise EigOneDegenerate(f"1 is an eigenvalue of {'A_L' if obj is Obj.XL else 'A_R'}")
        s_closed = m.rho_b / d
        closed_sign = rb_sign * d_sign
        parity_sign = (-1) ** sigma * rb_sign
        x = solve(i_minus, m.b)
        if closed_sign != parity_sign or not _close(x[0], s_closed):
            raise InternalConsistencyError(
                f"sign of s for {obj.value} disagrees between routes",
                {"closed": closed_sign, "parity": parity_sign, "solved_s": x[0], "closed_s": s_closed},
            )
        side = _fixed_point_side(obj, closed_sign)
        reports.append(
            BranchReport(obj, closed_sign, side, _points(side, (x,)), _stable_flag(a, poly), (s_closed,))
        )
    return reports[0], reports[1]


def _lr_switching_values(dp_r: Scalar, dp_l: Scalar, rho_b: Scalar, d_rl: Scalar) -> tuple[Scalar, Scalar]:
    """``s_LR = det(I+A_R) rho·b / det(I-A_RA_L)`` and its mirror with ``A_L``."""
    return dp_r * rho_b / d_rl, dp_l * rho_b / d_rl


def lr_cycle(m: PwlMap) -> BranchReport:
    """Report for the period-two orbit with one point on each side."""
    sc = m.spectral_counts
    if EIG1_RL in sc.degenerate:
        raise EigOneDegenerateRL("1 is an eigenvalue of A_R A_L")
    rb_sign = m.rho_b_sign()
    if rb_sign == 0:
        raise NondegeneracyViolated("rho^T b = 0")
    ident = m.identity
    i_rl = ident - m.a_rl
    d_rl, d_rl_sign = m.det_sign(i_rl)
    if d_rl_sign == 0:
        raise EigOneDegenerateRL("1 is an eigenvalue of A_R A_L")
    dp_r, dp_r_sign = m.det_sign(ident + m.a_right)
    dp_l, dp_l_sign = m.det_sign(ident + m.a_left)

    s_lr, s_rl = _lr_switching_values(dp_r, dp_l, m.rho_b, d_rl)
    sign_lr = dp_r_sign * rb_sign * d_rl_sign
    sign_rl = dp_l_sign * rb_sign * d_rl_sign

    x_lr = solve(i_rl, (m.a_right + ident) @ m.b)
    x_rl = m.half_map("L", x_lr, 1)
    back = m.half_map("R", x_rl, 1)
    witness = {"s_LR": s_lr, "s_RL": s_rl, "x_LR": x_lr, "x_RL": x_rl}
    if not (_close(x_lr[0], s_lr) and _close(x_rl[0], s_rl) and _vclose(back, x_lr)):
        raise InternalConsistencyError("LR-cycle closed form disagrees with linear solve", witness)
    if EIGM1_R not in sc.degenerate and sign_lr != (-1) ** (sc.sigma_R_minus + sc.sigma_LR_plus) * rb_sign:
        raise InternalConsistencyError("parity rule for s_LR disagrees", witness)
    if EIGM1_L not in sc.degenerate and sign_rl != (-1) ** (sc.sigma_L_minus + sc.sigma_LR_plus) * rb_sign:
        raise InternalConsistencyError("parity rule for s_RL disagrees", witness)

    if sign_lr == 0 or sign_rl == 0:
        side = Side.BOTH_DEGENERATE
    elif sign_lr < 0 < sign_rl:
        side = Side.MU_POS
    elif sign_rl < 0 < sign_lr:
        side = Side.MU_NEG
    else:
        side = Side.NEITHER
    return BranchReport(
        Obj.LR_CYCLE,
        (sign_lr, sign_rl),
        side,
        _points(side, (x_lr, x_rl)),
        _stable_flag(m.a_rl, m.char_polys[2]),
        (s_lr, s_rl),
    )


def same_side_period_two_is_fixed_point(m: PwlMap) -> bool:
    """Check that the period-two points of ``f^L∘f^L`` and ``f^R∘f^R`` are ``x^L``, ``x^R``."""
    ident = m.identity
    for name, a in (("A_L", m.a_left), ("A_R", m.a_right)):
        if m.det_sign(ident - a)[1] == 0:
            raise EigOneDegenerate(f"1 is an eigenvalue of {name}")
        if m.det_sign(ident + a)[1] == 0:
            raise EigMinusOneDegenerate(f"-1 is an eigenvalue of {name}")
        x_fixed = solve(ident - a, m.b)
        x_twice = solve(ident - a @ a, (ident + a) @ m.b)
        if not _vclose(x_fixed, x_twice):
            return False
    return True


def llr_determinant_signs(m: PwlMap) -> tuple[int, int, int]:
    """Signs of ``det(I+A_R+A_RA_L)``, ``det(I+A_L+A_LA_R)``, ``det(I+A_L+A_L²)``."""
    ident, al, ar = m.identity, m.a_left, m.a_right
    mats = (ident + ar + ar @ al, ident + al + al @ ar, ident + al + al @ al)
    return tuple(m.det_sign(x)[1] for x in mats)


def llr_admissible_one_side(m: PwlMap) -> bool:
    """Whether a generic LLR-cycle is admissible for one sign of ``mu``."""
    s1, s2, s3 = llr_determinant_signs(m)
    if 0 in (s1, s2, s3):
        raise DegenerateDeterminant("a determinant in the LLR condition vanishes")
    return s1 == s2 != s3
