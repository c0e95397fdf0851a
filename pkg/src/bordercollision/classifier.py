"""Scenario classification of a border-collision bifurcation.

Four scenarios are possible for the fixed points and the LR-cycle; they
are read off three parities of the σ counts.  The fifth parity pattern
(fold on one side, 2-cycle on the other) cannot occur, and any input that
produces it aborts with a full witness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import Degenerate, InternalConsistencyError
from .matrix_core import det, dot, first_row_adjugate
from .model import (
    BranchReport,
    Obj,
    PwlMap,
    Side,
    Stable,
    fixed_points,
    lr_cycle,
)
from .spectral import EIG1_L, EIG1_R, EIG1_RL, EIGM1_L, EIGM1_R, SpectralCounts


class Scenario(str, enum.Enum):
    PERSISTENCE_NO_2CYCLE = "i"
    FOLD_NO_2CYCLE = "ii"
    PERSISTENCE_WITH_2CYCLE = "iii"
    FOLD_WITH_2CYCLE = "iv"

    @property
    def label(self) -> str:
        return {
            "i": "persistence, no period-two",
            "ii": "nonsmooth-fold, no period-two",
            "iii": "persistence with LR-cycle",
            "iv": "nonsmooth-fold with LR-cycle",
        }[self.value]


HYPOTHESES = (
    (EIG1_L, "1 is an eigenvalue of A_L"),
    (EIG1_R, "1 is an eigenvalue of A_R"),
    (EIG1_RL, "1 is an eigenvalue of A_R A_L"),
    (EIGM1_L, "-1 is an eigenvalue of A_L"),
    (EIGM1_R, "-1 is an eigenvalue of A_R"),
)


@dataclass(frozen=True)
class Classification:
    scenario: Scenario
    counts: SpectralCounts
    x_left: BranchReport
    x_right: BranchReport
    lr: BranchReport
    #: for scenario (iii), the fixed point sharing the LR-cycle's side
    coexists_with: Obj | None
    census_neg: tuple = ()
    census_pos: tuple = ()
    witness: dict = field(default_factory=dict)

    def census(self, mu_sign: int) -> tuple:
        return self.census_pos if mu_sign > 0 else self.census_neg

    @property
    def reports(self) -> tuple[BranchReport, BranchReport, BranchReport]:
        return self.x_left, self.x_right, self.lr


def violated_hypotheses(m: PwlMap) -> list[str]:
    sc = m.spectral_counts
    out = []
    if m.rho_b_sign() == 0:
        out.append("rho^T b = 0 (non-degeneracy condition)")
    out.extend(text for flag, text in HYPOTHESES if flag in sc.degenerate)
    return out


def scenario_from_parities(fixed: int, cycle: int, coexist: int) -> Scenario:
    """Map the parities of ``σ_L⁺+σ_R⁺``, ``σ_L⁻+σ_R⁻``, ``σ_LL⁺+σ_LR⁺`` to a scenario.

    Raises :class:`InternalConsistencyError` on the impossible pattern
    (odd, odd, even).
    """
    if cycle == 0:
        return Scenario.FOLD_NO_2CYCLE if fixed else Scenario.PERSISTENCE_NO_2CYCLE
    if fixed == 0:
        return Scenario.PERSISTENCE_WITH_2CYCLE
    if coexist == 1:
        return Scenario.FOLD_WITH_2CYCLE
    raise InternalConsistencyError(
        "fold and LR-cycle on opposite sides of the bifurcation",
        {"parities": (fixed, cycle, coexist)},
    )


def _predicted_sides(sc: SpectralCounts, rb_sign: int) -> dict[Obj, Side]:
    """Admissible sides from parities alone (no determinants, no solves)."""
    s_l = (-1) ** sc.sigma_L_plus * rb_sign
    s_r = (-1) ** sc.sigma_R_plus * rb_sign
    s_lr = (-1) ** (sc.sigma_R_minus + sc.sigma_LR_plus) * rb_sign
    s_rl = (-1) ** (sc.sigma_L_minus + sc.sigma_LR_plus) * rb_sign
    if s_lr < 0 < s_rl:
        lr = Side.MU_POS
    elif s_rl < 0 < s_lr:
        lr = Side.MU_NEG
    else:
        lr = Side.NEITHER
    return {
        Obj.XL: Side.MU_POS if s_l < 0 else Side.MU_NEG,
        Obj.XR: Side.MU_POS if s_r > 0 else Side.MU_NEG,
        Obj.LR_CYCLE: lr,
    }


def cross_formula_witness(m: PwlMap) -> dict:
    """Quantities behind the two cross-parity identities for the pair.

    ``det(I-A_RA_L) ± e1ᵀ adj(I-A_RA_L) xi`` have signs
    ``(-1)^(σ_L⁺+σ_R⁻)`` and ``(-1)^(σ_L⁻+σ_R⁺)``.
    """
    i_rl = m.identity - m.a_rl
    d = det(i_rl)
    corr = dot(first_row_adjugate(i_rl), m.xi)
    return {"det_I_minus_ARAL": d, "e1_adj_xi": corr, "plus": d + corr, "minus": d - corr}


def _census(reports: tuple, mu_sign: int) -> tuple:
    return tuple((r.obj, r.stable) for r in reports if r.admissible_on(mu_sign))


def classify(m: PwlMap) -> Classification:
    """Classify the bifurcation at ``mu = 0``.

    Raises :class:`Degenerate` listing every violated genericity
    hypothesis, and :class:`InternalConsistencyError` if independent
    computations disagree.
    """
    violations = violated_hypotheses(m)
    if violations:
        raise Degenerate(violations)
    sc = m.spectral_counts
    rb_sign = m.rho_b_sign()
    parities = (sc.fixed_point_parity, sc.two_cycle_parity, sc.coexistence_parity)
    witness = {"counts": sc.as_dict(), "parities": parities, "rho_b_sign": rb_sign}

    if parities[0] == 1 and parities[1] == 1 and parities[2] == 0:
        witness.update(cross_formula_witness(m))
        raise InternalConsistencyError("impossible scenario (v) parities", witness)
    scenario = scenario_from_parities(*parities)

    x_left, x_right = fixed_points(m)
    lr = lr_cycle(m)
    reports = (x_left, x_right, lr)
    predicted = _predicted_sides(sc, rb_sign)
    for r in reports:
        if predicted[r.obj] is not r.admissible_for:
            witness.update({"object": r.obj.value, "predicted": predicted[r.obj].value,
                            "closed_form": r.admissible_for.value})
            raise InternalConsistencyError("parity-predicted side disagrees with closed form", witness)

    persistence = x_left.admissible_for is not x_right.admissible_for
    if persistence != (parities[0] == 0):
        raise InternalConsistencyError("fixed-point sides contradict parity", witness)
    has_cycle = lr.admissible_for in (Side.MU_POS, Side.MU_NEG)
    if has_cycle != (parities[1] == 1):
        raise InternalConsistencyError("LR-cycle admissibility contradicts parity", witness)

    coexists_with = None
    if scenario is Scenario.PERSISTENCE_WITH_2CYCLE:
        coexists_with = Obj.XR if parities[2] == 0 else Obj.XL
        partner = x_right if coexists_with is Obj.XR else x_left
        if partner.admissible_for is not lr.admissible_for:
            raise InternalConsistencyError("coexistence rule contradicts closed-form sides", witness)
    if scenario is Scenario.FOLD_WITH_2CYCLE and not (
        x_left.admissible_for is x_right.admissible_for is lr.admissible_for
    ):
        raise InternalConsistencyError("scenario (iv) objects not on one side", witness)

    census_neg = _census(reports, -1)
    census_pos = _census(reports, 1)
    for cen in (census_neg, census_pos):
        if sum(1 for _, st in cen if st is Stable.YES) > 1:
            witness["census"] = cen
            raise InternalConsistencyError("two attracting objects coexist", witness)

    return Classification(
        scenario, sc, x_left, x_right, lr, coexists_with, census_neg, census_pos, witness
    )


def census(m: PwlMap, mu_sign: int) -> tuple:
    """Admissible objects on one side of the bifurcation with their stability."""
    return classify(m).census(mu_sign)
