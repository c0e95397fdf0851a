"""Randomised and structured falsification runs.

Every structural result and identity the classifier depends on is re-checked here
on sampled maps.  Samples are drawn in ``(A_L, xi, b)`` space, so
continuity holds by construction, and each sample's random stream is
derived from ``(seed, index)`` alone: serial and parallel runs produce
the same report byte for byte.
"""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from gmpy2 import mpq

from .classifier import Scenario, classify
from .errors import DegeneracyError, InternalConsistencyError
from .matrix_core import (
    FLOAT,
    RATIONAL,
    Matrix,
    det,
    det_lemma_check,
    dot,
    first_row_adjugate,
    solve,
    strict_sign,
    to_scalar,
    unit,
)
from .model import (
    Obj,
    PwlMap,
    Stable,
    lr_cycle,
    same_side_period_two_is_fixed_point,
)
from .simulator import default_seeds, detect_attractor
from .spectral import EIG1_L, EIG1_R, EIG1_RL, EIGM1_L, EIGM1_R, counts

PASS, FAIL, REJECT = "pass", "fail", "reject"

#: eigenvalues used by structured samples; they straddle both +1 and -1
ROOT_POOL = tuple(
    mpq(p, q) for p, q in ((-3, 1), (-2, 1), (-3, 2), (-5, 4), (-3, 4), (-1, 2), (0, 1),
                           (1, 3), (3, 4), (5, 4), (3, 2), (2, 1), (3, 1))
)


@dataclass(frozen=True)
class SampleSpec:
    """What to sample.

    Rational entries are ``p/q`` with ``|p| <= entry_cap`` and
    ``1 <= q <= denom_cap`` (``denom_cap`` defaults to ``entry_cap``);
    ``distribution="normal"`` draws standard normal floats instead.
    Every ``adversarial_every``-th sample is a structured pair of
    companion-form matrices with prescribed real spectra.
    """

    samples: int = 1000
    dims: tuple = (1, 2, 3, 4, 5)
    entry_cap: int = 3
    denom_cap: int | None = None
    distribution: str = "rational"
    backend: str = RATIONAL
    seed: int = 0
    adversarial_every: int = 4
    reject_degenerate: bool = True

    @property
    def q_cap(self) -> int:
        return self.denom_cap or max(1, self.entry_cap)


@dataclass
class PropertyStats:
    tried: int = 0
    rejected: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)

    def record(self, status: str, witness: dict | None = None) -> None:
        if status == REJECT:
            self.rejected += 1
            return
        self.tried += 1
        if status == PASS:
            self.passes += 1
        else:
            self.failures.append(witness or {})


@dataclass
class VerifyReport:
    title: str
    properties: dict = field(default_factory=dict)
    scenarios: dict = field(default_factory=lambda: {s.value: 0 for s in Scenario} | {"v": 0})
    notes: dict = field(default_factory=dict)

    def stat(self, name: str) -> PropertyStats:
        return self.properties.setdefault(name, PropertyStats())

    @property
    def failure_count(self) -> int:
        return sum(len(p.failures) for p in self.properties.values())

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def merge(self, other: VerifyReport) -> VerifyReport:
        for name, st in other.properties.items():
            mine = self.stat(name)
            mine.tried += st.tried
            mine.rejected += st.rejected
            mine.passes += st.passes
            mine.failures.extend(st.failures)
        for k, v in other.scenarios.items():
            self.scenarios[k] = self.scenarios.get(k, 0) + v
        for k, v in other.notes.items():
            self.notes[k] = self.notes.get(k, 0) + v if isinstance(v, int) else v
        return self

    def to_text(self) -> str:
        lines = [f"== {self.title} =="]
        for name in sorted(self.properties):
            st = self.properties[name]
            lines.append(
                f"{name:<28} tried={st.tried:<8} rejected={st.rejected:<8} "
                f"passes={st.passes:<8} failures={len(st.failures)}"
            )
            for w in st.failures[:20]:
                lines.append("    witness: " + ", ".join(f"{k}={v}" for k, v in sorted(w.items())))
        lines.append("scenarios: " + " ".join(f"({k})={self.scenarios.get(k, 0)}" for k in _SCENARIO_KEYS))
        for k in sorted(self.notes):
            lines.append(f"{k}: {self.notes[k]}")
        return "\n".join(lines) + "\n"

    def csv_rows(self) -> list[list]:
        rows = []
        for name in sorted(self.properties):
            st = self.properties[name]
            rows.append([self.title, "property", name, st.tried, st.rejected, st.passes, len(st.failures)])
        for k in _SCENARIO_KEYS:
            rows.append([self.title, "scenario", k, self.scenarios.get(k, 0), "", "", ""])
        return rows


_SCENARIO_KEYS = ("i", "ii", "iii", "iv", "v")
CSV_HEADER = ["report", "kind", "name", "tried", "rejected", "passes", "failures"]


def reports_to_csv(reports: Iterable[VerifyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerows(r.csv_rows())
    return buf.getvalue()


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def observer_form(roots) -> Matrix:
    """Companion matrix with characteristic polynomial ``prod(λ - r)`` in its first column.

    Two such matrices differ only in their first column, so a pair of
    them is automatically a continuous normal form.
    """
    n = len(roots)
    coeffs = [mpq(1)]
    for r in roots:
        nxt = [mpq(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k] += c
            nxt[k + 1] -= r * c
        coeffs = nxt
    # coeffs[k] multiplies λ^(n-k)
    rows = []
    for i in range(n):
        row = [-coeffs[i + 1]] + [mpq(0)] * (n - 1)
        if i + 1 < n:
            row[i + 1] = mpq(1)
        rows.append(row)
    return Matrix(rows)


def _rng(plan: SampleSpec, index: int) -> random.Random:
    return random.Random(f"bcb:{plan.seed}:{index}")


def _entry(rng: random.Random, plan: SampleSpec):
    if plan.distribution == "normal":
        return mpq(rng.gauss(0.0, 1.0))
    cap, qcap = plan.entry_cap, plan.q_cap
    p = int(rng.random() * (2 * cap + 1)) - cap
    q = int(rng.random() * qcap) + 1
    return mpq(p, q)


def sample_map(plan: SampleSpec, index: int) -> PwlMap:
    """The ``index``-th map of the stream described by ``plan``."""
    rng = _rng(plan, index)
    n = rng.choice(tuple(plan.dims))
    structured = plan.adversarial_every and index % plan.adversarial_every == plan.adversarial_every - 1
    if structured:
        a_left = observer_form([rng.choice(ROOT_POOL) for _ in range(n)])
        a_right = observer_form([rng.choice(ROOT_POOL) for _ in range(n)])
        b = [_entry(rng, plan) for _ in range(n)]
        m = PwlMap(a_left, a_right, tuple(b))
    else:
        a_left = Matrix([[_entry(rng, plan) for _ in range(n)] for _ in range(n)])
        xi = [_entry(rng, plan) for _ in range(n)]
        b = [_entry(rng, plan) for _ in range(n)]
        m = PwlMap.from_xi(a_left, xi, b)
    return m.with_backend(plan.backend)


def grid_maps(step: Fraction = Fraction(1, 10), bound: int = 3) -> list[PwlMap]:
    """Every 1-D map with ``a_L, a_R`` on the grid ``{-bound, -bound+step, ..., bound}``."""
    k = int(bound / step)
    values = [mpq(Fraction(i) * step) for i in range(-k, k + 1)]
    return [PwlMap.one_dim(a, c) for a in values for c in values]


# ---------------------------------------------------------------------------
# per-sample checks
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, Matrix):
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in v.rows) + "]"
    return str(v)


def map_witness(m: PwlMap) -> dict:
    return {"A_L": _fmt(m.a_left), "A_R": _fmt(m.a_right), "b": _fmt(m.b)}


def _classification_checks(m: PwlMap) -> tuple[dict, str | None]:
    """Outcomes of the classification properties for one map."""
    try:
        c = classify(m)
    except DegeneracyError:
        return {"classifier_assertions": (REJECT, None), "no_scenario_v": (REJECT, None),
                "single_attractor": (REJECT, None)}, None
    except InternalConsistencyError as exc:
        w = map_witness(m) | {"error": str(exc).splitlines()[0]}
        sc = m.spectral_counts
        fifth = (sc.fixed_point_parity, sc.two_cycle_parity, sc.coexistence_parity) == (1, 1, 0)
        status = FAIL if fifth else PASS
        return {"classifier_assertions": (FAIL, w), "no_scenario_v": (status, w if fifth else None),
                "single_attractor": (REJECT, None)}, "v" if fifth else None
    sc = c.counts
    out = {"classifier_assertions": (PASS, None)}
    premise = sc.fixed_point_parity == 1 and sc.two_cycle_parity == 1
    if premise and sc.coexistence_parity != 1:
        out["no_scenario_v"] = (FAIL, map_witness(m) | {"counts": sc.as_dict()})
    else:
        out["no_scenario_v"] = (PASS, None)
    stable_counts = [sum(1 for _, st in cen if st is Stable.YES) for cen in (c.census_neg, c.census_pos)]
    if max(stable_counts) > 1:
        out["single_attractor"] = (FAIL, map_witness(m) | {"census": _fmt(c.census_pos + c.census_neg)})
    else:
        out["single_attractor"] = (PASS, None)
    return out, c.scenario.value


def _sign_outcome(got: int, want: int, witness: Callable[[], dict]) -> tuple:
    """Inside the float zero band a sign is undecidable: reject rather than fail."""
    if got == 0:
        return (REJECT, None)
    return (PASS, None) if got == want else (FAIL, witness())


def two_cycle_direct(m: PwlMap, mu=1) -> tuple:
    """Solve ``x2 = A_L x1 + b mu``, ``x1 = A_R x2 + b mu`` as one 2N-dimensional system."""
    n, be = m.n, m.backend
    one, zero = to_scalar(1, be), to_scalar(0, be)
    rows = []
    for i in range(n):
        rows.append([one if j == i else zero for j in range(n)] + [-v for v in m.a_right.rows[i]])
    for i in range(n):
        rows.append([-v for v in m.a_left.rows[i]] + [one if j == i else zero for j in range(n)])
    big = Matrix(rows, be, max_dim=2 * n)
    mu = to_scalar(mu, be)
    rhs = tuple(v * mu for v in m.b) * 2
    x = solve(big, rhs)
    return x[:n], x[n:]


def llr_cycle_brute(m: PwlMap, mu=1) -> tuple[tuple, bool]:
    """Points of the LLR-cycle at ``mu`` and whether they lie on their pieces.

    The cycle ``x1 -L-> x2 -L-> x3 -R-> x1`` is found by solving for the
    fixed point of ``f^R∘f^L∘f^L`` directly.
    """
    ident, al, ar = m.identity, m.a_left, m.a_right
    mu = to_scalar(mu, m.backend)
    bmu = tuple(v * mu for v in m.b)
    lhs = ident - ar @ al @ al
    rhs = tuple(a + c + d for a, c, d in zip((ar @ al) @ bmu, ar @ bmu, bmu))
    x1 = solve(lhs, rhs)
    x2 = m.half_map("L", x1, mu)
    x3 = m.half_map("L", x2, mu)
    back = m.half_map("R", x3, mu)
    assert all(abs(float(u - v)) <= 1e-9 * max(1.0, abs(float(u))) for u, v in zip(back, x1))
    admissible = x1[0] <= 0 and x2[0] <= 0 and x3[0] >= 0
    return (x1, x2, x3), admissible


def _close(a, b, rel: float) -> bool:
    if not isinstance(a, float) and not isinstance(b, float):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _identity_checks(m: PwlMap) -> dict:
    """Outcomes of the algebraic identities for one map."""
    out = {}
    be = m.backend
    ident, al, ar, xi = m.identity, m.a_left, m.a_right, m.xi
    e1 = unit(m.n, 0, be)
    rel = 1e-9

    def wit(**extra):
        return map_witness(m) | {k: _fmt(v) for k, v in extra.items()}

    i_rl = ident - m.a_rl
    # (a) determinant lemma, as used on I - A_R A_L + xi e1ᵀ
    out["det_lemma"] = (PASS, None) if det_lemma_check(i_rl, xi, e1) else (FAIL, wit(check="det_lemma"))

    # (b) first rows of the two adjugates agree
    rho_r = first_row_adjugate(ident - ar)
    ok = all(_close(u, v, rel) for u, v in zip(m.rho, rho_r))
    out["adjugate_first_row"] = (PASS, None) if ok else (FAIL, wit(rho_L=m.rho, rho_R=rho_r))

    # (c) factorisation (I + A_R)(I - A_L) = I - A_R A_L + xi e1ᵀ
    lhs = (ident + ar) @ (ident - al)
    rhs = i_rl + Matrix.outer(xi, e1, be)
    ok = all(_close(u, v, rel) for r, s in zip(lhs.rows, rhs.rows) for u, v in zip(r, s))
    out["factorisation"] = (PASS, None) if ok else (FAIL, wit(lhs=lhs, rhs=rhs))

    sc = m.spectral_counts
    flags = sc.degenerate
    d_ml, d_pl = det(ident - al), det(ident + al)
    d_mr, d_pr = det(ident - ar), det(ident + ar)
    d_rl = det(i_rl)
    d_ll = det(ident - al @ al)
    band = lambda x: x.zero_band()  # noqa: E731

    # (e) parity versus determinant sign
    parity_cases = (
        ("parity_I_minus_AL", EIG1_L, d_ml, ident - al, sc.sigma_L_plus),
        ("parity_I_plus_AL", EIGM1_L, d_pl, ident + al, sc.sigma_L_minus),
        ("parity_I_minus_AR", EIG1_R, d_mr, ident - ar, sc.sigma_R_plus),
        ("parity_I_plus_AR", EIGM1_R, d_pr, ident + ar, sc.sigma_R_minus),
        ("parity_I_minus_ARAL", EIG1_RL, d_rl, i_rl, sc.sigma_LR_plus),
    )
    for name, flag, d, mat, sigma in parity_cases:
        if flag in flags:
            out[name] = (REJECT, None)
            continue
        out[name] = _sign_outcome(strict_sign(d, band(mat)), (-1) ** sigma,
                                  lambda d=d, sigma=sigma: wit(det=d, sigma=sigma))
    if EIG1_L in flags or EIGM1_L in flags:
        out["parity_I_minus_AL2"] = (REJECT, None)
        out["parity_factorisation"] = (REJECT, None)
    else:
        out["parity_I_minus_AL2"] = _sign_outcome(
            strict_sign(d_ll, band(ident - al @ al)), (-1) ** sc.sigma_LL_plus,
            lambda: wit(det=d_ll, sigma=sc.sigma_LL_plus))
        ok = (sc.sigma_LL_plus - sc.sigma_L_plus - sc.sigma_L_minus) % 2 == 0
        out["parity_factorisation"] = (PASS, None) if ok else (FAIL, wit(counts=sc.as_dict()))

    # σ_LR⁺ is the same for A_R A_L and A_L A_R
    swapped = counts(ar, al)
    ok = swapped.sigma_LR_plus == sc.sigma_LR_plus
    out["sigma_LR_symmetric"] = (PASS, None) if ok else (FAIL, wit(rl=sc.sigma_LR_plus, lr=swapped.sigma_LR_plus))

    # (d) cross formulas and (f) the strict majorisation used in the impossibility proof
    if flags & {EIG1_L, EIGM1_L, EIG1_R, EIGM1_R}:
        out["cross_formula_plus"] = (REJECT, None)
        out["cross_formula_minus"] = (REJECT, None)
        out["strict_majorisation"] = (REJECT, None)
    else:
        corr = dot(first_row_adjugate(i_rl), xi)
        b_rl = band(i_rl)
        plus_sign = strict_sign(d_rl + corr, b_rl)
        minus_sign = strict_sign(d_rl - corr, b_rl)
        want_plus = (-1) ** (sc.sigma_L_plus + sc.sigma_R_minus)
        want_minus = (-1) ** (sc.sigma_L_minus + sc.sigma_R_plus)
        out["cross_formula_plus"] = _sign_outcome(plus_sign, want_plus,
                                                  lambda: wit(det=d_rl, corr=corr, want=want_plus))
        out["cross_formula_minus"] = _sign_outcome(minus_sign, want_minus,
                                                   lambda: wit(det=d_rl, corr=corr, want=want_minus))
        if want_plus == want_minus:
            gap = strict_sign(abs(d_rl) - abs(corr), b_rl)
            out["strict_majorisation"] = _sign_outcome(gap, 1, lambda: wit(det=d_rl, corr=corr))
        else:
            out["strict_majorisation"] = (REJECT, None)

    # same-side period-two orbits collapse onto the fixed points
    if flags & {EIG1_L, EIGM1_L, EIG1_R, EIGM1_R}:
        out["same_side_period_two"] = (REJECT, None)
    else:
        try:
            ok = same_side_period_two_is_fixed_point(m)
        except (DegeneracyError, ZeroDivisionError):
            out["same_side_period_two"] = (REJECT, None)
        else:
            out["same_side_period_two"] = (PASS, None) if ok else (FAIL, wit())

    out["lr_cycle_direct_solve"] = _lr_cycle_direct_check(m)
    return out


def _lr_cycle_direct_check(m: PwlMap):
    """The closed-form LR-cycle coordinates against a direct 2N-dimensional solve."""
    if EIG1_RL in m.spectral_counts.degenerate or m.rho_b_sign() == 0:
        return (REJECT, None)
    try:
        rep = lr_cycle(m)
    except DegeneracyError:
        return (REJECT, None)
    except InternalConsistencyError as exc:
        return (FAIL, map_witness(m) | {"error": str(exc).splitlines()[0]})
    try:
        x_lr, x_rl = two_cycle_direct(m, 1)
    except ZeroDivisionError:
        return (REJECT, None)
    s_lr, s_rl = rep.s_values
    rel = 1e-10
    ok = _close(x_lr[0], s_lr, rel) and _close(x_rl[0], s_rl, rel)
    if ok:
        return (PASS, None)
    return (FAIL, map_witness(m) | {"s_LR": _fmt(s_lr), "direct": _fmt(x_lr[0]),
                                    "s_RL": _fmt(s_rl), "direct_RL": _fmt(x_rl[0])})


def _float_agreement(m: PwlMap) -> tuple:
    """Float evaluation of the key determinants against exact values of the same inputs."""
    exact = m.with_backend(RATIONAL)
    approx = m.with_backend(FLOAT)
    pairs = []
    for build in (
        lambda q: q.identity - q.a_left,
        lambda q: q.identity - q.a_right,
        lambda q: q.identity + q.a_left,
        lambda q: q.identity + q.a_right,
        lambda q: q.identity - q.a_rl,
    ):
        pairs.append((build(exact), build(approx)))
    for em, fm in pairs:
        de, df = det(em), det(fm)
        if abs(float(de)) <= fm.zero_band():
            continue
        if abs(df - float(de)) > 1e-9 * abs(float(de)) or strict_sign(df, fm.zero_band()) != strict_sign(de):
            return (FAIL, map_witness(exact) | {"exact": str(de), "float": repr(df)})
    return (PASS, None)


def _float_classification_agreement(m: PwlMap) -> dict:
    """Switching coordinates and scenario under both backends.

    Maps the float backend flags as degenerate (inside its zero band) are
    rejected; otherwise s values must agree to 1e-9 relative and the
    scenario must be identical.
    """
    exact = m.with_backend(RATIONAL)
    approx = m.with_backend(FLOAT)
    try:
        ce = classify(exact)
        cf = classify(approx)
    except (DegeneracyError, InternalConsistencyError):
        return {"float_s_values": (REJECT, None), "float_scenario": (REJECT, None)}
    out = {}
    bad = [
        (r.obj.value, _fmt(se), repr(sf))
        for r, q in zip(ce.reports, cf.reports)
        for se, sf in zip(r.s_values, q.s_values)
        if abs(sf - float(se)) > 1e-9 * max(1.0, abs(float(se)))
    ]
    out["float_s_values"] = (PASS, None) if not bad else (FAIL, map_witness(exact) | {"mismatch": bad[0]})
    same = ce.scenario is cf.scenario and ce.census_neg == cf.census_neg and ce.census_pos == cf.census_pos
    out["float_scenario"] = (PASS, None) if same else (
        FAIL, map_witness(exact) | {"rational": ce.scenario.value, "float": cf.scenario.value})
    return out


# ---------------------------------------------------------------------------
# simulation oracle
# ---------------------------------------------------------------------------

def points_agree(found: tuple, predicted: tuple, tol: float) -> bool:
    """Cycle points match up to rotation, coordinatewise within ``tol`` (relative above 1)."""
    if len(found) != len(predicted):
        return False
    pred = [tuple(float(v) for v in p) for p in predicted]
    for shift in range(len(pred)):
        rot = pred[shift:] + pred[:shift]
        if all(
            max(abs(a - b) for a, b in zip(f, p)) <= tol * max(1.0, max(abs(b) for b in p))
            for f, p in zip(found, rot)
        ):
            return True
    return False


def nearby_seeds(points, offset: float = 1e-3) -> list[tuple]:
    """Seeds slightly off each predicted orbit point.

    Local stability only promises a basin of some size around the orbit;
    the generic seeds can all miss a small one.
    """
    out = []
    for p in points:
        for sgn in (1.0, -1.0):
            out.append(tuple(float(v) + sgn * offset * max(1.0, abs(float(v))) for v in p))
    return out


def simulation_checks(m: PwlMap, max_iters: int = 100_000, period_cap: int = 8, agree_tol: float = 1e-6):
    """Compare the census with brute-force iteration on both sides of ``mu = 0``.

    Returns ``(outcomes, attracting)`` where ``attracting`` tells whether
    the census predicted at least one attracting object.
    """
    try:
        c = classify(m)
    except DegeneracyError:
        return {"simulation_attractor": (REJECT, None), "simulation_no_period_two": (REJECT, None)}, False
    except InternalConsistencyError as exc:
        w = map_witness(m) | {"error": str(exc).splitlines()[0]}
        return {"simulation_attractor": (FAIL, w), "simulation_no_period_two": (REJECT, None)}, False

    attracting = False
    found_all = True
    fail_w = None
    no_p2_status = REJECT
    no_p2_w = None
    for mu_sign in (-1, 1):
        census = c.census(mu_sign)
        stable = [obj for obj, st in census if st is Stable.YES]
        lr_here = any(obj is Obj.LR_CYCLE for obj, _ in census)
        need_run = bool(stable) or not lr_here
        if not need_run:
            continue
        reports = {Obj.XL: c.x_left, Obj.XR: c.x_right, Obj.LR_CYCLE: c.lr}
        seeds = default_seeds(m.n) + [
            p for obj in stable for p in nearby_seeds(reports[obj].points[mu_sign])
        ]
        orbits = detect_attractor(m, mu_sign, seeds, period_cap=period_cap, max_iters=max_iters)
        for obj in stable:
            attracting = True
            predicted = reports[obj].points[mu_sign]
            want_period = 2 if obj is Obj.LR_CYCLE else 1
            if not any(o.period == want_period and points_agree(o.points, predicted, agree_tol) for o in orbits):
                found_all = False
                fail_w = map_witness(m) | {"mu": mu_sign, "object": obj.value,
                                           "predicted": _fmt(predicted),
                                           "outcomes": " ".join(sorted({o.label for o in orbits}))}
        if not lr_here:
            if no_p2_status != FAIL:
                no_p2_status = PASS
            if any(o.period == 2 for o in orbits):
                no_p2_status = FAIL
                no_p2_w = map_witness(m) | {"mu": mu_sign}
    out = {"simulation_no_period_two": (no_p2_status, no_p2_w)}
    if not attracting:
        out["simulation_attractor"] = (REJECT, None)
    else:
        out["simulation_attractor"] = (PASS, None) if found_all else (FAIL, fail_w)
    return out, attracting


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _classification_chunk(args) -> VerifyReport:
    plan, indices = args
    rep = VerifyReport("classification")
    for i in indices:
        outcomes, scen = _classification_checks(sample_map(plan, i))
        for name, (status, w) in outcomes.items():
            rep.stat(name).record(status, w)
        if scen is not None:
            rep.scenarios[scen] += 1
    return rep


def _identity_chunk(args) -> VerifyReport:
    plan, indices = args
    rep = VerifyReport("identities")
    for i in indices:
        m = sample_map(plan, i)
        for name, (status, w) in _identity_checks(m).items():
            rep.stat(name).record(status, w)
        if plan.backend == FLOAT:
            status, w = _float_agreement(m)
            rep.stat("float_vs_rational").record(status, w)
            for name, (status, w) in _float_classification_agreement(m).items():
                rep.stat(name).record(status, w)
    return rep


def _chunks(indices: list[int], parts: int) -> list[list[int]]:
    size = max(1, -(-len(indices) // max(1, parts)))
    return [indices[k:k + size] for k in range(0, len(indices), size)]


def _run(worker: Callable, plan: SampleSpec, title: str, workers: int) -> VerifyReport:
    indices = list(range(plan.samples))
    report = VerifyReport(title)
    if workers <= 1 or len(indices) < 2:
        return report.merge(worker((plan, indices)))
    # contiguous chunks merged in index order keep the report identical to a serial run
    jobs = [(plan, chunk) for chunk in _chunks(indices, workers * 4)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(worker, jobs):
            report.merge(part)
    return report


def verify_classification(plan: SampleSpec, workers: int = 1) -> VerifyReport:
    """Search for the impossible parity pattern on sampled maps."""
    report = _run(_classification_chunk, plan, "classification", workers)
    report.title = "classification"
    return report


def verify_classification_grid(step: Fraction = Fraction(1, 10), bound: int = 3) -> VerifyReport:
    """Exhaustive 1-D grid version of :func:`verify_classification`."""
    report = VerifyReport("classification_grid")
    for m in grid_maps(step, bound):
        outcomes, scen = _classification_checks(m)
        for name, (status, w) in outcomes.items():
            report.stat(name).record(status, w)
        if scen is not None:
            report.scenarios[scen] += 1
    return report


def verify_identities(plan: SampleSpec, workers: int = 1) -> VerifyReport:
    """Check every algebraic identity behind the classification on sampled maps."""
    return _run(_identity_chunk, plan, "identities", workers)


def verify_against_simulation(
    plan: SampleSpec,
    attracting_target: int | None = None,
    max_iters: int = 100_000,
    period_cap: int = 8,
) -> VerifyReport:
    """Confirm predicted attractors by iterating the map.

    With ``attracting_target`` set, samples are drawn until that many maps
    with a predicted attractor have been checked (at most
    ``100 * attracting_target`` draws); otherwise ``plan.samples`` maps are
    drawn.
    """
    report = VerifyReport("simulation")
    limit = plan.samples if attracting_target is None else 100 * attracting_target
    hits = 0
    drawn = 0
    for i in range(limit):
        if attracting_target is not None and hits >= attracting_target:
            break
        m = sample_map(plan, i)
        drawn += 1
        outcomes, attracting = simulation_checks(m, max_iters=max_iters, period_cap=period_cap)
        hits += attracting
        for name, (status, w) in outcomes.items():
            report.stat(name).record(status, w)
    report.notes["samples_drawn"] = drawn
    report.notes["samples_with_predicted_attractor"] = hits
    return report


def run_all(plan: SampleSpec, workers: int = 1, grid: bool = True,
            simulation_spec: SampleSpec | None = None) -> list[VerifyReport]:
    """The three verifier operations (plus the 1-D grid) as the CLI runs them."""
    reports = [verify_classification(plan, workers)]
    if grid:
        reports.append(verify_classification_grid())
    reports.append(verify_identities(plan, workers))
    reports.append(verify_against_simulation(simulation_spec or plan))
    return reports
