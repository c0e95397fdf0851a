"""Command-line front end: ``bcb classify|simulate|sweep|verify``.

Exit codes: 0 success, 1 parse or usage error, 2 degeneracy, 3 property failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .classifier import Classification, classify
from .errors import DegeneracyError, InternalConsistencyError, ProblemFileError
from .matrix_core import FLOAT, RATIONAL, Matrix, to_scalar
from .model import ContinuityError, Obj, PwlMap, Side, Stable
from .simulator import Outcome, default_seeds, detect_attractor
from .verifier import SampleSpec, nearby_seeds, points_agree, reports_to_csv, run_all

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_FAILURE = 0, 1, 2, 3

SWEEP_HEADER = ["mu", "s_L", "s_L_admissible", "s_R", "s_R_admissible", "s_LR", "s_RL", "lr_admissible"]

EXAMPLES = ("panel_A", "panel_B", "panel_C", "panel_D")

_NAMES = {Obj.XL: "x^L", Obj.XR: "x^R", Obj.LR_CYCLE: "LR-cycle"}


def default_backend() -> str:
    return os.environ.get("BCB_BACKEND", RATIONAL)


# ---------------------------------------------------------------------------
# problem files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemFile:
    """A map as written on disk: ``N``, ``A_L``, ``b`` and one of ``A_R`` / ``xi``."""

    n: int
    a_left: tuple
    b: tuple
    a_right: tuple | None = None
    xi: tuple | None = None

    def to_map(self, backend: str = RATIONAL) -> PwlMap:
        al = Matrix([[_entry(v, backend) for v in row] for row in self.a_left], backend)
        b = [_entry(v, backend) for v in self.b]
        if self.xi is not None:
            return PwlMap.from_xi(al, [_entry(v, backend) for v in self.xi], b)
        ar = Matrix([[_entry(v, backend) for v in row] for row in self.a_right], backend)
        return PwlMap(al, ar, tuple(b))

    @classmethod
    def from_map(cls, m: PwlMap) -> ProblemFile:
        rows = lambda a: tuple(tuple(_exact_text(v) for v in r) for r in a.rows)  # noqa: E731
        return cls(m.n, rows(m.a_left), tuple(_exact_text(v) for v in m.b), a_right=rows(m.a_right))

    def to_json(self) -> str:
        doc = {"N": self.n, "A_L": [list(r) for r in self.a_left]}
        if self.a_right is not None:
            doc["A_R"] = [list(r) for r in self.a_right]
        else:
            doc["xi"] = list(self.xi)
        doc["b"] = list(self.b)
        return json.dumps(doc, indent=2) + "\n"


def _exact_text(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _entry(v, backend: str):
    if isinstance(v, bool) or not isinstance(v, (str, int, Decimal)):
        raise ProblemFileError(f"entry {v!r} is not a number or 'p/q' string")
    try:
        if isinstance(v, str):
            v = Fraction(v.strip())
        elif isinstance(v, Decimal):
            if not v.is_finite():
                raise ProblemFileError(f"entry {v} is not finite")
            v = Fraction(v)
        return to_scalar(v, backend)
    except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
        raise ProblemFileError(f"cannot read entry {v!r}: {exc}") from None


def _square(doc: dict, key: str, n: int) -> tuple:
    rows = doc[key]
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ProblemFileError(f"{key} must be an {n}x{n} array")
    return tuple(tuple(r) for r in rows)


def _vec(doc: dict, key: str, n: int) -> tuple:
    v = doc[key]
    if not isinstance(v, list) or len(v) != n:
        raise ProblemFileError(f"{key} must be an array of length {n}")
    return tuple(v)


def parse_problem(text: str) -> ProblemFile:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must be a JSON object")
    missing = [k for k in ("N", "A_L", "b") if k not in doc]
    if missing:
        raise ProblemFileError("missing field(s): " + ", ".join(missing))
    if ("A_R" in doc) == ("xi" in doc):
        raise ProblemFileError("give exactly one of A_R or xi")
    n = doc["N"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ProblemFileError("N must be a positive integer")
    al = _square(doc, "A_L", n)
    b = _vec(doc, "b", n)
    if "A_R" in doc:
        return ProblemFile(n, al, b, a_right=_square(doc, "A_R", n))
    return ProblemFile(n, al, b, xi=_vec(doc, "xi", n))


def load_map(path: str | Path, backend: str = RATIONAL) -> PwlMap:
    """Read a problem file; raises :class:`ProblemFileError` or :class:`ContinuityError`.

    A bare bundled-example name (``panel_C``) is accepted when no such file exists.
    """
    if str(path) in EXAMPLES and not Path(path).exists():
        path = example_path(str(path))
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text).to_map(backend)


def write_map(m: PwlMap, path: str | Path) -> None:
    Path(path).write_text(ProblemFile.from_map(m).to_json(), encoding="utf-8", newline="\n")


def example_path(name: str) -> Path:
    """Path of a bundled example (``panel_A`` ... ``panel_D``)."""
    return Path(str(resources.files("bordercollision") / "data" / f"{name}.json"))


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _num(v) -> str:
    """Locale-independent decimal text."""
    f = float(v) + 0.0
    return format(f, ".12g")


def _val(v) -> str:
    if isinstance(v, float):
        return _num(v)
    return str(v) if v.denominator == 1 else f"{v} ({_num(v)})"


def _pt(p) -> str:
    return "(" + ", ".join(_num(v) for v in p) + ")"


def _side_summary(c: Classification) -> str:
    groups = []
    for side, label in ((Side.MU_NEG, "μ<0"), (Side.MU_POS, "μ>0")):
        names = [_NAMES[r.obj] for r in c.reports if r.admissible_for is side]
        if not names:
            continue
        joined = names[0] if len(names) == 1 else ", ".join(names[:-1]) + " and " + names[-1]
        groups.append(f"{joined} admissible for {label}")
    return "; ".join(groups)


def classification_text(c: Classification) -> str:
    sc = c.counts
    tag = f"scenario ({c.scenario.value})"
    lines = [f"{tag}: {c.scenario.label}", f"{tag}: {_side_summary(c)}"]
    if c.coexists_with is not None:
        lines.append(f"LR-cycle coexists with {_NAMES[c.coexists_with]}")
    lines += [
        "",
        "eigenvalue counts (sigma+ : real > 1, sigma- : real < -1)",
        f"  A_L      sigma+={sc.sigma_L_plus} sigma-={sc.sigma_L_minus}",
        f"  A_R      sigma+={sc.sigma_R_plus} sigma-={sc.sigma_R_minus}",
        f"  A_R A_L  sigma+={sc.sigma_LR_plus}",
        f"  A_L^2    sigma+={sc.sigma_LL_plus}",
        f"parities: fixed points={sc.fixed_point_parity} two-cycle={sc.two_cycle_parity} "
        f"coexistence={sc.coexistence_parity}",
        "",
        "branches at mu=1 (switching coordinate s, admissible side, stability)",
    ]
    for r in c.reports:
        if r.obj is Obj.LR_CYCLE:
            s = f"s_LR={_val(r.s_values[0])} s_RL={_val(r.s_values[1])}"
        else:
            s = f"s={_val(r.s_values[0])}"
        lines.append(f"  {_NAMES[r.obj]:<9} {s}  side={r.admissible_for.value}  stable={r.stable.value}")
    lines += ["", "census"]
    for sign, label in ((-1, "mu<0"), (1, "mu>0")):
        cen = c.census(sign)
        body = ", ".join(f"{_NAMES[o]} (stable={st.value})" for o, st in cen) or "empty"
        lines.append(f"  {label}: {body}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _mu_grid(lo: Fraction, hi: Fraction, steps: int) -> list[Fraction]:
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def sweep_rows(c: Classification, mus: Sequence[Fraction]) -> list[dict]:
    """Switching coordinates along the branches; ``None`` where inadmissible."""
    s_l = c.x_left.s_values[0]
    s_r = c.x_right.s_values[0]
    s_lr, s_rl = c.lr.s_values
    rows = []
    for mu in mus:
        m = float(mu) if isinstance(s_l, float) else to_scalar(mu)
        vl, vr, vlr, vrl = m * s_l, m * s_r, m * s_lr, m * s_rl
        ok_l, ok_r, ok_lr = vl <= 0, vr >= 0, vlr <= 0 <= vrl
        rows.append({
            "mu": mu,
            "s_L": vl if ok_l else None, "s_L_admissible": ok_l,
            "s_R": vr if ok_r else None, "s_R_admissible": ok_r,
            "s_LR": vlr if ok_lr else None, "s_RL": vrl if ok_lr else None, "lr_admissible": ok_lr,
        })
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([
            "" if r[k] is None else (str(int(r[k])) if isinstance(r[k], bool) else _num(r[k]))
            for k in SWEEP_HEADER
        ])
    return buf.getvalue()


def sweep_svg(rows: list[dict], width: int = 640, height: int = 400) -> str:
    """Bifurcation diagram: solid fixed-point branches, dashed LR-cycle."""
    pad = 50
    mus = [float(r["mu"]) for r in rows]
    values = [float(r[k]) for r in rows for k in ("s_L", "s_R", "s_LR", "s_RL") if r[k] is not None]
    x0, x1 = (min(mus), max(mus)) if mus else (-1.0, 1.0)
    y0, y1 = (min(values + [0.0]), max(values + [0.0]))
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    margin = 0.05 * (y1 - y0)
    y0, y1 = y0 - margin, y1 + margin

    def px(mu):
        return pad + (mu - x0) / (x1 - x0) * (width - 2 * pad)

    def py(s):
        return height - pad - (s - y0) / (y1 - y0) * (height - 2 * pad)

    def runs(key):
        out, cur = [], []
        for r in rows:
            if r[key] is None:
                if len(cur) > 1:
                    out.append(cur)
                cur = []
            else:
                cur.append((px(float(r["mu"])), py(float(r[key]))))
        if len(cur) > 1:
            out.append(cur)
        return out

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{py(0.0):.2f}" x2="{width - pad}" y2="{py(0.0):.2f}" stroke="#888" stroke-width="1"/>',
    ]
    if x0 <= 0 <= x1:
        parts.append(f'<line x1="{px(0.0):.2f}" y1="{pad}" x2="{px(0.0):.2f}" y2="{height - pad}" '
                     'stroke="#888" stroke-width="1"/>')
    styles = {
        "s_L": ('#1f77b4', ""), "s_R": ('#d62728', ""),
        "s_LR": ('#2ca02c', ' stroke-dasharray="6,4"'), "s_RL": ('#2ca02c', ' stroke-dasharray="6,4"'),
    }
    for key, (color, dash) in styles.items():
        for run in runs(key):
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in run)
            parts.append(f'<polyline class="{key}" points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="2"{dash}/>')
    parts += [
        f'<text x="{width - pad}" y="{height - pad / 3:.0f}" font-size="14" text-anchor="end">mu</text>',
        f'<text x="{pad / 3:.0f}" y="{pad - 10}" font-size="14">s</text>',
        f'<text x="{pad}" y="{height - pad / 3:.0f}" font-size="12">{_num(x0)}</text>',
        f'<text x="{width - pad - 30}" y="{height - pad / 3:.0f}" font-size="12" text-anchor="end">{_num(x1)}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _parse_seeds(text: str, n: int) -> list[tuple]:
    seeds = []
    for chunk in text.split(";"):
        vals = tuple(float(v) for v in chunk.split(","))
        if len(vals) != n:
            raise ValueError(f"seed {chunk!r} does not have {n} coordinates")
        seeds.append(vals)
    return seeds


def _orbit_text(o) -> str:
    if o.outcome in (Outcome.FIXED_POINT, Outcome.PERIOD_K):
        return f"{o.label} at {_pt(p[0] for p in o.points)}"
    return o.label


def simulation_verdict(c: Classification, mu: float, orbits: list, tol: float = 1e-6) -> tuple[str, bool]:
    """Compare simulated orbits with the census; returns ``(text, agrees)``."""
    sign = 1 if mu > 0 else -1
    scale = abs(mu)
    cen = c.census(sign)
    reports = {r.obj: r for r in c.reports}
    attracting = [o for o, st in cen if st is Stable.YES]
    found = [o for o in orbits if o.period]
    if attracting:
        obj = attracting[0]
        want = 2 if obj is Obj.LR_CYCLE else 1
        pred = tuple(tuple(float(v) * scale for v in p) for p in reports[obj].points[sign])
        for o in found:
            if o.period == want and points_agree(o.points, pred, tol):
                return f"{_orbit_text(o)}; agrees with census", True
        if not found and any(o.outcome is Outcome.UNDECIDED for o in orbits):
            return f"no seed settled; predicted attracting {_NAMES[obj]}: inconclusive", True
        return f"predicted attracting {_NAMES[obj]} at {_pt(p[0] for p in pred)} not found; disagrees with census", False
    low = [o for o in found if o.period <= 2]
    if low:
        return f"{_orbit_text(low[0])} but census has no attracting fixed point or LR-cycle; disagrees", False
    if found:
        return f"{_orbit_text(found[0])}; period above 2 is outside the census: agree", True
    what = "census empty" if not cen else "census has no attracting object"
    return f"no attractor found; {what}: agree", True


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _dims(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        dims = tuple(range(int(lo), int(hi) + 1))
    else:
        dims = tuple(int(v) for v in text.split(","))
    if not dims or min(dims) < 1:
        raise ValueError(f"bad dimension list {text!r}")
    return dims


def cmd_classify(args) -> int:
    m = load_map(args.file, args.backend)
    c = classify(m)
    sys.stdout.write(classification_text(c))
    return EXIT_OK


def cmd_sweep(args) -> int:
    m = load_map(args.file, args.backend)
    c = classify(m)
    lo, hi = Fraction(args.mu_min), Fraction(args.mu_max)
    if args.steps < 1:
        raise ValueError("--steps must be at least 1")
    rows = sweep_rows(c, _mu_grid(lo, hi, args.steps))
    text = sweep_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if args.svg:
        Path(args.svg).write_text(sweep_svg(rows), encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    m = load_map(args.file, args.backend)
    mu = float(Fraction(args.mu))
    try:
        c = classify(m)
    except DegeneracyError as exc:
        c, degenerate = None, exc
    else:
        degenerate = None
    if args.seeds:
        seeds = _parse_seeds(args.seeds, m.n)
    else:
        seeds = default_seeds(m.n)
        if c is not None and mu != 0:
            sign = 1 if mu > 0 else -1
            for obj, st in c.census(sign):
                if st is Stable.YES:
                    pts = next(r for r in c.reports if r.obj is obj).points[sign]
                    seeds += nearby_seeds([tuple(float(v) * abs(mu) for v in p) for p in pts])
    orbits = detect_attractor(m, mu, seeds, period_cap=args.period_cap, max_iters=args.iters)
    for o in orbits:
        print(f"seed {_pt(o.initial)}: {_orbit_text(o)} after {o.iterations} iterations")
    if degenerate is not None:
        print(f"degenerate: {degenerate}; no census to compare", file=sys.stderr)
        return EXIT_DEGENERATE
    if mu == 0:
        print("mu = 0: no census for the bifurcation point itself")
        return EXIT_OK
    text, agrees = simulation_verdict(c, mu, orbits)
    print(text)
    return EXIT_OK if agrees else EXIT_FAILURE


def cmd_verify(args) -> int:
    plan = SampleSpec(
        samples=args.samples, dims=_dims(args.dims), entry_cap=args.entry_cap,
        backend=args.backend, seed=args.seed,
    )
    sim_samples = args.sim_samples if args.sim_samples is not None else min(args.samples, 1000)
    sim_spec = SampleSpec(
        samples=sim_samples, dims=plan.dims, entry_cap=plan.entry_cap, backend=plan.backend, seed=plan.seed,
    )
    reports = run_all(plan, workers=args.workers, grid=args.grid and args.samples > 0, simulation_spec=sim_spec)
    text = "\n".join(r.to_text() for r in reports)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify_report.txt").write_text(text, encoding="utf-8", newline="\n")
        (out / "verify_report.csv").write_text(reports_to_csv(reports), encoding="utf-8", newline="\n")
    failures = sum(r.failure_count for r in reports)
    fifth = sum(r.scenarios.get("v", 0) for r in reports)
    if failures or fifth:
        print(f"FAILED: {failures} property failure(s), {fifth} scenario (v) instance(s)", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bcb", description="Border-collision bifurcations of two-piece piecewise-linear maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_backend(sp):
        sp.add_argument("--backend", choices=(RATIONAL, FLOAT), default=default_backend())
        return sp

    sp = with_backend(sub.add_parser("classify", help="classify the bifurcation at mu=0"))
    sp.add_argument("file")
    sp.set_defaults(func=cmd_classify)

    sp = with_backend(sub.add_parser("sweep", help="branch data over a range of mu"))
    sp.add_argument("file")
    sp.add_argument("--mu-min", default="-1")
    sp.add_argument("--mu-max", default="1")
    sp.add_argument("--steps", type=int, default=41)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--svg", help="also write an SVG diagram here")
    sp.set_defaults(func=cmd_sweep)

    sp = with_backend(sub.add_parser("simulate", help="iterate the map and compare with the census"))
    sp.add_argument("file")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--seeds", help="initial points 'x1,..,xN;y1,..,yN' (default: built-in set)")
    sp.add_argument("--iters", type=int, default=100_000)
    sp.add_argument("--period-cap", type=int, default=8)
    sp.set_defaults(func=cmd_simulate)

    sp = with_backend(sub.add_parser("verify", help="randomised property checks"))
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--dims", default="1..5")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--entry-cap", type=int, default=3)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--sim-samples", type=int, default=None,
                    help="maps checked against simulation (default: min(samples, 1000))")
    sp.add_argument("--no-grid", dest="grid", action="store_false", help="skip the exhaustive 1-D grid")
    sp.add_argument("--out", help="directory for verify_report.txt and verify_report.csv")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (ProblemFileError, ContinuityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegeneracyError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
