import json

import pytest
from gmpy2 import mpq

from bordercollision import cli, model
from bordercollision.cli import EXAMPLES, ProblemFile, example_path, load_map, main, parse_problem, write_map
from bordercollision.errors import ProblemFileError
from bordercollision.matrix_core import Matrix
from bordercollision.model import ContinuityError, PwlMap


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def panel(name):
    return str(example_path(f"panel_{name}"))


def test_bundled_examples_exist():
    assert all(example_path(n).is_file() for n in EXAMPLES)


def test_classify_panel_a(capsys):
    code, out, _ = run(capsys, "classify", panel("A"))
    assert code == 0
    assert "scenario (i): persistence, no period-two" in out


def test_classify_panel_d(capsys):
    code, out, _ = run(capsys, "classify", panel("D"))
    assert code == 0
    assert "scenario (iv): x^L, x^R and LR-cycle admissible for μ>0" in out


def test_classify_degenerate(tmp_path, capsys):
    f = tmp_path / "deg.json"
    f.write_text(json.dumps({"N": 1, "A_L": [["1"]], "A_R": [["-1/2"]], "b": ["1"]}))
    code, _, err = run(capsys, "classify", str(f))
    assert code == 2 and "1 is an eigenvalue of A_L" in err


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps({"N": 1, "A_L": [["1"]], "b": ["1"]}),
    json.dumps({"N": 1, "A_L": [["1"]], "A_R": [["1"]], "xi": ["0"], "b": ["1"]}),
    json.dumps({"N": 2, "A_L": [["1"]], "A_R": [["1"]], "b": ["1"]}),
    json.dumps({"N": 1, "A_L": [["x"]], "A_R": [["1"]], "b": ["1"]}),
    json.dumps({"N": 2, "A_L": [[1, 2], [3, 4]], "A_R": [[1, 5], [3, 4]], "b": [1, 0]}),
])
def test_parse_errors_exit_1(tmp_path, capsys, doc):
    f = tmp_path / "bad.json"
    f.write_text(doc)
    code, _, err = run(capsys, "classify", str(f))
    assert code == 1 and err


def test_continuity_is_hard_error():
    text = json.dumps({"N": 2, "A_L": [[1, 2], [3, 4]], "A_R": [[1, 5], [3, 4]], "b": [1, 0]})
    with pytest.raises(ContinuityError):
        parse_problem(text).to_map()


def test_xi_form_and_exact_decimals():
    m = parse_problem(json.dumps({"N": 1, "A_L": [[0.4]], "xi": ["-1.9"], "b": [1]})).to_map()
    assert m.a_left.rows[0][0] == mpq(2, 5) and m.a_right.rows[0][0] == mpq(-3, 2)
    with pytest.raises(ProblemFileError):
        parse_problem(json.dumps({"N": 1, "A_L": [[True]], "xi": [0], "b": [1]})).to_map()


@pytest.mark.parametrize("backend", ["rational", "float"])
def test_round_trip(tmp_path, backend):
    m = PwlMap.from_xi(Matrix([["1/3", "-2"], ["0.25", 7]], backend), ["-5/7", 0], ["1/9", "-3"])
    f = tmp_path / "m.json"
    write_map(m, f)
    assert load_map(f, backend) == m
    assert ProblemFile.from_map(m).to_json() == f.read_text()


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "classify")[0] == 1
    assert run(capsys, "bogus")[0] == 1


def test_sweep_panel_c(tmp_path, capsys):
    svg = tmp_path / "c.svg"
    code, out, _ = run(capsys, "sweep", panel("C"), "--mu-min", "-1", "--mu-max", "1", "--steps", "41",
                       "--svg", str(svg))
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "mu,s_L,s_L_admissible,s_R,s_R_admissible,s_LR,s_RL,lr_admissible"
    assert "\r" not in out and out.endswith("\n")
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:-1]]
    assert len(rows) == 41
    for r in rows:
        mu = float(r["mu"])
        if mu < 0:
            assert r["lr_admissible"] == "0" and r["s_LR"] == "" and r["s_RL"] == ""
        elif mu > 0:
            assert r["lr_admissible"] == "1"
            assert float(r["s_LR"]) == pytest.approx(-0.3125 * mu)
            assert float(r["s_RL"]) == pytest.approx(0.875 * mu)
    text = svg.read_text()
    assert text.startswith("<svg") and "stroke-dasharray" in text
    dashed = [ln for ln in text.splitlines() if "stroke-dasharray" in ln]
    assert dashed and all('class="s_LR"' in ln or 'class="s_RL"' in ln for ln in dashed)


def test_sweep_panel_a_one_branch_per_side(capsys):
    code, out, _ = run(capsys, "sweep", panel("A"), "--steps", "21")
    rows = [ln.split(",") for ln in out.strip().split("\n")[1:]]
    for r in rows:
        if float(r[0]) != 0:
            assert int(r[2]) + int(r[4]) == 1 and r[7] == "0"


def test_sweep_two_steps(capsys):
    _, out, _ = run(capsys, "sweep", panel("B"), "--steps", "2")
    assert len(out.strip().split("\n")) == 3


def test_simulate_panel_c(capsys):
    code, out, _ = run(capsys, "simulate", panel("C"), "--mu", "1")
    assert code == 0
    assert out.strip().splitlines()[-1] == "PERIOD_2 at (-0.3125, 0.875); agrees with census"


def test_simulate_panel_b(capsys):
    code, out, _ = run(capsys, "simulate", panel("B"), "--mu", "-1")
    assert code == 0
    assert out.strip().splitlines()[-1] == "no attractor found; census empty: agree"


def test_simulate_zero_iterations(capsys):
    code, out, _ = run(capsys, "simulate", panel("C"), "--mu", "1", "--iters", "0")
    seed_lines = [ln for ln in out.splitlines() if ln.startswith("seed")]
    assert seed_lines and all("UNDECIDED" in ln for ln in seed_lines)


def test_simulate_explicit_seeds(capsys):
    code, out, _ = run(capsys, "simulate", panel("A"), "--mu", "1", "--seeds", "0;0.5")
    assert code == 0 and len([ln for ln in out.splitlines() if ln.startswith("seed")]) == 2


def test_verify_zero_samples(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--samples", "0", "--out", str(tmp_path))
    assert code == 0
    assert "failures=" not in out
    assert (tmp_path / "verify_report.csv").read_text().startswith("report,kind,name")


def test_verify_small_run_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["verify", "--samples", "60", "--dims", "1..3", "--seed", "5", "--sim-samples", "20", "--no-grid"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b), "--workers", "2")[0] == 0
    for name in ("verify_report.txt", "verify_report.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_verify_detects_sign_flip(monkeypatch, capsys):
    # corrupt the closed-form LR-cycle coordinates: s_LR gets the wrong sign
    real = model._lr_switching_values

    def flipped(*args):
        s_lr, s_rl = real(*args)
        return -s_lr, s_rl

    monkeypatch.setattr(model, "_lr_switching_values", flipped)
    code, _, err = run(capsys, "verify", "--samples", "40", "--dims", "1..2", "--sim-samples", "0", "--no-grid")
    assert code == 3 and "FAILED" in err


def test_backend_env_var(monkeypatch):
    monkeypatch.setenv("BCB_BACKEND", "float")
    assert cli.default_backend() == "float"
    args = cli.build_parser().parse_args(["classify", "x.json"])
    assert args.backend == "float"


def test_bundled_example_by_name(capsys):
    assert cli.main(["classify", "panel_C"]) == 0
    assert "scenario" in capsys.readouterr().out
