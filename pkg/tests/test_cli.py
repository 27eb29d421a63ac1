import math
import textwrap
from pathlib import Path

import pytest

from freqlab.cli import main
from freqlab.config import ConfigError, parse_config_text
from freqlab.report import VerificationReport, emit_report, render_report, summary

HARMONIC = """
[field]
spec = harmonic:2d:k=2:cos
[radii]
start = 0.2
stop = 1.0
count = 12
"""

DRIFT = """
[field]
spec = drift-exp:b=1,0
[radii]
start = 0.05
stop = 0.45
count = 10
"""


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text))
    return str(p)


def run(tmp_path, command, text, *extra):
    out = tmp_path / "out"
    return main([command, "--config", write(tmp_path, text), "--out", str(out), *extra]), out


def test_verify_harmonic_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify", HARMONIC)
    assert code == 0
    assert "PASS" in capsys.readouterr().out
    report = (out / "report.txt").read_text().splitlines()
    assert report[0] == "# freqlab verification report"
    assert report[-1].startswith("# PASS")
    assert (out / "profile.csv").read_text().startswith("r,I,D,H,F,F_drift")


def test_verify_drift_passes(tmp_path):
    assert run(tmp_path, "verify", DRIFT)[0] == 0


def test_drift_radii_beyond_r2_is_usage_error(tmp_path, capsys):
    text = DRIFT.replace("b=1,0", "b=3,0").replace("0.45", "0.5")
    assert run(tmp_path, "verify", text)[0] == 2
    assert "r2" in capsys.readouterr().err


def test_start_not_below_stop_is_usage_error(tmp_path, capsys):
    assert run(tmp_path, "sweep", HARMONIC.replace("start = 0.2", "start = 1.5"))[0] == 2
    assert "start" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text",
    [HARMONIC.replace("harmonic:2d:k=2:cos", "nosuch:field"), HARMONIC + "[bogus]\nx = 1\n",
     HARMONIC + "[quad]\norder2d = many\n", HARMONIC.replace("count = 12", "count = 2"),
     HARMONIC + "[tolerance]\nmonotone = -1\n", "this is not a config"],
)
def test_bad_configs_exit_2(tmp_path, text):
    assert run(tmp_path, "verify", text)[0] == 2


def test_missing_config_and_bad_command(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["frobnicate", "--config", "x"]) == 2
    assert main([]) == 2


def test_unwritable_output_exit_2(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = main(["sweep", "--config", write(tmp_path, HARMONIC), "--out", str(blocker / "sub")])
    assert code == 2


def test_failing_check_exits_1(tmp_path, capsys):
    # tolerances far below the finite-difference error of a 10-radius grid
    text = DRIFT + "[tolerance]\nfd_safety = 1e-9\nidentity_rtol = 1e-16\n"
    code, out = run(tmp_path, "verify", text)
    assert code == 1
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("FAIL")
    assert (out / "report.txt").read_text().splitlines()[-1].startswith("# FAIL")


def test_solver_nonconvergence_exits_3(tmp_path):
    text = """
    [solver]
    h = 0.03125
    boundary = drift-exp:b=1,0 + harmonic:2d:k=5:cos
    tol = 1e-12
    max_iter = 2
    """
    assert run(tmp_path, "solve", text)[0] == 3


def test_solve_dump_and_chain(tmp_path, capsys):
    text = """
    [field]
    center = 0, 0
    [radii]
    start = 0.2
    stop = 0.6
    count = 8
    [solver]
    h = 0.0625
    boundary = harmonic:2d:k=3:cos
    chain = sweep
    """
    grid = tmp_path / "grid.txt"
    code, out = run(tmp_path, "solve", text, "--dump-grid", str(grid))
    assert code == 0
    assert grid.read_text().startswith("2 33 33 0.0625 -1 -1")
    assert (out / "profile.csv").exists()


def test_describe(tmp_path, capsys):
    code, _ = run(tmp_path, "describe", HARMONIC)
    assert code == 0
    text = capsys.readouterr().out
    assert "field catalog" in text and "laplace" in text and "residual at" in text


def test_doubling(tmp_path, capsys):
    text = HARMONIC.replace("k=2", "k=1").replace("stop = 1.0", "stop = 0.6").replace("count = 12", "count = 120")
    text += "[frequency]\np = 3\n"
    assert run(tmp_path, "doubling", text)[0] == 0
    assert "r_star" in capsys.readouterr().out


def test_determinism(tmp_path):
    a, out_a = run(tmp_path, "verify", DRIFT)
    first = {p.name: p.read_bytes() for p in out_a.iterdir()}
    b, out_b = run(tmp_path, "verify", DRIFT)
    assert a == b == 0
    assert first == {p.name: p.read_bytes() for p in out_b.iterdir()}


# --- report rendering --------------------------------------------------------


def test_empty_report_is_header_only(tmp_path):
    path = emit_report([], tmp_path / "r.txt")
    assert path.read_text() == "# freqlab verification report\ncheck\tlhs\trhs\tmargin\ttolerance\tpass\tr\tnote\n"


def test_mixed_report_summary():
    reps = [
        VerificationReport("b", 1.0, 2.0, 0.0, {"r": 0.5}),
        VerificationReport("a", 3.0, 2.0, 0.5, {"r": 0.2}),
        VerificationReport("a", 2.1, 2.0, 0.5, {"r": 0.1}),
    ]
    assert summary(reps) == (1, 3)
    lines = render_report(reps).splitlines()
    assert lines[-1] == "# FAIL 1/3"
    assert [ln.split("\t")[0] for ln in lines[2:5]] == ["a", "a", "b"]
    assert lines[2].split("\t")[6] == "0.10000000000000001"


def test_report_pass_rule():
    assert VerificationReport("x", 1.5, 1.0, 0.5, {}).passed
    assert not VerificationReport("x", 1.75, 1.0, 0.5, {}).passed
    assert not VerificationReport("x", math.nan, 1.0, 1e-9, {}).passed


def test_config_parsing():
    cfg = parse_config_text(HARMONIC + "[drift]\nM = 2\nC_p = 0.5\n[checks]\nscaling_taus = 0.5, 3\n")
    assert cfg.drift_M == 2 and cfg.C_p == 0.5 and cfg.scaling_taus == (0.5, 3.0)
    with pytest.raises(ConfigError):
        parse_config_text("[radii]\nspacing = cubic\n")


CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize(
    "name,command", [("harmonic", "verify"), ("drift", "verify"), ("doubling", "doubling"), ("solve_verify", "solve")]
)
def test_shipped_configs(tmp_path, name, command):
    assert main([command, "--config", str(CONFIGS / f"{name}.ini"), "--out", str(tmp_path)]) == 0
    if name == "solve_verify":
        assert (tmp_path / "grid.txt").exists()


def test_zero_field_skips_frequency_checks(tmp_path, capsys):
    code, out = run(tmp_path, "verify", HARMONIC.replace("harmonic:2d:k=2:cos", "const:c=0"))
    assert code == 0
    assert capsys.readouterr().out.strip().endswith("(6 skipped)")
    report = (out / "report.txt").read_text()
    assert report.splitlines()[-1].endswith("(6 skipped)")
    for name in ("monotone_F", "harnack", "representation_I", "log_I_prime"):
        assert f"{name}\tnan\tnan\tnan\t0\tSKIP" in report


def test_readme_config_block_parses():
    import re

    readme = (Path(__file__).resolve().parent.parent / "README.md").read_text()
    cfg = parse_config_text(re.search(r"```ini\n(.*?)```", readme, re.S).group(1))
    assert cfg.solver is not None and cfg.tolerances["fd_safety"] == 10
