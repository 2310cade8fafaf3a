"""Command-line interface."""

from pathlib import Path

import pandas as pd
import pytest

from monoscheme import __main__ as cli
from monoscheme.exceptions import QuadratureError
from monoscheme.harness import ConvergenceStudy, LevelResult
from monoscheme.models.params import DtRule, SchemeConfig


def flat_study() -> ConvergenceStudy:
    """Study whose errors do not decrease."""
    ladder = [LevelResult(dx, dx, round(1 / dx), 0.1, 1) for dx in (0.25, 0.125, 0.0625)]
    return ConvergenceStudy.from_ladder(
        "advection", SchemeConfig(), DtRule.cfl(), ladder
    )


def test_solve(capsys: pytest.CaptureFixture[str]):
    code = cli.main(
        ["solve", "--model", "heat", "--cells", "128", "--out", "d", "--save-every", "100"]
    )
    assert code == cli.EXIT_OK
    manifest = pd.read_csv(Path("d") / "manifest.csv")
    assert manifest["t"].iloc[0] == 0.0
    assert manifest["t"].iloc[-1] == 0.05
    out = capsys.readouterr().out
    assert out.startswith("RESULT t=0.050000000000000003")
    assert "l1_error=" in out


@pytest.mark.parametrize(
    "tokens",
    [
        ["solve", "--model", "nosuch"],
        ["solve", "--model", "heat", "--flux", "nosuch"],
        ["solve", "--model", "heat", "--dt", "-1"],
        ["solve", "--model", "heat", "--cells", "2"],
        ["solve", "--model", "heat", "--scheme", "nosuch"],
        ["nosuch"],
    ],
)
def test_usage_errors(tokens: list[str]):
    assert cli.main(tokens) == cli.EXIT_USAGE


def test_solver_failure(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setattr(
        cli,
        "SchemeConfig",
        lambda **kwargs: SchemeConfig(**kwargs, newton_max_iters=1, max_halvings=0),
    )
    code = cli.main([
        "solve",
        "--model",
        "burgers_shock",
        "--scheme",
        "implicit",
        "--cells",
        "32",
        "--dt",
        "0.5",
    ])
    assert code == cli.EXIT_SOLVER


def test_converge(capsys: pytest.CaptureFixture[str]):
    code = cli.main([
        "converge",
        "--model",
        "advection",
        "--levels",
        "3",
        "--coarsest-cells",
        "32",
        "--out",
        "study.csv",
    ])
    assert code == cli.EXIT_OK
    lines = Path("study.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "dx,dt,n_cells,l1_error,pairwise_rate"
    assert lines[-1].startswith("# fitted_rate=")
    assert "RESULT fitted_rate=" in capsys.readouterr().out


def test_quadrature_failure(monkeypatch: pytest.MonkeyPatch):
    def fail(*args: object, **kwargs: object):
        raise QuadratureError(0.0, 1.0, 1e-3, "Roundoff detected.")

    monkeypatch.setattr(cli, "run_to_time", fail)
    assert cli.main(["solve", "--model", "heat"]) == cli.EXIT_SOLVER


def test_converge_fails_on_flat_errors(monkeypatch: pytest.MonkeyPatch):
    study = flat_study()
    assert cli.rate_exit_code(study) == cli.EXIT_RATE
    monkeypatch.setattr(cli, "run_study", lambda *args, **kwargs: study)
    assert cli.main(["converge", "--model", "advection"]) == cli.EXIT_RATE


def test_audit():
    code = cli.main(
        ["audit", "--model", "heat", "--cells", "64", "--out", "audit.csv"]
    )
    assert code == cli.EXIT_OK
    assert Path("audit.csv").read_text(encoding="utf-8").rstrip().endswith("# pass=true")


@pytest.mark.parametrize("scheme", ["semi", "implicit"])
def test_audit_schemes(scheme: str):
    assert (
        cli.main(["audit", "--model", "sd_bench", "--scheme", scheme, "--cells", "32"])
        == cli.EXIT_OK
    )


def test_audit_refuses_beyond_cfl():
    code = cli.main(
        ["audit", "--model", "advection", "--cells", "32", "--dt", "1.0"]
    )
    assert code == cli.EXIT_USAGE


def test_viscosity(capsys: pytest.CaptureFixture[str]):
    code = cli.main([
        "viscosity",
        "--etas",
        "0.25",
        "--etas",
        "0.125",
        "--etas",
        "0.0625",
        "--cells",
        "256",
        "--scheme",
        "explicit",
        "--out",
        "viscosity.csv",
    ])
    assert code == cli.EXIT_OK
    assert "monotone=True" in capsys.readouterr().out
    assert Path("viscosity.csv").exists()


def test_viscosity_needs_fine_grid():
    assert cli.main(["viscosity", "--cells", "64"]) == cli.EXIT_USAGE
