from __future__ import annotations

import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import typer
from rich.console import Console

from .core.algebra import Element, delta, l1_norm, sub
from .core.errors import ConfigError, FloatModeError, NCTorusError
from .core.phases import FloatTheta, ThetaData
from .core.validate import validate
from .core.weights import grs_profile
from .engines.spectral import (
    build_truncation,
    cstar_inverse_norm,
    neumann_invert,
    opnorm_estimate,
    spectral_radius_l1v,
)
from .engines.structure import (
    average_J,
    averaging_profile,
    central_element_check,
    project_centralizer,
    simplicity,
)
from .io.render import build_rich_table, render_json
from .io.store import DEFAULT_CONFIG, RunConfig, build_theta, build_weight, load_config, load_element

app = typer.Typer(help="Workbench for weighted higher-dimensional noncommutative tori")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)

ConfigOpt = typer.Option(None, "--config", help="Path to the run config (default ./config.json)")
SeedOpt = typer.Option(None, "--seed", help="Override the config seed")
JsonOnlyOpt = typer.Option(False, "--json-only", help="Suppress the stderr summary")
VerboseOpt = typer.Option(False, "--verbose", "-v", help="Log at INFO level")


class _Context:
    def __init__(self, config: RunConfig, theta, json_only: bool):
        self.config = config
        self.theta = theta
        self.weight = build_weight(config)
        self.json_only = json_only

    def exact_theta(self) -> ThetaData:
        if isinstance(self.theta, FloatTheta):
            raise FloatModeError("this command needs an exact theta; the config is in float mode")
        return self.theta


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _emit(report: Dict[str, Any]) -> None:
    report["generated_at"] = datetime.now(timezone.utc).isoformat()
    typer.echo(render_json(report))


def _summary(ctx: Optional[_Context], title: str, rows: List[Tuple[str, Any]]) -> None:
    if ctx is None or ctx.json_only:
        return
    Console(stderr=True).print(build_rich_table(title, rows))


def _parse_point(text: str, n: int, name: str = "x") -> Tuple[int, ...]:
    try:
        point = tuple(int(c) for c in text.split(","))
    except ValueError:
        raise typer.BadParameter(f"{name} must be comma-separated integers, got {text!r}") from None
    if len(point) != n:
        raise typer.BadParameter(f"{name} has dimension {len(point)}, expected {n}")
    return point


def _parse_ints(text: str, name: str) -> List[int]:
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise typer.BadParameter(f"{name} must be comma-separated integers, got {text!r}") from None


def _run(
    command: str,
    config_path: Optional[Path],
    seed: Optional[int],
    json_only: bool,
    verbose: bool,
    body: Callable[[_Context], Tuple[Dict[str, Any], int]],
) -> None:
    """Load the config, run `body` and map failures onto exit codes 1 and 2."""
    _configure_logging(verbose)
    path = config_path or Path.cwd() / DEFAULT_CONFIG
    try:
        config = load_config(path)
        if seed is not None:
            config = config.model_copy(update={"seed": seed})
        ctx = _Context(config, build_theta(config), json_only)
    except FileNotFoundError as exc:
        typer.secho(f"Config file not found: {path}", fg=typer.colors.RED, err=True)
        _emit({"command": command, "error": {"type": "FileNotFoundError", "message": str(exc)}})
        raise typer.Exit(code=2)
    except ConfigError as exc:
        typer.secho(f"Failed to load config from {path}: {exc}", fg=typer.colors.RED, err=True)
        _emit({"command": command, "error": {"type": "ConfigError", "message": str(exc)}})
        raise typer.Exit(code=2)

    try:
        report, code = body(ctx)
    except FileNotFoundError as exc:
        typer.secho(str(exc), fg=typer.colors.RED, err=True)
        _emit({"command": command, "error": {"type": "FileNotFoundError", "message": str(exc)}})
        raise typer.Exit(code=2)
    except ConfigError as exc:
        typer.secho(str(exc), fg=typer.colors.RED, err=True)
        _emit({"command": command, "error": {"type": "ConfigError", "message": str(exc)}})
        raise typer.Exit(code=2)
    except NCTorusError as exc:
        logger.info("%s failed: %s", command, exc)
        typer.secho(f"{type(exc).__name__}: {exc}", fg=typer.colors.RED, err=True)
        _emit({"command": command, "error": {"type": type(exc).__name__, "message": str(exc)}})
        raise typer.Exit(code=1)
    report = {"command": command, "seed": ctx.config.seed, **report}
    _emit(report)
    if code:
        raise typer.Exit(code=code)


def _element(ctx: _Context, path: Optional[Path]) -> Element:
    if path is None:
        raise typer.BadParameter("--element is required for this command")
    return load_element(path, ctx.exact_theta())


@app.command("check")
def cmd_check(
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """Run the randomized identity suites (cocycle, algebra, weights, extension)."""

    def body(ctx: _Context):
        sizes = ctx.config.suites.model_dump()
        report = validate(
            ctx.theta, ctx.weight, sizes, seed=ctx.config.seed, quad_points=ctx.config.tolerances.quad_points
        )
        _summary(
            ctx,
            "Identity suites",
            [
                (s.name, "skipped" if s.skipped else f"{s.passed}/{s.trials} passed")
                for s in report.suites
            ],
        )
        return {"ok": report.ok, "weight": ctx.weight.name, "suites": report.suites}, 0 if report.ok else 1

    _run("check", config, seed, json_only, verbose, body)


@app.command("simplicity")
def cmd_simplicity(
    config: Optional[Path] = ConfigOpt,
    element: Optional[Path] = typer.Option(None, "--element", help="Element tested against a central witness"),
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """Decide degeneracy of the cocycle and hence simplicity of l1_v(Z^n, theta)."""

    def body(ctx: _Context):
        verdict = simplicity(ctx.theta, heuristic_box=ctx.config.heuristic_box)
        report: Dict[str, Any] = {"theta": ctx.theta, "verdict": verdict}
        if isinstance(ctx.theta, FloatTheta):
            report["warning"] = "float-mode theta: degeneracy is undecidable, heuristic search only"
        witness = verdict.degeneracy.witness
        if verdict.degeneracy.degenerate and witness is not None:
            f = load_element(element, ctx.theta) if element else delta(ctx.theta, witness)
            report["central_element"] = central_element_check(ctx.theta, witness, f)
        _summary(
            ctx,
            "Simplicity",
            [
                ("status", verdict.degeneracy.status),
                ("simple", verdict.simple),
                ("witness", witness),
                ("self-check", verdict.degeneracy.self_check),
            ],
        )
        return report, 0

    _run("simplicity", config, seed, json_only, verbose, body)


@app.command("invert")
def cmd_invert(
    config: Optional[Path] = ConfigOpt,
    element: Optional[Path] = typer.Option(None, "--element", help="Element file to invert"),
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """Neumann-series inversion with weighted norms, decay fit and a C*-side estimate."""

    def body(ctx: _Context):
        f = _element(ctx, element)
        tol = ctx.config.tolerances
        inv = neumann_invert(f, tol.inversion_tol, tol.max_terms, ctx.weight)
        report: Dict[str, Any] = {"weight": ctx.weight.name, "inversion": inv}
        try:
            report["cstar_inverse"] = cstar_inverse_norm(f, tol.truncation_n, max_rows=tol.max_rows)
        except NCTorusError as exc:
            report["cstar_inverse"] = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        _summary(
            ctx,
            "Neumann inversion",
            [
                ("terms used", inv.terms_used),
                ("stop reason", inv.stop_reason),
                ("l1 residual", inv.residual_l1),
                ("converged (l1)", inv.converged),
                ("diverged (l1)", inv.diverged),
                (f"diverged ({ctx.weight.name})", inv.weighted_diverged),
                ("decay model", inv.decay_fit.model if inv.decay_fit else "finite support"),
                ("class", inv.smooth_class),
            ],
        )
        return report, 0

    _run("invert", config, seed, json_only, verbose, body)


@app.command("spectrum")
def cmd_spectrum(
    x: str = typer.Option(..., "--x", help="Lattice point, e.g. 1,0"),
    n_max: int = typer.Option(100, "--n-max", min=1, help="Largest power k"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """Spectral radius of delta_x in l1_v against its C*-norm bracket."""

    def body(ctx: _Context):
        theta = ctx.exact_theta()
        point = _parse_point(x, theta.n)
        profile = spectral_radius_l1v(ctx.weight, point, n_max, theta)
        tol = ctx.config.tolerances
        dx = delta(theta, point)
        # the compression of delta_x vanishes unless the box is wider than |x|_inf
        radius = max(tol.truncation_n, max(abs(c) for c in point) + 2)
        bracket = opnorm_estimate(
            build_truncation(dx, radius, max_rows=tol.max_rows), tol.opnorm_tol, seed=ctx.config.seed
        )
        verdict = profile.grs.verdict
        dichotomy = {
            "l1v_spectral_radius": verdict.limit,
            "cstar_spectral_radius": 1.0,
            "grs_holds": verdict.holds,
            "reason": verdict.reason,
        }
        _summary(
            ctx,
            f"Spectral radius of delta_{point}",
            [
                ("weight", ctx.weight.name),
                (f"||delta_x^{n_max}||^(1/{n_max})", profile.sequence[-1]),
                ("analytic limit", verdict.limit),
                ("truncated C*-norm", bracket.estimate),
                ("GRS", verdict.holds),
            ],
        )
        return {"profile": profile, "cstar_bracket": bracket, "dichotomy": dichotomy}, 0

    _run("spectrum", config, seed, json_only, verbose, body)


@app.command("average")
def cmd_average(
    j: int = typer.Option(..., "--j", help="Generator index 1..n"),
    m_list: str = typer.Option("10,100,1000", "--m", help="Comma-separated averaging lengths"),
    element: Optional[Path] = typer.Option(None, "--element", help="Element file to average"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """Distance of J_m(f) to the centralizer projection, with the 1/m rate."""

    def body(ctx: _Context):
        f = _element(ctx, element)
        ms = _parse_ints(m_list, "--m")
        if any(m < 1 for m in ms):
            raise typer.BadParameter("averaging lengths must be positive")
        profile = averaging_profile(f, j, ms)
        tol = ctx.config.tolerances
        target = project_centralizer(f, j)
        cstar = []
        for m in ms:
            gap = sub(average_J(f, j, m), target)
            if not gap.coeffs:
                cstar.append(0.0)
                continue
            T = build_truncation(gap, tol.truncation_n, max_rows=tol.max_rows)
            cstar.append(opnorm_estimate(T, tol.opnorm_tol, seed=ctx.config.seed).estimate)
        _summary(
            ctx,
            f"Averaging J_m along e_{j}",
            [(f"m={m}", (d, b)) for m, d, b in zip(ms, profile.distances, profile.bounds)]
            + [("log-log slope", profile.loglog_slope), ("||f||_1", l1_norm(f))],
        )
        return {"profile": profile, "cstar_lower_bounds": cstar}, 0

    _run("average", config, seed, json_only, verbose, body)


@app.command("grs")
def cmd_grs(
    x: str = typer.Option(..., "--x", help="Lattice point, e.g. 1,0"),
    n_max: int = typer.Option(100, "--n-max", min=1, help="Largest n"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    json_only: bool = JsonOnlyOpt,
    verbose: bool = VerboseOpt,
):
    """GRS profile v(nx)^(1/n) and the analytic verdict for the config weight."""

    def body(ctx: _Context):
        point = _parse_point(x, ctx.theta.n)
        profile = grs_profile(ctx.weight, point, n_max)
        _summary(
            ctx,
            "GRS condition",
            [
                ("weight", profile.weight),
                (f"v({n_max}x)^(1/{n_max})", profile.sequence[-1]),
                ("limit", profile.verdict.limit),
                ("holds", profile.verdict.holds),
            ],
        )
        return {"profile": profile}, 0

    _run("grs", config, seed, json_only, verbose, body)


def main():
    app()


if __name__ == "__main__":
    main()
