"""Command-line front end.

Usage:
    paritymzi scan --state noon:3 --phi 0:6.2832:721 --format csv
    paritymzi qcrb --state tmsv:r=0.5
    paritymzi check-symmetry --state-file s.json
    paritymzi bias --state twin_fock:3 --format json -o bias.json
    paritymzi verify --max-n 8

Angles are radians.  Exit codes: 0 success, 1 verification failure, 2 usage
or input error.  If ``--output`` is omitted and ``PARITYMZI_OUTPUT_DIR`` is
set, artifacts are written there as ``<command>.<format>``; otherwise they go
to stdout.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import catalog as catalog_mod
from . import fock, metrology, states, symmetry
from .states import Stage, TwoModeState

OUTPUT_DIR_ENV = "PARITYMZI_OUTPUT_DIR"

STATE_HELP = (
    "Named state as name:params, e.g. noon:3, twin_fock:2, tmsv:r=0.5,max_n=60, "
    "pair_coherent:zeta=1.0, csv:alpha=1.4142,zeta=1.1462, vacuum."
)


class _Failure(click.ClickException):
    exit_code = 1


def _load(state_spec: str | None, state_file: str | None) -> TwoModeState:
    if bool(state_spec) == bool(state_file):
        raise click.UsageError("give exactly one of --state or --state-file")
    try:
        if state_file:
            return states.load_state(state_file)
        return catalog_mod.parse_state_spec(state_spec)
    except FileNotFoundError as exc:
        raise click.UsageError(f"state file not found: {exc.filename}") from exc
    except ValueError as exc:
        raise click.UsageError(f"state_factory: {exc}") from exc


def _internal(state: TwoModeState) -> TwoModeState:
    return states.to_internal(state) if state.stage is Stage.INPUT else state


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo_f, hi_f, n_i = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise click.BadParameter(f"expected MIN:MAX:POINTS, got {text!r}") from exc
    if n_i < 1:
        raise click.BadParameter("POINTS must be at least 1")
    if n_i > 1 and not lo_f < hi_f:
        raise click.BadParameter("MIN must be below MAX when POINTS > 1")
    return np.linspace(lo_f, hi_f, n_i) if n_i > 1 else np.array([lo_f])


def _emit(text: str, output: str | None, command: str, fmt: str) -> None:
    path = output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{command}.{fmt}")
    if path is None:
        click.echo(text, nl=not text.endswith("\n"))
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    except OSError as exc:
        raise click.UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def _metrology_error(exc: Exception) -> click.UsageError:
    return click.UsageError(f"metrology: {exc}")


state_option = click.option("--state", "state_spec", help=STATE_HELP)
state_file_option = click.option(
    "--state-file", type=click.Path(dir_okay=False), help="State JSON document."
)
output_option = click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file.")


@click.group(help=__doc__.split("\n\n")[0])
def cli():
    pass


@cli.command(help=f"Parity signal and sensitivity over a phase grid. {STATE_HELP}")
@state_option
@state_file_option
@click.option("--phi", "grid", default="0:6.283185307179586:721", show_default=True,
              help="Phase grid MIN:MAX:POINTS (radians, inclusive).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@output_option
def scan(state_spec, state_file, grid, fmt, output):
    state = _internal(_load(state_spec, state_file))
    phis = _parse_grid(grid)
    try:
        result = metrology.sensitivity_scan(state, phis)
    except ValueError as exc:
        raise _metrology_error(exc) from exc
    text = result.to_csv() if fmt == "csv" else _dumps(_nan_free(result.to_dict()))
    _emit(text, output, "scan", fmt)


@cli.command(help="Print the quantum Cramer-Rao bound 1/(2 Delta J_z).")
@state_option
@state_file_option
def qcrb(state_spec, state_file):
    state = _internal(_load(state_spec, state_file))
    try:
        click.echo(f"{metrology.qcrb(state):.17g}")
    except ValueError as exc:
        raise _metrology_error(exc) from exc


@cli.command("check-symmetry", help="Path-symmetry report with chi per photon-number sector.")
@state_option
@state_file_option
@click.option("--tol", type=float, default=symmetry.DEFAULT_TOL, show_default=True)
@output_option
def check_symmetry(state_spec, state_file, tol, output):
    state = _internal(_load(state_spec, state_file))
    report = symmetry.check(state, tol)
    _emit(_dumps(_nan_free(report.to_dict())), output, "check-symmetry", "json")


@cli.command(help="Closed-form bias phase, the predicted sweet spot, and its verification.")
@state_option
@state_file_option
@click.option("--tol", type=float, default=metrology.CLAIM_TOL, show_default=True)
@output_option
def bias(state_spec, state_file, tol, output):
    state = _internal(_load(state_spec, state_file))
    try:
        report = metrology.bias_phase(state, tol)
    except ValueError as exc:
        raise _metrology_error(exc) from exc
    _emit(_dumps(_nan_free(report.to_dict())), output, "bias", "json")


@cli.command(help="Run oracle, theorem and bound checks over the built-in state catalog.")
@click.option("--max-n", type=click.IntRange(1, 12), default=8, show_default=True,
              help="Largest photon number for N00N/twin-Fock states and oracle sectors.")
@output_option
def verify(max_n, output):
    checks = run_verification(max_n)
    for name, ok, detail in checks:
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    if output:
        doc = [{"check": n, "passed": ok, "detail": d} for n, ok, d in checks]
        _emit(_dumps(doc), output, "verify", "json")
    failed = [n for n, ok, _ in checks if not ok]
    if failed:
        raise _Failure(f"{len(failed)} of {len(checks)} checks failed")
    click.echo(f"all {len(checks)} checks passed")


def _nan_free(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _nan_free(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_nan_free(v) for v in obj]
    return obj


def oracle_deviation(state: TwoModeState, phis: np.ndarray, max_n: int) -> float:
    """Largest gap between the closed-form parity signal and Fock propagation.

    Compared sector by sector (each renormalized) for sectors with at most
    ``max_n`` photons.  Input states enter the oracle before its own first
    beam splitter, so that splitter is checked too.
    """
    internal = _internal(state)
    worst = 0.0
    for raw, inner in zip(state.sectors, internal.sectors):
        if raw.two_j > max_n or raw.norm_sq < 1e-14:
            continue
        single = TwoModeState.build([inner], Stage.INTERNAL)
        ours = np.array([metrology.parity_expectation(single, p) for p in phis])
        start = fock.from_sector(raw.normalized())
        oracle = fock.parity_signal_fock([start], phis, internal=state.stage is Stage.INTERNAL)
        worst = max(worst, float(np.max(np.abs(ours - oracle))))
    return worst


def run_verification(max_n: int) -> list[tuple[str, bool, str]]:
    """The theorem suite behind ``verify``: deterministic, no randomness."""
    results = []
    phis = np.arange(100) * (2 * math.pi / 100)
    for name, built in catalog_mod.catalog(max_n).items():
        worst = oracle_deviation(built, phis, max_n)
        results.append((f"oracle[{name}]", worst < 1e-10, f"max |dQ| = {worst:.2e}"))

        state = _internal(built)
        sym = symmetry.check(state)
        report = metrology.bias_phase(state)
        bound = report.qcrb
        got = report.delta_phi_at_sweet_spot
        rel = math.inf if got is None else abs(got - bound) / bound
        ok = sym.is_path_symmetric and report.claim1_at_sweet_spot and rel < 1e-6
        results.append(
            (f"theorem[{name}]", ok,
             f"phi*={report.sweet_spot_phi:.6f} qcrb={bound:.10g} rel.err={rel:.1e}")
        )
    return results


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="paritymzi", standalone_mode=True)
    except SystemExit as exc:
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
