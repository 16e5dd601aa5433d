"""Command-line interface and file handling.

Subcommands: validate, defuzzify, payoff, solve (scripted decisions),
interactive (terminal prompt loop), serve (HTTP service). Problem
arguments take a path to a problem file or the name of a bundled
fixture. Exit codes: 2 bad input file, 3 infeasible model, 1 internal
error.
"""

from __future__ import annotations

import json
import logging
import math
import os
import sys
from typing import Optional

import click

from . import __version__
from .baseline import comparison_csv
from .dialogue import (
    AWAITING,
    Decision,
    REVISE,
    SATISFIED,
    SessionConfig,
    decide,
    open_session,
    replay,
    session_report,
)
from .errors import (
    FileFormatError,
    InfeasibleError,
    It2FgpError,
    NonConvergenceError,
    NoProgressError,
    StructuralError,
)
from .fixtures import FIXTURE_NAMES, fixture_index, load_fixture
from .lpsolve import assemble_fgp, dump_lp
from .nlpcore import NlpConfig, payoff_table, variable_box
from .sigmodel import (
    Program,
    defuzzify_program,
    program_from_json,
    program_to_json,
    validate_program,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_FILE = 2
EXIT_INFEASIBLE = 3

log = logging.getLogger("it2fgp")


def _setup_logging():
    level = os.environ.get("IT2FGP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def round12(obj):
    """Recursively round floats to 12 significant digits for output."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(round12(obj), indent=1)


def load_program(source: str) -> Program:
    """Load a problem from a fixture name or a JSON file path."""
    if source in FIXTURE_NAMES:
        return load_fixture(source)
    try:
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{source} is not valid JSON: {exc}") from exc
    return program_from_json(data)


def load_decisions(path: str) -> list[Decision]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "decisions" not in data:
        raise FileFormatError("decision script needs a top-level 'decisions' list")
    out = []
    for i, d in enumerate(data["decisions"]):
        try:
            out.append(Decision(d["verdict"], tuple(d.get("targets", ()))))
        except (KeyError, TypeError, StructuralError) as exc:
            raise FileFormatError(f"decision[{i}] malformed: {exc}") from exc
    return out


def _nlp_config(seed: int, restarts: int, run_log: Optional[str]) -> NlpConfig:
    return NlpConfig(seed=seed, restarts=restarts, log_path=run_log)


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _print_proposal(s, prop):
    click.echo(f"iteration {prop.iteration}:")
    for name, v in zip(s.crisp_program.variables, prop.x):
        click.echo(f"  {name} = {_fmt(v)}")
    for k, (o, f, mu) in enumerate(zip(s.crisp_program.objectives,
                                       prop.objectives, prop.memberships)):
        label = o.name or f"objective {k}"
        click.echo(f"  [{k}] {label} ({o.sense}): f = {_fmt(f)}  mu = {mu:.3f}")
    click.echo(f"  beta = {prop.beta:.6f}")


@click.group()
@click.version_option(__version__)
def cli():
    """Interactive goal programming for fuzzy multiobjective signomial
    programs."""
    _setup_logging()


@cli.command()
@click.argument("source")
@click.option("--strict-validation", is_flag=True,
              help="Escalate warnings to errors.")
def validate(source, strict_validation):
    """Validate a problem file and print the report."""
    p = load_program(source)
    report = validate_program(p)
    for f in report.findings:
        click.echo(f"{f.severity}: {f.where}: {f.message}")
    if report.ok and not (strict_validation and report.warnings):
        click.echo(f"ok: {len(report.warnings)} warning(s), 0 error(s)")
        return
    raise FileFormatError(
        f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")


@cli.command()
@click.argument("source")
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Write the crisp problem here (default: stdout).")
def defuzzify(source, output):
    """Replace fuzzy coefficients by their expected values."""
    p = load_program(source)
    crisp = defuzzify_program(p)
    text = dumps(program_to_json(crisp))
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {output}")
    else:
        click.echo(text)


@cli.command()
@click.argument("source")
@click.option("--seed", default=42, show_default=True)
@click.option("--restarts", default=64, show_default=True)
@click.option("--run-log", type=click.Path(), default=None,
              help="Append per-restart JSON-lines records here.")
def payoff(source, seed, restarts, run_log):
    """Individual optima of every objective, plus the variable box."""
    p = load_program(source)
    crisp = p if p.is_crisp() else defuzzify_program(p)
    cfg = _nlp_config(seed, restarts, run_log)
    table = payoff_table(crisp, cfg)
    box = variable_box(table)
    header = ["", *(f"max f{k+1}" for k in range(len(table.entries))),
              *(f"min f{k+1}" for k in range(len(table.entries)))]
    click.echo("  ".join(h.rjust(10) for h in header))
    for i, name in enumerate(crisp.variables):
        cells = [e.max_x[i] for e in table.entries] + \
                [e.min_x[i] for e in table.entries]
        click.echo("  ".join([name.rjust(10)] + [_fmt(c).rjust(10) for c in cells]))
    for k, e in enumerate(table.entries):
        click.echo(f"f{k+1} in [{_fmt(e.min_value)}, {_fmt(e.max_value)}]")
    for i, name in enumerate(crisp.variables):
        click.echo(f"{name} in [{_fmt(box.lower[i])}, {_fmt(box.upper[i])}]")


@cli.command()
@click.argument("source")
@click.option("--decisions", "decisions_path", type=click.Path(exists=False),
              default=None, help="JSON decision script for a scripted run.")
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Write the session trace JSON here.")
@click.option("--seed", default=42, show_default=True)
@click.option("--restarts", default=64, show_default=True)
@click.option("--strict-validation", is_flag=True)
@click.option("--dump-lp", "dump_lp_flag", is_flag=True,
              help="Print the assembled goal LP tableau per iteration.")
@click.option("--run-log", type=click.Path(), default=None)
def solve(source, decisions_path, trace_path, seed, restarts,
          strict_validation, dump_lp_flag, run_log):
    """One-shot session driven by a decision script (default: accept the
    first proposal)."""
    p = load_program(source)
    config = SessionConfig(nlp=_nlp_config(seed, restarts, run_log),
                           strict_validation=strict_validation)
    script = load_decisions(decisions_path) if decisions_path \
        else [Decision(SATISFIED)]
    s = replay(p, script, config)
    if s.status == "failed":
        raise InfeasibleError(f"stage {s.failure_stage}: {s.failure_message}")
    for it in s.iterations:
        _print_proposal(s, it.proposal)
        if dump_lp_flag:
            model = assemble_fgp(it.linearizations, s.box,
                                 config.allow_overshoot)
            click.echo(dump_lp(model))
        if it.decision:
            click.echo(f"  decision: {it.decision.to_json()}")
    click.echo(f"status: {s.status}")
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write(dumps(session_report(s)) + "\n")
        click.echo(f"trace written to {trace_path}")


@cli.command()
@click.argument("source")
@click.option("--seed", default=42, show_default=True)
@click.option("--restarts", default=64, show_default=True)
@click.option("--strict-validation", is_flag=True)
def interactive(source, seed, restarts, strict_validation):
    """Terminal prompt loop: accept each proposal or name objectives to
    improve."""
    p = load_program(source)
    config = SessionConfig(nlp=_nlp_config(seed, restarts, None),
                           strict_validation=strict_validation)
    s = open_session(p, config)
    if s.status == "failed":
        raise InfeasibleError(f"stage {s.failure_stage}: {s.failure_message}")
    while s.status == AWAITING:
        _print_proposal(s, s.incumbent)
        if click.confirm("satisfied with this proposal?", default=True):
            decide(s, Decision(SATISFIED))
            break
        raw = click.prompt(
            "objective indices to improve (comma-separated)", default="0")
        try:
            targets = tuple(int(t) for t in raw.replace(",", " ").split())
            decide(s, Decision(REVISE, targets))
        except (ValueError, StructuralError, NoProgressError) as exc:
            click.echo(f"cannot revise: {exc}")
    click.echo("final solution:")
    _print_proposal(s, s.incumbent)


@cli.command()
@click.option("--port", default=8734, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--restarts", default=64, show_default=True)
@click.option("--trace-dir", type=click.Path(), default=None,
              help="Persist a trace file per session in this directory.")
def serve(port, host, seed, restarts, trace_dir):
    """Run the HTTP service for the decision-maker console."""
    import uvicorn

    from .service import create_app

    app = create_app(default_nlp=_nlp_config(seed, restarts, None),
                     trace_dir=trace_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command("fixtures")
def fixtures_cmd():
    """List the bundled example problems."""
    for row in fixture_index():
        click.echo(f"{row['name']}: {row['kind']}, "
                   f"{len(row['variables'])} variables, "
                   f"{len(row['objectives'])} objectives")


@cli.command("compare")
@click.argument("example_id", type=int)
def compare(example_id):
    """Print the stored comparison table (CSV) for example 1 or 2."""
    click.echo(comparison_csv(example_id), nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_BAD_FILE
    except click.Abort:
        return EXIT_INTERNAL
    except (FileFormatError, StructuralError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_BAD_FILE
    except (InfeasibleError, NonConvergenceError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INFEASIBLE
    except It2FgpError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
