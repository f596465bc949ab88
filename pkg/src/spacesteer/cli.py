"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 provider
failure. click's own usage-error exit code is 2, which would collide with
the validation code, so the group runs in non-standalone mode and ``main``
maps exceptions to codes itself.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analytics
from .board import import_board, parse_board
from .compiler import assemble_prompt, load_default_template, load_template
from .conditions import PRESETS, get_condition
from .errors import GatewayError, SpacesteerError, ValidationError
from .gateway import gateway_from_env
from .harness import RunStore, load_plan, regrade, run_matrix
from .rubric import grade_report, load_default_rubric, load_rubric
from .workspace import deserialize, serialize, validate


@click.group()
@click.version_option(package_name="spacesteer")
def cli() -> None:
    """Steer LLM summarization with sensemaking workspaces."""


@cli.command(name="import")
@click.argument("board_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path),
              required=True, help="Workspace file to write.")
def import_command(board_file: Path, output: Path) -> None:
    """Import a board export into a workspace file."""
    workspace, report = import_board(parse_board(board_file.read_bytes()))
    violations = validate(workspace)
    if violations:
        for v in violations:
            click.echo(f"violation {v.rule} at {v.entity}: {v.message}", err=True)
        raise ValidationError(f"imported workspace has {len(violations)} violations")
    output.write_bytes(serialize(workspace))
    counts = report.counts()
    summary = ", ".join(f"{count} {kind}" for kind, count in sorted(counts.items()))
    click.echo(f"imported {board_file} -> {output} ({summary})")
    for entry in report.skipped():
        click.echo(f"skipped {entry.kind} {entry.element_id}: {entry.reason}", err=True)


@cli.command()
@click.option("-w", "--workspace", "workspace_file", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-c", "--condition", "condition_name", required=True,
              help=f"Condition preset ({', '.join(PRESETS)}).")
@click.option("-t", "--template", "template_file",
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Template file; defaults to the packaged investigation template.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the bundle JSON here instead of stdout.")
def compile(workspace_file: Path, condition_name: str,
            template_file: Path | None, output: Path | None) -> None:
    """Compile a workspace under a condition into a prompt bundle."""
    workspace = deserialize(workspace_file.read_bytes())
    template = load_template(template_file) if template_file else load_default_template()
    bundle = assemble_prompt(workspace, get_condition(condition_name), template)
    text = json.dumps(bundle.to_dict(), ensure_ascii=False, indent=2) + "\n"
    if output:
        output.write_text(text, encoding="utf-8")
        click.echo(f"wrote {output} (digest {bundle.digest()[:12]})")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("-p", "--plan", "plan_file", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--store", "store_root", default="runs", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
def run(plan_file: Path, store_root: Path) -> None:
    """Execute a plan's full condition x replication matrix."""
    plan = load_plan(plan_file)
    store = RunStore(store_root, plan.plan_id)
    gateway = gateway_from_env()
    click.echo(f"plan {plan.plan_id}: {len(plan.conditions)} conditions x "
               f"{plan.replications} replications via {gateway.provider_name}")
    records = run_matrix(plan, gateway, store)
    for record in records:
        score = f"{record.breakdown.percentage}%" if record.breakdown else record.error
        click.echo(f"  {record.condition} r{record.replication:02d} "
                   f"t={record.temperature}: {record.status} {score}")
    failed = sum(1 for r in records if r.status != "ok")
    click.echo(f"{len(records)} runs, {failed} failed -> {store.records_path}")
    if records and failed == len(records):
        # Partial failures are recorded and tolerated; a fully failed
        # matrix almost always means the provider is down or misconfigured.
        raise GatewayError("all runs failed; see the stored records for details")


@cli.command()
@click.option("-r", "--report", "report_file", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-R", "--rubric", "rubric_file",
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Rubric file; defaults to the packaged rubric.")
def grade(report_file: Path, rubric_file: Path | None) -> None:
    """Grade one report file through the two-stage judge."""
    rubric = load_rubric(rubric_file) if rubric_file else load_default_rubric()
    gateway = gateway_from_env()
    result = grade_report(report_file.read_text(encoding="utf-8"), rubric, gateway)
    click.echo(json.dumps(result.breakdown.to_dict(), ensure_ascii=False, indent=2))


@cli.command()
@click.option("-p", "--plan", "plan_id", required=True, help="Plan id inside the store.")
@click.option("--store", "store_root", default="runs", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("-R", "--rubric", "rubric_file",
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("run_ids", nargs=-1)
def regrade_command(plan_id: str, store_root: Path, rubric_file: Path | None,
                    run_ids: tuple[str, ...]) -> None:
    """Re-grade stored outputs (all of a plan's runs, or the given ids)."""
    rubric = load_rubric(rubric_file) if rubric_file else load_default_rubric()
    store = RunStore(store_root, plan_id)
    records = regrade(store, rubric, gateway_from_env(),
                      run_ids=list(run_ids) or None)
    for record in records:
        score = f"{record.breakdown.percentage}%" if record.breakdown else record.error
        click.echo(f"  {record.regrade_of} -> {record.id}: {record.status} {score}")
    click.echo(f"regraded {len(records)} runs")


# click derives "regrade-command" from the function name; keep the plain verb
regrade_command.name = "regrade"


@cli.command()
@click.option("-p", "--plan", "plan_id", required=True)
@click.option("--store", "store_root", default="runs", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("--format", "format_", default="csv", show_default=True,
              type=click.Choice(["csv", "json", "boxplot-json"]))
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path))
def stats(plan_id: str, store_root: Path, format_: str, output: Path | None) -> None:
    """Summarize a plan's stored runs per condition."""
    store = RunStore(store_root, plan_id)
    records = store.load()
    if not records:
        raise ValidationError(f"no records for plan {plan_id!r} under {store_root}")
    summaries = analytics.summarize_all(records)
    data = analytics.export_summaries(summaries, format_)
    if output:
        output.write_bytes(data)
        click.echo(f"wrote {output}")
    else:
        click.echo(data.decode("utf-8"), nl=False)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("-w", "--workspace", "workspace_files", multiple=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Workspace file(s) to serve; id is the file stem.")
@click.option("--store", "store_root", default="runs", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
def serve(host: str, port: int, workspace_files: tuple[Path, ...],
          store_root: Path) -> None:
    """Serve the HTTP API."""
    import uvicorn

    from .service import ApiSession, create_app

    session = ApiSession(store_root=store_root)
    for path in workspace_files:
        workspace_id = session.load_workspace_file(path)
        click.echo(f"loaded workspace {workspace_id!r} from {path}")
    click.echo(f"provider: {session.gateway.provider_name}")
    uvicorn.run(create_app(session), host=host, port=port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and translate outcomes into the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="spacesteer", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except GatewayError as exc:
        click.echo(f"provider failure: {exc}", err=True)
        return 3
    except ValidationError as exc:
        click.echo(f"validation failure: {exc}", err=True)
        return 2
    except SpacesteerError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except SystemExit as exc:  # raised by sys.exit inside commands
        code = exc.code
        return int(code) if isinstance(code, int) else 1
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
