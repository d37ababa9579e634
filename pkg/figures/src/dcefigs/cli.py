"""Batch figure renderer: ``dceslab-figures --job <json>``."""

from __future__ import annotations

import sys

import click

from .csvio import InputError
from .render import load_job, render


@click.command()
@click.option("--job", "job_path", type=click.Path(), required=True,
              help="Plot job description (JSON).")
def main(job_path):
    """Render one plot job (density map or spectrum overlay) to an image."""
    try:
        job = load_job(job_path)
        out = render(job)
    except InputError as exc:
        click.echo(f"job error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"i/o failure: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
