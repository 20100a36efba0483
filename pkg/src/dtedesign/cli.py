"""Command-line interface.

Subcommands: oc, sweep, bpp, boundaries, serve.  Each reads a YAML config
(--config), optionally overriding the seed (--seed) and worker count
(--jobs), and writes one canonical result document (--out, default
stdout).  The service (`serve`) exposes the same runs over HTTP.
"""

import sys

import click

from .bpp import design_stage_bpp
from .config import ConfigError, RunConfig, build_design, load_config
from .oc import run_oc, sweep_designs
from .results import bpp_document, boundaries_document, oc_document, sweep_document


def _apply_overrides(cfg: RunConfig, seed, jobs) -> RunConfig:
    if seed is not None:
        cfg.master_seed = int(seed)
        if "run" in cfg.echo and isinstance(cfg.echo["run"], dict):
            cfg.echo["run"]["master_seed"] = int(seed)
        else:
            cfg.echo.setdefault("run", {})["master_seed"] = int(seed)
    if jobs is not None:
        cfg.workers = int(jobs)
    return cfg


def oc_run_document(cfg: RunConfig) -> str:
    """Single-design operating characteristics (the `oc` subcommand)."""
    design = build_design(cfg)
    summary = run_oc(design, cfg.priors, cfg.n_sims, cfg.master_seed, cfg.workers)
    return oc_document(cfg.echo, cfg.master_seed, design, summary)


def sweep_run_document(cfg: RunConfig) -> str:
    """One-interim design grid plus the no-interim baseline (`sweep`)."""
    if not cfg.sweep_fractions:
        raise ConfigError("sweep.interim_fractions", "missing for the sweep command")
    fractions = list(cfg.sweep_fractions)
    designs = [build_design(cfg, (f, 1.0)) for f in fractions]
    designs.append(build_design(cfg, (1.0,)))
    labels = fractions + [None]
    results = sweep_designs(designs, cfg.priors, cfg.n_sims, cfg.master_seed, cfg.workers)
    rows = [
        (label, design, summary)
        for label, (design, summary) in zip(labels, results)
    ]
    return sweep_document(cfg.echo, cfg.master_seed, rows)


def bpp_run_document(cfg: RunConfig) -> str:
    """Design-stage BPP distributions per fraction (`bpp`)."""
    if not cfg.bpp_fractions:
        raise ConfigError("bpp.information_fraction", "missing for the bpp command")
    entries = []
    for fraction in cfg.bpp_fractions:
        schedule = (fraction, 1.0) if fraction < 1.0 else (1.0,)
        design = build_design(cfg, schedule)
        values, info = design_stage_bpp(
            design,
            cfg.priors,
            fraction,
            cfg.bpp_n_trials,
            cfg.bpp_n_projections,
            cfg.master_seed,
            workers=cfg.workers,
        )
        entries.append((fraction, design, values, info))
    return bpp_document(cfg.echo, cfg.master_seed, entries)


def boundaries_run_document(cfg: RunConfig) -> str:
    design = build_design(cfg)
    return boundaries_document(cfg.echo, cfg.master_seed, design)


_RUNNERS = {
    "oc": oc_run_document,
    "sweep": sweep_run_document,
    "bpp": bpp_run_document,
    "boundaries": boundaries_run_document,
}


def run_command(kind: str, config_path: str, seed=None, jobs=None) -> str:
    cfg = _apply_overrides(load_config(config_path), seed, jobs)
    return _RUNNERS[kind](cfg)


def _emit(doc: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)


_common = [
    click.option("--config", "config_path", required=True, type=click.Path(exists=True)),
    click.option("--seed", type=int, default=None, help="Override run.master_seed."),
    click.option("--out", type=click.Path(), default=None, help="Result file (default stdout)."),
    click.option("--jobs", type=int, default=None, help="Worker processes."),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Design explorer for survival trials with delayed treatment effects."""


def _make_command(kind: str, help_text: str):
    @main.command(name=kind, help=help_text)
    @_with_common
    def _cmd(config_path, seed, out, jobs, _kind=kind):
        try:
            doc = run_command(_kind, config_path, seed, jobs)
        except ConfigError as exc:
            raise click.ClickException(f"invalid config — {exc}") from exc
        _emit(doc, out)

    return _cmd


_make_command("oc", "Operating characteristics of the configured design.")
_make_command("sweep", "Evaluate one-interim designs across sweep.interim_fractions.")
_make_command("bpp", "Design-stage Bayesian predictive probability distributions.")
_make_command("boundaries", "Print the group-sequential boundary table.")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8720, show_default=True, type=int)
@click.option("--jobs", default=2, show_default=True, type=int, help="Concurrent jobs.")
def serve(host, port, jobs):
    """Run the HTTP service that backs the interactive explorer."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(max_workers=jobs), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
