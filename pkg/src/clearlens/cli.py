"""Command line front door: serve, one-shot transform, batch eval."""

import os
import sys

import click

from .errors import AllUrlsFailed, ClearlensError
from .evaluator import (
    batch_evaluate,
    effective_rate_percent,
    replay_summary,
    write_csv,
    write_plot_data,
)
from .fetcher import parse_url
from .pipeline import TransformConfig, transform_bytes, transform_url
from .service import SCALE_MAX, SCALE_MIN, load_config
from .style_engine import load_presets


def _fail(message: str, code: int = 1):
    click.echo(f"clearlens: {message}", err=True)
    sys.exit(code)


def _transform_config(config_path, preset_name, scale):
    try:
        service_cfg = load_config(config_path)
        presets = load_presets(service_cfg.presets_path)
    except (ClearlensError, OSError) as exc:
        _fail(str(exc))
    name = preset_name or service_cfg.default_preset
    if name not in presets:
        _fail(f"unknown preset {name!r}; available: {', '.join(sorted(presets))}")
    preset = presets[name]
    if scale is not None:
        preset = preset.scaled(min(SCALE_MAX, max(SCALE_MIN, scale)))
    return TransformConfig(
        preset=preset,
        service_base=service_cfg.public_base,
        fetch=service_cfg.fetch,
    )


@click.group()
def main():
    """Accessibility transcoder: fetch pages and re-skin them in Clear Print."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--listen", help="host:port to bind (overrides config)")
def serve(config_path, listen):
    """Run the HTTP service."""
    from . import service

    env = dict(os.environ)
    if listen:
        env[service.ENV_LISTEN] = listen
    try:
        cfg = service.load_config(config_path, env=env)
        service.run(cfg)
    except (ClearlensError, OSError) as exc:
        _fail(str(exc))


@main.command()
@click.argument("target")
@click.option("--preset", "preset_name", help="preset name from the catalog")
@click.option("--scale", type=float, help="font scale factor (0.75-2.0)")
@click.option("-o", "--out", "out_path", type=click.Path(dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def transform(target, preset_name, scale, out_path, config_path):
    """Transform one URL or local HTML file; result to stdout or -o file."""
    cfg = _transform_config(config_path, preset_name, scale)
    looks_like_file = "://" not in target and (
        os.path.exists(target)
        or target.startswith((".", "/", "~"))
        or target.endswith((".html", ".htm"))
    )
    try:
        if not looks_like_file:
            page = transform_url(parse_url(target), cfg)
        else:
            try:
                with open(target, "rb") as fh:
                    body = fh.read()
            except OSError as exc:
                _fail(f"cannot read {target}: {exc.strerror or exc}")
            page = transform_bytes(body, cfg)
    except ClearlensError as exc:
        _fail(str(exc))
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(page.html)
    else:
        sys.stdout.buffer.write(page.html)
        sys.stdout.buffer.flush()
    s = page.stats
    click.echo(
        f"styles_removed={s.styles_removed} scripts_removed={s.scripts_removed} "
        f"links_rewritten={s.links_rewritten}",
        err=True,
    )


def _read_manifest(path):
    entries = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                label, sep, url = line.partition(",")
                if not sep or not url.strip():
                    _fail(f"{path}:{lineno}: expected 'label,url', got {line!r}")
                entries.append((label.strip(), url.strip()))
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror or exc}")
    return entries


@main.command(name="eval")
@click.option("--urls", "urls_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--replay", is_flag=True, help="summarize an existing report CSV; no fetching")
@click.option("--plots", "plots_dir", type=click.Path(file_okay=False),
              help="also write per-chart TSV files into this directory")
@click.option("--parallelism", type=int, default=4, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def eval_batches(urls_path, out_path, replay, plots_dir, parallelism, config_path):
    """Evaluate a label,url manifest into a report CSV (exit 2 if all fail)."""
    if replay:
        try:
            summary = replay_summary(urls_path)
        except AllUrlsFailed as exc:
            _fail(str(exc))
        except OSError as exc:
            _fail(f"cannot read {urls_path}: {exc.strerror or exc}")
    else:
        entries = _read_manifest(urls_path)
        if not entries:
            _fail(f"{urls_path} has no label,url lines")
        cfg = _transform_config(config_path, None, None)
        try:
            summary = batch_evaluate(entries, cfg, parallelism=parallelism)
        except AllUrlsFailed as exc:
            _fail(str(exc), code=2)
    try:
        write_csv(summary, out_path)
        if plots_dir:
            write_plot_data(summary, plots_dir)
    except OSError as exc:
        _fail(f"cannot write report: {exc.strerror or exc}")
    click.echo(f"rows {len(summary.rows)}")
    if summary.failed_count:
        click.echo(f"failed {summary.failed_count}")
    click.echo(f"mean_nlt {summary.mean_nlt_ms:g}")
    click.echo(f"mean_wlt {summary.mean_wlt_ms:g}")
    click.echo(f"mean_conversion_rate {summary.mean_conversion_rate:g}")
    click.echo(f"effective_conversion_rate {effective_rate_percent(summary)}%")


if __name__ == "__main__":
    main()
