"""Command-line interface.

Subcommands: simulate, train, decode, evaluate, estimate-region, tables.
A JSON config file (``--config``) supplies defaults which explicit flags
override; every command takes ``--seed``. Exit codes: 0 success, 1 usage
error, 2 data/format error, 3 numeric failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .detector import (
    detect_lines,
    detect_lines_windowed,
    load_detector,
    save_detector,
    train,
)
from .errors import (
    DataFormatError,
    InsufficientDataError,
    NumericError,
    SymbolRangeError,
)
from .experiments import (
    NOISE_LEVELS,
    ExperimentSpec,
    compare_baseline,
    run_all_tables,
)
from .geometry import TextRegion, discretize_ys, estimate_region
from .hmm import ObservationSequence
from .logs import parse_fixation_csv, write_fixation_csv
from .simulate import SimConfig, simulate_corpus

_CONFIG_SCHEMA = {
    "simulation": {
        "t_line",
        "t_return",
        "sample_hz",
        "n_pages",
        "n_lines",
        "sigma",
        "repeat",
        "repeat_min",
        "repeat_max",
        "noise_corr",
        "seed",
        "include_return_sweep",
    },
    "training": {"max_iters", "tol", "emission_diag"},
    "paths": {"results_dir"},
}


def load_config(path) -> dict:
    """Load and schema-check the JSON config file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DataFormatError(f"{path}: config must be a JSON object")
    for section, entries in data.items():
        if section not in _CONFIG_SCHEMA:
            raise DataFormatError(f"{path}: unknown config section {section!r}")
        if not isinstance(entries, dict):
            raise DataFormatError(f"{path}: section {section!r} must be an object")
        unknown = set(entries) - _CONFIG_SCHEMA[section]
        if unknown:
            raise DataFormatError(
                f"{path}: unknown key {sorted(unknown)[0]!r} in section {section!r}"
            )
    return data


def _cfg(config: dict, section: str, key: str, default=None):
    return config.get(section, {}).get(key, default)


def _pick(flag_value, config: dict, section: str, key: str, default):
    if flag_value is not None:
        return flag_value
    return _cfg(config, section, key, default)


def _sim_config(config: dict, **flags) -> SimConfig:
    """Build a SimConfig from config-file defaults plus flag overrides."""
    repeat = _pick(flags.get("repeat"), config, "simulation", "repeat", False)
    repeat_range = None
    if repeat:
        lo = int(_pick(flags.get("repeat_min"), config, "simulation", "repeat_min", 1))
        hi = int(_pick(flags.get("repeat_max"), config, "simulation", "repeat_max", 5))
        repeat_range = (lo, hi)
    return SimConfig(
        t_line=float(_pick(flags.get("t_line"), config, "simulation", "t_line", 1.0)),
        t_return=float(_pick(flags.get("t_return"), config, "simulation", "t_return", 0.1)),
        sample_hz=float(_pick(flags.get("hz"), config, "simulation", "sample_hz", 60.0)),
        n_pages=int(_pick(flags.get("pages"), config, "simulation", "n_pages", 50)),
        n_lines=int(_pick(flags.get("lines"), config, "simulation", "n_lines", 25)),
        sigma=float(_pick(flags.get("sigma"), config, "simulation", "sigma", 0.2)),
        repeat_range=repeat_range,
        seed=int(_pick(flags.get("seed"), config, "simulation", "seed", 0)),
        noise_corr=float(_pick(flags.get("noise_corr"), config, "simulation", "noise_corr", 0.0)),
        include_return_sweep=bool(
            _pick(
                flags.get("include_return_sweep"),
                config,
                "simulation",
                "include_return_sweep",
                False,
            )
        ),
    )


_config_option = click.option(
    "--config", "config_path", type=click.Path(), default=None, help="JSON config file."
)


@click.group()
def cli():
    """Track the line of text being read from eye-gaze fixation logs."""


@cli.command()
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--sigma", type=float, default=None, help="Noise std in line-widths.")
@click.option("--pages", type=int, default=None, help="Number of pages.")
@click.option("--lines", type=int, default=None, help="Lines per page.")
@click.option("--hz", type=float, default=None, help="Sampling rate (samples/s).")
@click.option("--t-line", type=float, default=None, help="Seconds spent per line.")
@click.option("--t-return", type=float, default=None, help="Seconds per return sweep.")
@click.option("--repeat/--no-repeat", default=None, help="Repeat lines a random number of times.")
@click.option("--repeat-min", type=int, default=None)
@click.option("--repeat-max", type=int, default=None)
@click.option("--noise-corr", type=float, default=None, help="AR(1) noise coefficient.")
@click.option("--include-return-sweep", is_flag=True, default=None)
@click.option("--seed", type=int, default=None)
@_config_option
def simulate(out_dir, config_path, **flags):
    """Generate labeled synthetic reading pages as CSV files."""
    config = load_config(config_path) if config_path else {}
    sim = _sim_config(config, **flags)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pages = simulate_corpus(sim)
    for index, page in enumerate(pages, start=1):
        write_fixation_csv(out / f"page_{index:03d}.csv", page)
    click.echo(f"wrote {len(pages)} pages ({len(pages[0])} samples each at sigma={sim.sigma}) to {out}")


def _load_pages_dir(input_dir: Path, *, require_label: bool):
    files = sorted(input_dir.glob("*.csv"))
    if not files:
        raise DataFormatError(f"{input_dir}: no .csv files found")
    return files, [parse_fixation_csv(f, require_label=require_label) for f in files]


@cli.command("train")
@click.option("--out", "model_path", type=click.Path(), required=True, help="Model file to write.")
@click.option("--input-dir", type=click.Path(), default=None, help="Directory of fixation CSVs.")
@click.option("--sim-sigma", type=float, default=None, help="Train on simulated pages at this noise level.")
@click.option("--lines", type=int, default=None, help="Number of lines.")
@click.option("--pages", type=int, default=None, help="Simulated training pages (with --sim-sigma).")
@click.option("--region", "region_vals", type=float, nargs=4, default=None,
              help="y_top y_bottom x_left x_right (skips region estimation).")
@click.option("--k-sigma", type=float, default=1.9, show_default=True,
              help="Outlier cut for region estimation.")
@click.option("--batch", type=int, default=10, show_default=True,
              help="Extreme-point batch size for region estimation.")
@click.option("--max-iters", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--emission-diag", type=float, default=None,
              help="Diagonal mass of the initial emission guess.")
@click.option("--seed", type=int, default=None)
@_config_option
def train_cmd(model_path, input_dir, sim_sigma, lines, pages, region_vals, k_sigma, batch,
              max_iters, tol, emission_diag, seed, config_path):
    """Train a line-detection model and write it to a file."""
    config = load_config(config_path) if config_path else {}
    max_iters = int(_pick(max_iters, config, "training", "max_iters", 100))
    tol = float(_pick(tol, config, "training", "tol", 1e-4))
    emission_diag = _pick(emission_diag, config, "training", "emission_diag", None)
    if emission_diag is not None:
        emission_diag = float(emission_diag)
    if (input_dir is None) == (sim_sigma is None):
        raise click.UsageError("exactly one of --input-dir or --sim-sigma is required")

    if sim_sigma is not None:
        sim = _sim_config(config, sigma=sim_sigma, lines=lines, pages=pages or 40, seed=seed)
        corpus = simulate_corpus(sim)
        model = train(corpus, max_iters=max_iters, tol=tol, emission_diag=emission_diag)
    else:
        n_lines = _pick(lines, config, "simulation", "n_lines", None)
        if n_lines is None:
            raise click.UsageError("--lines is required with --input-dir")
        n_lines = int(n_lines)
        files, parsed = _load_pages_dir(Path(input_dir), require_label=False)
        if region_vals:
            y_top, y_bottom, x_left, x_right = region_vals
            region = TextRegion(y_top, y_bottom, x_left, x_right, n_lines)
        else:
            every = [f for log in parsed for f in log.fixations()]
            region = estimate_region(every, n_lines, k_sigma=k_sigma, batch=batch)
        sequences = [ObservationSequence(discretize_ys(log.ys, region)) for log in parsed]
        model = train(sequences, n_lines, region=region, max_iters=max_iters, tol=tol,
                      emission_diag=emission_diag)
        click.echo(f"trained on {len(files)} pages from {input_dir}")

    save_detector(model, model_path)
    click.echo(f"model written to {model_path}")


@cli.command()
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--input", "input_path", type=click.Path(), required=True, help="Fixation CSV.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Predictions CSV.")
@click.option("--window", type=int, default=0, show_default=True,
              help="Sliding-window size; 0 decodes the whole batch at once.")
@click.option("--seed", type=int, default=None, hidden=True)
def decode(model_path, input_path, out_path, window, seed):
    """Estimate the line behind every sample of a fixation log."""
    model = load_detector(model_path)
    log = parse_fixation_csv(input_path)
    if log.labels is not None and log.labels.max() > model.n_lines:
        raise SymbolRangeError(
            f"label {int(log.labels.max())} out of range for a {model.n_lines}-line model"
        )
    obs = ObservationSequence(discretize_ys(log.ys, model.region))
    if window > 0:
        path = detect_lines_windowed(model, obs, window=window)
    else:
        path = detect_lines(model, obs)
    if out_path:
        lines_text = ["t,line"]
        lines_text += [f"{float(t)!r},{s}" for t, s in zip(log.times, path.states)]
        Path(out_path).write_text("\n".join(lines_text) + "\n", encoding="utf-8")
        click.echo(f"predictions written to {out_path}")
    if log.labels is not None:
        from .detector import page_error

        click.echo(f"e_p = {page_error(path, log.labels):.4f}%")


@cli.command()
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--input-dir", type=click.Path(), required=True, help="Directory of labeled CSVs.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Report CSV.")
@click.option("--seed", type=int, default=None, hidden=True)
def evaluate(model_path, input_dir, out_path, seed):
    """Compare raw-discretizer and HMM errors over labeled pages."""
    model = load_detector(model_path)
    files, parsed = _load_pages_dir(Path(input_dir), require_label=True)
    pages = [log.to_page(model.region) for log in parsed]
    base, hmm = compare_baseline(pages, model)
    rows = ["page,file,e_discretizer,e_hmm"]
    for i, (f, b, h) in enumerate(zip(files, base.per_page_error, hmm.per_page_error), start=1):
        rows.append(f"{i},{f.name},{b:.6f},{h:.6f}")
    if out_path:
        Path(out_path).write_text("\n".join(rows) + "\n", encoding="utf-8")
        click.echo(f"report written to {out_path}")
    click.echo(f"discretizer-only e_avg = {base.average_error:.4f}%")
    click.echo(f"hmm e_avg = {hmm.average_error:.4f}%")


@cli.command("estimate-region")
@click.option("--input", "input_path", type=click.Path(), required=True, help="Fixation CSV.")
@click.option("--lines", type=int, required=True, help="Number of lines in the region.")
@click.option("--k-sigma", type=float, default=1.9, show_default=True)
@click.option("--batch", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=None, hidden=True)
def estimate_region_cmd(input_path, lines, k_sigma, batch, seed):
    """Estimate the text region from a fixation log and print it."""
    log = parse_fixation_csv(input_path)
    region = estimate_region(log.fixations(), lines, k_sigma=k_sigma, batch=batch)
    click.echo(f"y_top={region.y_top!r}")
    click.echo(f"y_bottom={region.y_bottom!r}")
    click.echo(f"x_left={region.x_left!r}")
    click.echo(f"x_right={region.x_right!r}")
    click.echo(f"n_lines={region.n_lines}")


@cli.command()
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Results directory (default from config, else ./results).")
@click.option("--seed", type=int, default=None)
@click.option("--noise-levels", type=str, default=None,
              help="Comma-separated noise levels; default is the full ladder.")
@click.option("--pages", type=int, default=None, help="Corpus size per level.")
@click.option("--train-pages", type=int, default=None)
@click.option("--test-pages", type=int, default=None)
@click.option("--lines", type=int, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--tol", type=float, default=None)
@_config_option
def tables(out_dir, seed, noise_levels, pages, train_pages, test_pages, lines,
           max_iters, tol, config_path):
    """Run the full two-scenario noise sweep and write summary.csv."""
    config = load_config(config_path) if config_path else {}
    out = Path(out_dir or _cfg(config, "paths", "results_dir", "results"))
    if noise_levels is not None:
        try:
            levels = tuple(float(v) for v in noise_levels.split(",") if v.strip())
        except ValueError as exc:
            raise click.UsageError(f"invalid --noise-levels: {exc}")
        if not levels:
            raise click.UsageError("--noise-levels must name at least one level")
    else:
        levels = NOISE_LEVELS
    sim = _sim_config(config, pages=pages, lines=lines, seed=seed)
    spec = ExperimentSpec(
        scenario="no_repeat",
        sim=sim,
        noise_levels=levels,
        train_pages=train_pages if train_pages is not None else 40,
        test_pages=test_pages if test_pages is not None else 10,
        seed=sim.seed,
        max_iters=int(_pick(max_iters, config, "training", "max_iters", 2)),
        tol=float(_pick(tol, config, "training", "tol", 1e-4)),
    )
    results = run_all_tables(spec, out)
    click.echo(f"{'scenario':<15}{'sigma':>8}{'e_avg %':>12}")
    for scenario, table in results.items():
        for sigma, e_avg in table:
            click.echo(f"{scenario:<15}{sigma:>8}{e_avg:>12.4f}")
    click.echo(f"summary written to {out / 'summary.csv'}")


def main(argv=None) -> int:
    """Run the CLI, mapping exceptions to the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (DataFormatError, InsufficientDataError, SymbolRangeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except NumericError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
