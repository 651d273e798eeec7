"""Command-line interface.

Four subcommands drive the library end to end:

  solve-direction   optimal shrinkage direction for a scenario's (d, prior)
  estimate          apply a scenario's estimator bundle to one observation
  risk-curves       Monte Carlo risk along the scenario's parameter paths
  bounds-table      closed-form risk bounds for the scenario

Exit codes: 0 success, 2 configuration/usage errors, 3 numerical
infeasibility (e.g. no minimax constant exists), 4 I/O failures.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click
import numpy as np

from . import __version__
from .bounds import (
    bayes_proximity_bound,
    bayes_upper_bound,
    c_star_canonical,
    inverse_moment_lower_bound,
    mb2_bayes_risk,
    theorem3_bounds,
    theorem4_bounds,
    worst_case_bound,
)
from .config import list_presets, resolve_config
from .direction import max_value_diagnostic, solve_direction
from .errors import ConfigurationError, ShrinkageError
from .estimators import build_estimator, spherical_minimax_range
from .model import PriorSpec, effective_gamma
from .risk import risk_curve, variance_config

RISK_SCHEMA = f"# schema=hetshrink.risk-curves.v1 version={__version__}"
BOUNDS_SCHEMA = f"# schema=hetshrink.bounds-table.v1 version={__version__}"


def _write_text(path, text: str):
    if path in (None, "-"):
        click.echo(text, nl=False)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _scenario(config: str):
    cfg = resolve_config(config)
    vc = variance_config(cfg.variance_config)
    prior = cfg.prior_spec(vc.p)
    return cfg, vc, prior


def _prior_payload(prior: PriorSpec, p: int):
    g = effective_gamma(prior, p)
    return g if isinstance(g, str) else g.tolist()


@click.group()
@click.version_option(version=__version__, prog_name="hetshrink")
def cli():
    """Minimax shrinkage estimation for heteroscedastic normal means."""


@cli.command("solve-direction")
@click.option("--config", required=True, help="Scenario preset name or config file.")
@click.option("--out", default=None, help="Output file (default stdout).")
def solve_direction_cmd(config, out):
    """Solve for the optimal shrinkage direction of a scenario."""
    cfg, vc, prior = _scenario(config)
    sol = solve_direction(vc.d, prior)
    payload = {
        "name": cfg.name,
        "variance_config": vc.name,
        "d": vc.d.tolist(),
        "prior": _prior_payload(prior, vc.p),
        "nu": sol.nu,
        "c_star": sol.c_star,
        "a_dag": sol.a_dag.tolist(),
        "m_seq": sol.m_seq.tolist(),
        "d_star": sol.d_star.tolist(),
        "max_value_check": max_value_diagnostic(sol, vc.d, prior),
    }
    _write_text(out, _json_dump(payload))


@cli.command("estimate")
@click.option("--config", required=True, help="Scenario preset name or config file.")
@click.option("--x", "x_csv", required=True, help="Observation, comma-separated.")
@click.option("--out", default=None, help="Output file (default stdout).")
def estimate_cmd(config, x_csv, out):
    """Apply the scenario's estimators to a single observation vector."""
    cfg, vc, prior = _scenario(config)
    try:
        x = np.array([float(v) for v in x_csv.split(",")], dtype=float)
    except ValueError:
        raise ConfigurationError(f"could not parse --x value {x_csv!r}") from None
    if x.shape[0] != vc.p:
        raise ConfigurationError(
            f"--x has {x.shape[0]} coordinates, config {vc.name!r} needs {vc.p}"
        )
    if not cfg.estimators:
        raise ConfigurationError(f"scenario {cfg.name!r} lists no estimators")
    results = []
    for spec in cfg.estimators:
        label, est = build_estimator(spec, vc.d, prior)
        entry = {"label": label}
        entry.update(est.estimate(x).to_dict())
        results.append(entry)
    payload = {"name": cfg.name, "variance_config": vc.name, "x": x.tolist(),
               "estimates": results}
    _write_text(out, _json_dump(payload))


def _csv_text(header_comment, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(header_comment + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


@cli.command("risk-curves")
@click.option("--config", required=True, help="Scenario preset name or config file.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--n-rep", type=int, default=None, help="Override replications per point.")
@click.option("--out", default=None, help="Output CSV (default: scenario output_path or stdout).")
def risk_curves_cmd(config, seed, n_rep, out):
    """Monte Carlo risk curves for the scenario's estimator bundle.

    Reruns with the same seed are byte-identical, and all estimators see the
    same draws at each curve point.
    """
    cfg, vc, prior = _scenario(config)
    if not cfg.estimators:
        raise ConfigurationError(f"scenario {cfg.name!r} lists no estimators")
    use_seed = cfg.seed if seed is None else seed
    use_n = cfg.n_rep if n_rep is None else n_rep
    grid = cfg.curve.eta_grid()
    rows = []
    for spec in cfg.estimators:
        label, est = build_estimator(spec, vc.d, prior)
        for kind in cfg.curve.kinds:
            curve = risk_curve(est, kind, vc.d, grid, use_n, use_seed, label)
            rows.extend(curve.csv_rows())
    text = _csv_text(
        RISK_SCHEMA,
        ["estimator", "kind", "eta", "risk", "se", "n_rep", "seed"],
        rows,
    )
    _write_text(out if out is not None else cfg.output_path, text)


def _bounds_rows(d, prior):
    p = d.shape[0]
    sol = solve_direction(d, prior)
    rows = [["baseline", repr(float(np.sum(d))), "yes", "risk of the unbiased rule"]]
    rows.append(["c_star", repr(float(sol.c_star)), "yes", f"nu={sol.nu}"])

    def attempt(name, fn, note=""):
        try:
            value = fn()
        except (ShrinkageError, ValueError, ConfigurationError) as exc:
            rows.append([name, "", "no", str(exc)])
            return
        if hasattr(value, "value"):
            note = "; ".join(value.assumptions) or note
            value = value.value
        rows.append([name, repr(float(value)), "yes", note])

    gamma = effective_gamma(prior, p)
    a = sol.a_dag
    attempt("bayes_upper", lambda: bayes_upper_bound(d, gamma, a))
    attempt("worst_case", lambda: worst_case_bound(d, gamma, a))
    attempt("theorem3_tight", lambda: theorem3_bounds(d, gamma)["tight"])
    attempt("theorem3_loose", lambda: theorem3_bounds(d, gamma)["loose"])
    attempt("theorem4_tight", lambda: theorem4_bounds(d, gamma)["tight"])
    attempt("theorem4_loose", lambda: theorem4_bounds(d, gamma)["loose"])
    attempt("bayes_proximity", lambda: bayes_proximity_bound(d, gamma))
    attempt("mb2_bayes_risk", lambda: mb2_bayes_risk(d, gamma))
    attempt("inverse_moment_lower", lambda: inverse_moment_lower_bound(d, gamma, a))

    spherical = spherical_minimax_range(d)
    c_sph = c_star_canonical(d, np.ones(p))
    if spherical is None:
        rows.append([
            "spherical_c_max", "", "no",
            f"c*(D, I) = {c_sph:.6g} < 0: no spherical rule dominates X",
        ])
    else:
        rows.append(["spherical_c_max", repr(float(spherical[1])), "yes",
                     "largest minimax spherical constant"])
    return rows


@cli.command("bounds-table")
@click.option("--config", required=True, help="Scenario preset name or config file.")
@click.option("--out", default=None, help="Output CSV (default stdout).")
def bounds_table_cmd(config, out):
    """Closed-form risk bounds for the scenario's (d, prior).

    Rows whose hypotheses fail (negative minimax constant, flat prior where
    a finite one is needed) are kept but marked inapplicable.
    """
    cfg, vc, prior = _scenario(config)
    rows = _bounds_rows(vc.d, prior)
    text = _csv_text(BOUNDS_SCHEMA, ["bound", "value", "applicable", "notes"], rows)
    _write_text(out, text)


@cli.command("list")
def list_cmd():
    """List bundled scenario presets."""
    for name in list_presets():
        click.echo(name)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.exceptions.Abort:
        return 130
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except ConfigurationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ShrinkageError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 4


if __name__ == "__main__":
    sys.exit(main())
