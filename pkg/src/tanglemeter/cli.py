"""Command-line front end.

Exit codes: 0 on success, 2 on file/config parse errors or unknown state
names, 3 when a reduction fails to converge.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from .classification import classify
from .config import FlowConfig, ToolConfig
from .errors import ConvergenceError, ReconstructionError
from .invariants import invariants3, invariants4
from .measures import k4_from_canonic
from .report import analyze_state
from .sampling import haar_sample, histogram_counts, k4_batch
from .sl_reduction import gammas, reduce_sl
from .states import named_state, read_state_file
from .su_reduction import reduce_su

_PARSE_ERROR = 2
_NONCONVERGED = 3


def _load_config(path):
    if path is None:
        return ToolConfig()
    try:
        return ToolConfig.from_json_file(path)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as err:
        click.echo(f"error: bad config: {err}", err=True)
        sys.exit(_PARSE_ERROR)


def _load_state(source):
    if os.path.exists(source):
        try:
            return read_state_file(source)
        except (OSError, ValueError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(_PARSE_ERROR)
    try:
        return named_state(source)
    except ValueError as err:
        click.echo(f"error: {err} (and no such file exists)", err=True)
        sys.exit(_PARSE_ERROR)


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
def main():
    """Classify and quantify 3- and 4-qubit pure-state entanglement."""


@main.command()
@click.argument("source")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def analyze(source, config_path, out):
    """Full analysis report (JSON) for a state file or named state."""
    config = _load_config(config_path)
    state = _load_state(source)
    try:
        report = analyze_state(state, config, source=source)
    except ConvergenceError as err:
        click.echo(f"error: reduction did not converge: {err}", err=True)
        sys.exit(_NONCONVERGED)
    _emit(report, out)


@main.command()
@click.argument("source")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def invariants(source, config_path, out):
    """Polynomial invariants (JSON) for a state file or named state."""
    config = _load_config(config_path)
    state = _load_state(source).normalized()
    if state.n == 3:
        inv = invariants3(state)
        payload = {
            "n": 3,
            "i1": inv.i1, "i2": inv.i2, "i3": inv.i3,
            "i45": [inv.i45.real, inv.i45.imag],
            "tau": inv.tau,
        }
    elif state.n == 4:
        inv = invariants4(state, tol_radicand=config.tol_radicand)
        payload = {
            "n": 4,
            "i2": [inv.i2.real, inv.i2.imag],
            "i4": [[v.real, v.imag] for v in inv.i4],
            "i6": [[v.real, v.imag] for v in inv.i6],
            "q_roots": [[v.real, v.imag] for v in inv.q_roots],
            "chosen_q": None if inv.chosen_q is None
            else [inv.chosen_q.real, inv.chosen_q.imag],
        }
    else:
        click.echo("error: invariants are defined for n in {3, 4}", err=True)
        sys.exit(_PARSE_ERROR)
    _emit(payload, out)


@main.command(name="classify")
@click.argument("source")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def classify_cmd(source, config_path, out):
    """Entanglement class (JSON) for a four-qubit state."""
    config = _load_config(config_path)
    state = _load_state(source)
    if state.n != 4:
        click.echo("error: classification is defined for n = 4", err=True)
        sys.exit(_PARSE_ERROR)
    try:
        su, _ = reduce_su(state, config.flow)
        spectrum = gammas(su, tol_gamma=config.flow.tol_gamma)
        sl, _ = reduce_sl(su, config.flow)
    except ConvergenceError as err:
        click.echo(f"error: reduction did not converge: {err}", err=True)
        sys.exit(_NONCONVERGED)
    label = classify(sl, spectrum, tol_class=config.tol_class)
    payload = {
        "tag": label.tag,
        "family": sl.family,
        "params": [[p.real, p.imag] for p in label.params],
        "residual": label.residual,
        "masks": list(label.masks),
    }
    _emit(payload, out)


@main.command()
@click.option("--n", "n_qubits", type=int, default=4, show_default=True)
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--workers", type=int, default=1, show_default=True)
def sample(n_qubits, count, seed, out, config_path, workers):
    """Haar-sample states and write per-state measures as CSV."""
    config = _load_config(config_path)
    if n_qubits != 4:
        click.echo("error: per-state measures are wired for n = 4", err=True)
        sys.exit(_PARSE_ERROR)
    values, failures = k4_batch(
        count, seed, n=n_qubits, cfg=config.flow, workers=workers
    )
    lines = ["index,seed,k4,status"]
    for i in range(count):
        if i in values:
            lines.append(f"{i},{seed + i},{values[i]:.12g},ok")
        else:
            lines.append(f"{i},{seed + i},,nonconverged")
    lines.append(f"# seed={seed} count={count} nonconverged={len(failures)}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    click.echo(f"wrote {out}: {len(values)} ok, {len(failures)} nonconverged")


@main.command()
@click.option("--count", type=int, default=10_000, show_default=True)
@click.option("--bins", type=int, default=50, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--workers", type=int, default=1, show_default=True)
def histogram(count, bins, seed, out, config_path, workers):
    """Histogram of the fourpartite measure over Haar samples (CSV)."""
    config = _load_config(config_path)
    values, failures = k4_batch(count, seed, cfg=config.flow, workers=workers)
    edges, counts = histogram_counts(values.values(), bins)
    mode = int(np.argmax(counts))
    mean = float(np.mean(list(values.values()))) if values else float("nan")
    lines = ["bin_low,bin_high,count"]
    for i in range(bins):
        lines.append(f"{edges[i]:.12g},{edges[i + 1]:.12g},{counts[i]}")
    lines.append(
        f"# seed={seed} count={count} nonconverged={len(failures)} "
        f"mode_bin=[{edges[mode]:.12g},{edges[mode + 1]:.12g}] mean={mean:.12g}"
    )
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    click.echo(lines[-1].lstrip("# "))


if __name__ == "__main__":
    main()
