"""Command-line interface.

Commands: forward (synthetic gathers), invert (full inversion report),
export-qubo (hand-off file for external annealers), decode (bitstring back
to a model), sweep (spins-per-weight study). Exit codes: 0 success,
2 validation error, 3 solver failure, 4 file/parse error. Flags override the
config file, which overrides defaults; SPINVERT_SEED overrides the default
seed.
"""

from __future__ import annotations

import functools
import json
import math
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import io, plots
from .elastic import AngleSet, ElasticModel, Mode, TimeAxis, make_ricker
from .encoding import SpinAssignment, SpinEncoding
from .errors import FileFormatError, SolverError, ValidationError
from .forward import assemble_operator, forward_model
from .inversion import InversionConfig, invert, spin_sweep
from .qubo import assemble_quadratic, compile_to_ising, export_qubo
from .io import load_wavelet_csv

SEED_ENV_VAR = "SPINVERT_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except SolverError as exc:
            click.echo(f"solver error: {exc}", err=True)
            sys.exit(3)
        except (FileFormatError, OSError) as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _parse_angles(spec: str) -> tuple:
    try:
        angles = tuple(float(tok) for tok in spec.split(","))
    except ValueError:
        raise ValidationError(f"bad angle list {spec!r}")
    if not angles:
        raise ValidationError("at least one angle is required")
    return angles


def _default_half_width(frequency: float, dt: float) -> int:
    # Span +-2/f seconds; the tail there is below 1e-17 of the peak.
    return max(1, math.ceil(2.0 / (frequency * dt)))


def _parse_wavelet_spec(spec: str, dt: float, angles: tuple) -> AngleSet:
    """`ricker:<hz>` or `file:<path>`, one entry or comma-separated per angle."""
    entries = spec.split(",")
    if len(entries) == 1:
        entries = entries * len(angles)
    if len(entries) != len(angles):
        raise ValidationError(
            f"wavelet spec has {len(entries)} entries for {len(angles)} angles"
        )
    wavelets = []
    for entry in entries:
        kind, _, arg = entry.partition(":")
        if kind == "ricker":
            try:
                frequency = float(arg)
            except ValueError:
                raise ValidationError(f"bad ricker frequency in {entry!r}")
            wavelets.append(make_ricker(frequency, dt, _default_half_width(frequency, dt)))
        elif kind == "file":
            if not arg:
                raise ValidationError(f"missing path in {entry!r}")
            wavelets.append(load_wavelet_csv(arg))
        else:
            raise ValidationError(f"unknown wavelet spec {entry!r} (use ricker:<hz> or file:<path>)")
    return AngleSet(angles=angles, wavelets=tuple(wavelets))


def _build_config(config_file, mode: Mode, flag_overrides: dict) -> InversionConfig:
    payload = {"seed": _default_seed(), "mode": mode.value}
    if config_file is not None:
        from_file = io.load_config_json(config_file)
        payload.update(from_file)
        if "mode" in from_file and Mode(from_file["mode"]) is not mode:
            raise ValidationError(
                f"config mode {from_file['mode']!r} does not match the model files ({mode.value})"
            )
        payload["mode"] = mode.value
    payload.update({k: v for k, v in flag_overrides.items() if v is not None})
    return io.config_from_dict(payload)


def _echo_config(config: InversionConfig) -> None:
    click.echo("config: " + json.dumps(io.config_to_dict(config), sort_keys=True))


def _load_inversion_inputs(gather_file, lf_model_file, wavelet_spec, truth_file):
    gather = io.load_gather_csv(gather_file)
    m_lf = io.load_model_csv(lf_model_file)
    wavelets = _parse_wavelet_spec(wavelet_spec, gather.axis.dt, gather.angles)
    truth = io.load_model_csv(truth_file) if truth_file else None
    return gather, m_lf, wavelets, truth


@click.group()
@click.version_option(version=io.TOOL_VERSION, prog_name="spinvert")
def main():
    """Seismic impedance inversion via spin encoding and annealing."""


@main.command("forward")
@click.option("--model", "model_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Truth model CSV (t,vp,vs,rho or t,ip).")
@click.option("--wavelet", "wavelet_spec", default="ricker:30", show_default=True, help="ricker:<hz> or file:<path>, per angle if comma-separated.")
@click.option("--angles", default="0", show_default=True, help="Comma-separated reflection angles in degrees.")
@click.option("--noise-std", type=float, default=0.0, show_default=True, help="Gaussian noise standard deviation.")
@click.option("--seed", type=int, default=None, help="Noise seed (default: SPINVERT_SEED or 0).")
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False), help="Output gather CSV.")
@_handle_errors
def cmd_forward(model_file, wavelet_spec, angles, noise_std, seed, out_file):
    """Compute a synthetic gather from a model."""
    t0 = time.perf_counter()
    model = io.load_model_csv(model_file)
    angle_values = _parse_angles(angles)
    wavelets = _parse_wavelet_spec(wavelet_spec, model.axis.dt, angle_values)
    seed = _default_seed() if seed is None else seed
    op = assemble_operator(model.mode, model.axis, wavelets, model)
    noise = (noise_std, seed) if noise_std > 0 else None
    gather = forward_model(op, model, noise=noise)

    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    io.save_gather_csv(gather, out_file)
    figure = out_file.with_suffix(".png")
    plots.plot_gather(gather, figure)
    manifest_path = out_file.with_suffix(".manifest.json")
    manifest = io.build_manifest(
        command="forward",
        config={
            "model": str(model_file),
            "wavelet": wavelet_spec,
            "angles": angles,
            "noise_std": noise_std,
        },
        inputs=[model_file],
        seed=seed,
        outputs=[out_file, figure],
        timings={"total": time.perf_counter() - t0},
    )
    io.save_manifest(manifest, manifest_path)
    click.echo(f"wrote {out_file} ({len(angle_values)} angles, {model.axis.n_samples} samples)")


_CONFIG_FLAGS = [
    click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Flat JSON config file."),
    click.option("--lambda", "lambda_", type=float, default=None, help="Regularization weight."),
    click.option("--n-spins", type=int, default=None, help="Spins per weight."),
    click.option("--initial-scale", type=float, default=None, help="Initial encoding scale."),
    click.option("--shrink-factor", type=float, default=None, help="Per-epoch scale shrink factor."),
    click.option("--epochs", "n_epochs", type=int, default=None, help="Refinement epochs."),
    click.option("--solver", type=click.Choice(["sa", "exact"]), default=None, help="Solver."),
    click.option("--sweeps", "n_sweeps", type=int, default=None, help="Annealing sweeps."),
    click.option("--restarts", type=int, default=None, help="Annealing restarts."),
    click.option("--seed", type=int, default=None, help="Solver seed (default: SPINVERT_SEED or 0)."),
]


def _with_config_flags(fn):
    for option in reversed(_CONFIG_FLAGS):
        fn = option(fn)
    return fn


def _flag_overrides(lambda_, n_spins, initial_scale, shrink_factor, n_epochs,
                    solver, n_sweeps, restarts, seed) -> dict:
    return {
        "lambda": lambda_,
        "n_spins": n_spins,
        "initial_scale": initial_scale,
        "shrink_factor": shrink_factor,
        "n_epochs": n_epochs,
        "solver": solver,
        "n_sweeps": n_sweeps,
        "restarts": restarts,
        "seed": seed,
    }


@main.command("invert")
@click.option("--gather", "gather_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Observed gather CSV.")
@click.option("--lf-model", "lf_model_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Low-frequency background model CSV.")
@click.option("--wavelet", "wavelet_spec", default="ricker:30", show_default=True, help="Wavelet spec.")
@click.option("--truth", "truth_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Optional truth model CSV for RMS metrics.")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
@click.option("--energy-trace", is_flag=True, default=False, help="Also dump per-sweep solver energies.")
@_with_config_flags
@_handle_errors
def cmd_invert(gather_file, lf_model_file, wavelet_spec, truth_file, out_dir,
               energy_trace, config_file, lambda_, n_spins, initial_scale,
               shrink_factor, n_epochs, solver, n_sweeps, restarts, seed):
    """Invert a gather for impedance profiles."""
    t0 = time.perf_counter()
    mode = io.peek_model_mode(lf_model_file)
    config = _build_config(
        config_file, mode,
        _flag_overrides(lambda_, n_spins, initial_scale, shrink_factor,
                        n_epochs, solver, n_sweeps, restarts, seed),
    )
    _echo_config(config)
    gather, m_lf, wavelets, truth = _load_inversion_inputs(
        gather_file, lf_model_file, wavelet_spec, truth_file
    )
    report = invert(gather, m_lf, wavelets, config, truth=truth)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    impedance_path = out / "impedances.csv"
    model_path = out / "predicted_model.csv"
    epoch_path = out / "epochs.csv"
    impedance_png = out / "impedances.png"
    epoch_png = out / "epochs.png"
    io.save_report_json(report, config, report_path)
    io.save_impedance_csv(report, impedance_path, background=m_lf, truth=truth)
    io.save_model_csv(report.predicted_model, model_path)
    io.save_epoch_csv(report, epoch_path)
    plots.plot_impedances(report, impedance_png, background=m_lf, truth=truth)
    plots.plot_epochs(report, epoch_png)
    outputs = [report_path, impedance_path, model_path, epoch_path,
               impedance_png, epoch_png]
    if energy_trace:
        trace_path = out / "energy_trace.csv"
        io.save_energy_trace_csv(report, trace_path)
        outputs.append(trace_path)

    inputs = [gather_file, lf_model_file]
    if truth_file:
        inputs.append(truth_file)
    timings = dict(report.timings)
    timings["total"] = time.perf_counter() - t0
    manifest = io.build_manifest(
        command="invert",
        config=io.config_to_dict(config),
        inputs=inputs,
        seed=config.seed,
        outputs=outputs,
        timings=timings,
    )
    io.save_manifest(manifest, out / "manifest.json")
    click.echo(f"data misfit: {report.data_misfit_initial:.6g} -> {report.data_misfit_final:.6g}")
    if report.rms_ip is not None:
        rms_is = "" if report.rms_is is None else f", rms_is={report.rms_is:.6g}"
        click.echo(f"rms_ip={report.rms_ip:.6g}{rms_is} (km/s*g/cc)")
    click.echo(f"wrote {report_path}")


@main.command("export-qubo")
@click.option("--gather", "gather_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Observed gather CSV.")
@click.option("--lf-model", "lf_model_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Low-frequency background model CSV.")
@click.option("--wavelet", "wavelet_spec", default="ricker:30", show_default=True, help="Wavelet spec.")
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False), help="Output QUBO coordinate-list file.")
@_with_config_flags
@_handle_errors
def cmd_export_qubo(gather_file, lf_model_file, wavelet_spec, out_file,
                    config_file, lambda_, n_spins, initial_scale, shrink_factor,
                    n_epochs, solver, n_sweeps, restarts, seed):
    """Compile the inversion to a QUBO file for an external annealer."""
    t0 = time.perf_counter()
    mode = io.peek_model_mode(lf_model_file)
    config = _build_config(
        config_file, mode,
        _flag_overrides(lambda_, n_spins, initial_scale, shrink_factor,
                        n_epochs, solver, n_sweeps, restarts, seed),
    )
    _echo_config(config)
    gather, m_lf, wavelets, _ = _load_inversion_inputs(
        gather_file, lf_model_file, wavelet_spec, None
    )
    op = assemble_operator(config.mode, m_lf.axis, wavelets, m_lf)
    m_lf_vec = m_lf.stacked_logs()
    quad = assemble_quadratic(gather, op, m_lf_vec, config.lambda_)
    enc = SpinEncoding(
        n_weights=m_lf_vec.size,
        n_spins=config.n_spins,
        centers=m_lf_vec,
        scales=np.full(m_lf_vec.size, config.initial_scale),
        shrink_factor=config.shrink_factor,
    )
    ising = compile_to_ising(quad, enc)

    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    export_qubo(ising, out_file)
    sidecar = out_file.with_suffix(out_file.suffix + ".encoding.json")
    io.save_encoding_sidecar(sidecar, config.mode, m_lf.axis, enc)
    manifest = io.build_manifest(
        command="export-qubo",
        config=io.config_to_dict(config),
        inputs=[gather_file, lf_model_file],
        seed=config.seed,
        outputs=[out_file, sidecar],
        timings={"total": time.perf_counter() - t0},
    )
    io.save_manifest(manifest, out_file.with_suffix(out_file.suffix + ".manifest.json"))
    click.echo(f"wrote {out_file} ({ising.n_spins_total} variables) and {sidecar}")


@main.command("decode")
@click.option("--encoding", "sidecar_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Sidecar JSON written by export-qubo.")
@click.option("--bits", default=None, help="0/1 bitstring, least index first.")
@click.option("--bits-file", type=click.Path(exists=True, dir_okay=False), default=None, help="File holding the 0/1 bitstring.")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
@_handle_errors
def cmd_decode(sidecar_file, bits, bits_file, out_dir):
    """Decode an external annealer's bitstring into model and impedances."""
    if (bits is None) == (bits_file is None):
        raise ValidationError("provide exactly one of --bits or --bits-file")
    if bits_file is not None:
        bits = Path(bits_file).read_text(encoding="utf-8")
    cleaned = "".join(bits.split())
    if not cleaned or any(c not in "01" for c in cleaned):
        raise ValidationError("bitstring must contain only 0 and 1")
    mode, axis, enc = io.load_encoding_sidecar(sidecar_file)
    if len(cleaned) != enc.total_spins:
        raise ValidationError(
            f"bitstring has {len(cleaned)} bits, encoding needs {enc.total_spins}"
        )
    assignment = SpinAssignment.from_bits(np.array([int(c) for c in cleaned]))
    weights = enc.decode(assignment)
    model = ElasticModel.from_stacked(mode, axis, weights)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "decoded_model.csv"
    io.save_model_csv(model, model_path)
    from .elastic import to_impedances

    ip, is_ = to_impedances(model)
    times = axis.times()
    lines = ["t,ip" + (",is" if is_ is not None else "")]
    for k in range(axis.n_samples):
        row = f"{io.fmt(times[k])},{io.fmt(ip[k])}"
        if is_ is not None:
            row += f",{io.fmt(is_[k])}"
        lines.append(row)
    impedance_path = out / "decoded_impedances.csv"
    impedance_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"wrote {model_path} and {impedance_path}")


@main.command("sweep")
@click.option("--gather", "gather_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Observed gather CSV.")
@click.option("--lf-model", "lf_model_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Low-frequency background model CSV.")
@click.option("--wavelet", "wavelet_spec", default="ricker:30", show_default=True, help="Wavelet spec.")
@click.option("--truth", "truth_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Optional truth model CSV.")
@click.option("--spin-counts", default="1,2,3,4,5,6", show_default=True, help="Comma-separated spins-per-weight settings.")
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False), help="Output sweep CSV.")
@_with_config_flags
@_handle_errors
def cmd_sweep(gather_file, lf_model_file, wavelet_spec, truth_file, spin_counts,
              out_file, config_file, lambda_, n_spins, initial_scale,
              shrink_factor, n_epochs, solver, n_sweeps, restarts, seed):
    """Study accuracy and runtime versus spins per weight."""
    t0 = time.perf_counter()
    mode = io.peek_model_mode(lf_model_file)
    config = _build_config(
        config_file, mode,
        _flag_overrides(lambda_, n_spins, initial_scale, shrink_factor,
                        n_epochs, solver, n_sweeps, restarts, seed),
    )
    _echo_config(config)
    try:
        counts = [int(tok) for tok in spin_counts.split(",")]
    except ValueError:
        raise ValidationError(f"bad spin-counts list {spin_counts!r}")
    gather, m_lf, wavelets, truth = _load_inversion_inputs(
        gather_file, lf_model_file, wavelet_spec, truth_file
    )
    rows = spin_sweep(config, gather, m_lf, wavelets, truth, counts)

    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    io.save_sweep_csv(rows, out_file)
    figure = out_file.with_suffix(".png")
    plots.plot_sweep(rows, figure)
    inputs = [gather_file, lf_model_file]
    if truth_file:
        inputs.append(truth_file)
    manifest = io.build_manifest(
        command="sweep",
        config=io.config_to_dict(config),
        inputs=inputs,
        seed=config.seed,
        outputs=[out_file, figure],
        timings={"total": time.perf_counter() - t0},
    )
    io.save_manifest(manifest, out_file.with_suffix(".manifest.json"))
    click.echo(f"wrote {out_file} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
