"""File formats: model/wavelet/gather CSVs, report JSON, manifests, QUBO sidecars.

All floats are serialized with 17 significant digits so a save/load round
trip reproduces the binary values. Parse failures report path and line
number.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .elastic import ElasticModel, Mode, TimeAxis, Wavelet
from .encoding import SpinEncoding
from .errors import FileFormatError, ValidationError
from .forward import SeismicGather
from .inversion import InversionConfig, InversionReport, SweepRow
from .solvers import SolverId

TOOL_VERSION = "0.1.0"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(token: str, path, lineno: int, column: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise FileFormatError(f"{path}:{lineno}: bad {column} value {token!r}") from exc


def _read_rows(path, expected_header: str):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line
            if header != expected_header:
                raise FileFormatError(
                    f"{path}:{lineno}: expected header {expected_header!r}, got {header!r}"
                )
            continue
        rows.append((lineno, line.split(",")))
    if header is None:
        raise FileFormatError(f"{path}: empty file, expected header {expected_header!r}")
    return rows


def _axis_from_times(times, path) -> TimeAxis:
    t = np.asarray(times, dtype=np.float64)
    if t.size < 2:
        raise FileFormatError(f"{path}: need at least 2 samples")
    dt = t[1] - t[0]
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise FileFormatError(f"{path}: time column must be uniformly increasing")
    return TimeAxis(n_samples=t.size, dt=float(dt))


# -- elastic models -----------------------------------------------------------

def save_model_csv(model: ElasticModel, path) -> None:
    """Model CSV holds linear (not log) values: t,vp,vs,rho or t,ip."""
    times = model.axis.times()
    lines = []
    if model.mode is Mode.PRE_STACK:
        lines.append("t,vp,vs,rho")
        vp, vs, rho = np.exp(model.ln_vp), np.exp(model.ln_vs), np.exp(model.ln_rho)
        for k in range(model.axis.n_samples):
            lines.append(f"{fmt(times[k])},{fmt(vp[k])},{fmt(vs[k])},{fmt(rho[k])}")
    else:
        lines.append("t,ip")
        ip = np.exp(model.ln_ip)
        for k in range(model.axis.n_samples):
            lines.append(f"{fmt(times[k])},{fmt(ip[k])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def peek_model_mode(path) -> Mode:
    """Mode implied by the header of a model CSV."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                stripped = line.strip()
                if stripped and not stripped.startswith("#"):
                    break
            else:
                stripped = ""
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    if stripped == "t,vp,vs,rho":
        return Mode.PRE_STACK
    if stripped == "t,ip":
        return Mode.POST_STACK
    raise FileFormatError(f"{path}:1: unrecognized model header {stripped!r}")


def load_model_csv(path) -> ElasticModel:
    mode = peek_model_mode(path)
    expected = "t,vp,vs,rho" if mode is Mode.PRE_STACK else "t,ip"
    rows = _read_rows(path, expected)
    n_cols = 4 if mode is Mode.PRE_STACK else 2
    times = []
    columns = [[] for _ in range(n_cols - 1)]
    for lineno, fields in rows:
        if len(fields) != n_cols:
            raise FileFormatError(f"{path}:{lineno}: expected {n_cols} columns")
        times.append(_parse_float(fields[0], path, lineno, "t"))
        for c in range(1, n_cols):
            value = _parse_float(fields[c], path, lineno, expected.split(",")[c])
            if value <= 0:
                raise FileFormatError(
                    f"{path}:{lineno}: {expected.split(',')[c]} must be positive"
                )
            columns[c - 1].append(value)
    axis = _axis_from_times(times, path)
    if mode is Mode.PRE_STACK:
        vp, vs, rho = (np.asarray(col) for col in columns)
        if np.any(vs >= vp):
            raise FileFormatError(f"{path}: Vs must be strictly below Vp")
        return ElasticModel.pre_stack(axis, np.log(vp), np.log(vs), np.log(rho))
    return ElasticModel.post_stack(axis, np.log(np.asarray(columns[0])))


# -- wavelets ------------------------------------------------------------------

def save_wavelet_csv(wavelet: Wavelet, dt: float, path) -> None:
    lines = [f"# center_index={wavelet.center_index}", "t,amplitude"]
    for k, value in enumerate(wavelet.samples):
        t = (k - wavelet.center_index) * dt
        lines.append(f"{fmt(t)},{fmt(value)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_wavelet_csv(path) -> Wavelet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    center_index = None
    header_seen = False
    samples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("center_index="):
                try:
                    center_index = int(body.split("=", 1)[1])
                except ValueError as exc:
                    raise FileFormatError(f"{path}:{lineno}: bad center_index") from exc
            continue
        if not header_seen:
            if line != "t,amplitude":
                raise FileFormatError(f"{path}:{lineno}: expected header 't,amplitude'")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise FileFormatError(f"{path}:{lineno}: expected 2 columns")
        samples.append(_parse_float(fields[1], path, lineno, "amplitude"))
    if center_index is None:
        raise FileFormatError(f"{path}: missing '# center_index=' comment")
    if not samples:
        raise FileFormatError(f"{path}: wavelet has no samples")
    try:
        return Wavelet(samples=np.asarray(samples), center_index=center_index)
    except ValidationError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


# -- gathers -------------------------------------------------------------------

def save_gather_csv(gather: SeismicGather, path) -> None:
    times = gather.axis.times()
    lines = ["t,angle,amplitude"]
    for i, angle in enumerate(gather.angles):
        for k in range(gather.axis.n_samples):
            lines.append(f"{fmt(times[k])},{fmt(angle)},{fmt(gather.traces[i, k])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_gather_csv(path) -> SeismicGather:
    rows = _read_rows(path, "t,angle,amplitude")
    by_angle: dict[float, list] = {}
    times_by_angle: dict[float, list] = {}
    for lineno, fields in rows:
        if len(fields) != 3:
            raise FileFormatError(f"{path}:{lineno}: expected 3 columns")
        t = _parse_float(fields[0], path, lineno, "t")
        angle = _parse_float(fields[1], path, lineno, "angle")
        amp = _parse_float(fields[2], path, lineno, "amplitude")
        by_angle.setdefault(angle, []).append(amp)
        times_by_angle.setdefault(angle, []).append(t)
    if not by_angle:
        raise FileFormatError(f"{path}: gather has no rows")
    angles = sorted(by_angle)
    reference_times = times_by_angle[angles[0]]
    axis = _axis_from_times(reference_times, path)
    traces = []
    for angle in angles:
        if len(by_angle[angle]) != axis.n_samples:
            raise FileFormatError(f"{path}: angle {angle} has an inconsistent sample count")
        if not np.allclose(times_by_angle[angle], reference_times, rtol=0.0, atol=1e-12):
            raise FileFormatError(f"{path}: angle {angle} has a mismatched time axis")
        traces.append(by_angle[angle])
    return SeismicGather(axis=axis, angles=tuple(angles), traces=np.asarray(traces))


# -- configs -------------------------------------------------------------------

_CONFIG_KEYS = {
    "mode", "lambda", "n_spins", "initial_scale", "shrink_factor", "n_epochs",
    "solver", "t_initial", "t_final", "n_sweeps", "moves_per_sweep", "restarts",
    "seed", "smoothing_window", "exact_cap",
}


def config_to_dict(config: InversionConfig) -> dict:
    return {
        "mode": config.mode.value,
        "lambda": config.lambda_,
        "n_spins": config.n_spins,
        "initial_scale": config.initial_scale,
        "shrink_factor": config.shrink_factor,
        "n_epochs": config.n_epochs,
        "solver": config.solver.value,
        "t_initial": config.t_initial,
        "t_final": config.t_final,
        "n_sweeps": config.n_sweeps,
        "moves_per_sweep": config.moves_per_sweep,
        "restarts": config.restarts,
        "seed": config.seed,
        "smoothing_window": config.smoothing_window,
        "exact_cap": config.exact_cap,
    }


def config_from_dict(payload: dict) -> InversionConfig:
    unknown = set(payload) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(payload)
    if "mode" in kwargs:
        kwargs["mode"] = Mode(kwargs["mode"])
    if "lambda" in kwargs:
        kwargs["lambda_"] = float(kwargs.pop("lambda"))
    if "solver" in kwargs:
        kwargs["solver"] = SolverId(kwargs["solver"])
    try:
        return InversionConfig(**kwargs)
    except TypeError as exc:
        raise ValidationError(str(exc)) from exc


def load_config_json(path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise FileFormatError(f"{path}: config must be a flat JSON object")
    return payload


# -- reports -------------------------------------------------------------------

def report_to_dict(report: InversionReport, config: InversionConfig) -> dict:
    """JSON view of a report. Wall-clock timings stay in the manifest so
    rerunning with the same seed reproduces this file byte for byte."""
    model = report.predicted_model
    payload = {
        "mode": model.mode.value,
        "n_samples": model.axis.n_samples,
        "dt": model.axis.dt,
        "config": config_to_dict(config),
        "predicted_ip": [float(v) for v in report.predicted_ip],
        "predicted_is": (
            None if report.predicted_is is None
            else [float(v) for v in report.predicted_is]
        ),
        "rms_ip": report.rms_ip,
        "rms_is": report.rms_is,
        "data_misfit_initial": report.data_misfit_initial,
        "data_misfit_final": report.data_misfit_final,
        "objective_per_epoch": [float(v) for v in report.objective_per_epoch],
    }
    if report.rms_ip is None:
        payload.pop("rms_ip")
        payload.pop("rms_is")
    return payload


def save_report_json(report: InversionReport, config: InversionConfig, path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report, config), indent=2) + "\n", encoding="utf-8"
    )


def save_impedance_csv(report: InversionReport, path,
                       background: ElasticModel | None = None,
                       truth: ElasticModel | None = None) -> None:
    from .elastic import to_impedances

    model = report.predicted_model
    times = model.axis.times()
    columns = [("t", times), ("predicted_ip", report.predicted_ip)]
    if report.predicted_is is not None:
        columns.append(("predicted_is", report.predicted_is))
    for label, extra in (("background", background), ("truth", truth)):
        if extra is not None:
            ip, is_ = to_impedances(extra)
            columns.append((f"{label}_ip", ip))
            if is_ is not None:
                columns.append((f"{label}_is", is_))
    lines = [",".join(name for name, _ in columns)]
    for k in range(model.axis.n_samples):
        lines.append(",".join(fmt(values[k]) for _, values in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_epoch_csv(report: InversionReport, path) -> None:
    lines = ["epoch,objective"]
    for k, value in enumerate(report.objective_per_epoch, start=1):
        lines.append(f"{k},{fmt(value)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_energy_trace_csv(report: InversionReport, path) -> None:
    """Best-so-far solver energies: one row per (epoch, restart, sweep)."""
    lines = ["epoch,restart,sweep,best_energy"]
    for e, record in enumerate(report.epochs, start=1):
        for r, trace in enumerate(record.result.energy_trace):
            for s, value in enumerate(trace, start=1):
                lines.append(f"{e},{r},{s},{fmt(value)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_sweep_csv(rows: list[SweepRow], path) -> None:
    lines = ["n_spins,runtime_s,solver_time_s,objective,rms_ip,rms_is"]
    for row in rows:
        rms_ip = "" if row.rms_ip is None else fmt(row.rms_ip)
        rms_is = "" if row.rms_is is None else fmt(row.rms_is)
        lines.append(
            f"{row.n_spins},{fmt(row.runtime_s)},{fmt(row.solver_time_s)},"
            f"{fmt(row.objective)},{rms_ip},{rms_is}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- spin-encoding sidecar -----------------------------------------------------

def save_encoding_sidecar(path, mode: Mode, axis: TimeAxis, enc: SpinEncoding) -> None:
    """Everything an external solver's bitstring needs to become a model."""
    payload = {
        "mode": mode.value,
        "n_samples": axis.n_samples,
        "dt": axis.dt,
        "encoding": {
            "n_weights": enc.n_weights,
            "n_spins": enc.n_spins,
            "centers": [float(v) for v in enc.centers],
            "scales": [float(v) for v in enc.scales],
            "shrink_factor": enc.shrink_factor,
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_encoding_sidecar(path):
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    try:
        mode = Mode(payload["mode"])
        axis = TimeAxis(n_samples=int(payload["n_samples"]), dt=float(payload["dt"]))
        enc_payload = payload["encoding"]
        enc = SpinEncoding(
            n_weights=int(enc_payload["n_weights"]),
            n_spins=int(enc_payload["n_spins"]),
            centers=np.asarray(enc_payload["centers"], dtype=np.float64),
            scales=np.asarray(enc_payload["scales"], dtype=np.float64),
            shrink_factor=float(enc_payload["shrink_factor"]),
        )
    except (KeyError, ValueError, ValidationError) as exc:
        raise FileFormatError(f"{path}: invalid sidecar: {exc}") from exc
    return mode, axis, enc


# -- manifests -----------------------------------------------------------------

def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(command: str, config: dict, inputs, seed: int,
                   outputs, timings: dict) -> dict:
    return {
        "tool": "spinvert",
        "version": TOOL_VERSION,
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": {str(p): file_digest(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "timings_s": {k: float(v) for k, v in timings.items()},
    }


def save_manifest(manifest: dict, path) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
