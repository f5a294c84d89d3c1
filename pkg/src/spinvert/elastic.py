"""Subsurface model types, wavelets, angle sets, and synthetic model builders.

Elastic models are stored in log space: pre-stack models carry per-sample
ln Vp, ln Vs, ln rho (velocities in km/s, density in g/cc), post-stack
models carry ln Ip (acoustic impedance, km/s*g/cc). Log storage keeps the
convolutional forward model linear in the unknowns.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


class Mode(enum.Enum):
    """Acquisition/inversion mode."""

    PRE_STACK = "prestack"
    POST_STACK = "poststack"


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TimeAxis:
    """Uniform two-way-time sampling: `n_samples` points spaced `dt` seconds."""

    n_samples: int
    dt: float

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValidationError("n_samples must be at least 2")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError("dt must be a positive finite number")

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt


@dataclass(frozen=True, eq=False)
class ElasticModel:
    """Per-sample log elastic parameters on a time axis.

    Pre-stack mode stores ln_vp, ln_vs, ln_rho; post-stack mode stores ln_ip.
    Unused fields are None.
    """

    mode: Mode
    axis: TimeAxis
    ln_vp: np.ndarray | None = None
    ln_vs: np.ndarray | None = None
    ln_rho: np.ndarray | None = None
    ln_ip: np.ndarray | None = None

    def __post_init__(self):
        n = self.axis.n_samples
        if self.mode is Mode.PRE_STACK:
            if self.ln_vp is None or self.ln_vs is None or self.ln_rho is None:
                raise ValidationError("pre-stack model requires ln_vp, ln_vs, ln_rho")
            if self.ln_ip is not None:
                raise ValidationError("pre-stack model must not carry ln_ip")
            for name in ("ln_vp", "ln_vs", "ln_rho"):
                vec = _as_vector(getattr(self, name), name)
                if vec.size != n:
                    raise ValidationError(f"{name} must have length {n}")
                object.__setattr__(self, name, vec)
        else:
            if self.ln_ip is None:
                raise ValidationError("post-stack model requires ln_ip")
            if any(v is not None for v in (self.ln_vp, self.ln_vs, self.ln_rho)):
                raise ValidationError("post-stack model carries only ln_ip")
            vec = _as_vector(self.ln_ip, "ln_ip")
            if vec.size != n:
                raise ValidationError(f"ln_ip must have length {n}")
            object.__setattr__(self, "ln_ip", vec)

    @classmethod
    def pre_stack(cls, axis: TimeAxis, ln_vp, ln_vs, ln_rho) -> "ElasticModel":
        return cls(Mode.PRE_STACK, axis, ln_vp=ln_vp, ln_vs=ln_vs, ln_rho=ln_rho)

    @classmethod
    def post_stack(cls, axis: TimeAxis, ln_ip) -> "ElasticModel":
        return cls(Mode.POST_STACK, axis, ln_ip=ln_ip)

    @property
    def n_parameters(self) -> int:
        """Length of the stacked unknown vector: 3n pre-stack, n post-stack."""
        n = self.axis.n_samples
        return 3 * n if self.mode is Mode.PRE_STACK else n

    def stacked_logs(self) -> np.ndarray:
        """Unknown vector in solver order: [ln_vp, ln_vs, ln_rho] or [ln_ip]."""
        if self.mode is Mode.PRE_STACK:
            return np.concatenate([self.ln_vp, self.ln_vs, self.ln_rho])
        return self.ln_ip.copy()

    @classmethod
    def from_stacked(cls, mode: Mode, axis: TimeAxis, vector) -> "ElasticModel":
        """Rebuild a model from a stacked log vector (inverse of stacked_logs)."""
        vec = np.asarray(vector, dtype=np.float64)
        n = axis.n_samples
        if mode is Mode.PRE_STACK:
            if vec.size != 3 * n:
                raise ValidationError(f"expected {3 * n} stacked values, got {vec.size}")
            return cls.pre_stack(axis, vec[:n], vec[n:2 * n], vec[2 * n:])
        if vec.size != n:
            raise ValidationError(f"expected {n} stacked values, got {vec.size}")
        return cls.post_stack(axis, vec)


@dataclass(frozen=True, eq=False)
class Wavelet:
    """Sampled source pulse with time zero at `center_index`.

    The constructor rescales so the peak absolute amplitude is exactly 1.
    """

    samples: np.ndarray
    center_index: int

    def __post_init__(self):
        vec = _as_vector(self.samples, "samples")
        if vec.size == 0:
            raise ValidationError("wavelet must have at least one sample")
        if not (0 <= self.center_index < vec.size):
            raise ValidationError("center_index out of range")
        peak = np.max(np.abs(vec))
        if peak == 0.0:
            raise ValidationError("wavelet is identically zero")
        normalized = vec / peak
        normalized.flags.writeable = False
        object.__setattr__(self, "samples", normalized)


@dataclass(frozen=True, eq=False)
class AngleSet:
    """Reflection angles in degrees with one wavelet per angle."""

    angles: tuple
    wavelets: tuple

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if len(angles) == 0:
            raise ValidationError("at least one angle is required")
        if any(not (0.0 <= a < 45.0) for a in angles):
            raise ValidationError("angles must lie in [0, 45) degrees")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValidationError("angles must be strictly increasing")
        wavelets = tuple(self.wavelets)
        if len(wavelets) != len(angles):
            raise ValidationError("one wavelet required per angle")
        if not all(isinstance(w, Wavelet) for w in wavelets):
            raise ValidationError("wavelets must be Wavelet instances")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "wavelets", wavelets)

    def __len__(self) -> int:
        return len(self.angles)

    def validate_for_mode(self, mode: Mode) -> None:
        if mode is Mode.POST_STACK and self.angles != (0.0,):
            raise ValidationError("post-stack mode requires the single angle 0")


def make_ricker(peak_frequency: float, dt: float, half_width: int) -> Wavelet:
    """Ricker wavelet (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2) on t = k*dt.

    Samples run k = -half_width..half_width, so the returned wavelet has
    2*half_width + 1 samples with time zero (the unit peak) at index
    half_width. peak_frequency must sit below Nyquist, 1/(2*dt).
    """
    if not (peak_frequency > 0 and math.isfinite(peak_frequency)):
        raise ValidationError("peak_frequency must be positive")
    if not (dt > 0 and math.isfinite(dt)):
        raise ValidationError("dt must be positive")
    if half_width < 1:
        raise ValidationError("half_width must be at least 1")
    nyquist = 1.0 / (2.0 * dt)
    if peak_frequency >= nyquist:
        raise ValidationError(
            f"peak_frequency {peak_frequency} Hz is at or above Nyquist {nyquist} Hz"
        )
    t = np.arange(-half_width, half_width + 1) * dt
    arg = (np.pi * peak_frequency * t) ** 2
    samples = (1.0 - 2.0 * arg) * np.exp(-arg)
    return Wavelet(samples=samples, center_index=half_width)


def make_blocky_model(layer_boundaries, layer_values, axis: TimeAxis) -> ElasticModel:
    """Piecewise-constant pre-stack model from layer property triples.

    `layer_boundaries` are the sample indices where layers 1..L-1 start
    (strictly increasing, within [0, n_samples]); `layer_values` is one
    (vp km/s, vs km/s, rho g/cc) triple per layer, len(boundaries) + 1 total.
    """
    boundaries = [int(b) for b in layer_boundaries]
    values = [tuple(float(x) for x in v) for v in layer_values]
    if len(values) != len(boundaries) + 1:
        raise ValidationError("need exactly one value triple per layer")
    if any(b2 <= b1 for b1, b2 in zip(boundaries, boundaries[1:])):
        raise ValidationError("layer boundaries must be strictly increasing")
    if any(not (0 <= b <= axis.n_samples) for b in boundaries):
        raise ValidationError("layer boundaries must lie within the trace")
    for vp, vs, rho in values:
        if not (vp > 0 and vs > 0 and rho > 0):
            raise ValidationError("layer properties must be strictly positive")
        if vs >= vp:
            raise ValidationError("Vs must be strictly less than Vp")
    edges = [0, *boundaries, axis.n_samples]
    ln_vp = np.empty(axis.n_samples)
    ln_vs = np.empty(axis.n_samples)
    ln_rho = np.empty(axis.n_samples)
    for (vp, vs, rho), lo, hi in zip(values, edges[:-1], edges[1:]):
        ln_vp[lo:hi] = math.log(vp)
        ln_vs[lo:hi] = math.log(vs)
        ln_rho[lo:hi] = math.log(rho)
    return ElasticModel.pre_stack(axis, ln_vp, ln_vs, ln_rho)


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    # Centered average with edge replication so trace ends keep their level.
    half = (window - 1) // 2
    padded = np.concatenate([np.full(half, values[0]), values, np.full(half, values[-1])])
    return np.convolve(padded, np.full(window, 1.0 / window), mode="valid")


def low_frequency_model(truth: ElasticModel, smoothing_window: int) -> ElasticModel:
    """Background trend: centered moving average of each log sequence.

    The window must be odd and between 1 and n_samples; edges are padded by
    replication.
    """
    n = truth.axis.n_samples
    if smoothing_window % 2 == 0:
        raise ValidationError("smoothing_window must be odd")
    if not (1 <= smoothing_window <= n):
        raise ValidationError(f"smoothing_window must be in [1, {n}]")
    if truth.mode is Mode.PRE_STACK:
        return ElasticModel.pre_stack(
            truth.axis,
            _moving_average(truth.ln_vp, smoothing_window),
            _moving_average(truth.ln_vs, smoothing_window),
            _moving_average(truth.ln_rho, smoothing_window),
        )
    return ElasticModel.post_stack(truth.axis, _moving_average(truth.ln_ip, smoothing_window))


def to_impedances(model: ElasticModel):
    """P- and S-impedance profiles (km/s*g/cc).

    Pre-stack: (Vp*rho, Vs*rho). Post-stack: (Ip, None).
    """
    if model.mode is Mode.PRE_STACK:
        ip = np.exp(model.ln_vp + model.ln_rho)
        is_ = np.exp(model.ln_vs + model.ln_rho)
        return ip, is_
    return np.exp(model.ln_ip), None


def acoustic_equivalent(model: ElasticModel) -> ElasticModel:
    """Post-stack view of a pre-stack model: ln_ip = ln_vp + ln_rho."""
    if model.mode is not Mode.PRE_STACK:
        raise ValidationError("acoustic_equivalent expects a pre-stack model")
    return ElasticModel.post_stack(model.axis, model.ln_vp + model.ln_rho)
