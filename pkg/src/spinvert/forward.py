"""Discrete convolutional forward modeling of angle-dependent seismic traces.

The forward operator chains three matrices per reflection angle: a first
difference D (scaled by 1/dt, last row zero), an angle-coefficient block
A(theta) applied per sample, and a Toeplitz convolution W(theta) carrying
that angle's wavelet. Their product G(theta) = W A D maps the stacked log
model to one trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elastic import AngleSet, ElasticModel, Mode, TimeAxis, Wavelet
from .errors import ValidationError


@dataclass(frozen=True)
class AvoCoefficients:
    """Angle-dependent weights of d/dt ln Vp, ln Vs, ln rho in the reflectivity.

    background_ratio_sq is the squared background Vs/Vp ratio at the sample.
    """

    c_p: float
    c_s: float
    c_rho: float
    theta: float
    background_ratio_sq: float

    def __post_init__(self):
        if not (0.0 < self.background_ratio_sq < 1.0):
            raise ValidationError("background Vs^2/Vp^2 must lie in (0, 1)")


def avo_attributes(upper, lower):
    """Intercept R, gradient G, and curvature F across an interface.

    `upper` and `lower` are (Vp, Vs, rho) triples; contrasts are lower - upper
    and backgrounds the interface averages.
    """
    vp1, vs1, rho1 = (float(x) for x in upper)
    vp2, vs2, rho2 = (float(x) for x in lower)
    if min(vp1, vs1, rho1, vp2, vs2, rho2) <= 0:
        raise ValidationError("layer properties must be strictly positive")
    d_vp, d_vs, d_rho = vp2 - vp1, vs2 - vs1, rho2 - rho1
    vp = 0.5 * (vp1 + vp2)
    vs = 0.5 * (vs1 + vs2)
    rho = 0.5 * (rho1 + rho2)
    ratio_sq = (vs * vs) / (vp * vp)
    r = 0.5 * (d_vp / vp + d_rho / rho)
    g = 0.5 * d_vp / vp - 2.0 * ratio_sq * (d_rho / rho + 2.0 * d_vs / vs)
    f = 0.5 * d_vp / vp
    return r, g, f


def reflection_coefficient(r: float, g: float, f: float, theta: float) -> float:
    """Two-term-plus-curvature reflectivity R + G sin^2(t) + F (tan^2 - sin^2)(t)."""
    if not (0.0 <= theta < 90.0):
        raise ValidationError("theta must lie in [0, 90) degrees")
    rad = math.radians(theta)
    sin_sq = math.sin(rad) ** 2
    tan_sq = math.tan(rad) ** 2
    return r + g * sin_sq + f * (tan_sq - sin_sq)


def avo_coefficients(theta: float, background: ElasticModel, sample: int) -> AvoCoefficients:
    """Per-sample angle coefficients evaluated from the background model.

    The squared Vs/Vp ratio is frozen from the background (low-frequency)
    model at the sample so the forward operator stays linear in the unknowns.
    """
    if background.mode is not Mode.PRE_STACK:
        raise ValidationError("avo_coefficients requires a pre-stack background")
    if not (0.0 <= theta < 45.0):
        raise ValidationError("theta must lie in [0, 45) degrees")
    if not (0 <= sample < background.axis.n_samples):
        raise ValidationError("sample index out of range")
    ratio_sq = math.exp(2.0 * (background.ln_vs[sample] - background.ln_vp[sample]))
    if ratio_sq >= 1.0:
        raise ValidationError("background Vs/Vp ratio must be below 1")
    rad = math.radians(theta)
    sin_sq = math.sin(rad) ** 2
    tan_sq = math.tan(rad) ** 2
    c_p = 0.5 * (1.0 + tan_sq)
    c_s = -4.0 * ratio_sq * sin_sq
    c_rho = 0.5 * (1.0 - 4.0 * ratio_sq * sin_sq)
    return AvoCoefficients(c_p=c_p, c_s=c_s, c_rho=c_rho, theta=theta,
                           background_ratio_sq=ratio_sq)


@dataclass(frozen=True, eq=False)
class SeismicGather:
    """Trace amplitudes indexed by (time sample, reflection angle)."""

    axis: TimeAxis
    angles: tuple
    traces: np.ndarray  # shape (n_angles, n_samples)

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        traces = np.asarray(self.traces, dtype=np.float64)
        if traces.shape != (len(angles), self.axis.n_samples):
            raise ValidationError(
                f"traces must have shape ({len(angles)}, {self.axis.n_samples})"
            )
        if not np.all(np.isfinite(traces)):
            raise ValidationError("trace amplitudes must be finite")
        traces = traces.copy()
        traces.flags.writeable = False
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "traces", traces)


def difference_matrix(axis: TimeAxis) -> np.ndarray:
    """Forward first difference scaled by 1/dt; the last row is zero."""
    n = axis.n_samples
    d = np.zeros((n, n))
    idx = np.arange(n - 1)
    d[idx, idx] = -1.0 / axis.dt
    d[idx, idx + 1] = 1.0 / axis.dt
    return d


def convolution_matrix(wavelet: Wavelet, n_samples: int) -> np.ndarray:
    """Toeplitz matrix of same-length convolution with time zero at center_index."""
    w = wavelet.samples
    lag = wavelet.center_index + np.arange(n_samples)[:, None] - np.arange(n_samples)[None, :]
    valid = (lag >= 0) & (lag < w.size)
    return np.where(valid, w[np.clip(lag, 0, w.size - 1)], 0.0)


@dataclass(frozen=True, eq=False)
class ForwardOperator:
    """Assembled D, per-angle A(theta) and W(theta), and their products G(theta).

    `composed[i]` maps the stacked log model (3n pre-stack, n post-stack) to
    the trace at angles.angles[i]. Instances are immutable; build them with
    assemble_operator.
    """

    mode: Mode
    axis: TimeAxis
    angles: AngleSet
    diff_matrix: np.ndarray
    avo_blocks: tuple  # per angle: tuple of per-sample AvoCoefficients (empty post-stack)
    wavelet_convolutions: tuple  # per angle: (n, n) Toeplitz matrix
    composed: tuple  # per angle: (n, n_parameters) dense matrix

    @property
    def n_parameters(self) -> int:
        n = self.axis.n_samples
        return 3 * n if self.mode is Mode.PRE_STACK else n


def _angle_coefficient_matrix(op_mode: Mode, coeffs, n: int) -> np.ndarray:
    if op_mode is Mode.POST_STACK:
        return 0.5 * np.eye(n)
    c_p = np.array([c.c_p for c in coeffs])
    c_s = np.array([c.c_s for c in coeffs])
    c_rho = np.array([c.c_rho for c in coeffs])
    return np.hstack([np.diag(c_p), np.diag(c_s), np.diag(c_rho)])


def assemble_operator(mode: Mode, axis: TimeAxis, angles: AngleSet,
                      background: ElasticModel) -> ForwardOperator:
    """Build the full forward operator for a mode, axis, angle set, and background."""
    if background.mode is not mode:
        raise ValidationError("background mode does not match operator mode")
    if background.axis != axis:
        raise ValidationError("background axis does not match operator axis")
    angles.validate_for_mode(mode)
    n = axis.n_samples
    d = difference_matrix(axis)
    d_full = np.kron(np.eye(3), d) if mode is Mode.PRE_STACK else d

    avo_blocks = []
    w_matrices = []
    composed = []
    for theta, wavelet in zip(angles.angles, angles.wavelets):
        if mode is Mode.PRE_STACK:
            coeffs = tuple(avo_coefficients(theta, background, k) for k in range(n))
        else:
            coeffs = ()
        avo_blocks.append(coeffs)
        a = _angle_coefficient_matrix(mode, coeffs, n)
        w = convolution_matrix(wavelet, n)
        w_matrices.append(w)
        composed.append(w @ (a @ d_full))
    return ForwardOperator(
        mode=mode,
        axis=axis,
        angles=angles,
        diff_matrix=d,
        avo_blocks=tuple(avo_blocks),
        wavelet_convolutions=tuple(w_matrices),
        composed=tuple(composed),
    )


def forward_model(op: ForwardOperator, model: ElasticModel,
                  noise: tuple | None = None) -> SeismicGather:
    """Synthetic gather G(theta) m for every angle, optionally with Gaussian noise.

    `noise` is (std, seed); perturbations come from a generator seeded with
    `seed` so repeated calls are reproducible.
    """
    if model.mode is not op.mode:
        raise ValidationError("model mode does not match operator mode")
    if model.axis != op.axis:
        raise ValidationError("model axis does not match operator axis")
    m = model.stacked_logs()
    traces = np.vstack([g @ m for g in op.composed])
    if noise is not None:
        std, seed = noise
        if std < 0:
            raise ValidationError("noise std must be non-negative")
        rng = np.random.default_rng(int(seed))
        traces = traces + rng.normal(0.0, float(std), size=traces.shape)
    return SeismicGather(axis=op.axis, angles=op.angles.angles, traces=traces)
