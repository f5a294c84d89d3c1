"""Shared builders for small synthetic test instances."""

import numpy as np

from spinvert import (
    AngleSet,
    ElasticModel,
    Mode,
    SeismicGather,
    SpinEncoding,
    TimeAxis,
    Wavelet,
    assemble_operator,
    forward_model,
    low_frequency_model,
    make_ricker,
)


def impulse_wavelet() -> Wavelet:
    return Wavelet(samples=np.array([1.0]), center_index=0)


def random_pre_stack_model(rng, axis: TimeAxis) -> ElasticModel:
    n = axis.n_samples
    ln_vp = np.log(rng.uniform(2.0, 4.0, n))
    ratio = rng.uniform(0.4, 0.7, n)
    ln_vs = ln_vp + np.log(ratio)
    ln_rho = np.log(rng.uniform(1.8, 2.6, n))
    return ElasticModel.pre_stack(axis, ln_vp, ln_vs, ln_rho)


def random_post_stack_model(rng, axis: TimeAxis) -> ElasticModel:
    return ElasticModel.post_stack(axis, np.log(rng.uniform(4.0, 9.0, axis.n_samples)))


def random_wavelet(rng, max_len: int = 5) -> Wavelet:
    length = int(rng.integers(1, max_len + 1))
    samples = rng.normal(size=length)
    if np.max(np.abs(samples)) == 0.0:
        samples[0] = 1.0
    center = int(rng.integers(0, length))
    return Wavelet(samples=samples, center_index=center)


def random_angle_set(rng, mode: Mode, max_angles: int = 3) -> AngleSet:
    if mode is Mode.POST_STACK:
        return AngleSet(angles=(0.0,), wavelets=(random_wavelet(rng),))
    n_angles = int(rng.integers(1, max_angles + 1))
    angles = tuple(sorted(rng.uniform(0.0, 40.0, n_angles)))
    while any(b - a < 0.5 for a, b in zip(angles, angles[1:])):
        angles = tuple(sorted(rng.uniform(0.0, 40.0, n_angles)))
    return AngleSet(angles=angles, wavelets=tuple(random_wavelet(rng) for _ in angles))


def random_instance(rng, mode: Mode, n_samples: int, n_spins: int,
                    lam: float = 0.05, noise_std: float = 0.05):
    """Gather + background + encoding for a small randomized inversion problem."""
    axis = TimeAxis(n_samples, 0.002)
    if mode is Mode.PRE_STACK:
        truth = random_pre_stack_model(rng, axis)
    else:
        truth = random_post_stack_model(rng, axis)
    window = min(3, n_samples if n_samples % 2 == 1 else n_samples - 1)
    m_lf = low_frequency_model(truth, window)
    angles = random_angle_set(rng, mode)
    op = assemble_operator(mode, axis, angles, m_lf)
    noise = (noise_std, int(rng.integers(0, 2**31))) if noise_std > 0 else None
    gather = forward_model(op, truth, noise=noise)
    m_lf_vec = m_lf.stacked_logs()
    enc = SpinEncoding(
        n_weights=m_lf_vec.size,
        n_spins=n_spins,
        centers=m_lf_vec + rng.normal(0.0, 0.02, m_lf_vec.size),
        scales=rng.uniform(0.05, 0.3, m_lf_vec.size),
    )
    return gather, op, m_lf_vec, enc, lam


def standard_synthetic(n_samples: int = 32, dt: float = 0.002,
                       angles=(12.0, 24.0, 36.0), window: int = 11,
                       frequency: float = 30.0):
    """Three-layer blocky truth with smoothed background and Ricker wavelets."""
    from spinvert import make_blocky_model

    axis = TimeAxis(n_samples, dt)
    b1, b2 = n_samples // 3, 2 * n_samples // 3
    truth = make_blocky_model(
        [b1, b2],
        [(2.5, 1.2, 2.0), (3.5, 1.8, 2.3), (3.0, 1.5, 2.2)],
        axis,
    )
    m_lf = low_frequency_model(truth, window)
    half_width = int(np.ceil(2.0 / (frequency * dt)))
    wavelet = make_ricker(frequency, dt, half_width)
    angle_set = AngleSet(angles=tuple(angles), wavelets=tuple(wavelet for _ in angles))
    return axis, truth, m_lf, angle_set
