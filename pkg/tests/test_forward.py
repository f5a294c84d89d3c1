import math

import numpy as np
import pytest

from spinvert import (
    AngleSet,
    ElasticModel,
    Mode,
    SeismicGather,
    TimeAxis,
    ValidationError,
    acoustic_equivalent,
    assemble_operator,
    avo_attributes,
    avo_coefficients,
    forward_model,
    make_blocky_model,
    make_ricker,
    reflection_coefficient,
)
from spinvert.forward import convolution_matrix, difference_matrix

from helpers import impulse_wavelet, random_pre_stack_model


class TestAvoAttributes:
    def test_zero_contrast(self):
        r, g, f = avo_attributes((3.0, 1.5, 2.2), (3.0, 1.5, 2.2))
        assert (r, g, f) == (0.0, 0.0, 0.0)

    def test_density_only_contrast(self):
        r, g, f = avo_attributes((3.0, 1.5, 2.0), (3.0, 1.5, 2.4))
        d_rho, rho_bar = 0.4, 2.2
        assert f == 0.0
        assert abs(r - 0.5 * d_rho / rho_bar) <= 1e-15

    def test_matches_direct_arithmetic(self):
        upper, lower = (3.0, 1.5, 2.2), (3.3, 1.65, 2.3)
        r, g, f = avo_attributes(upper, lower)
        d_vp, d_vs, d_rho = 0.3, 0.15, 0.1
        vp, vs, rho = 3.15, 1.575, 2.25
        assert abs(r - 0.5 * (d_vp / vp + d_rho / rho)) <= 1e-12
        expected_g = 0.5 * d_vp / vp - 2.0 * (vs**2 / vp**2) * (d_rho / rho + 2.0 * d_vs / vs)
        assert abs(g - expected_g) <= 1e-12
        assert abs(f - 0.5 * d_vp / vp) <= 1e-12

    def test_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            avo_attributes((3.0, 1.5, 0.0), (3.0, 1.5, 2.2))


class TestReflectionCoefficient:
    def test_normal_incidence_returns_intercept(self):
        assert reflection_coefficient(0.07, -0.02, 0.05, 0.0) == 0.07

    def test_zero_attributes(self):
        assert reflection_coefficient(0.0, 0.0, 0.0, 37.0) == 0.0

    def test_matches_direct_arithmetic(self):
        theta = 24.0
        rad = math.radians(theta)
        expected = 0.05 + (-0.02) * math.sin(rad) ** 2 + 0.05 * (
            math.tan(rad) ** 2 - math.sin(rad) ** 2
        )
        assert abs(reflection_coefficient(0.05, -0.02, 0.05, theta) - expected) <= 1e-14

    def test_rejects_angle_at_or_beyond_90(self):
        with pytest.raises(ValidationError):
            reflection_coefficient(0.05, 0.0, 0.0, 90.0)


def constant_ratio_background(axis, ratio=0.5):
    n = axis.n_samples
    ln_vp = np.full(n, math.log(3.0))
    ln_vs = ln_vp + math.log(ratio)
    ln_rho = np.full(n, math.log(2.2))
    return ElasticModel.pre_stack(axis, ln_vp, ln_vs, ln_rho)


class TestAvoCoefficients:
    def test_normal_incidence_values(self):
        bg = constant_ratio_background(TimeAxis(4, 0.002))
        c = avo_coefficients(0.0, bg, 2)
        assert (c.c_p, c.c_s, c.c_rho) == (0.5, 0.0, 0.5)

    def test_half_ratio_at_30_degrees(self):
        bg = constant_ratio_background(TimeAxis(4, 0.002), ratio=0.5)
        c = avo_coefficients(30.0, bg, 0)
        # sin^2(30deg) = 0.25 and ratio^2 = 0.25 give c_s = -4 * 0.25 * 0.25
        assert abs(c.c_s - (-0.25)) <= 1e-14

    def test_identity_two_crho_minus_one_is_cs(self):
        rng = np.random.default_rng(5)
        axis = TimeAxis(6, 0.002)
        bg = random_pre_stack_model(rng, axis)
        for theta in (0.0, 7.5, 16.0, 24.0, 33.0, 44.0):
            for k in range(axis.n_samples):
                c = avo_coefficients(theta, bg, k)
                assert abs((2.0 * c.c_rho - 1.0) - c.c_s) <= 1e-14

    def test_rejects_ratio_at_or_above_one(self):
        axis = TimeAxis(3, 0.002)
        bg = ElasticModel.pre_stack(
            axis, np.zeros(3), np.zeros(3) - 1e-18, np.zeros(3)
        )
        with pytest.raises(ValidationError):
            avo_coefficients(10.0, bg, 0)


class TestOperatorAssembly:
    def test_difference_matrix_shape_and_last_row(self):
        axis = TimeAxis(5, 0.002)
        d = difference_matrix(axis)
        assert np.all(d[-1] == 0.0)
        assert d[0, 0] == -1.0 / 0.002 and d[0, 1] == 1.0 / 0.002

    def test_post_stack_impulse_is_half_difference(self):
        axis = TimeAxis(4, 0.002)
        angles = AngleSet(angles=(0.0,), wavelets=(impulse_wavelet(),))
        bg = ElasticModel.post_stack(axis, np.log([6.0, 6.0, 6.0, 6.0]))
        op = assemble_operator(Mode.POST_STACK, axis, angles, bg)
        assert np.allclose(op.composed[0], 0.5 * difference_matrix(axis), rtol=0, atol=0)
        constant = ElasticModel.post_stack(axis, np.full(4, math.log(7.0)))
        gather = forward_model(op, constant)
        assert np.all(gather.traces == 0.0)

    def test_pre_stack_normal_incidence_vs_block_is_zero(self):
        axis = TimeAxis(6, 0.002)
        rng = np.random.default_rng(2)
        bg = random_pre_stack_model(rng, axis)
        w = make_ricker(30.0, axis.dt, 8)
        angles = AngleSet(angles=(0.0,), wavelets=(w,))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        n = axis.n_samples
        vs_block = op.composed[0][:, n:2 * n]
        # c_s(0) = 0 wipes out the ln_vs dependency entirely.
        a_vs = np.array([c.c_s for c in op.avo_blocks[0]])
        assert np.all(a_vs == 0.0)
        assert np.all(vs_block == 0.0)

    def test_composition_matches_stage_by_stage_oracle(self):
        rng = np.random.default_rng(42)
        axis = TimeAxis(8, 0.002)
        bg = random_pre_stack_model(rng, axis)
        w = make_ricker(30.0, axis.dt, 6)
        angles = AngleSet(angles=(12.0, 24.0, 36.0), wavelets=(w, w, w))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        model = random_pre_stack_model(rng, axis)
        m = model.stacked_logs()
        n = axis.n_samples
        for i, theta in enumerate(angles.angles):
            # Stage 1: forward difference of each log sequence, last entry zero.
            def diff(seq):
                out = np.zeros(n)
                out[:-1] = (seq[1:] - seq[:-1]) / axis.dt
                return out

            d_vp, d_vs, d_rho = diff(model.ln_vp), diff(model.ln_vs), diff(model.ln_rho)
            # Stage 2: per-sample angle weighting.
            reflectivity = np.zeros(n)
            for k in range(n):
                c = avo_coefficients(theta, bg, k)
                reflectivity[k] = c.c_p * d_vp[k] + c.c_s * d_vs[k] + c.c_rho * d_rho[k]
            # Stage 3: direct convolution sum aligned at the wavelet center.
            trace = np.zeros(n)
            for k in range(n):
                for j, amp in enumerate(w.samples):
                    src = k - (j - w.center_index)
                    if 0 <= src < n:
                        trace[k] += amp * reflectivity[src]
            assert np.allclose(op.composed[i] @ m, trace, rtol=0, atol=1e-10)

    def test_rejects_mode_angle_mismatch(self):
        axis = TimeAxis(4, 0.002)
        bg = ElasticModel.post_stack(axis, np.zeros(4))
        angles = AngleSet(angles=(12.0,), wavelets=(impulse_wavelet(),))
        with pytest.raises(ValidationError):
            assemble_operator(Mode.POST_STACK, axis, angles, bg)


class TestForwardModel:
    def test_constant_model_gives_zero_traces(self):
        axis = TimeAxis(6, 0.002)
        bg = constant_ratio_background(axis)
        w = make_ricker(30.0, axis.dt, 5)
        angles = AngleSet(angles=(10.0, 20.0), wavelets=(w, w))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        gather = forward_model(op, bg)
        assert np.allclose(gather.traces, 0.0, rtol=0, atol=1e-12)

    def test_zero_noise_std_matches_noiseless(self):
        axis = TimeAxis(6, 0.002)
        rng = np.random.default_rng(1)
        bg = random_pre_stack_model(rng, axis)
        model = random_pre_stack_model(rng, axis)
        w = make_ricker(30.0, axis.dt, 5)
        angles = AngleSet(angles=(15.0,), wavelets=(w,))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        clean = forward_model(op, model)
        noisy = forward_model(op, model, noise=(0.0, 99))
        assert np.array_equal(clean.traces, noisy.traces)

    def test_noise_is_seed_deterministic(self):
        axis = TimeAxis(6, 0.002)
        rng = np.random.default_rng(1)
        model = random_pre_stack_model(rng, axis)
        bg = random_pre_stack_model(rng, axis)
        w = make_ricker(30.0, axis.dt, 5)
        angles = AngleSet(angles=(15.0,), wavelets=(w,))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        a = forward_model(op, model, noise=(0.1, 7))
        b = forward_model(op, model, noise=(0.1, 7))
        c = forward_model(op, model, noise=(0.1, 8))
        assert np.array_equal(a.traces, b.traces)
        assert not np.array_equal(a.traces, c.traces)

    def test_two_layer_single_interface_spike(self):
        axis = TimeAxis(4, 0.002)
        ip = np.array([5.0, 5.0, 6.5, 6.5])
        model = ElasticModel.post_stack(axis, np.log(ip))
        angles = AngleSet(angles=(0.0,), wavelets=(impulse_wavelet(),))
        op = assemble_operator(Mode.POST_STACK, axis, angles, model)
        gather = forward_model(op, model)
        expected = 0.5 * (math.log(6.5) - math.log(5.0)) / axis.dt
        assert abs(gather.traces[0, 1] - expected) <= 1e-12
        others = np.delete(gather.traces[0], 1)
        assert np.all(others == 0.0)

    def test_linearity_in_log_space(self):
        axis = TimeAxis(8, 0.002)
        rng = np.random.default_rng(3)
        bg = random_pre_stack_model(rng, axis)
        w = make_ricker(30.0, axis.dt, 6)
        angles = AngleSet(angles=(8.0, 28.0), wavelets=(w, w))
        op = assemble_operator(Mode.PRE_STACK, axis, angles, bg)
        m1 = random_pre_stack_model(rng, axis)
        m2 = random_pre_stack_model(rng, axis)
        alpha, beta = 0.3, 1.7
        combo = ElasticModel.from_stacked(
            Mode.PRE_STACK, axis,
            alpha * m1.stacked_logs() + beta * m2.stacked_logs(),
        )
        lhs = forward_model(op, combo).traces
        rhs = alpha * forward_model(op, m1).traces + beta * forward_model(op, m2).traces
        scale = np.max(np.abs(rhs))
        assert np.allclose(lhs, rhs, rtol=0, atol=1e-10 * max(1.0, scale))


class TestNormalIncidenceReduction:
    def test_pre_stack_theta_zero_equals_post_stack_on_ln_ip(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(4, 12))
            axis = TimeAxis(n, 0.002)
            model = random_pre_stack_model(rng, axis)
            bg = random_pre_stack_model(rng, axis)
            w = make_ricker(30.0, axis.dt, 6)
            pre_op = assemble_operator(
                Mode.PRE_STACK, axis, AngleSet(angles=(0.0,), wavelets=(w,)), bg
            )
            post_op = assemble_operator(
                Mode.POST_STACK, axis, AngleSet(angles=(0.0,), wavelets=(w,)),
                acoustic_equivalent(bg),
            )
            pre = forward_model(pre_op, model).traces[0]
            post = forward_model(post_op, acoustic_equivalent(model)).traces[0]
            assert np.allclose(pre, post, rtol=0, atol=1e-10)


class TestConvolutionMatrix:
    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            length = int(rng.integers(1, 9))
            center = int(rng.integers(0, length))
            samples = rng.normal(size=length)
            if np.max(np.abs(samples)) == 0:
                samples[0] = 1.0
            from spinvert import Wavelet

            w = Wavelet(samples=samples, center_index=center)
            n = int(rng.integers(2, 10))
            signal = rng.normal(size=n)
            matrix = convolution_matrix(w, n)
            full = np.convolve(w.samples, signal, mode="full")
            expected = full[center: center + n]
            assert np.allclose(matrix @ signal, expected, rtol=0, atol=1e-12)


class TestSeismicGather:
    def test_shape_validation(self):
        axis = TimeAxis(4, 0.002)
        with pytest.raises(ValidationError):
            SeismicGather(axis=axis, angles=(0.0, 10.0), traces=np.zeros((1, 4)))
        with pytest.raises(ValidationError):
            SeismicGather(axis=axis, angles=(0.0,), traces=np.array([[1.0, np.nan, 0, 0]]))
