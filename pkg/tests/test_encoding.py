import itertools

import numpy as np
import pytest

from spinvert import SpinAssignment, SpinEncoding, ValidationError


def all_assignments(n_spins_total):
    for combo in itertools.product((-1, 1), repeat=n_spins_total):
        yield SpinAssignment(np.array(combo))


def single_weight_encoding(n_spins, c=0.0, s=1.0, shrink=0.5):
    return SpinEncoding(n_weights=1, n_spins=n_spins,
                        centers=np.array([c]), scales=np.array([s]),
                        shrink_factor=shrink)


class TestSpinAssignment:
    def test_rejects_values_outside_pm_one(self):
        with pytest.raises(ValidationError):
            SpinAssignment(np.array([1, 0, -1]))

    def test_bit_round_trip(self):
        a = SpinAssignment(np.array([1, -1, -1, 1]))
        assert np.array_equal(a.to_bits(), [1, 0, 0, 1])
        assert np.array_equal(SpinAssignment.from_bits(a.to_bits()).spins, a.spins)


class TestDecode:
    def test_all_plus_gives_geometric_sum(self):
        enc = single_weight_encoding(5)
        w = enc.decode(SpinAssignment(np.ones(5, dtype=int)))
        assert w[0] == 31.0 / 32.0

    def test_all_minus_is_sign_symmetric(self):
        enc = single_weight_encoding(5)
        w = enc.decode(SpinAssignment(-np.ones(5, dtype=int)))
        assert w[0] == -31.0 / 32.0

    def test_alternating_pattern_hand_computed(self):
        enc = single_weight_encoding(5, c=2.0, s=0.1)
        w = enc.decode(SpinAssignment(np.array([1, -1, 1, -1, 1])))
        assert abs(w[0] - 2.034375) <= 1e-15

    def test_weight_major_layout(self):
        enc = SpinEncoding(n_weights=2, n_spins=2,
                           centers=np.zeros(2), scales=np.array([1.0, 10.0]))
        w = enc.decode(SpinAssignment(np.array([1, 1, -1, -1])))
        assert np.allclose(w, [0.75, -7.5], rtol=0, atol=0)

    def test_rejects_length_mismatch(self):
        enc = single_weight_encoding(3)
        with pytest.raises(ValidationError):
            enc.decode(SpinAssignment(np.array([1, 1])))

    @pytest.mark.parametrize("n_spins", range(1, 9))
    def test_injective_per_weight(self, n_spins):
        enc = single_weight_encoding(n_spins, c=0.3, s=0.7)
        values = {float(enc.decode(a)[0]) for a in all_assignments(n_spins)}
        assert len(values) == 2 ** n_spins

    @pytest.mark.parametrize("n_spins", range(1, 9))
    def test_grid_symmetric_and_excludes_center(self, n_spins):
        c = 0.125
        enc = single_weight_encoding(n_spins, c=c, s=0.5)
        offsets = sorted(float(enc.decode(a)[0]) - c for a in all_assignments(n_spins))
        assert all(abs(lo + hi) <= 1e-15 for lo, hi in zip(offsets, reversed(offsets)))
        assert all(abs(off) > 0 for off in offsets)


class TestRepresentableRange:
    def test_single_spin(self):
        enc = single_weight_encoding(1)
        assert enc.representable_range(0) == (-0.5, 0.5, 1.0)

    def test_five_spin_closed_form(self):
        enc = single_weight_encoding(5, s=0.1)
        lo, hi, step = enc.representable_range(0)
        assert abs(lo - (-0.096875)) <= 1e-15
        assert abs(hi - 0.096875) <= 1e-15
        assert abs(step - 0.00625) <= 1e-15

    @pytest.mark.parametrize("n_spins", range(1, 9))
    def test_extrema_match_enumeration(self, n_spins):
        enc = single_weight_encoding(n_spins, c=1.5, s=0.37)
        values = [float(enc.decode(a)[0]) for a in all_assignments(n_spins)]
        lo, hi, step = enc.representable_range(0)
        assert abs(lo - min(values)) <= 1e-12
        assert abs(hi - max(values)) <= 1e-12
        spaced = np.diff(sorted(values))
        assert np.allclose(spaced, step, rtol=0, atol=1e-12)


class TestNearestAssignment:
    def test_exactly_representable_target(self):
        enc = single_weight_encoding(4, c=0.2, s=0.3)
        for a in all_assignments(4):
            target = enc.decode(a)
            back = enc.decode(enc.nearest_assignment(target))
            assert back[0] == target[0]

    def test_center_tie_breaks_low(self):
        enc = single_weight_encoding(2)
        # Representable: -0.75, -0.25, +0.25, +0.75; the center ties at +-0.25.
        a = enc.nearest_assignment(np.array([0.0]))
        assert float(enc.decode(a)[0]) == -0.25

    def test_random_targets_match_enumeration(self):
        rng = np.random.default_rng(6)
        for n_spins in range(1, 7):
            enc = SpinEncoding(n_weights=1, n_spins=n_spins,
                               centers=np.array([0.4]), scales=np.array([0.25]))
            candidates = [(float(enc.decode(a)[0]), tuple(a.spins)) for a in all_assignments(n_spins)]
            for _ in range(50):
                target = rng.uniform(-0.3, 1.1)
                chosen = enc.nearest_assignment(np.array([target]))
                got = float(enc.decode(chosen)[0])
                # argmin with ties broken toward the smaller decoded value,
                # which is the lexicographically smaller spin string
                best = min(candidates, key=lambda item: (abs(item[0] - target), item[0]))
                assert got == best[0]
                assert tuple(chosen.spins) == best[1]

    def test_within_half_grid_step_inside_range(self):
        rng = np.random.default_rng(8)
        enc = SpinEncoding(n_weights=3, n_spins=5,
                           centers=np.array([0.0, 1.0, -2.0]),
                           scales=np.array([0.1, 0.2, 0.4]))
        for _ in range(100):
            target = np.array([
                rng.uniform(*enc.representable_range(i)[:2]) for i in range(3)
            ])
            decoded = enc.decode(enc.nearest_assignment(target))
            for i in range(3):
                step = enc.representable_range(i)[2]
                assert abs(decoded[i] - target[i]) <= step / 2 + 1e-12


class TestRefine:
    def test_scales_shrink(self):
        enc = SpinEncoding(n_weights=2, n_spins=3,
                           centers=np.zeros(2), scales=np.array([0.1, 0.1]),
                           shrink_factor=0.5)
        out = enc.refine(np.array([0.05, -0.02]))
        assert np.allclose(out.scales, [0.05, 0.05], rtol=0, atol=0)
        assert np.allclose(out.centers, [0.05, -0.02], rtol=0, atol=0)
        assert out.n_spins == enc.n_spins
        assert out.shrink_factor == enc.shrink_factor

    def test_fixed_point_center(self):
        enc = SpinEncoding(n_weights=2, n_spins=3,
                           centers=np.array([1.0, 2.0]), scales=np.array([0.4, 0.4]))
        out = enc.refine(enc.centers)
        assert np.array_equal(out.centers, enc.centers)
        assert np.allclose(out.scales, 0.5 * enc.scales, rtol=0, atol=0)

    def test_two_refines_compound(self):
        enc = SpinEncoding(n_weights=1, n_spins=4, centers=np.zeros(1),
                           scales=np.array([1.0]), shrink_factor=0.3)
        out = enc.refine(np.array([0.1])).refine(np.array([0.2]))
        assert abs(out.scales[0] - 0.09) <= 1e-15

    def test_quantization_drift_bound_after_refine(self):
        rng = np.random.default_rng(9)
        enc = SpinEncoding(n_weights=1, n_spins=5, centers=np.array([0.0]),
                           scales=np.array([0.1]), shrink_factor=0.5)
        for _ in range(20):
            best = np.array([rng.uniform(-0.09, 0.09)])
            refined = enc.refine(best)
            nearest = refined.decode(refined.nearest_assignment(best))
            # New grid is centered on best; its closest point sits one
            # least-significant place away.
            assert abs(nearest[0] - best[0]) <= refined.scales[0] * 2.0 ** -refined.n_spins + 1e-15

    def test_rejects_non_finite(self):
        enc = single_weight_encoding(3)
        with pytest.raises(ValidationError):
            enc.refine(np.array([np.nan]))


class TestEncodingValidation:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationError):
            SpinEncoding(n_weights=1, n_spins=0, centers=np.zeros(1), scales=np.ones(1))
        with pytest.raises(ValidationError):
            SpinEncoding(n_weights=1, n_spins=2, centers=np.zeros(1), scales=np.zeros(1))
        with pytest.raises(ValidationError):
            SpinEncoding(n_weights=1, n_spins=2, centers=np.zeros(1), scales=np.ones(1),
                         shrink_factor=1.0)
        with pytest.raises(ValidationError):
            SpinEncoding(n_weights=2, n_spins=2, centers=np.zeros(1), scales=np.ones(2))
