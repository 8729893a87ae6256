import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bincdr.coherence import (MAG_EPS, NonFiniteFrameError, PsdState,
                              clamp_magnitude, coherence, update_psd)
from bincdr.stft import FrameSpectra


def frame_from(left, right, idx=0):
    return FrameSpectra(idx, np.asarray(left, complex), np.asarray(right, complex))


class TestUpdatePsd:
    def test_recursion_arithmetic(self):
        st_ = PsdState(1, smoothing=0.5)
        update_psd(st_, frame_from([np.sqrt(2.0)], [0.0]))  # init phi_ll = 2
        update_psd(st_, frame_from([2.0], [0.0]))           # |X|^2 = 4
        assert st_.phi_ll[0] == pytest.approx(3.0)

    def test_lambda_zero_is_periodogram(self):
        st_ = PsdState(2, smoothing=0.0)
        update_psd(st_, frame_from([1.0, 2.0], [1.0, 1.0]))
        update_psd(st_, frame_from([3.0, 1.0], [2.0, 0.5]))
        np.testing.assert_allclose(st_.phi_ll, [9.0, 1.0])
        np.testing.assert_allclose(st_.phi_lr, [6.0, 0.5])

    def test_constant_input_converges_geometric(self):
        # with init at the periodogram, constant unit power stays at 1 exactly
        st_ = PsdState(1, smoothing=0.72)
        for i in range(50):
            update_psd(st_, frame_from([1.0], [1.0], i))
        assert abs(st_.phi_ll[0] - 1.0) < 1e-6

    def test_nonfinite_rejected_state_unchanged(self):
        st_ = PsdState(2, smoothing=0.5)
        update_psd(st_, frame_from([1.0, 1.0], [1.0, 1.0]))
        before = (st_.phi_ll.copy(), st_.phi_rr.copy(), st_.phi_lr.copy())
        with pytest.raises(NonFiniteFrameError):
            update_psd(st_, frame_from([np.nan, 1.0], [1.0, 1.0]))
        np.testing.assert_array_equal(st_.phi_ll, before[0])
        np.testing.assert_array_equal(st_.phi_lr, before[2])

    def test_recursive_equals_explicit_weighted_sum(self):
        # oracle: phi_n = lam^n phi_0 + (1-lam) sum lam^{n-1-i} P_i
        rng = np.random.default_rng(0)
        lam = 0.83
        n_bins, n_frames = 8, 200
        st_ = PsdState(n_bins, smoothing=lam)
        frames = [frame_from(rng.standard_normal(n_bins) + 1j * rng.standard_normal(n_bins),
                             rng.standard_normal(n_bins) + 1j * rng.standard_normal(n_bins), i)
                  for i in range(n_frames)]
        for f in frames:
            update_psd(st_, f)
        periodos = [np.abs(f.left) ** 2 for f in frames]
        phi0 = periodos[0]
        expected = lam ** (n_frames - 1) * phi0
        for i in range(1, n_frames):
            expected = expected + (1 - lam) * lam ** (n_frames - 1 - i) * periodos[i]
        np.testing.assert_allclose(st_.phi_ll, expected, atol=1e-9, rtol=0)

    def test_cauchy_schwarz_holds(self):
        rng = np.random.default_rng(4)
        st_ = PsdState(16, smoothing=0.7)
        for i in range(100):
            update_psd(st_, frame_from(
                rng.standard_normal(16) + 1j * rng.standard_normal(16),
                rng.standard_normal(16) + 1j * rng.standard_normal(16), i))
            assert np.all(np.abs(st_.phi_lr) ** 2
                          <= st_.phi_ll * st_.phi_rr + 1e-9)


class TestCoherence:
    def test_identical_channels(self):
        st_ = PsdState(4, smoothing=0.5)
        x = np.array([1.0 + 1j, 2.0, -1j, 0.5])
        for i in range(5):
            update_psd(st_, frame_from(x, x, i))
        g = coherence(st_)
        np.testing.assert_allclose(g, (1.0 - MAG_EPS) + 0j, atol=1e-12)

    def test_anticorrelated_channels(self):
        st_ = PsdState(2, smoothing=0.5)
        x = np.array([1.0, 2.0 + 1j])
        update_psd(st_, frame_from(x, -x))
        g = coherence(st_)
        np.testing.assert_allclose(np.abs(g), 1.0 - MAG_EPS, atol=1e-12)
        np.testing.assert_allclose(np.abs(np.angle(g)), np.pi, atol=1e-12)

    def test_independent_noise_low_coherence(self):
        rng = np.random.default_rng(123)
        n_bins = 64
        st_ = PsdState(n_bins, smoothing=0.95)
        for i in range(500):
            update_psd(st_, frame_from(
                rng.standard_normal(n_bins) + 1j * rng.standard_normal(n_bins),
                rng.standard_normal(n_bins) + 1j * rng.standard_normal(n_bins), i))
        g = coherence(st_)
        assert np.mean(np.abs(g) < 0.25) >= 0.9

    def test_swap_conjugates(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        s1, s2 = PsdState(8, 0.6), PsdState(8, 0.6)
        for i in range(20):
            update_psd(s1, frame_from(a * (i + 1), b, i))
            update_psd(s2, frame_from(b, a * (i + 1), i))
        np.testing.assert_allclose(coherence(s1), np.conj(coherence(s2)),
                                   atol=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        frames = [(rng.standard_normal(8) + 1j * rng.standard_normal(8),
                   rng.standard_normal(8) + 1j * rng.standard_normal(8))
                  for _ in range(30)]
        s1, s2 = PsdState(8, 0.72), PsdState(8, 0.72)
        for i, (a, b) in enumerate(frames):
            update_psd(s1, frame_from(a, b, i))
            update_psd(s2, frame_from(37.5 * a, 37.5 * b, i))
        np.testing.assert_allclose(coherence(s1), coherence(s2), atol=1e-12)

    def test_silence_gives_finite_zeroish_coherence(self):
        st_ = PsdState(4, smoothing=0.5)
        update_psd(st_, frame_from(np.zeros(4), np.zeros(4)))
        g = coherence(st_)
        assert np.all(np.isfinite(g))
        assert np.all(np.abs(g) <= 1.0)

    @settings(deadline=None, max_examples=50)
    @given(st.integers(0, 2 ** 31 - 1), st.floats(0.0, 0.99))
    def test_magnitude_never_exceeds_one(self, seed, lam):
        rng = np.random.default_rng(seed)
        st_ = PsdState(8, smoothing=lam)
        for i in range(10):
            update_psd(st_, frame_from(
                10 ** rng.uniform(-6, 6) * (rng.standard_normal(8) + 1j * rng.standard_normal(8)),
                10 ** rng.uniform(-6, 6) * (rng.standard_normal(8) + 1j * rng.standard_normal(8)), i))
        assert np.all(np.abs(coherence(st_)) <= 1.0)


class TestClamp:
    def test_clamp_range(self):
        g = clamp_magnitude(np.array([0.0, 1e-9 + 0j, 2.0 + 0j, 0.5 + 0.5j]))
        mags = np.abs(g)
        assert np.all(mags >= MAG_EPS - 1e-18)
        assert np.all(mags <= 1.0 - MAG_EPS + 1e-18)

    def test_phase_preserved(self):
        z = 3.0 * np.exp(1j * 2.2)
        g = clamp_magnitude(np.array([z]))
        assert np.angle(g[0]) == pytest.approx(2.2)
