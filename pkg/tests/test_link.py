from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdmasim.link import (DEFAULT_MCS_TABLE, LinkOutcome, McsTable, effective_ppsnr, judge_link,
                          load_mcs_table, mcs_rate, ppsnr, select_mcs)
from sdmasim.rf import SimParams

P = SimParams()
T = DEFAULT_MCS_TABLE


def test_table_contents():
    assert len(T) == 8
    assert list(T.thresholds_db) == [1.4, 4.4, 6.5, 8.6, 12, 15.8, 17.2, 18.8]
    assert [e.bits_per_symbol for e in T.entries] == [1, 2, 2, 4, 4, 6, 6, 6]
    assert T[7].code_rate == Fraction(5, 6)


class TestPpsnr:
    def test_aligned_no_interference(self):
        h = np.array([1 + 1j, 2, 0, -1j])
        w = h / np.linalg.norm(h)
        assert ppsnr(w, h, [], 0.5) == pytest.approx(np.linalg.norm(h) ** 2 / 0.5, rel=1e-12)

    def test_orthogonal(self):
        assert ppsnr(np.array([0, 1.0]), np.array([1.0, 0]), [], 1.0) == 0.0

    def test_direct_substitution(self):
        e1 = np.array([1.0, 0])
        assert ppsnr(e1, e1, [e1], 1.0) == pytest.approx(0.5)

    def test_bad_noise(self):
        with pytest.raises(ValueError):
            ppsnr(np.ones(2), np.ones(2), [], 0.0)

    @given(st.floats(0, 2 * np.pi))
    def test_common_phase_on_receiver(self, theta):
        rng = np.random.default_rng(0)
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w /= np.linalg.norm(w)
        h, i1 = rng.standard_normal((2, 4)) + 0j
        a = ppsnr(w, h, [i1], 0.3)
        assert ppsnr(w * np.exp(1j * theta), h, [i1], 0.3) == pytest.approx(a, rel=1e-12)


class TestEffectivePpsnr:
    def test_flat(self):
        assert effective_ppsnr([10.0] * 64) == pytest.approx(10.0)

    def test_two_levels(self):
        # population variance of {8, 12} is 4
        assert effective_ppsnr([8.0] * 32 + [12.0] * 32) == pytest.approx(9.5)

    def test_backoff(self):
        assert effective_ppsnr([10.0] * 64, backoff_db=2.0) == pytest.approx(8.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            effective_ppsnr([])

    @given(st.lists(st.floats(-30, 40), min_size=1, max_size=64), st.floats(0, 10))
    def test_never_above_mean(self, xs, backoff):
        assert effective_ppsnr(xs, backoff_db=backoff) <= np.mean(xs) + 1e-9
        if backoff == 0 and np.ptp(xs) == 0:
            assert effective_ppsnr(xs) == pytest.approx(np.mean(xs))


class TestSelect:
    @pytest.mark.parametrize("snr,expect", [(12.5, 4), (1.0, None), (19.0, 7), (1.4, 0), (15.8, 5)])
    def test_table_lookups(self, snr, expect):
        assert select_mcs(snr, T) == expect

    @given(st.floats(-20, 40), st.floats(0, 20))
    def test_monotone(self, a, d):
        lo, hi = select_mcs(a, T), select_mcs(a + d, T)
        assert (lo is None) or (hi is not None and hi >= lo)


class TestRate:
    def test_values(self):
        rates = [mcs_rate(e, P) for e in T.entries]
        np.testing.assert_allclose(rates, [8, 16, 24, 32, 48, 64, 72, 80])
        # recomputed from the formula bits * rate * W / (1 + guard)
        assert rates[5] == pytest.approx(6 * 2 / 3 * 20e6 / 1.25 / 1e6)
        assert np.all(np.diff(rates) > 0)


class TestJudge:
    def test_perfect_csi_selection_always_viable(self):
        for snr in np.linspace(1.4, 30, 200):
            out = judge_link(select_mcs(snr, T), snr, T, P)
            assert out.viable and out.throughput_mbps > 0

    def test_optimistic_estimate_fails(self):
        out = judge_link(5, 14.0, T, P)
        assert out == LinkOutcome(5, False, 0.0, 14.0)

    def test_no_selection(self):
        out = judge_link(None, 30.0, T, P)
        assert not out.viable and out.throughput_mbps == 0 and out.chosen_mcs is None


def test_mcs_table_file(tmp_path):
    f = tmp_path / "t.yaml"
    f.write_text("mcs_table:\n"
                 "  - {modulation: BPSK, code_rate: 1/2, threshold_db: 2}\n"
                 "  - {modulation: 16qam, code_rate: 3/4, threshold_db: 11}\n")
    t = load_mcs_table(f)
    assert len(t) == 2 and t[1].bits_per_symbol == 4
    assert mcs_rate(t[1], P) == pytest.approx(48)


def test_mcs_table_rejects_unsorted():
    with pytest.raises(ValueError):
        McsTable((T[1], T[0]))
