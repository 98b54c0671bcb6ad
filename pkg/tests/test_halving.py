import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpbandit.env import RngStream, make_environment
from cpbandit.errors import BudgetTooSmall, DomainError, EtaOutOfRange
from cpbandit.halving import (
    Decision,
    GuaranteeAssumptionWarning,
    PhaseStats,
    ResolutionWarning,
    ROOT_SET,
    SamplingSet,
    ZoomHistory,
    backtrack,
    event_el,
    event_ep,
    event_er,
    phases_sh,
    phases_shb,
    run_sh,
    run_shb,
    zoom_left,
    zoom_right,
)


def stats3(m1, m2, m3):
    return PhaseStats(m1, m2, m3, pulls_per_slot=1)


def stats5(m0, ma1, ma3, m1, ma2=0.0):
    return PhaseStats(ma1, ma2, ma3, 1, mean0=m0, mean1=m1)


class TestPhaseCounts:
    def test_sh_examples(self):
        assert phases_sh(0.1) == 3
        assert phases_sh(0.25) == 1
        assert phases_sh(1e-8) == 26

    def test_shb_examples(self):
        assert phases_shb(1e-8) == 107
        assert phases_shb(1 / (2 * math.e)) == 6
        assert phases_shb(0.1) == 10

    @pytest.mark.parametrize("eta", [0.0, 0.5, 0.7, -0.1, 1.0])
    def test_eta_out_of_range(self, eta):
        with pytest.raises(EtaOutOfRange):
            phases_sh(eta)
        with pytest.raises(EtaOutOfRange):
            phases_shb(eta)

    def test_at_least_one_phase(self):
        for eta in (0.49, 0.3, 0.26):
            assert phases_sh(eta) >= 1
            assert phases_shb(eta) >= 1


class TestEliminationEvents:
    def test_er_right_gap_larger(self):
        assert event_er(stats3(0, 0.1, 1.9)) is True

    def test_er_left_gap_larger(self):
        assert event_er(stats3(0, 1.9, 2.0)) is False
        assert event_el(stats3(0, 1.9, 2.0)) is True

    def test_equal_gaps_fall_left(self):
        assert event_er(stats3(0, 1, 2)) is False
        assert event_el(stats3(0, 1, 2)) is True

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    @settings(max_examples=300, deadline=None)
    def test_er_el_complementary(self, m1, m2, m3):
        st_ = stats3(m1, m2, m3)
        assert event_er(st_) != event_el(st_)

    def test_ep_change_right_of_bracket(self):
        # means (0,0,0,2): fit outside wins -> backtrack
        assert event_ep(stats5(0, 0, 0, 2)) is True

    def test_ep_change_inside_bracket(self):
        assert event_ep(stats5(0, 0, 2, 2)) is False

    def test_ep_zero_noise_interior_never_fires(self):
        # exact means (mu1, mu1, mu2, mu2): Q1 = d, max(Q2,Q3) = 2d/3
        for mu1, mu2 in [(0, 2), (5, -1), (0.3, 0.4)]:
            assert event_ep(stats5(mu1, mu1, mu2, mu2)) is False

    def test_ep_requires_endpoint_means(self):
        with pytest.raises(DomainError):
            event_ep(stats3(0, 1, 2))


class TestZoomOperators:
    def test_zoom_right_from_root(self):
        assert zoom_right(ROOT_SET) == SamplingSet(0.5, 0.75, 1.0, 1)

    def test_zoom_right_chain(self):
        a = SamplingSet(0.5, 0.75, 1.0, 1)
        assert zoom_right(a) == SamplingSet(0.75, 0.875, 1.0, 2)

    def test_zoom_right_left_subtree(self):
        a = SamplingSet(0.0, 0.25, 0.5, 1)
        assert zoom_right(a) == SamplingSet(0.25, 0.375, 0.5, 2)

    def test_zoom_left_from_root(self):
        assert zoom_left(ROOT_SET) == SamplingSet(0.0, 0.25, 0.5, 1)

    def test_zoom_left_right_subtree(self):
        a = SamplingSet(0.5, 0.75, 1.0, 1)
        assert zoom_left(a) == SamplingSet(0.5, 0.625, 0.75, 2)

    def test_composition(self):
        assert zoom_left(zoom_right(ROOT_SET)) == SamplingSet(0.5, 0.625, 0.75, 2)

    def test_width_halves_and_nests(self):
        rng = np.random.default_rng(3)
        a = ROOT_SET
        for _ in range(40):
            nxt = zoom_right(a) if rng.random() < 0.5 else zoom_left(a)
            assert nxt.width() == pytest.approx(a.width() / 2)
            assert a.a1 <= nxt.a1 < nxt.a3 <= a.a3
            assert nxt.a2 == (nxt.a1 + nxt.a3) / 2
            a = nxt

    def test_sampling_set_validation(self):
        with pytest.raises(DomainError):
            SamplingSet(0.5, 0.25, 1.0, 1)  # unordered
        with pytest.raises(DomainError):
            SamplingSet(0.0, 0.4, 1.0, 0)  # midpoint off
        with pytest.raises(DomainError):
            SamplingSet(0.0, 0.25, 0.5, 3)  # width != 2**-depth
        with pytest.raises(DomainError):
            SamplingSet(-0.5, 0.0, 0.5, 0)  # outside [0,1]


class TestBacktrackOperator:
    def test_pop_returns_prior_set(self):
        h = ZoomHistory()
        h.push(ROOT_SET)
        a = zoom_right(ROOT_SET)
        assert backtrack(a, h) == ROOT_SET
        assert len(h) == 0

    def test_root_noop(self):
        h = ZoomHistory()
        assert backtrack(ROOT_SET, h) == ROOT_SET

    def test_stack_order_after_r_then_l(self):
        h = ZoomHistory()
        h.push(ROOT_SET)
        b = zoom_right(ROOT_SET)  # (1/2, 3/4, 1)
        h.push(b)
        c = zoom_left(b)
        assert backtrack(c, h) == b
        assert backtrack(b, h) == ROOT_SET

    def test_inverse_identities(self):
        for a in (ROOT_SET, SamplingSet(0.5, 0.625, 0.75, 2)):
            h = ZoomHistory()
            h.push(a)
            assert backtrack(zoom_right(a), h) == a
            h.push(a)
            assert backtrack(zoom_left(a), h) == a


def zero_env(x_star, mu1=0.0, mu2=2.0):
    return make_environment(mu1, mu2, x_star, 0.0, "none")


class TestRunSh:
    def test_zero_noise_trace_example(self):
        res = run_sh(zero_env(0.3), 30, 0.1, RngStream(1))
        assert [d for d in res.trace] == [
            Decision.ZOOM_LEFT,
            Decision.ZOOM_RIGHT,
            Decision.ZOOM_LEFT,
        ]
        assert res.estimate == pytest.approx(0.3125)
        assert abs(res.estimate - 0.3) < 0.1
        assert res.pulls_used == 27
        # terminal set = final sampled set after its zoom decision
        last = zoom_left(res.phases[-1].sampling_set)
        assert (last.a1, last.a2, last.a3) == (0.25, 0.3125, 0.375)

    def test_single_phase_correct_half(self):
        for x_star in (0.1, 0.3, 0.6, 0.9):
            res = run_sh(zero_env(x_star), 3, 0.25, RngStream(0))
            assert len(res.trace) == 1
            assert abs(res.estimate - x_star) < 0.25

    def test_budget_too_small(self):
        with pytest.raises(BudgetTooSmall):
            run_sh(zero_env(0.5), 8, 0.1, RngStream(0))

    def test_budget_accounting(self):
        env = make_environment(0, 2, 0.4, 1.0, "gaussian")
        for T, eta in [(30, 0.1), (100, 0.01), (77, 0.1)]:
            res = run_sh(env, T, eta, RngStream(5))
            J = phases_sh(eta)
            assert res.pulls_used == 3 * J * (T // (3 * J))
            assert res.pulls_used <= T

    def test_zero_noise_exactness_randomized(self):
        rng = np.random.default_rng(11)
        for _ in range(120):
            x_star = float(rng.uniform(0, 1))
            eta = float(rng.choice([0.2, 0.1, 0.03, 1e-3]))
            J = phases_sh(eta)
            T = 3 * J * int(rng.integers(1, 4))
            res = run_sh(zero_env(x_star), T, eta, RngStream(0))
            assert abs(res.estimate - x_star) < eta

    def test_interval_nesting_and_terminal_width(self):
        env = make_environment(0, 2, 0.42, 2.0, "gaussian")
        res = run_sh(env, 500, 0.01, RngStream(17))
        J = phases_sh(0.01)
        sets = [rec.sampling_set for rec in res.phases]
        for prev, nxt in zip(sets, sets[1:]):
            assert prev.a1 <= nxt.a1 < nxt.a3 <= prev.a3
            assert nxt.width() == pytest.approx(prev.width() / 2)
        # terminal set is one zoom past the last sampled set
        assert sets[-1].width() == 2.0 ** -(J - 1)


class TestRunShb:
    def test_zero_noise_no_backtracking(self):
        res = run_shb(zero_env(0.3), 500, 0.1, RngStream(1))
        assert all(d is not Decision.BACKTRACK for d in res.trace)
        assert abs(res.estimate - 0.3) < 0.1
        assert res.pulls_used == 5 * 10 * 10

    def test_zero_noise_no_backtracking_randomized(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            x_star = float(rng.uniform(0, 1))
            eta = float(rng.choice([0.2, 0.1, 1e-3]))
            J = phases_shb(eta)
            T = 5 * J
            res = run_shb(zero_env(x_star), T, eta, RngStream(0))
            assert all(d is not Decision.BACKTRACK for d in res.trace)
            assert abs(res.estimate - x_star) < eta

    def test_budget_too_small(self):
        with pytest.raises(BudgetTooSmall):
            run_shb(zero_env(0.5), 49, 1e-8, RngStream(0))

    def test_guarantee_warning_large_eta(self):
        with pytest.warns(GuaranteeAssumptionWarning):
            run_shb(zero_env(0.5), 10**4, 0.3, RngStream(0))

    def test_guarantee_warning_small_budget(self):
        # 60*ln(5) ~ 96.6; T=90 is runnable but outside the guarantee
        with pytest.warns(GuaranteeAssumptionWarning):
            run_shb(zero_env(0.5), 90, 0.1, RngStream(0))

    def test_no_warning_in_covered_regime(self):
        import warnings as w

        with w.catch_warnings():
            w.simplefilter("error", GuaranteeAssumptionWarning)
            run_shb(zero_env(0.5), 200, 0.1, RngStream(0))

    def test_backtracks_occur_and_replay_consistently(self):
        # heavy noise with tiny per-phase budget provokes backtracking
        env = make_environment(0, 0.5, 0.6, 10.0, "gaussian")
        seen_backtrack = 0
        for seed in range(30):
            res = run_shb(env, 50, 0.1, RngStream(seed))
            seen_backtrack += any(d is Decision.BACKTRACK for d in res.trace)
            # replaying the recorded decisions reproduces the estimate
            a, h = ROOT_SET, ZoomHistory()
            zooms = effective_backs = 0
            for d in res.trace:
                if d is Decision.BACKTRACK:
                    if len(h):
                        effective_backs += 1
                    a = backtrack(a, h)
                elif d is Decision.ZOOM_RIGHT:
                    h.push(a)
                    a = zoom_right(a)
                    zooms += 1
                else:
                    h.push(a)
                    a = zoom_left(a)
                    zooms += 1
            assert a.a2 == res.estimate
            assert a.depth == zooms - effective_backs
            assert a.width() == 2.0 ** -a.depth
        assert seen_backtrack > 0

    def test_budget_accounting(self):
        env = make_environment(0, 2, 0.4, 1.0, "gaussian")
        res = run_shb(env, 1234, 0.05, RngStream(3))
        J = phases_shb(0.05)
        assert res.pulls_used == 5 * J * (1234 // (5 * J))
        assert res.pulls_used <= 1234

    def test_phase_stats_have_all_five_means(self):
        res = run_shb(zero_env(0.3), 200, 0.1, RngStream(0))
        for rec in res.phases:
            assert rec.stats.mean0 is not None
            assert rec.stats.mean1 is not None
        res_sh = run_sh(zero_env(0.3), 30, 0.1, RngStream(0))
        for rec in res_sh.phases:
            assert rec.stats.mean0 is None
            assert rec.stats.mean1 is None


class TestDeepZoomResolution:
    def test_resolution_warning_past_float_depth(self):
        # eta small enough that the zoom depth exceeds 52
        eta = 1e-17
        J = phases_sh(eta)
        assert J > 52
        with pytest.warns(ResolutionWarning):
            res = run_sh(zero_env(0.3), 3 * J, eta, RngStream(0))
        assert abs(res.estimate - 0.3) < 1e-12  # still numerically tight
