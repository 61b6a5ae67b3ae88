import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import states
from photon_certify import (
    ApparatusBounds,
    ApparatusParams,
    ClickCounts,
    ClickProbabilities,
    ConfidenceQuery,
    PhotonNumberDistribution,
    apply_loss,
    sample_counts,
    click_probabilities,
    fock,
    min_xbar,
    nw_alpha,
    p_value_wigner,
    q_alpha,
    q_alpha_star,
    q_alpha_tilde,
    stat_report,
)
from photon_certify.benchmarks import multimode_p1_tilde_T, p1_hat_star_R, p1_hat_star_T, p1_hat_T
from photon_certify.errors import DomainError
from photon_certify.finite_stats import (
    hoeffding_penalty,
    log_p_value_wigner,
    nw_from_q,
    parse_alpha,
    x_values,
    xbar_R,
    xbar_T,
    y_values,
    ybar_T,
    z_values,
)

LN_1E10 = math.log(1e10)
counts_st = st.tuples(*[st.integers(0, 10**6)] * 4).filter(lambda c: sum(c) > 0).map(lambda c: ClickCounts(*c))


@st.composite
def click_vectors(draw):
    w = np.asarray(draw(st.lists(st.floats(0, 1), min_size=4, max_size=4)))
    assume(w.sum() > 1e-6)
    return ClickProbabilities(*(w / w.sum()))


class TestMinXbar:
    @pytest.mark.parametrize("counts, expected", [
        ((0, 500, 500, 0), 1.0), ((1000, 0, 0, 0), 0.0), ((0, 250, 250, 500), 0.0)])
    def test_examples(self, counts, expected):
        assert min_xbar(ClickCounts(*counts)) == pytest.approx(expected, abs=1e-15)

    @given(counts_st)
    def test_equals_min_of_arm_means(self, c):
        assert min_xbar(c) == pytest.approx(min(xbar_T(c), xbar_R(c)), abs=1e-12)
        assert xbar_T(c) == pytest.approx((3 * c.n_ob - c.n_bo - c.n_bb) / c.n, abs=1e-12)
        assert -1 - 1e-12 <= min_xbar(c) <= 3 + 1e-12

    def test_empty(self):
        with pytest.raises(DomainError):
            min_xbar(ClickCounts(0, 0, 0, 0))


class TestEstimatorIdentities:
    @given(click_vectors())
    def test_expectations(self, p):
        probs = p.as_array()
        assert x_values("T") @ probs == pytest.approx(p1_hat_T(p), abs=1e-12)
        assert y_values("T") @ probs == pytest.approx(multimode_p1_tilde_T(p), abs=1e-12)
        b = ApparatusBounds(0.52, 0.5, 0.88, 0.95)
        assert z_values(b, "T") @ probs == pytest.approx(p1_hat_star_T(p, b), abs=1e-12)

    def test_ranges(self):
        assert np.ptp(x_values()) == 4 and np.ptp(y_values()) == 6

    def test_y_mean_formula(self):
        c = ClickCounts(10, 20, 30, 40)
        assert ybar_T(c) == pytest.approx((-0.5 * 10 + 4 * 30 - 2 * (20 + 40)) / 100)
        assert ybar_T(ClickCounts(10, 0, 0, 0)) == -0.5

    def test_literal_zero_score_overstates(self):
        # two lossy photons at eta = 0.2 with the oo outcome scored 0
        from photon_certify import MultimodeProductState, click_probabilities_multimode, lossy_single_photon
        mm = MultimodeProductState((lossy_single_photon(0.2), lossy_single_photon(0.2)))
        p = click_probabilities_multimode(mm, ApparatusParams.ideal()).as_array()
        literal = np.array([0.0, -2.0, 4.0, -2.0]) @ p
        assert literal == pytest.approx(0.3) and literal > mm.max_single_photon_weight()
        assert y_values("T") @ p <= mm.max_single_photon_weight()

    def test_y_mean_converges(self):
        p = click_probabilities(fock(1), ApparatusParams(t=0.45, eta_T=0.7, eta_R=0.8))
        c = sample_counts(p, 10**6, 3)
        sigma = 6 / math.sqrt(10**6)
        assert abs(ybar_T(c) - multimode_p1_tilde_T(p)) < 4 * sigma


class TestQAlpha:
    def test_example(self):
        # n = 1e6 and counts with min Xbar = 0.6
        c = ClickCounts(400_000, 300_000, 300_000, 0)
        assert min_xbar(c) == pytest.approx(0.6)
        assert q_alpha(c, 1e-10) == pytest.approx(0.6 - 0.0135723, abs=1e-4)
        assert hoeffding_penalty(4, 10**6, 1e-10) == pytest.approx(math.sqrt(16 * LN_1E10 / 2e6), rel=1e-15)

    @given(counts_st)
    def test_limits(self, c):
        assert q_alpha(c, 1 - 1e-15) == pytest.approx(min_xbar(c), abs=1e-6)
        assert q_alpha(c, 0.05) < min_xbar(c)

    @given(counts_st, st.floats(1e-12, 0.5), st.floats(1e-12, 0.5))
    def test_monotone_in_alpha(self, c, a1, a2):
        assume(a1 < a2 * 0.999)
        assert q_alpha(c, a1) < q_alpha(c, a2)

    def test_alpha_parsing(self):
        assert parse_alpha("1e-10") == 1e-10
        for bad in ("x", 0, 1, -0.2, None):
            with pytest.raises(DomainError):
                parse_alpha(bad)


class TestPValue:
    def test_clamp(self):
        assert p_value_wigner(ClickCounts(500, 250, 250, 0)) == 1.0  # min Xbar = 0.5
        assert p_value_wigner(ClickCounts(1000, 0, 0, 0)) == 1.0

    def test_exp_minus_twenty(self):
        c = ClickCounts(100, 450, 450, 0)  # min Xbar = 0.9, n = 1000
        assert min_xbar(c) == pytest.approx(0.9)
        assert p_value_wigner(c) == pytest.approx(math.exp(-20), rel=1e-12)
        assert p_value_wigner(c) == pytest.approx(2.061e-9, rel=1e-3)

    def test_underflow_floor(self):
        c = ClickCounts(0, 5 * 10**5, 5 * 10**5, 0)
        assert 0 < p_value_wigner(c) <= 5e-324
        assert log_p_value_wigner(c) == pytest.approx(-2e6 * 0.25 / 16)

    def test_decreases_with_n(self):
        ps = [p_value_wigner(ClickCounts(100 * k, 450 * k, 450 * k, 0)) for k in (1, 2, 3)]
        assert ps[0] > ps[1] > ps[2]

    @pytest.mark.parametrize("beta", [0.1, 0.01])
    def test_sound_for_positive_states(self, beta):
        # worst Wigner-positive case: P1 = 1/2 (on |0>,|1>), ideal apparatus
        rng = np.random.default_rng(17)
        p = click_probabilities(PhotonNumberDistribution([0.5, 0.5]), ApparatusParams.ideal()).as_array()
        n, runs = 1000, 10_000
        draws = rng.multinomial(n, p, size=runs)
        m = (4 * np.minimum(draws[:, 2], draws[:, 1]) - draws[:, 1] - draws[:, 2] - draws[:, 3]) / n
        pv = np.where(m > 0.5, np.exp(-2 * n * (m - 0.5) ** 2 / 16), 1.0)
        freq = np.mean(pv <= beta)
        assert freq <= beta + 3 * math.sqrt(beta * (1 - beta) / runs)


class TestNegativityConfidence:
    @pytest.mark.parametrize("q, expected", [(0.554, 0.006), (0.453, 0.0), (0.3, 0.0), (-0.2, 0.0)])
    def test_table_rows(self, q, expected):
        assert nw_from_q(q) == pytest.approx(expected, abs=5e-4)

    def test_composition(self):
        c = ClickCounts(100, 4000, 4000, 10)
        assert nw_alpha(c, 0.01) == nw_from_q(q_alpha(c, 0.01))


class TestStarAndTilde:
    def test_ideal_star(self):
        c = ClickCounts(0, 5 * 10**5, 5 * 10**5, 0)
        b = ApparatusBounds(0.5, 0.5, 1, 1)
        assert q_alpha_star(c, 1e-10, b) == pytest.approx(1 - 3 * math.sqrt(LN_1E10 / 2e6), abs=1e-12)
        assert q_alpha_star(c, 1e-10, b) == pytest.approx(0.9898, abs=1e-4)

    def test_all_double_clicks(self):
        c = ClickCounts(0, 0, 0, 1000)
        b = ApparatusBounds(0.5, 0.5, 1, 1)
        assert q_alpha_star(c, 0.05, b) == pytest.approx(-1 - 3 * math.sqrt(math.log(20) / 2000))

    @given(counts_st)
    def test_star_limit(self, c):
        b = ApparatusBounds(0.52, 0.5, 0.88, 0.95)
        assert q_alpha_star(c, 1 - 1e-15, b) == pytest.approx(
            max(p1_hat_star_T(c.frequencies(), b),
                p1_hat_star_R(c.frequencies(), b)), abs=1e-5)

    def test_tilde(self):
        c = ClickCounts(0, 500, 500, 0)
        assert q_alpha_tilde(c, 0.05) == pytest.approx(1 - 6 * math.sqrt(math.log(20) / 2000))
        assert q_alpha_tilde(ClickCounts(10, 0, 0, 0), 0.5) < 0


class TestReport:
    def test_fields(self):
        c = ClickCounts(100, 4000, 4100, 10)
        r = stat_report(ConfidenceQuery(c, "1e-3"))
        assert r.q_alpha_star is None and r.nw_alpha_star is None
        assert 0 < r.p_value <= 1
        assert r.nw_alpha >= 0 and r.nw_alpha_disk >= 0
        r2 = stat_report(ConfidenceQuery(c, 1e-3, ApparatusBounds(0.5, 0.5, 0.9, 0.9)))
        assert r2.q_alpha_star is not None and r2.nw_alpha_star >= 0

    def test_query_validation(self):
        with pytest.raises(DomainError):
            ConfidenceQuery(ClickCounts(0, 0, 0, 0), 0.1)
        with pytest.raises(DomainError):
            ConfidenceQuery(ClickCounts(1, 0, 0, 0), 1.5)


def test_coverage_small():
    # cheap version of the acceptance harness: 2000 experiments of n = 2000
    p1_true = 0.7
    state = PhotonNumberDistribution([0.2, p1_true, 0.1])
    params = ApparatusParams(t=0.45, eta_T=0.8, eta_R=0.9)
    p = click_probabilities(state, params).as_array()
    degraded = apply_loss(state, 0.45 * 0.8 + 0.55 * 0.9).p1
    rng = np.random.default_rng(5)
    n = 2000
    draws = rng.multinomial(n, p, size=2000)
    m = (4 * np.minimum(draws[:, 1], draws[:, 2]) - draws[:, 1] - draws[:, 2] - draws[:, 3]) / n
    q = m - hoeffding_penalty(4, n, 0.05)
    assert np.mean(q > degraded) <= 0.06
