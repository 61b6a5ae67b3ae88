import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import apparatus, states
from photon_certify import (
    ApparatusBounds,
    ApparatusParams,
    ClickProbabilities,
    MultimodeProductState,
    PhotonNumberDistribution,
    PolytopePoint,
    apply_loss,
    click_probabilities,
    click_probabilities_multimode,
    effective_params,
    fn_hn_gn,
    fock,
    lossy_single_photon,
    multimode_envelope,
    multimode_p1_tilde,
    p1_hat,
    p1_hat_star,
    polytope_contains,
    polytope_vertices,
)
from photon_certify.benchmarks import (
    c1,
    c2,
    clamp_unit,
    multimode_n_star,
    multimode_p1_tilde_T,
    multimode_vertex_value,
    p1_hat_R,
    p1_hat_star_R,
    p1_hat_star_T,
    p1_hat_T,
    polytope_export,
    star_coefficients,
)
from photon_certify.errors import DegenerateError, DomainError

IDEAL_PHOTON = ClickProbabilities(0, 0.5, 0.5, 0)
FOCK2 = ClickProbabilities(0, 0.25, 0.25, 0.5)
VACUUM = ClickProbabilities(1, 0, 0, 0)


@st.composite
def click_vectors(draw):
    w = np.asarray(draw(st.lists(st.floats(0, 1), min_size=4, max_size=4)))
    assume(w.sum() > 1e-6)
    return ClickProbabilities(*(w / w.sum()))


class TestIndependent:
    def test_examples(self):
        assert p1_hat_T(IDEAL_PHOTON) == 1.0
        assert p1_hat_T(VACUUM) == 0.0
        assert p1_hat_T(ClickProbabilities(0.2, 0.4, 0.4, 0)) == pytest.approx(0.8, abs=1e-15)
        assert p1_hat(IDEAL_PHOTON) == 1.0
        assert p1_hat(FOCK2) == 0.0
        p = ClickProbabilities(0.2, 0.45, 0.3, 0.05)
        assert p1_hat(p) == min(p1_hat_T(p), p1_hat_R(p))

    @given(click_vectors())
    def test_disjoint_form_consistency(self, p):
        assert p1_hat_T(p) == pytest.approx(4 * p.p_o_ - 3 * p.p_oo - 1, abs=1e-12)
        assert p1_hat_R(p) == pytest.approx(4 * p.p__o - 3 * p.p_oo - 1, abs=1e-12)
        assert -1 - 1e-12 <= p1_hat_T(p) <= 3 + 1e-12

    @given(states(), apparatus(min_eta=0.01))
    def test_sound_for_degraded_state(self, s, params):
        eta = effective_params(params).eta
        assert p1_hat(click_probabilities(s, params)) <= apply_loss(s, eta).p1 + 1e-10

    @pytest.mark.parametrize("eta", np.round(np.arange(0.1, 1.01, 0.1), 1))
    def test_tight_for_lossy_photon(self, eta):
        p = click_probabilities(apply_loss(fock(1), eta), ApparatusParams.ideal())
        assert p1_hat(p) == pytest.approx(eta, abs=1e-12)


class TestPolytope:
    def test_vertices(self):
        v = [pt.as_tuple() for pt in polytope_vertices(1.0)]
        assert v == [(0, 0), (0.5, 0), (0.5, 0), (1, 1)]
        v = [pt.as_tuple() for pt in polytope_vertices(0.5)]
        assert v == [(0, 0), (0.375, 0), (0.75, 0.5), (1, 1)]
        v = [pt.as_tuple() for pt in polytope_vertices(0.0)]
        assert v == [(0, 0), (0.25, 0), (1, 1), (1, 1)]
        assert polytope_vertices(0.75)[1].as_tuple() == (0.4375, 0)

    def test_membership(self):
        assert polytope_contains(1.0, PolytopePoint(0.5, 0))
        assert not polytope_contains(0.75, PolytopePoint(0.5, 0))
        for P in (0, 0.3, 1):
            assert polytope_contains(P, PolytopePoint(0.3, 0.3))
        with pytest.raises(DomainError):
            polytope_contains(1.5, PolytopePoint(0, 0))

    @given(st.floats(0, 1))
    def test_vertices_inside(self, P):
        for v in polytope_vertices(P):
            assert polytope_contains(P, v)

    @given(states(), apparatus())
    def test_physical_points_inside_triangle(self, s, params):
        pt = PolytopePoint.from_probabilities(click_probabilities(s, params))
        assert pt.is_physical()

    @given(states(), apparatus(min_eta=0.01))
    def test_point_inside_polytope_of_its_degraded_p1(self, s, params):
        p = click_probabilities(s, params)
        eta = effective_params(params).eta
        assert polytope_contains(min(apply_loss(s, eta).p1, 1.0), PolytopePoint.from_probabilities(p))

    def test_export(self):
        out = polytope_export([1.0], [PolytopePoint(0.4, 0.1)])
        assert out == {"polytopes": [{"P": 1.0, "vertices": [[0, 0], [0.5, 0], [0.5, 0], [1, 1]]}],
                       "points": [[0.4, 0.1]]}


class TestApparatusDependent:
    def test_coefficients(self):
        assert c1(0.5, 1) == 2.0 and c2(0.5, 1, 1) == 1.0
        assert c1(0.51, 0.88) == pytest.approx(2.2282, abs=1e-4)
        with pytest.raises(DegenerateError):
            c1(0.0, 1)
        with pytest.raises(DegenerateError):
            c2(1.0, 1, 1)

    def test_examples(self):
        b = ApparatusBounds(0.5, 0.5, 1, 1)
        assert p1_hat_star_T(IDEAL_PHOTON, b) == 1.0
        assert p1_hat_star_T(FOCK2, b) == pytest.approx(0.0, abs=1e-15)
        assert p1_hat_star(FOCK2, b) == pytest.approx(0.0, abs=1e-15)

    def test_unclamped(self):
        b = ApparatusBounds(0.5, 0.5, 0.5, 0.5)
        v = p1_hat_star(IDEAL_PHOTON, b)
        assert v == pytest.approx(2.0) and clamp_unit(v) == 1.0

    def test_bounds_validation(self):
        with pytest.raises(DegenerateError):
            ApparatusBounds(0.0, 1.0, 1, 1)
        with pytest.raises(DegenerateError):
            ApparatusBounds(0.5, 0.5, 0.0, 1)
        with pytest.raises(DomainError):
            ApparatusBounds(0.4, 0.5, 1, 1)
        with pytest.raises(DegenerateError):
            ApparatusBounds(0.5, 0.5, 0.8, 1, eta_T_min=0.9)

    @given(states(), st.floats(0.2, 0.8), st.floats(0.3, 1.0), st.floats(0.3, 1.0))
    def test_sound_at_exact_calibration(self, s, t, eta_T, eta_R):
        # bounds equal to the true values: both arms are sound
        params = ApparatusParams(t=t, eta_T=eta_T, eta_R=eta_R)
        b = ApparatusBounds(t, 1 - t, eta_T, eta_R)
        assert p1_hat_star(click_probabilities(s, params), b) <= s.p1 + 1e-10

    def test_plain_coefficients_unsound_below_efficiency_bound(self):
        # |2> with the true efficiency below its declared upper bound
        b = ApparatusBounds(0.5, 0.5, 1.0, 1.0)
        p = click_probabilities(fock(2), ApparatusParams(t=0.5, eta_T=0.6, eta_R=1.0))
        assert p1_hat_star_T(p, b) > 0.1

    @given(states(max_n=10), st.data())
    def test_robust_coefficients_sound_over_box(self, s, data):
        t_hat = data.draw(st.floats(0.3, 0.7))
        r_hat = data.draw(st.floats(1 - t_hat, min(1.0, 1.1 - t_hat)))
        eta_T_hat = data.draw(st.floats(0.4, 1.0))
        eta_R_hat = data.draw(st.floats(0.4, 1.0))
        eta_T_min = data.draw(st.floats(0.3, eta_T_hat))
        eta_R_min = data.draw(st.floats(0.3, eta_R_hat))
        b = ApparatusBounds(t_hat, r_hat, eta_T_hat, eta_R_hat, eta_T_min, eta_R_min)
        t = data.draw(st.floats(min(1 - r_hat, t_hat), t_hat))
        params = ApparatusParams(t=t, eta_T=data.draw(st.floats(eta_T_min, eta_T_hat)),
                                 eta_R=data.draw(st.floats(eta_R_min, eta_R_hat)))
        assert b.contains(params)
        assert p1_hat_star(click_probabilities(s, params), b) <= s.p1 + 1e-10

    def test_robust_reduces_to_standard_at_point_bounds(self):
        b = ApparatusBounds(0.45, 0.55, 0.8, 0.9, eta_T_min=0.8, eta_R_min=0.9)
        std = star_coefficients(ApparatusBounds(0.45, 0.55, 0.8, 0.9))
        np.testing.assert_allclose(star_coefficients(b), std, rtol=1e-14)

    def test_fn_hn_gn_examples(self):
        assert fn_hn_gn(1, ApparatusParams.ideal()) == (0.5, 0.5, 0.0)
        np.testing.assert_allclose(fn_hn_gn(2, ApparatusParams.ideal()), (0.25, 0.25, 0.5))
        with pytest.raises(DomainError):
            fn_hn_gn(0, ApparatusParams.ideal())

    @given(st.integers(1, 30), apparatus())
    def test_fn_hn_gn_match_click_model(self, n, params):
        p = click_probabilities(fock(n), params)
        np.testing.assert_allclose(fn_hn_gn(n, params), (p.p_ob, p.p_bo, p.p_bb), atol=1e-12)

    @given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
    def test_ratio_identity(self, x, y):
        assume(x + y < 1)
        # x = t eta_T, y = r eta_R
        params = ApparatusParams(t=x, eta_T=1.0, eta_R=y / (1 - x))
        f1, _, _ = fn_hn_gn(1, params)
        f2, _, g2 = fn_hn_gn(2, params)
        assert f2 / (f1 * g2) == pytest.approx((2 - x - 2 * y) / (2 * x * y), rel=1e-9)


class TestMultimode:
    def test_examples(self):
        assert multimode_p1_tilde_T(IDEAL_PHOTON) == 1.0
        assert multimode_p1_tilde_T(VACUUM) == -0.5

    @given(click_vectors())
    def test_relation_to_single_mode(self, p):
        assert multimode_p1_tilde_T(p) == pytest.approx((3 * p1_hat_T(p) - 1) / 2, abs=1e-12)

    @given(st.lists(states(max_n=6), min_size=2, max_size=5))
    def test_sound_for_products(self, modes):
        mm = MultimodeProductState(tuple(modes))
        p = click_probabilities_multimode(mm, ApparatusParams.ideal())
        assert multimode_p1_tilde(p) <= mm.max_single_photon_weight() + 1e-10

    def test_envelope_limits(self):
        assert multimode_envelope(0.0) == pytest.approx(1 / 3)
        assert multimode_envelope(1e-9) == pytest.approx(1 / 3, abs=1e-6)
        assert multimode_envelope(1.0) == 1.0

    @pytest.mark.parametrize("P", [0.5, 0.6, 0.75, 0.9, 0.99])
    def test_envelope_is_P_above_half(self, P):
        assert multimode_envelope(P) == pytest.approx(P, abs=1e-12)

    @pytest.mark.parametrize("P", [0.01, 0.05, 0.1, 0.25, 0.4, 0.49])
    def test_envelope_matches_discrete_max(self, P):
        brute = multimode_vertex_value(np.arange(1, 2001), P).max()
        assert multimode_envelope(P) == pytest.approx(brute, abs=1e-14)
        assert P < multimode_envelope(P) <= 1 / 3 + 2 / 3 * P

    @given(st.floats(0.001, 0.999))
    def test_n_star_is_stationary(self, P):
        n = multimode_n_star(P)
        h = 1e-5 * max(1.0, n)
        slope = (multimode_vertex_value(n + h, P) - multimode_vertex_value(n - h, P)) / (2 * h)
        assert abs(slope) < 1e-6

    def test_vertex_value_at_one_mode_is_P(self):
        assert multimode_vertex_value(1, 0.3) == pytest.approx(0.3)
