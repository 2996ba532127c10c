from __future__ import annotations

import math

import numpy as np
import pytest

from eprgames import correlation as cg
from eprgames import games as gm
from eprgames import gfunctions as gf
from eprgames.errors import DomainError, NoEquilibriumError

PI = math.pi
PD = gm.prisoners_dilemma()
CLASSICAL = cg.CorrelationModel.named("classical")
SINGLET = cg.CorrelationModel.named("singlet")
MIXTURE = cg.CorrelationModel.named("mixture")


def spec(g, model=SINGLET, game=PD):
    return cg.CorrelationGame(game, g, model)


class TestModels:
    def test_classical(self):
        assert CLASSICAL.corr_vs_z(0.0) == -1.0
        assert CLASSICAL.corr_vs_z(PI) == 1.0

    def test_singlet(self):
        assert SINGLET.corr_vs_z(PI / 2) == pytest.approx(0.0, abs=1e-15)
        assert SINGLET.corr_vs_z(PI / 3) == pytest.approx(-0.5)

    def test_mixture(self):
        assert MIXTURE.corr_vs_z(0.0) == pytest.approx(-1 / 3)

    def test_bounded(self):
        th = np.linspace(0, PI, 201)
        for m in (CLASSICAL, SINGLET, MIXTURE):
            assert np.all(np.abs(m.corr_vs_z(th)) <= 1.0)

    def test_pair_matches_vs_z_on_z(self):
        for th in np.linspace(0, PI, 13):
            for m in (CLASSICAL, SINGLET, MIXTURE):
                assert m.corr_pair(cg.axis_a(th), cg.Z_AXIS) == pytest.approx(m.corr_vs_z(th), abs=1e-12)
                assert m.corr_pair(cg.Z_AXIS, cg.axis_b(th)) == pytest.approx(m.corr_vs_z(th), abs=1e-12)

    def test_cross_plane_singlet(self):
        # e_A . e_B = cos(theta_A) cos(theta_B) for the two orthogonal planes
        ta, tb = 0.7, 2.1
        assert SINGLET.corr_pair(cg.axis_a(ta), cg.axis_b(tb)) == pytest.approx(-math.cos(ta) * math.cos(tb))

    def test_unknown_model(self):
        with pytest.raises(DomainError):
            cg.CorrelationModel.named("bogus")
        with pytest.raises(DomainError):
            SINGLET.corr_vs_z(4.0)


class TestPayoffFromCorrelations:
    def test_full_anticorrelation_is_defect(self):
        assert cg.payoff_from_correlations(PD, gf.g1(), -1.0, -1.0) == pytest.approx((1, 1))

    def test_full_correlation_is_cooperate(self):
        assert cg.payoff_from_correlations(PD, gf.g1(), 1.0, 1.0) == pytest.approx((3, 3))

    def test_swap_for_bob(self):
        # Alice at G=1 (cooperate), Bob at G=0 (defect): sucker's payoff for Alice
        assert cg.payoff_from_correlations(PD, gf.g1(), 1.0, -1.0) == pytest.approx((0, 5))

    @pytest.mark.parametrize("g", [gf.g1(), gf.g3(0.5, PI / 4), gf.g8(), gf.g5(0.2)])
    def test_classical_reduction(self, g):
        s = spec(g, CLASSICAL)
        for ta in np.linspace(0, PI, 9):
            for tb in np.linspace(0, PI, 9):
                expected = gm.payoff(PD, (float(g(ta)), float(g(tb))))
                assert cg.payoff_at_angles(s, ta, tb) == pytest.approx(expected, abs=1e-12)

    def test_third_correlation_irrelevant(self):
        # same z-referenced law, wildly different pair law
        weird = cg.CorrelationModel("custom", vs_z=lambda t: -np.cos(t), pair=lambda a, b: 0.123)
        for ta, tb in [(0.3, 1.2), (2.0, 0.1)]:
            assert cg.payoff_at_angles(spec(gf.g1(), weird), ta, tb) == cg.payoff_at_angles(spec(gf.g1()), ta, tb)


class TestQuantumPayoff:
    def test_defect_corner(self):
        assert cg.quantum_payoff(spec(gf.g1()), (0, 0)) == ((1.0, 1.0),)

    def test_midpoint_unchanged(self):
        (pay,) = cg.quantum_payoff(spec(gf.g1()), (0.5, 0.5))
        assert pay == pytest.approx((2.25, 2.25))

    def test_fixed_point_profiles(self):
        g = gf.g3(0.5, PI / 4)
        for th in (0.0, PI / 2, PI):
            p = float(g(th))
            (pay,) = cg.quantum_payoff(spec(g), (p, p))
            assert pay == pytest.approx(gm.payoff(PD, (p, p)), abs=1e-12)

    def test_unattainable_is_empty(self):
        assert cg.quantum_payoff(spec(gf.g4(0.4)), (1.0, 0.5)) == ()

    def test_mixture_changes_payoffs(self):
        g = gf.g1()
        diffs = [abs(cg.quantum_payoff(spec(g, MIXTURE), (p, p))[0][0] - gm.payoff(PD, (p, p))[0])
                 for p in np.linspace(0, 1, 21)]
        assert max(diffs) > 0.01

    def test_g8_classical_single_valued(self):
        s = spec(gf.g8(), CLASSICAL)
        for p in np.linspace(0, 1, 21):
            assert cg.effective_probs(s, float(p)) == pytest.approx((p,))


class TestEquilibria:
    def test_pd_g1_unchanged(self):
        res = cg.quantum_pure_ne(spec(gf.g1()))
        assert [p.as_tuple() for p in res.profiles] == [(0.0, 0.0)]
        assert res.method == "closed_form"

    def test_pd_g3(self):
        res = cg.quantum_pure_ne(spec(gf.g3(0.5, PI / 4)))
        (p,) = res.profiles
        assert p.as_tuple() == pytest.approx((5 / 9, 5 / 9), abs=1e-12)

    @pytest.mark.parametrize("delta, eps", [(0.5, PI / 4), (0.3, 1.0), (0.5, PI / 2), (0.7, 2.0), (0.2, 3.0)])
    def test_g3_piecewise_closed_form_agrees(self, delta, eps):
        (p,) = cg.quantum_pure_ne(spec(gf.g3(delta, eps))).profiles
        assert p.p_a == pytest.approx(cg.g3_pd_closed_form(delta, eps), abs=1e-12)

    @pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
    def test_g4_cooperation_condition(self, delta):
        g = gf.g4(delta)
        (up,) = g.inverse_set(1.0, include_limits=True).angles
        (zero,) = g.inverse_set(0.0).angles
        assert math.cos(up) == pytest.approx(1 - 2 * zero / PI, abs=1e-12)

    def test_no_zero_means_no_solution(self):
        g = gf.GFunction((gf.Piece(0, PI, 0.2, 0.9),))
        with pytest.raises(NoEquilibriumError):
            cg.quantum_pure_ne(spec(g))

    def test_guard_falls_back_to_grid(self):
        res = cg.quantum_pure_ne(spec(gf.g1(), game=gm.matching_pennies()), grid_n=201)
        assert res.method == "grid"

    def test_bos_g1_against_brackets(self):
        g = gf.g1()
        res = cg.bos_quantum_mixed_ne(2, 1, 0, g)
        (p,) = res.profiles
        # Q^-1 for g1 is p -> arccos(1 - 2p) / pi
        assert p.p_a == pytest.approx(math.acos(1 - 4 / 3) / PI, abs=1e-12)
        assert p.p_b == pytest.approx(math.acos(1 - 2 / 3) / PI, abs=1e-12)
        br_a, br_b = cg.indifference_brackets(spec(g, game=gm.battle_of_sexes()), 1001)
        assert any(lo <= p.p_a <= hi for lo, hi in br_a)
        assert any(lo <= p.p_b <= hi for lo, hi in br_b)

    @pytest.mark.parametrize("g", [gf.g1(), gf.g3(0.3, 1.0), gf.g6(0.4, 2.0)])
    def test_target_at_right_angle_unchanged(self, g):
        target = float(g(PI / 2))
        sols = cg.transform_target(g, SINGLET, target)
        assert any(abs(s.p - target) <= 1e-12 for s in sols)

    def test_target_off_right_angle_moves(self):
        (sol,) = cg.transform_target(gf.g1(), SINGLET, 0.8)
        assert abs(sol.p - 0.8) > 0.01

    def test_bos_g8_direction_split(self):
        res = cg.bos_quantum_mixed_ne(2, 1, 0, gf.g8())
        assert res.bifurcated
        thetas = sorted(s.theta for s in res.components_a)
        assert len(thetas) == 2 and thetas[1] - thetas[0] > 0.1
        assert res.profiles[0].p_a != pytest.approx(2 / 3)


class TestGrid:
    def test_classical_pd(self):
        res = cg.ne_grid_search(spec(gf.g1(), CLASSICAL), 101)
        assert [p.as_tuple() for p in res.points] == [(0.0, 0.0)]
        assert not res.continuum

    def test_quantum_pd_g3(self):
        res = cg.ne_grid_search(spec(gf.g3(0.5, PI / 4)), 1001)
        (p,) = res.points
        assert abs(p.p_a - 5 / 9) <= 1e-3 and abs(p.p_b - 5 / 9) <= 1e-3

    def test_constant_game_continuum(self):
        const = gm.BimatrixGame.symmetric(1, 1, 1, 1)
        res = cg.ne_grid_search(spec(gf.g1(), game=const), 11)
        assert len(res.points) == 121 and res.continuum

    def test_non_invertible_uses_angle_grid(self):
        res = cg.ne_grid_search(spec(gf.g8()), 181)
        assert res.grid_kind == "theta"
        assert res.points

    def test_small_grid_rejected(self):
        with pytest.raises(DomainError):
            cg.ne_grid_search(spec(gf.g1()), 1)


def test_chsh_mixture_bounded():
    for t in np.linspace(0, 2 * PI, 721):
        val = cg.chsh_value(MIXTURE, *cg.chsh_family(math.sin(t), math.cos(t)))
        assert abs(val) <= 2 * math.sqrt(2) / 3 + 1e-12
