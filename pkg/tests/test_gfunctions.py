from __future__ import annotations

import json
import math

import numpy as np
import pytest

from eprgames import gfunctions as gf
from eprgames.errors import DomainError

PI = math.pi
INVERTIBLE = {"g1": gf.g1(), "g2": gf.g2(), "g3": gf.g3(0.5, PI / 4), "g6": gf.g6(0.3, 2.0)}
NON_INVERTIBLE = {"g4": gf.g4(0.4), "g5": gf.g5(0.4), "g7": gf.g7(0.3, 1.0), "g8": gf.g8()}
ALL = {**INVERTIBLE, **NON_INVERTIBLE}


class TestEval:
    def test_g1_midpoint(self):
        assert gf.g1()(PI / 2) == pytest.approx(0.5, abs=1e-15)

    def test_g3_second_branch(self):
        # 1/2 + (1/2) * (pi/12) / (3 pi / 4) = 1/2 + 1/18
        assert gf.g3(0.5, PI / 4)(PI / 3) == pytest.approx(5 / 9, abs=1e-15)

    def test_g8_descending_branch(self):
        assert gf.g8()(3 * PI / 4) == pytest.approx(0.5, abs=1e-15)

    def test_breakpoint_ownership(self):
        g3 = gf.g3(0.5, PI / 4)
        # left piece is closed on the right, so eps maps to 0 rather than delta
        assert g3(PI / 4) == 0.0
        assert g3(PI / 4 + 1e-6) == pytest.approx(0.5, abs=1e-5)
        g4 = gf.g4(0.4)
        assert g4(PI / 2) == 0.0
        assert g4(PI) == pytest.approx(0.4)

    def test_vectorized_matches_scalar(self):
        thetas = np.linspace(0, PI, 37)
        for g in ALL.values():
            vec = g.eval(thetas)
            assert vec.shape == thetas.shape
            assert np.array_equal(vec, [g.eval(float(t)) for t in thetas])

    @pytest.mark.parametrize("theta", [-0.01, PI + 0.01, float("nan")])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            gf.g1()(theta)

    def test_handwritten_formulas(self):
        d, e = 0.3, 1.1
        th = np.linspace(0, PI, 101)
        cases = {
            "g4": (gf.g4(d), np.where(th <= PI / 2, d * (1 - 2 * th / PI), 1 - 2 * (1 - d) * (th - PI / 2) / PI)),
            "g5": (gf.g5(d), np.where(th <= PI / 2, 2 * (1 - d) * th / PI + d, 2 * d * (th - PI / 2) / PI)),
            "g6": (gf.g6(d, e), np.where(th <= e, (1 - d) * th / e + d, d * (PI - th) / (PI - e))),
            "g7": (gf.g7(d, e), np.where(th <= e, 1 - (1 - d) * th / e, d * (th - e) / (PI - e))),
        }
        for name, (g, expected) in cases.items():
            # breakpoints are resolved by ownership within 1e-9, checked separately
            away = np.all([np.abs(th - b) > 1e-9 for b in g.breakpoints()], axis=0)
            assert np.allclose(g.eval(th)[away], expected[away], atol=1e-14), name


class TestInvertibility:
    @pytest.mark.parametrize("name", sorted(INVERTIBLE))
    def test_invertible(self, name):
        assert INVERTIBLE[name].invertible()

    @pytest.mark.parametrize("name", sorted(NON_INVERTIBLE))
    def test_not_invertible(self, name):
        assert not NON_INVERTIBLE[name].invertible()

    def test_constant_piece(self):
        g = gf.GFunction((gf.Piece(0, 1, 0.2, 0.2), gf.Piece(1, PI, 0.2, 1.0, closed_left=False)))
        assert not g.invertible()
        pre = g.inverse_set(0.2)
        assert pre.non_unique
        assert pre.angles == (0.0, 1.0)


class TestInverseSet:
    def test_g1(self):
        assert gf.g1().inverse_set(0.5).angles == pytest.approx((PI / 2,))

    def test_g8_two_preimages(self):
        assert gf.g8().inverse_set(0.5).angles == pytest.approx((PI / 4, 3 * PI / 4))

    def test_g3_zero(self):
        assert gf.g3(0.5, PI / 4).inverse_set(0.0).angles == pytest.approx((PI / 4,))

    def test_unattained_limit(self):
        g4 = gf.g4(0.4)
        assert g4.inverse_set(1.0).angles == ()
        assert g4.inverse_set(1.0, include_limits=True).angles == pytest.approx((PI / 2,))

    def test_g4_delta_twice(self):
        assert gf.g4(0.4).inverse_set(0.4).angles == pytest.approx((0.0, PI))

    @pytest.mark.parametrize("name", sorted(INVERTIBLE))
    def test_round_trip(self, name):
        g = INVERTIBLE[name]
        for th in np.linspace(0, PI, 1001):
            pre = g.inverse_set(float(g(th))).angles
            assert any(abs(a - th) <= 1e-9 for a in pre)

    def test_vector_inverse(self):
        g = gf.g3(0.5, PI / 4)
        ps = np.array([0.0, 0.25, 0.5, 5 / 9, 1.0])
        th = g.inverse(ps)
        assert np.allclose(g.eval(th), ps, atol=1e-12)
        with pytest.raises(DomainError):
            gf.g8().inverse(0.5)


class TestDerived:
    def test_big_G(self):
        g1 = gf.g1()
        assert gf.big_G(g1, 0.0) == pytest.approx(0.5)
        assert gf.big_G(g1, -1.0) == 0.0
        assert gf.big_G(gf.g8(), 0.5) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            gf.big_G(g1, 1.5)

    def test_q_transform_g1_formula(self):
        for p in np.linspace(0, 1, 21):
            (q,) = gf.q_transform(gf.g1(), float(p))
            assert q == pytest.approx((1 - math.cos(PI * p)) / 2, abs=1e-12)

    def test_q_transform_empty_when_unattained(self):
        assert gf.q_transform(gf.g4(0.4), 1.0) == ()

    def test_g8_branches_meet(self):
        # preimages of g8 always sit symmetrically about pi/2, and so do their images
        for p in (0.1, 0.3, 0.77):
            branches = gf.q_branches(gf.g8(), p)
            assert len(branches) == 2
            assert branches[0][1] + branches[1][1] == pytest.approx(PI)
            assert len(gf.q_transform(gf.g8(), p)) == 1

    def test_asymmetric_two_branch_function_splits(self):
        g = gf.GFunction((gf.Piece(0, 1.0, 0, 1), gf.Piece(1.0, PI, 1, 0, closed_left=False)))
        assert len(gf.q_transform(g, 0.5)) == 2

    @pytest.mark.parametrize("name", sorted(ALL))
    def test_fixed_points(self, name):
        g = ALL[name]
        for th in (0.0, PI / 2, PI):
            values = gf.q_transform(g, float(g(th)))
            assert any(abs(v - float(g(th))) <= 1e-12 for v in values)

    @pytest.mark.parametrize("name", sorted(ALL))
    def test_range(self, name):
        g = ALL[name]
        for p in np.linspace(0, 1, 51):
            assert all(0.0 <= v <= 1.0 for v in gf.q_transform(g, float(p)))

    def test_q_inverse_g3(self):
        (sol,) = gf.q_inverse(gf.g3(0.5, PI / 4), 0.0)
        assert sol[0] == pytest.approx(5 / 9, abs=1e-12)
        assert sol[1] == pytest.approx(PI / 3)


class TestParsing:
    def test_query_string(self):
        g = gf.parse_g("g3?delta=0.25&eps=1.0")
        assert g.params == {"delta": 0.25, "eps": 1.0}
        assert g(0.0) == 0.25

    def test_bare_name(self):
        assert gf.parse_g("g8").name == "g8"

    def test_bad_params(self):
        with pytest.raises(DomainError):
            gf.parse_g("g1?delta=0.5")
        with pytest.raises(DomainError):
            gf.parse_g("g3?delta=1.5")
        with pytest.raises(DomainError):
            gf.parse_g("g9")

    def test_json_file(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"pieces": [
            {"from": 0, "to": 0.7853981634, "v_from": 0.5, "v_to": 0.0, "closed_left": True},
            {"from": 0.7853981634, "to": PI, "v_from": 0.5, "v_to": 1.0, "closed_left": False},
        ]}))
        g = gf.parse_g(str(path))
        assert g(PI / 3) == pytest.approx(5 / 9, abs=1e-9)
        assert gf.GFunction.from_dict(g.to_dict()) == g

    def test_rejects_gap(self):
        with pytest.raises(DomainError):
            gf.GFunction((gf.Piece(0, 1, 0, 0.5), gf.Piece(1.2, PI, 0.5, 1)))

    def test_rejects_range(self):
        with pytest.raises(DomainError):
            gf.GFunction((gf.Piece(0, PI, 0, 1.5),))
