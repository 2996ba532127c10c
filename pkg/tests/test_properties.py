from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from eprgames import correlation as cg
from eprgames import games as gm
from eprgames import gfunctions as gf
from eprgames import lhv
from eprgames import quantum as q

PI = math.pi
payoff_value = st.floats(-10, 10, allow_nan=False).map(lambda v: round(v, 3))
prob = st.floats(0, 1, allow_nan=False)
angle = st.floats(0, PI, allow_nan=False)
weight = st.floats(-2, 2, allow_nan=False)


@st.composite
def games_(draw):
    cells = [[(draw(payoff_value), draw(payoff_value)) for _ in range(2)] for _ in range(2)]
    return gm.BimatrixGame(cells)


@st.composite
def builtin_g(draw):
    name = draw(st.sampled_from(sorted(gf.BUILTINS)))
    delta = draw(st.floats(0.05, 0.95))
    eps = draw(st.floats(0.1, PI - 0.1))
    kwargs = {}
    if name in ("g3", "g4", "g5", "g6", "g7"):
        kwargs["delta"] = delta
    if name in ("g3", "g6", "g7"):
        kwargs["eps"] = eps
    return gf.builtin(name, **kwargs)


@given(payoff_value, payoff_value, payoff_value, payoff_value, prob, prob)
def test_bilinear_matches_expectation(r, s, t, u, x, y):
    c = gm.coeffs_from_cells(r, s, t, u)
    direct = x * y * r + x * (1 - y) * s + (1 - x) * y * t + (1 - x) * (1 - y) * u
    assert gm.bilinear(c, x, y) == pytest.approx(direct, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(games_())
def test_mixed_nash_points_survive_deviation(game):
    ns = gm.mixed_nash(game)
    assert ns.points or ns.segments or ns.whole_square
    ends = [e for seg in ns.segments for e in (seg.start, seg.end)]
    for p in (*ns.points, *ends):
        assert gm.max_deviation_gain(game, p, grid=201) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(builtin_g(), prob)
def test_q_transform_in_unit_interval(g, p):
    assert all(0.0 <= v <= 1.0 for v in gf.q_transform(g, p))


@settings(max_examples=100, deadline=None)
@given(builtin_g(), angle)
def test_g_in_unit_interval(g, theta):
    assert 0.0 <= float(g(theta)) <= 1.0


@settings(max_examples=100, deadline=None)
@given(builtin_g(), angle, angle)
def test_classical_model_is_identity(g, ta, tb):
    spec = cg.CorrelationGame(gm.prisoners_dilemma(), g, cg.CorrelationModel.named("classical"))
    expected = gm.payoff(spec.game, (float(g(ta)), float(g(tb))))
    assert cg.payoff_at_angles(spec, ta, tb) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(weight, min_size=16, max_size=16))
def test_signed_measure_stats_consistent(values):
    m = np.array(values)
    m += (1 - m.sum()) / 16
    stats = lhv.lhv_to_stats(lhv.LhvMeasure(m))
    rep = lhv.validate_stats(stats)
    assert rep.normalized and rep.consistent
    # each block sums to one regardless of sign
    for k in range(4):
        assert stats.block(k).sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=16, max_size=16))
def test_nonnegative_measures_respect_chsh(values):
    w = np.array(values)
    assume(w.sum() > 1e-6)
    assert abs(lhv.chsh_from_measure(lhv.LhvMeasure(w / w.sum()))) <= 2 + 1e-12


@settings(max_examples=200, deadline=None)
@given(prob, prob, prob, prob)
def test_product_stats_round_trip(r, s, r2, s2):
    stats = lhv.product_stats(r, s, r2, s2)
    assert lhv.validate_stats(stats).nonnegative
    assert lhv.extract_head_probs(stats) == pytest.approx((r, s, r2, s2), abs=1e-12)


@st.composite
def perfect_measures(draw):
    head = np.array([draw(st.floats(0, 1)) for _ in range(4)])
    assume(head.sum() > 1e-6)
    head /= head.sum()
    tail = [draw(st.floats(-0.3, 0.3)) for _ in range(3)]
    m = np.zeros(16)
    m[:4] = head
    m[12:15] = tail
    m[15] = -sum(tail)
    return lhv.LhvMeasure(m)


@settings(max_examples=200, deadline=None)
@given(perfect_measures(), st.sampled_from([lhv.PD_REP1, lhv.PD_REP2]))
def test_split_parts_add_to_bilinear(measure, entries):
    red = lhv.perfect_corr_reduce(measure)
    split = lhv.correlated_payoffs(entries, red)
    args = {"S1,S1'": (1, 1), "S1,S2'": (1, red.s2), "S2,S1'": (red.s, 1), "S2,S2'": (red.s, red.s2)}
    for name, (x, y) in args.items():
        assert split["A"][name].total == pytest.approx(entries.bilinear_a(x, y), abs=1e-9)
        assert split["B"][name].total == pytest.approx(entries.bilinear_b(x, y), abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_rep1_equilibrium_robust(s, s2):
    m = lhv.LhvMeasure.from_entries({4: 1.0, 13: s2, 14: s - s2, 16: -s})
    assert lhv.pd_ne_analysis(lhv.PD_REP1, m).ne_exists


@given(st.floats(-1, 1))
def test_joint_law_physical(c):
    cells = [(1 + a * b * c) / 4 for a in (1, -1) for b in (1, -1)]
    assert all(x >= 0 for x in cells) and sum(cells) == pytest.approx(1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, PI / 2), angle)
def test_chsh_closed_form_bounded(c, t):
    val = q.chsh_quantum(math.cos(c), math.sin(c), x_b=math.sin(t), z_b=math.cos(t))
    assert abs(val) <= 2 * math.sqrt(2) + 1e-12
