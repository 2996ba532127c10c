"""Correlation games: payoffs driven by measured spin correlations.

Each player picks a direction in their own plane (Alice: x-z, Bob: y-z) at
angle theta from the shared z-axis. The arbiter only ever sees the
correlations ``<ac>`` (Alice's direction vs Bob's z) and ``<cb>`` (Alice's z
vs Bob's direction) and rewards

    P_A = K_A G(<ac>) G(<cb>) + L_A G(<ac>) + M_A G(<cb>) + N_A

with ``G(x) = g(pi/2 (1 + x))``; Bob's payoff uses his own coefficients with
the arguments swapped. For the classically anti-correlated model
``G(<ac>) = g(theta_A) = p_A``, so the ordinary bilinear game comes back.
Any other model turns each player's announced probability ``p`` into an
effective one, :func:`effective_probs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import games as gm
from .errors import DomainError, NoEquilibriumError
from .gfunctions import PI, GFunction, big_G

CLASSICAL = "classical_anticorrelated"
SINGLET = "singlet"
MIXTURE = "product_mixture"
CUSTOM = "custom"
MODEL_ALIASES = {
    "classical": CLASSICAL,
    CLASSICAL: CLASSICAL,
    "singlet": SINGLET,
    "quantum": SINGLET,
    "mixture": MIXTURE,
    MIXTURE: MIXTURE,
}


def axis_a(theta: float) -> np.ndarray:
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def axis_b(theta: float) -> np.ndarray:
    return np.array([0.0, math.sin(theta), math.cos(theta)])


Z_AXIS = np.array([0.0, 0.0, 1.0])


def _angle_between(u, v) -> float:
    c = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return math.acos(min(1.0, max(-1.0, c)))


def _check_theta(theta):
    th = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(th)) or np.any(th < -1e-9) or np.any(th > PI + 1e-9):
        raise DomainError("theta outside [0, pi]")
    return np.clip(th, 0.0, PI)


@dataclass(frozen=True)
class CorrelationModel:
    """Rule turning measurement directions into a correlation in [-1, 1].

    ``vs_z`` and ``pair`` are only consulted for ``kind == "custom"``.
    """

    kind: str
    vs_z: Callable | None = field(default=None, compare=False)
    pair: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (CLASSICAL, SINGLET, MIXTURE, CUSTOM):
            raise DomainError(f"unknown correlation model {self.kind!r}")
        if self.kind == CUSTOM and self.vs_z is None:
            raise DomainError("a custom model needs a vs_z function")

    @classmethod
    def named(cls, name: str) -> "CorrelationModel":
        try:
            return cls(MODEL_ALIASES[name])
        except KeyError:
            raise DomainError(f"unknown correlation model {name!r}") from None

    def corr_vs_z(self, theta):
        """Correlation between an axis at angle ``theta`` from z and z itself."""
        th = _check_theta(theta)
        if self.kind == CLASSICAL:
            out = -1.0 + 2.0 * th / PI
        elif self.kind == SINGLET:
            out = -np.cos(th)
        elif self.kind == MIXTURE:
            out = -np.cos(th) / 3.0
        else:
            out = np.asarray(self.vs_z(th), dtype=float)
        if np.any(np.abs(out) > 1.0 + 1e-12):
            raise DomainError("model produced a correlation outside [-1, 1]")
        return float(out) if np.ndim(out) == 0 else out

    def corr_pair(self, dir_a, dir_b) -> float:
        a, b = np.asarray(dir_a, dtype=float), np.asarray(dir_b, dtype=float)
        if self.kind == CLASSICAL:
            return -1.0 + 2.0 * _angle_between(a, b) / PI
        if self.kind in (SINGLET, MIXTURE):
            dot = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
            return -dot if self.kind == SINGLET else -dot / 3.0
        if self.pair is not None:
            return float(self.pair(a, b))
        # custom without a pair law: only z-referenced pairs are defined
        if np.allclose(b, Z_AXIS):
            return float(self.vs_z(_angle_between(a, Z_AXIS)))
        if np.allclose(a, Z_AXIS):
            return float(self.vs_z(_angle_between(b, Z_AXIS)))
        raise DomainError("custom model has no pair law for two non-z axes")

    def angle_for_corr(self, x: float) -> float | None:
        """An angle with ``corr_vs_z(angle) = x``, or None if unreachable."""
        if self.kind == CLASSICAL:
            return PI / 2 * (1.0 + x)
        if self.kind == SINGLET:
            return math.acos(min(1.0, max(-1.0, -x)))
        if self.kind == MIXTURE:
            c = -3.0 * x
            return math.acos(min(1.0, max(-1.0, c))) if abs(c) <= 1.0 + 1e-12 else None
        return None


@dataclass(frozen=True)
class CorrelationGame:
    game: gm.BimatrixGame
    g: GFunction
    model: CorrelationModel = CorrelationModel(SINGLET)


def model_correlation(model: CorrelationModel, theta):
    return model.corr_vs_z(theta)


def payoff_from_correlations(game: gm.BimatrixGame, g: GFunction, corr_ac, corr_cb):
    """Arbiter's reward from the two z-referenced correlations."""
    q_a, q_b = big_G(g, corr_ac), big_G(g, corr_cb)
    pa = gm.bilinear(game.coeffs_a, q_a, q_b)
    pb = gm.bilinear(game.coeffs_b, q_b, q_a)
    if np.ndim(pa) == 0:
        return float(pa), float(pb)
    return pa, pb


def payoff_at_angles(spec: CorrelationGame, theta_a, theta_b):
    return payoff_from_correlations(
        spec.game, spec.g,
        spec.model.corr_vs_z(theta_a), spec.model.corr_vs_z(theta_b),
    )


def _sorted_unique(values, tol=1e-12):
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(float(v))
    return tuple(out)


def effective_probs(spec: CorrelationGame, p: float) -> tuple[float, ...]:
    """Probabilities the payoff actually sees when a player announces ``p``.

    One value per distinct preimage image; empty if ``p`` is unattainable.
    Equals ``q_transform(g, p)`` for the singlet model and ``(p,)`` for the
    classical one.
    """
    vals = [float(big_G(spec.g, spec.model.corr_vs_z(th))) for th in spec.g.inverse_set(p)]
    return _sorted_unique(vals)


def quantum_payoff(spec: CorrelationGame, profile) -> tuple[tuple[float, float], ...]:
    """All payoff pairs reachable at ``profile``; several when g is not invertible."""
    if not isinstance(profile, gm.MixedProfile):
        profile = gm.MixedProfile(*profile)
    out = set()
    for qa in effective_probs(spec, profile.p_a):
        for qb in effective_probs(spec, profile.p_b):
            out.add((float(gm.bilinear(spec.game.coeffs_a, qa, qb)),
                     float(gm.bilinear(spec.game.coeffs_b, qb, qa))))
    return tuple(sorted(out))


# --- equilibria -------------------------------------------------------------

@dataclass(frozen=True)
class Solution:
    """One transformed equilibrium component: the announced probability and
    the direction that realizes it."""

    p: float
    theta: float


@dataclass(frozen=True)
class EquilibriumResult:
    components_a: tuple[Solution, ...]
    components_b: tuple[Solution, ...]
    method: str

    @property
    def profiles(self) -> tuple[gm.MixedProfile, ...]:
        pa = _sorted_unique(s.p for s in self.components_a)
        pb = _sorted_unique(s.p for s in self.components_b)
        return tuple(gm.MixedProfile(a, b) for a in pa for b in pb)

    @property
    def bifurcated(self) -> bool:
        return len(self.components_a) > 1 or len(self.components_b) > 1


def transform_target(g: GFunction, model: CorrelationModel, target: float) -> tuple[Solution, ...]:
    """Directions whose effective probability equals ``target``.

    Each ``phi`` in ``g^-1(target)`` fixes the required correlation
    ``2 phi / pi - 1``; the model maps that back to a direction ``theta`` and
    the announced probability is ``g(theta)``. For the singlet model this is
    ``Q_g^-1(target)``.
    """
    sols = []
    for phi in g.inverse_set(target):
        theta = model.angle_for_corr(2.0 * phi / PI - 1.0)
        if theta is None:
            continue
        theta = min(max(theta, 0.0), PI)
        sols.append(Solution(float(g.eval(theta)), theta))
    sols.sort(key=lambda s: (s.p, s.theta))
    dedup: list[Solution] = []
    for s in sols:
        if not dedup or abs(s.theta - dedup[-1].theta) > 1e-9:
            dedup.append(s)
    return tuple(dedup)


def _second_move_dominant(c: gm.Coeffs) -> bool:
    # own payoff slope in p_own is K p_other + L; negative on [0, 1] iff both ends are
    return c.L < 0 and c.K + c.L < 0


def quantum_pure_ne(spec: CorrelationGame, grid_n: int = 1001) -> EquilibriumResult:
    """Equilibrium of a PD-class correlation game.

    When the second move strictly dominates for both players, each of them
    wants an effective probability of 0; the result is every direction
    delivering it. Other games fall back to :func:`ne_grid_search`.
    """
    ca, cb = spec.game.coeffs_a, spec.game.coeffs_b
    if _second_move_dominant(ca) and _second_move_dominant(cb) and spec.model.kind != CUSTOM:
        sols = transform_target(spec.g, spec.model, 0.0)
        if not sols:
            raise NoEquilibriumError(f"{spec.g.name} never reaches an effective probability of 0")
        return EquilibriumResult(sols, sols, "closed_form")
    grid = ne_grid_search(spec, grid_n)
    if not grid.points:
        raise NoEquilibriumError("grid search found no equilibrium")
    a = _sorted_unique(p.p_a for p in grid.points)
    b = _sorted_unique(p.p_b for p in grid.points)
    to_sol = lambda ps: tuple(Solution(p, float(min(spec.g.inverse_set(p), default=math.nan))) for p in ps)
    return EquilibriumResult(to_sol(a), to_sol(b), "grid")


def bos_quantum_mixed_ne(alpha: float, beta: float, gamma: float, g: GFunction,
                         model: CorrelationModel | None = None) -> EquilibriumResult:
    """Image of the classical BoS mixed equilibrium in the correlation game."""
    model = model or CorrelationModel(SINGLET)
    classical = gm.bos_mixed_equilibrium(alpha, beta, gamma)
    a = transform_target(g, model, classical.p_a)
    b = transform_target(g, model, classical.p_b)
    if not a or not b:
        raise NoEquilibriumError("the classical mixed equilibrium is not reachable under this g")
    return EquilibriumResult(a, b, "closed_form")


def g3_pd_closed_form(delta: float, eps: float) -> float:
    """Quantum PD equilibrium for ``g3(delta, eps)`` written out piecewise."""
    theta = math.acos(1.0 - 2.0 * eps / PI)
    # at eps = pi/2 the direction sits on the breakpoint, which the left piece owns
    if eps < PI / 2:
        return delta + (1.0 - delta) * (theta - eps) / (PI - eps)
    return delta * (1.0 - theta / eps)


# --- grid search ------------------------------------------------------------

@dataclass(frozen=True)
class StrategyGrid:
    angles: np.ndarray
    probs: np.ndarray
    effective: np.ndarray
    kind: str


def strategy_grid(spec: CorrelationGame, grid_n: int) -> StrategyGrid:
    """Probability grid through ``g^-1`` when g is invertible, else an angle grid."""
    if grid_n < 2:
        raise DomainError("grid_n must be at least 2")
    g = spec.g
    if g.invertible():
        probs = np.linspace(0.0, 1.0, grid_n)
        angles = np.asarray(g.inverse(probs))
        keep = np.isfinite(angles)
        probs, angles, kind = probs[keep], angles[keep], "p"
    else:
        angles = np.linspace(0.0, PI, grid_n)
        probs, kind = np.asarray(g.eval(angles)), "theta"
    eff = np.asarray(big_G(g, spec.model.corr_vs_z(angles)))
    return StrategyGrid(angles, probs, eff, kind)


@dataclass(frozen=True)
class GridResult:
    points: tuple[gm.MixedProfile, ...]
    angles: tuple[tuple[float, float], ...]
    continuum: bool
    grid_kind: str
    step: float


def payoff_tables(spec: CorrelationGame, grid: StrategyGrid):
    qa = grid.effective[:, None]
    qb = grid.effective[None, :]
    return gm.bilinear(spec.game.coeffs_a, qa, qb), gm.bilinear(spec.game.coeffs_b, qb, qa)


def ne_grid_search(spec: CorrelationGame, grid_n: int = 1001, tol: float = gm.NE_TOL) -> GridResult:
    """Profiles on the strategy grid that no unilateral grid deviation improves
    by more than ``tol``. Pass a step-scaled ``tol`` to catch interior
    equilibria that fall between grid points."""
    grid = strategy_grid(spec, grid_n)
    pa, pb = payoff_tables(spec, grid)
    mask = (pa >= pa.max(axis=0, keepdims=True) - tol) & (pb >= pb.max(axis=1, keepdims=True) - tol)
    idx = np.argwhere(mask)
    continuum = bool(
        (mask[1:, :] & mask[:-1, :]).any() or (mask[:, 1:] & mask[:, :-1]).any()
    )
    order = sorted(idx.tolist(), key=lambda ij: (grid.probs[ij[0]], grid.probs[ij[1]]))
    points = tuple(gm.MixedProfile(float(grid.probs[i]), float(grid.probs[j])) for i, j in order)
    angles = tuple((float(grid.angles[i]), float(grid.angles[j])) for i, j in order)
    span = PI if grid.kind == "theta" else 1.0
    return GridResult(points, angles, continuum, grid.kind, span / (grid_n - 1))


def indifference_brackets(spec: CorrelationGame, grid_n: int = 1001):
    """Grid intervals where each player's opponent switches best response.

    Returns ``(brackets_a, brackets_b)``: consecutive probability pairs of
    Alice (resp. Bob) across which the other player's payoff gain from the
    first move changes sign. An interior equilibrium lies in one of them.
    """
    grid = strategy_grid(spec, grid_n)
    ca, cb = spec.game.coeffs_a, spec.game.coeffs_b
    # Bob's gain from moving q_b 0 -> 1 as a function of Alice's q_a, and vice versa
    gain_b = cb.K * grid.effective + cb.L
    gain_a = ca.K * grid.effective + ca.L

    def brackets(gain):
        s = np.sign(gain)
        hits = np.nonzero(s[:-1] * s[1:] <= 0)[0]
        return [(float(grid.probs[k]), float(grid.probs[k + 1])) for k in hits]

    return brackets(gain_b), brackets(gain_a)


def chsh_value(model: CorrelationModel, a, a2, b, b2) -> float:
    c = model.corr_pair
    return c(a, b) + c(a2, b2) + c(a2, b) - c(a, b2)


def chsh_family(x_b: float, z_b: float):
    """The four settings a=x, a'=z, b=(x_b,0,z_b), b'=(-x_b,0,z_b)."""
    return (np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]),
            np.array([x_b, 0.0, z_b]), np.array([-x_b, 0.0, z_b]))
