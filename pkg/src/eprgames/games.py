"""Classical 2x2 bimatrix games.

Conventions
-----------
Row/column index 0 is the first strategy (I, C, H, Fight ...), index 1 the
second. A mixed profile ``(p_a, p_b)`` gives the probability each player puts
on index 0, so the corner ``(1, 1)`` is cell ``(0, 0)`` and ``(0, 0)`` is
cell ``(1, 1)``.

Two views of the numbers are kept apart:

``cells``
    the payoff table, ``cells[i][j] = (payoff_A, payoff_B)``.
``coeffs``
    per-player bilinear coefficients ``(K, L, M, N)`` with
    ``P = K p_a p_b + L p_own + M p_other + N``.

For Alice ``p_own = p_a``; for Bob ``p_own = p_b``. A symmetric game therefore
has identical coefficient tuples for both players. (The four-coin model in
:mod:`eprgames.lhv` reuses the letters K, L, M, N for *cells*; see
:class:`eprgames.lhv.GameEntries`.)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DomainError

NE_TOL = 1e-9


class Coeffs(NamedTuple):
    K: float
    L: float
    M: float
    N: float


def coeffs_from_cells(r: float, s: float, t: float, u: float) -> Coeffs:
    """Solve K+L+M+N=r, L+N=s, M+N=t, N=u.

    ``r`` is the own payoff when both play index 0, ``s`` when only the
    opponent deviates to index 1, ``t`` when only oneself does, ``u`` when
    both play index 1.
    """
    return Coeffs(r - s - t + u, s - u, t - u, u)


def bilinear(c: Coeffs, p_own, p_other):
    """Evaluate ``K p_own p_other + L p_own + M p_other + N`` (array-friendly)."""
    return c.K * p_own * p_other + c.L * p_own + c.M * p_other + c.N


@dataclass(frozen=True)
class MixedProfile:
    p_a: float
    p_b: float

    def __post_init__(self):
        for name in ("p_a", "p_b"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0) or not np.isfinite(v):
                raise DomainError(f"{name}={v!r} is not a probability")

    def as_tuple(self) -> tuple[float, float]:
        return (self.p_a, self.p_b)


@dataclass(frozen=True)
class BimatrixGame:
    cells: tuple[tuple[tuple[float, float], tuple[float, float]],
                 tuple[tuple[float, float], tuple[float, float]]]
    row_labels: tuple[str, str] = ("I", "S")
    col_labels: tuple[str, str] = ("I", "S")
    name: str = ""

    def __post_init__(self):
        arr = np.asarray(self.cells, dtype=float)
        if arr.shape != (2, 2, 2):
            raise DomainError(f"cells must have shape (2, 2, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("cells must be finite")
        frozen = tuple(tuple((float(arr[i, j, 0]), float(arr[i, j, 1])) for j in range(2))
                       for i in range(2))
        object.__setattr__(self, "cells", frozen)

    @classmethod
    def symmetric(cls, r, s, t, u, *, labels=("I", "S"), name=""):
        """Build the symmetric game ``[[(r,r),(s,t)],[(t,s),(u,u)]]``."""
        return cls((((r, r), (s, t)), ((t, s), (u, u))), tuple(labels), tuple(labels), name)

    @classmethod
    def from_dict(cls, data: dict) -> "BimatrixGame":
        labels = data.get("labels", {}) or {}
        return cls(
            data["cells"],
            tuple(labels.get("rows", ("I", "S"))),
            tuple(labels.get("cols", ("I", "S"))),
            data.get("name", ""),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cells": [[list(c) for c in row] for row in self.cells],
            "labels": {"rows": list(self.row_labels), "cols": list(self.col_labels)},
        }

    @property
    def table(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=float)

    @property
    def coeffs_a(self) -> Coeffs:
        e = self.table[:, :, 0]
        return coeffs_from_cells(e[0, 0], e[0, 1], e[1, 0], e[1, 1])

    @property
    def coeffs_b(self) -> Coeffs:
        f = self.table[:, :, 1]
        # Bob's "own deviation" is a column switch.
        return coeffs_from_cells(f[0, 0], f[1, 0], f[0, 1], f[1, 1])

    @property
    def is_symmetric(self) -> bool:
        t = self.table
        return bool(np.all(t[:, :, 0] == t[:, :, 1].T))

    def cell_label(self, cell: tuple[int, int]) -> tuple[str, str]:
        return (self.row_labels[cell[0]], self.col_labels[cell[1]])


def _check_prob(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{name} outside [0, 1]")


def payoff_arrays(game: BimatrixGame, p_a, p_b):
    """Vectorised payoffs; ``p_a`` and ``p_b`` broadcast against each other."""
    return bilinear(game.coeffs_a, p_a, p_b), bilinear(game.coeffs_b, p_b, p_a)


def payoff(game: BimatrixGame, profile: MixedProfile | tuple[float, float]) -> tuple[float, float]:
    if not isinstance(profile, MixedProfile):
        _check_prob(profile[0], "p_a")
        _check_prob(profile[1], "p_b")
        p_a, p_b = float(profile[0]), float(profile[1])
    else:
        p_a, p_b = profile.p_a, profile.p_b
    pa, pb = payoff_arrays(game, p_a, p_b)
    return float(pa), float(pb)


CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


def _deviation_gains(game: BimatrixGame, cell):
    t = game.table
    i, j = cell
    gain_a = t[1 - i, j, 0] - t[i, j, 0]
    gain_b = t[i, 1 - j, 1] - t[i, j, 1]
    return gain_a, gain_b


def pure_nash(game: BimatrixGame, tol: float = NE_TOL) -> list[tuple[int, int]]:
    """All cells from which no unilateral switch gains more than ``tol`` (weak NE)."""
    out = []
    for cell in CELLS:
        ga, gb = _deviation_gains(game, cell)
        if ga <= tol and gb <= tol:
            out.append(cell)
    return out


def strict_pure_nash(game: BimatrixGame, tol: float = NE_TOL) -> list[tuple[int, int]]:
    out = []
    for cell in CELLS:
        ga, gb = _deviation_gains(game, cell)
        if ga < -tol and gb < -tol:
            out.append(cell)
    return out


def cell_to_profile(cell: tuple[int, int]) -> MixedProfile:
    return MixedProfile(1.0 - cell[0], 1.0 - cell[1])


@dataclass(frozen=True)
class Segment:
    """A line of equilibria: one player fixed, the other ranging over an interval."""

    start: MixedProfile
    end: MixedProfile


@dataclass(frozen=True)
class NashSet:
    points: tuple[MixedProfile, ...]
    segments: tuple[Segment, ...] = ()
    whole_square: bool = False

    @property
    def continuum(self) -> bool:
        return self.whole_square or bool(self.segments)

    @property
    def interior(self) -> tuple[MixedProfile, ...]:
        return tuple(p for p in self.points if 0.0 < p.p_a < 1.0 and 0.0 < p.p_b < 1.0)

    def contains(self, profile: MixedProfile, tol: float = 1e-9) -> bool:
        if self.whole_square:
            return True
        for p in self.points:
            if abs(p.p_a - profile.p_a) <= tol and abs(p.p_b - profile.p_b) <= tol:
                return True
        for seg in self.segments:
            a0, a1 = sorted((seg.start.p_a, seg.end.p_a))
            b0, b1 = sorted((seg.start.p_b, seg.end.p_b))
            if a0 - tol <= profile.p_a <= a1 + tol and b0 - tol <= profile.p_b <= b1 + tol:
                return True
        return False


def _indifference(c: Coeffs, tol: float):
    """Opponent probabilities at which the own derivative ``K q + L`` vanishes.

    Returns ``"all"``, ``None`` (never) or a single value in [0, 1].
    """
    if abs(c.K) <= tol:
        return "all" if abs(c.L) <= tol else None
    q = -c.L / c.K
    if -tol <= q <= 1.0 + tol:
        return min(max(q, 0.0), 1.0)
    return None


def _br_interval(c: Coeffs, own_value: float, tol: float):
    """Opponent probabilities ``q`` for which ``own_value`` (0 or 1) is a best response.

    Own value 1 is a best response iff ``K q + L >= 0``; own value 0 iff ``<= 0``.
    Returns ``(lo, hi)`` or ``None``.
    """
    sign = 1.0 if own_value == 1.0 else -1.0
    # need sign*(K q + L) >= -tol on [0, 1]
    a, b = sign * c.K, sign * c.L
    if abs(a) <= tol:
        return (0.0, 1.0) if b >= -tol else None
    root = -b / a
    lo, hi = (max(0.0, root), 1.0) if a > 0 else (0.0, min(1.0, root))
    return (lo, hi) if lo <= hi else None


def mixed_nash(game: BimatrixGame, tol: float = NE_TOL) -> NashSet:
    """Every Nash equilibrium of a 2x2 game, from the indifference conditions.

    Isolated equilibria come back in ``points`` (pure ones included); lines
    of equilibria, which appear when a player is indifferent at a pure
    opponent strategy, come back in ``segments``; a game where both players
    are everywhere indifferent sets ``whole_square``.
    """
    ca, cb = game.coeffs_a, game.coeffs_b
    ia, ib = _indifference(ca, tol), _indifference(cb, tol)  # ia is over p_b, ib over p_a
    if ia == "all" and ib == "all":
        return NashSet(points=(), segments=(), whole_square=True)

    points: list[MixedProfile] = [cell_to_profile(c) for c in pure_nash(game, tol)]
    segments: list[Segment] = []

    def add_point(pa, pb):
        prof = MixedProfile(float(pa), float(pb))
        if not any(abs(p.p_a - pa) <= tol and abs(p.p_b - pb) <= tol for p in points):
            points.append(prof)

    def add_segment(start, end):
        s, e = MixedProfile(*start), MixedProfile(*end)
        if abs(s.p_a - e.p_a) <= tol and abs(s.p_b - e.p_b) <= tol:
            add_point(*start)
        else:
            segments.append(Segment(s, e))

    # Alice indifferent at p_b = ia: any p_a that keeps Bob at ia.
    if ia == "all":
        for pb in (0.0, 1.0):
            iv = _br_interval(cb, pb, tol)
            if iv:
                add_segment((iv[0], pb), (iv[1], pb))
        if ib is not None and ib not in (0.0, 1.0):
            add_segment((ib, 0.0), (ib, 1.0))
    elif ia is not None:
        if 0.0 < ia < 1.0:
            if ib == "all":
                add_segment((0.0, ia), (1.0, ia))
            elif ib is not None:
                add_point(ib, ia)
        else:
            iv = _br_interval(cb, ia, tol)
            if iv:
                add_segment((iv[0], ia), (iv[1], ia))

    if ib == "all":
        if ia != "all":
            for pa in (0.0, 1.0):
                iv = _br_interval(ca, pa, tol)
                if iv:
                    add_segment((pa, iv[0]), (pa, iv[1]))
    elif ib is not None and ib in (0.0, 1.0):
        iv = _br_interval(ca, ib, tol)
        if iv:
            add_segment((ib, iv[0]), (ib, iv[1]))

    points.sort(key=lambda p: (p.p_a, p.p_b))
    return NashSet(tuple(points), tuple(segments), False)


def max_deviation_gain(game: BimatrixGame, profile: MixedProfile, grid: int = 1001) -> float:
    """Largest payoff improvement over a deviation grid, for either player."""
    q = np.linspace(0.0, 1.0, grid)
    pa0, pb0 = payoff(game, profile)
    dev_a, _ = payoff_arrays(game, q, profile.p_b)
    _, dev_b = payoff_arrays(game, profile.p_a, q)
    return float(max(np.max(dev_a) - pa0, np.max(dev_b) - pb0))


def is_pareto_optimal(game: BimatrixGame, cell: tuple[int, int]) -> bool:
    t = game.table
    here = t[cell]
    for other in CELLS:
        if other == tuple(cell):
            continue
        there = t[other]
        if np.all(there >= here) and np.any(there > here):
            return False
    return True


# --- built-in games -------------------------------------------------------

def prisoners_dilemma(r=3.0, s=0.0, t=5.0, u=1.0, name="pd") -> BimatrixGame:
    return BimatrixGame.symmetric(r, s, t, u, labels=("C", "D"), name=name)


def matching_pennies() -> BimatrixGame:
    return BimatrixGame((((-1, 1), (1, -1)), ((1, -1), (-1, 1))), ("H", "T"), ("H", "T"),
                        "matching-pennies")


def battle_of_sexes(alpha=2.0, beta=1.0, gamma=0.0) -> BimatrixGame:
    """Requires ``alpha > beta > gamma``; the defaults are a repo choice."""
    if not alpha > beta > gamma:
        raise DomainError("battle of sexes needs alpha > beta > gamma")
    return BimatrixGame((((alpha, beta), (gamma, gamma)), ((gamma, gamma), (beta, alpha))),
                        ("I", "S"), ("I", "S"), "bos")


def bos_mixed_equilibrium(alpha: float, beta: float, gamma: float) -> MixedProfile:
    if not alpha > beta > gamma:
        raise DomainError("battle of sexes needs alpha > beta > gamma")
    d = alpha + beta - 2 * gamma
    return MixedProfile((alpha - gamma) / d, (beta - gamma) / d)


def model_of_entry() -> BimatrixGame:
    return BimatrixGame((((2, 0), (-1, -1)), ((2, 0), (1, 1))), ("Fight", "Accommodate"),
                        ("Out", "In"), "model-of-entry")


BUILTIN_GAMES = {
    "pd1": lambda: prisoners_dilemma(3, 0, 5, 1, name="pd1"),
    "pd2": lambda: prisoners_dilemma(3, 0, 5, 0.2, name="pd2"),
    "matching-pennies": matching_pennies,
    "bos": battle_of_sexes,
    "model-of-entry": model_of_entry,
}


def load_game(name_or_path: str) -> BimatrixGame:
    """A built-in name or a path to a JSON game definition."""
    if name_or_path in BUILTIN_GAMES:
        return BUILTIN_GAMES[name_or_path]()
    path = Path(name_or_path)
    if not path.exists():
        raise DomainError(f"unknown game {name_or_path!r}; built-ins: {sorted(BUILTIN_GAMES)}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"game file {name_or_path!r} is not JSON: {exc}") from None
    return BimatrixGame.from_dict(data)


def iter_profiles(points: Iterable[MixedProfile]):
    return [p.as_tuple() for p in points]
