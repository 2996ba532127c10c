"""Four-coin statistics and the 16-subset local-hidden-variable model.

Observables: Alice measures ``S1`` or ``S2``, Bob ``S1'`` or ``S2'``; every
outcome is H (+1) or T (-1). A :class:`FourCoinStats` holds one joint
distribution per strategy pair, in the block order

    (S1,S1'), (S1,S2'), (S2,S1'), (S2,S2')

with cells HH, HT, TH, TT inside each block, so ``p[0..3]`` is the first
block. Indices in the public API are 0-based; docstrings quote the usual
1-based labels (``p1 .. p16``, ``m1 .. m16``).

Subset ``i`` of the hidden-variable space fixes all four outcomes. Its signs
are the bits of ``i - 1`` written over ``(S1, S1', S2, S2')`` with the most
significant bit first and 0 meaning +.

Cell-entry convention: here ``K, L, M, N`` are Alice's four *cells*
(HH, HT, TH, TT), not the bilinear coefficients of :mod:`eprgames.games`.
Bob's cells are ``K, M, L, N``.

Only the ``p1 = 1`` branch of the perfect-correlation reduction is
implemented; the ``p1 = 0`` branch yields analogous formulas with the roles
of the first and last subsets exchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BranchError, DomainError, InconsistentStatsError, PreconditionError

ZERO_TOL = 1e-12
CONSISTENCY_TOL = 1e-9

# rows: subsets 1..16; columns: S1, S1', S2, S2'
SIGNS = np.array([[1 - 2 * ((i >> (3 - k)) & 1) for k in range(4)] for i in range(16)])
OBS = {"S1": 0, "S1'": 1, "S2": 2, "S2'": 3}
PAIRS = (("S1", "S1'"), ("S1", "S2'"), ("S2", "S1'"), ("S2", "S2'"))
PAIR_NAMES = tuple(f"{a},{b}" for a, b in PAIRS)
CELL_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _pair_index(pair) -> int:
    if isinstance(pair, int):
        if not 0 <= pair < 4:
            raise DomainError(f"pair index {pair} out of range")
        return pair
    if isinstance(pair, str):
        pair = tuple(x.strip() for x in pair.split(","))
    try:
        return PAIRS.index(tuple(pair))
    except ValueError:
        raise DomainError(f"unknown strategy pair {pair!r}") from None


def _vector16(values, name) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (16,):
        raise DomainError(f"{name} needs exactly 16 entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class GameEntries:
    """Alice's payoff cells HH, HT, TH, TT; Bob mirrors HT and TH."""

    K: float
    L: float
    M: float
    N: float

    @property
    def is_pd(self) -> bool:
        return self.M > self.K > self.N > self.L

    @property
    def cross(self) -> float:
        return self.K - self.L - self.M + self.N

    def alice(self) -> np.ndarray:
        return np.array([self.K, self.L, self.M, self.N])

    def bob(self) -> np.ndarray:
        return np.array([self.K, self.M, self.L, self.N])

    def bilinear_a(self, x, y):
        """Alice's payoff when she shows H with probability x and Bob with y."""
        return self.cross * x * y + (self.L - self.N) * x + (self.M - self.N) * y + self.N

    def bilinear_b(self, x, y):
        return self.cross * x * y + (self.M - self.N) * x + (self.L - self.N) * y + self.N


PD_REP1 = GameEntries(3.0, 0.0, 5.0, 1.0)
PD_REP2 = GameEntries(3.0, 0.0, 5.0, 0.2)
ENTRY_PRESETS = {"pd1": PD_REP1, "pd2": PD_REP2}


def entries_from(name_or_values) -> GameEntries:
    if isinstance(name_or_values, GameEntries):
        return name_or_values
    if isinstance(name_or_values, str):
        if name_or_values in ENTRY_PRESETS:
            return ENTRY_PRESETS[name_or_values]
        parts = name_or_values.split(",")
        if len(parts) == 4:
            return GameEntries(*(float(x) for x in parts))
        raise DomainError(f"unknown entries {name_or_values!r}")
    return GameEntries(*(float(x) for x in name_or_values))


@dataclass(frozen=True)
class FourCoinStats:
    p: np.ndarray

    def __post_init__(self):
        arr = _vector16(self.p, "stats").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def block(self, pair) -> np.ndarray:
        k = _pair_index(pair)
        return self.p[4 * k: 4 * k + 4]

    def __getitem__(self, label: int) -> float:
        """1-based access: ``stats[1]`` is p1."""
        return float(self.p[label - 1])

    def to_list(self) -> list[float]:
        return [float(x) for x in self.p]


@dataclass(frozen=True)
class LhvMeasure:
    m: np.ndarray

    def __post_init__(self):
        arr = _vector16(self.m, "measure").copy()
        if abs(arr.sum() - 1.0) > CONSISTENCY_TOL:
            raise DomainError(f"measure weights sum to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "m", arr)

    @classmethod
    def from_entries(cls, entries: dict[int, float]) -> "LhvMeasure":
        """Build from a sparse ``{label: weight}`` map with 1-based labels."""
        m = np.zeros(16)
        for k, v in entries.items():
            if not 1 <= k <= 16:
                raise DomainError(f"subset label {k} out of range")
            m[k - 1] = v
        return cls(m)

    def __getitem__(self, label: int) -> float:
        return float(self.m[label - 1])

    @property
    def negative_indices(self) -> tuple[int, ...]:
        return tuple(int(i) + 1 for i in np.nonzero(self.m < -ZERO_TOL)[0])

    @property
    def nonnegative(self) -> bool:
        return not self.negative_indices

    def to_list(self) -> list[float]:
        return [float(x) for x in self.m]


# --- statistics -------------------------------------------------------------

def _residuals(p: np.ndarray) -> dict[str, float]:
    out = {f"block{k + 1}": float(p[4 * k: 4 * k + 4].sum() - 1.0) for k in range(4)}
    out["p1+p2-p5-p6"] = float(p[0] + p[1] - p[4] - p[5])
    out["p1+p3-p9-p11"] = float(p[0] + p[2] - p[8] - p[10])
    out["p9+p10-p13-p14"] = float(p[8] + p[9] - p[12] - p[13])
    out["p5+p7-p13-p15"] = float(p[4] + p[6] - p[12] - p[14])
    return out


@dataclass(frozen=True)
class StatsReport:
    normalized: bool
    consistent: bool
    nonnegative: bool
    residuals: dict

    def as_dict(self) -> dict:
        return {"normalized": self.normalized, "consistent": self.consistent,
                "nonnegative": self.nonnegative, "residuals": dict(self.residuals)}


def validate_stats(stats: FourCoinStats, tol: float = CONSISTENCY_TOL) -> StatsReport:
    res = _residuals(stats.p)
    normalized = all(abs(v) <= tol for k, v in res.items() if k.startswith("block"))
    consistent = all(abs(v) <= tol for k, v in res.items() if not k.startswith("block"))
    nonneg = bool(np.all(stats.p >= -ZERO_TOL) and np.all(stats.p <= 1.0 + ZERO_TOL))
    return StatsReport(normalized, consistent, nonneg, res)


def product_stats(r: float, s: float, r2: float, s2: float) -> FourCoinStats:
    """Stats of four independent coins: Alice's S1, S2 show H with ``r``, ``s``;
    Bob's S1', S2' with ``r2``, ``s2``."""
    def block(x, y):
        return [x * y, x * (1 - y), (1 - x) * y, (1 - x) * (1 - y)]
    return FourCoinStats(np.array(block(r, r2) + block(r, s2) + block(s, r2) + block(s, s2)))


def extract_head_probs(stats: FourCoinStats, tol: float = CONSISTENCY_TOL) -> tuple[float, float, float, float]:
    """``(r, s, r', s')`` recovered from consistent stats."""
    res = _residuals(stats.p)
    bad = {k: v for k, v in res.items() if not k.startswith("block") and abs(v) > tol}
    if bad:
        raise InconsistentStatsError("stats have no bilinear interpretation", bad)
    p = stats.p
    return float(p[0] + p[1]), float(p[8] + p[9]), float(p[0] + p[2]), float(p[4] + p[6])


# head-probability pair (Alice's, Bob's) behind each block, as indices into (r, s, r', s')
_PAIR_ARGS = ((0, 2), (0, 3), (1, 2), (1, 3))


def payoff_from_stats(stats: FourCoinStats, entries: GameEntries, pair) -> tuple[float, float]:
    block = stats.block(pair)
    return float(entries.alice() @ block), float(entries.bob() @ block)


def bilinear_payoff(entries: GameEntries, head_probs, pair) -> tuple[float, float]:
    x, y = (head_probs[i] for i in _PAIR_ARGS[_pair_index(pair)])
    return float(entries.bilinear_a(x, y)), float(entries.bilinear_b(x, y))


# --- hidden-variable measures ----------------------------------------------

def _joint_matrix() -> np.ndarray:
    """16x16 0/1 matrix with ``p = A @ m``."""
    a = np.zeros((16, 16))
    for k, (x, y) in enumerate(PAIRS):
        sx, sy = SIGNS[:, OBS[x]], SIGNS[:, OBS[y]]
        for c, (cx, cy) in enumerate(CELL_SIGNS):
            a[4 * k + c] = (sx == cx) & (sy == cy)
    return a


JOINT = _joint_matrix()


def lhv_to_stats(measure: LhvMeasure) -> FourCoinStats:
    return FourCoinStats(JOINT @ measure.m)


def correlation(measure: LhvMeasure, x: str, y: str) -> float:
    return float(measure.m @ (SIGNS[:, OBS[x]] * SIGNS[:, OBS[y]]))


def chsh_from_measure(measure: LhvMeasure) -> float:
    """``C(S1,S1') + C(S2,S2') + C(S2,S1') - C(S1,S2')``."""
    c = lambda x, y: correlation(measure, x, y)
    return c("S1", "S1'") + c("S2", "S2'") + c("S2", "S1'") - c("S1", "S2'")


@dataclass(frozen=True)
class Reduction:
    """Head probabilities of a perfectly correlated measure on the p1 = 1
    branch, with ``s`` and ``s'`` split into the parts carried by subsets
    1-3 (``*_a``) and 13-15 (``*_b``)."""

    r: float
    r2: float
    s_a: float
    s_b: float
    s2_a: float
    s2_b: float

    @property
    def s(self) -> float:
        return self.s_a + self.s_b

    @property
    def s2(self) -> float:
        return self.s2_a + self.s2_b

    @property
    def out_of_range(self) -> bool:
        return not (-ZERO_TOL <= self.s <= 1 + ZERO_TOL and -ZERO_TOL <= self.s2 <= 1 + ZERO_TOL)

    def as_dict(self) -> dict:
        return {"r": self.r, "r2": self.r2, "s": self.s, "s2": self.s2,
                "s_parts": [self.s_a, self.s_b], "s2_parts": [self.s2_a, self.s2_b],
                "out_of_range": self.out_of_range}


def perfect_corr_reduce(measure: LhvMeasure, tol: float = ZERO_TOL,
                        strict_branch: bool = True) -> Reduction:
    """Head probabilities under perfect correlation.

    With ``strict_branch=False`` a measure off the ``p1 = 1`` branch is still
    reduced by the same formulas (``r`` and ``r'`` then report the actual
    ``m1 + .. + m4``) instead of raising :class:`BranchError`.
    """
    m = measure.m
    stray = {f"m{i + 1}": float(m[i]) for i in range(4, 12) if abs(m[i]) > tol}
    if stray:
        raise PreconditionError(f"perfect correlation needs m5..m12 = 0; got {stray}")
    head = float(m[0:4].sum())
    if strict_branch and abs(head - 1.0) > tol:
        raise BranchError(f"m1+m2+m3+m4 = {head!r}; only the p1 = 1 branch is supported")
    return Reduction(
        r=head, r2=head,
        s_a=float(m[0] + m[1]), s_b=float(m[12] + m[13]),
        s2_a=float(m[0] + m[2]), s2_b=float(m[12] + m[14]),
    )


@dataclass(frozen=True)
class SplitPayoff:
    pair: str
    a: float
    b: float

    @property
    def total(self) -> float:
        return self.a + self.b


def _split(entries: GameEntries, xa, xb, ya, yb, bob: bool) -> tuple[float, float]:
    own, other = (entries.M - entries.N, entries.L - entries.N) if bob else (entries.L - entries.N, entries.M - entries.N)
    k = entries.cross
    part_a = k * xa * ya + own * xa + other * ya + entries.N
    part_b = k * (xa * yb + ya * xb + xb * yb) + own * xb + other * yb
    return part_a, part_b


def correlated_payoffs(entries: GameEntries, red: Reduction) -> dict[str, dict[str, SplitPayoff]]:
    """Payoffs of all four pairs split into subset-1..3 and subset-13..15 parts.

    ``result["A"]["S2,S2'"].b`` is Alice's part that only a measure with
    weight on subsets 13-15 can produce.
    """
    args = {
        PAIR_NAMES[0]: (red.r, 0.0, red.r2, 0.0),
        PAIR_NAMES[1]: (red.r, 0.0, red.s2_a, red.s2_b),
        PAIR_NAMES[2]: (red.s_a, red.s_b, red.r2, 0.0),
        PAIR_NAMES[3]: (red.s_a, red.s_b, red.s2_a, red.s2_b),
    }
    out: dict[str, dict[str, SplitPayoff]] = {"A": {}, "B": {}}
    for name, (xa, xb, ya, yb) in args.items():
        out["A"][name] = SplitPayoff(name, *_split(entries, xa, xb, ya, yb, bob=False))
        out["B"][name] = SplitPayoff(name, *_split(entries, xa, xb, ya, yb, bob=True))
    return out


@dataclass(frozen=True)
class NeAnalysis:
    ne_exists: bool
    profile: tuple[float, float]
    payoffs: tuple[float, float]
    displaced: bool
    conditions: tuple[float, float]
    summed_margin: float
    out_of_range: bool

    def as_dict(self) -> dict:
        return {
            "ne_exists": self.ne_exists,
            "profile": list(self.profile),
            "payoffs": list(self.payoffs),
            "displaced": self.displaced,
            "conditions": list(self.conditions),
            "summed_margin": self.summed_margin,
            "out_of_range": self.out_of_range,
        }


def ne_conditions(entries: GameEntries, s: float, s2: float) -> tuple[float, float]:
    """Payoff gains of staying at ``(S2, S2')`` rather than switching to the
    always-H strategy; both must be nonnegative for an equilibrium."""
    k, own = entries.cross, entries.L - entries.N
    return (s - 1.0) * (k * s2 + own), (s2 - 1.0) * (k * s + own)


def pd_ne_analysis(entries: GameEntries, measure: LhvMeasure, tol: float = ZERO_TOL) -> NeAnalysis:
    """Whether ``(s2, s2')`` carried by subsets 13-15 is still an equilibrium.

    Requires a perfectly correlated measure with ``m1 = m2 = m3 = 0`` so the
    classical part sits at the ``(0, 0)`` equilibrium.
    """
    red = perfect_corr_reduce(measure, tol)
    lead = {f"m{i + 1}": float(measure.m[i]) for i in range(3) if abs(measure.m[i]) > tol}
    if lead:
        raise PreconditionError(f"analysis needs m1 = m2 = m3 = 0; got {lead}")
    s, s2 = red.s_b, red.s2_b
    cond = ne_conditions(entries, s, s2)
    return NeAnalysis(
        ne_exists=bool(cond[0] >= -tol and cond[1] >= -tol),
        profile=(s, s2),
        payoffs=(float(entries.bilinear_a(s, s2)), float(entries.bilinear_b(s, s2))),
        displaced=bool(abs(s) > tol or abs(s2) > tol),
        conditions=(float(cond[0]), float(cond[1])),
        summed_margin=float(cond[0] + cond[1]),
        out_of_range=red.out_of_range,
    )


def m13_family(x: float) -> LhvMeasure:
    """Perfectly correlated measure with ``s2 = s2' = x``: weight 1 on
    subset 4, ``x`` on subset 13 and ``-x`` on subset 16."""
    return LhvMeasure.from_entries({4: 1.0, 13: x, 16: -x})


def scan_m13(entries: GameEntries, values: Iterable[float]) -> list[tuple[float, NeAnalysis]]:
    return [(float(x), pd_ne_analysis(entries, m13_family(float(x)))) for x in values]


def flip_points(rows: list[tuple[float, NeAnalysis]]) -> list[tuple[float, float]]:
    """Consecutive scan values across which ``ne_exists`` changes."""
    return [(a[0], b[0]) for a, b in zip(rows, rows[1:]) if a[1].ne_exists != b[1].ne_exists]
