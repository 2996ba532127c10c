"""Monte Carlo play of the EPR-type protocol.

Each run: Alice measures along z with probability ``p_a`` and along her own
direction ``e_A`` otherwise; Bob likewise with ``e_B``. Given the two chosen
axes the outcomes follow ``P(a, b) = (1 + a b C) / 4`` with ``C`` the
model's correlation for that axis pair, so marginals are fair coins.

Randomness is a counter-based Philox stream per chunk of ``CHUNK`` runs,
keyed by ``(seed, chunk index)``. Output therefore does not depend on how
chunks are scheduled.

Axis codes: 0 is z for both players, 1 is the player's own direction.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import games as gm
from .correlation import SINGLET, Z_AXIS, CorrelationModel, axis_a, axis_b, payoff_from_correlations
from .errors import DomainError, InsufficientDataError
from .gfunctions import PI, GFunction

CHUNK = 1 << 16
AXIS_NAMES_A = ("Z", "A")
AXIS_NAMES_B = ("Z", "B")
# (alice axis, bob axis) -> name of the correlation the arbiter reads off
PAIR_KEYS = {(1, 0): "ac", (0, 1): "cb", (1, 1): "ab", (0, 0): "cc"}


@dataclass(frozen=True)
class RunRecord:
    alice_axis: str
    bob_axis: str
    outcome_alice: int
    outcome_bob: int

    def __post_init__(self):
        if self.alice_axis not in AXIS_NAMES_A or self.bob_axis not in AXIS_NAMES_B:
            raise DomainError(f"bad axes {self.alice_axis!r}/{self.bob_axis!r}")
        if self.outcome_alice not in (-1, 1) or self.outcome_bob not in (-1, 1):
            raise DomainError("outcomes must be +1 or -1")


@dataclass(frozen=True)
class ProtocolConfig:
    theta_a: float
    theta_b: float
    p_a: float
    p_b: float
    model: CorrelationModel = CorrelationModel(SINGLET)
    runs: int = 100_000
    seed: int = 0

    def __post_init__(self):
        for name in ("theta_a", "theta_b"):
            v = getattr(self, name)
            if not (0.0 <= v <= PI + 1e-12):
                raise DomainError(f"{name}={v} outside [0, pi]")
        for name in ("p_a", "p_b"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name}={v} outside [0, 1]")
        if int(self.runs) != self.runs or self.runs < 1:
            raise DomainError("runs must be a positive integer")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError("seed must fit in 64 bits")

    @classmethod
    def from_angles(cls, g: GFunction, theta_a: float, theta_b: float, **kw) -> "ProtocolConfig":
        """Config whose move probabilities are tied to the angles through g."""
        return cls(theta_a, theta_b, float(g.eval(theta_a)), float(g.eval(theta_b)), **kw)

    def correlation_table(self) -> np.ndarray:
        """2x2 array ``C[alice_axis, bob_axis]``."""
        dirs_a = (Z_AXIS, axis_a(self.theta_a))
        dirs_b = (Z_AXIS, axis_b(self.theta_b))
        return np.array([[self.model.corr_pair(da, db) for db in dirs_b] for da in dirs_a])

    def to_dict(self) -> dict:
        return {"theta_a": self.theta_a, "theta_b": self.theta_b, "p_a": self.p_a,
                "p_b": self.p_b, "model": self.model.kind, "runs": int(self.runs),
                "seed": int(self.seed)}


@dataclass(frozen=True)
class RunRecords:
    """Columnar run list; arrays are read-only."""

    axis_a: np.ndarray
    axis_b: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        n = len(self.axis_a)
        for name in ("axis_a", "axis_b", "a", "b"):
            arr = np.asarray(getattr(self, name), dtype=np.int8).copy()
            if arr.shape != (n,):
                raise DomainError("record columns differ in length")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if n and (not np.all(np.isin(self.a, (-1, 1))) or not np.all(np.isin(self.b, (-1, 1)))):
            raise DomainError("outcomes must be +1 or -1")

    def __len__(self) -> int:
        return len(self.axis_a)

    def __getitem__(self, i: int) -> RunRecord:
        return RunRecord(AXIS_NAMES_A[self.axis_a[i]], AXIS_NAMES_B[self.axis_b[i]],
                         int(self.a[i]), int(self.b[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_records(cls, records) -> "RunRecords":
        recs = list(records)
        return cls(
            np.array([AXIS_NAMES_A.index(r.alice_axis) for r in recs], dtype=np.int8),
            np.array([AXIS_NAMES_B.index(r.bob_axis) for r in recs], dtype=np.int8),
            np.array([r.outcome_alice for r in recs], dtype=np.int8),
            np.array([r.outcome_bob for r in recs], dtype=np.int8),
        )

    @classmethod
    def concat(cls, parts) -> "RunRecords":
        parts = list(parts)
        return cls(*(np.concatenate([getattr(p, k) for p in parts]) for k in ("axis_a", "axis_b", "a", "b")))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["run", "axisA", "axisB", "a", "b"])
        for i in range(len(self)):
            w.writerow([i, AXIS_NAMES_A[self.axis_a[i]], AXIS_NAMES_B[self.axis_b[i]],
                        int(self.a[i]), int(self.b[i])])
        return buf.getvalue()


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(chunk),))))


def _sample(config: ProtocolConfig, table: np.ndarray, n: int, rng: np.random.Generator) -> RunRecords:
    u = rng.random((4, n))
    ax_a = (u[0] >= config.p_a).astype(np.int8)
    ax_b = (u[1] >= config.p_b).astype(np.int8)
    a = np.where(u[2] < 0.5, 1, -1).astype(np.int8)
    corr = table[ax_a, ax_b]
    same = u[3] < (1.0 + corr) / 2.0
    b = np.where(same, a, -a).astype(np.int8)
    return RunRecords(ax_a, ax_b, a, b)


def sample_run(config: ProtocolConfig, rng: np.random.Generator) -> RunRecord:
    return _sample(config, config.correlation_table(), 1, rng)[0]


def run_protocol(config: ProtocolConfig, workers: int = 1) -> RunRecords:
    """All runs of a protocol, bit-identical for a given config."""
    table = config.correlation_table()
    runs = int(config.runs)
    sizes = [min(CHUNK, runs - start) for start in range(0, runs, CHUNK)]

    def job(k):
        return _sample(config, table, sizes[k], chunk_rng(config.seed, k))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    return RunRecords.concat(parts)


@dataclass(frozen=True)
class ArbiterReport:
    n: int
    p_a: float
    p_b: float
    correlations: dict
    counts: dict

    def get(self, key: str) -> float:
        value = self.correlations.get(key)
        if value is None:
            raise InsufficientDataError(f"no runs measured the {key} axis pair")
        return value

    @property
    def missing(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.correlations.items() if v is None)

    def to_dict(self) -> dict:
        return {"n": self.n, "p_a": self.p_a, "p_b": self.p_b,
                "correlations": dict(self.correlations), "counts": dict(self.counts),
                "missing": list(self.missing)}


def arbiter_report(records: RunRecords) -> ArbiterReport:
    """Move frequencies and per-axis-pair correlations from the run list."""
    n = len(records)
    if n == 0:
        raise InsufficientDataError("empty run list")
    prod = records.a.astype(np.int64) * records.b.astype(np.int64)
    corrs, counts = {}, {}
    for (ia, ib), key in PAIR_KEYS.items():
        sel = (records.axis_a == ia) & (records.axis_b == ib)
        k = int(sel.sum())
        counts[key] = k
        corrs[key] = float(prod[sel].sum() / k) if k else None
    return ArbiterReport(
        n=n,
        p_a=float(np.count_nonzero(records.axis_a == 0) / n),
        p_b=float(np.count_nonzero(records.axis_b == 0) / n),
        correlations=corrs,
        counts=counts,
    )


def reward(records, game: gm.BimatrixGame, g: GFunction) -> tuple[float, float]:
    report = records if isinstance(records, ArbiterReport) else arbiter_report(records)
    return payoff_from_correlations(game, g, report.get("ac"), report.get("cb"))


# --- hidden-variable oracle ------------------------------------------------------

def sample_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_lhv_outcomes(dir_a, dir_b, lam: np.ndarray):
    """Deterministic outcomes of a shared random unit vector: Alice reports
    the sign of its projection on her axis, Bob the opposite sign on his."""
    a = np.where(lam @ np.asarray(dir_a, dtype=float) >= 0, 1, -1)
    b = -np.where(lam @ np.asarray(dir_b, dtype=float) >= 0, 1, -1)
    return a, b


def sphere_lhv_correlation(dir_a, dir_b, n: int, seed: int = 0) -> float:
    lam = sample_sphere(n, chunk_rng(seed, 0))
    a, b = sphere_lhv_outcomes(dir_a, dir_b, lam)
    return float(np.mean(a * b))


def standard_error(corr: float, n: int) -> float:
    return math.sqrt(max(1.0 - corr * corr, 0.0) / n) if n else math.inf
