"""Piecewise-linear maps g: [0, pi] -> [0, 1] tying an angle to a probability.

A :class:`GFunction` is an ordered tiling of ``[0, pi]`` by linear pieces.
Breakpoint ownership is explicit: a piece owns its left endpoint iff
``closed_left``; otherwise the previous piece owns it. The first piece must
own 0 and the last piece always owns pi.

The eight built-ins mirror the case brackets of their defining formulas
(``[0, x]`` then ``(x, pi]``). ``g3``'s second case is written on the open
interval ``(eps, pi)``; here it is extended to own ``pi`` so the domain is
covered.

Derived maps
------------
``big_G(g, x) = g(pi/2 (1 + x))`` turns a correlation into a probability.
``q_transform(g, p) = {g(pi/2 (1 - cos t)) : t in g^-1(p)}`` is the effective
probability once the z-axis correlation is ``-cos t`` (singlet input).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator
from urllib.parse import parse_qsl

import numpy as np

from .errors import DomainError

ANGLE_TOL = 1e-9
VALUE_TOL = 1e-12
PI = math.pi


@dataclass(frozen=True)
class Piece:
    start: float
    end: float
    v_start: float
    v_end: float
    closed_left: bool = True

    @property
    def constant(self) -> bool:
        return abs(self.v_end - self.v_start) <= VALUE_TOL

    def at(self, theta):
        w = (np.asarray(theta, dtype=float) - self.start) / (self.end - self.start)
        return self.v_start + (self.v_end - self.v_start) * w


@dataclass(frozen=True)
class Preimage:
    """Angles mapped to one probability. ``non_unique`` marks constant runs."""

    angles: tuple[float, ...]
    non_unique: bool = False

    def __iter__(self) -> Iterator[float]:
        return iter(self.angles)

    def __len__(self) -> int:
        return len(self.angles)

    def __bool__(self) -> bool:
        return bool(self.angles)


def _dedup(values, tol):
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(float(v))
    return out


@dataclass(frozen=True)
class GFunction:
    pieces: tuple[Piece, ...]
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise DomainError("a g-function needs at least one piece")
        if abs(pieces[0].start) > ANGLE_TOL or abs(pieces[-1].end - PI) > ANGLE_TOL:
            raise DomainError("pieces must cover [0, pi]")
        if not pieces[0].closed_left:
            raise DomainError("the first piece must own theta = 0")
        for a, b in zip(pieces, pieces[1:]):
            if abs(a.end - b.start) > ANGLE_TOL:
                raise DomainError(f"gap or overlap between pieces at {a.end} / {b.start}")
        for pc in pieces:
            if not pc.end > pc.start:
                raise DomainError("pieces must have positive length")
            for v in (pc.v_start, pc.v_end):
                if not (-VALUE_TOL <= v <= 1.0 + VALUE_TOL):
                    raise DomainError(f"g value {v} outside [0, 1]")

    # -- ownership ---------------------------------------------------------

    def owns_start(self, i: int) -> bool:
        return self.pieces[i].closed_left

    def owns_end(self, i: int) -> bool:
        return i == len(self.pieces) - 1 or not self.pieces[i + 1].closed_left

    def _piece_index(self, theta: float) -> int:
        for i, pc in enumerate(self.pieces):
            if abs(theta - pc.start) <= ANGLE_TOL:
                if self.owns_start(i):
                    return i
                continue
            if abs(theta - pc.end) <= ANGLE_TOL:
                if self.owns_end(i):
                    return i
                continue
            if pc.start < theta < pc.end:
                return i
        raise DomainError(f"theta={theta} not covered")  # unreachable after validation

    # -- evaluation --------------------------------------------------------

    def eval(self, theta):
        """g(theta) for a scalar or array of angles in [0, pi]."""
        arr = np.asarray(theta, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < -ANGLE_TOL) or np.any(arr > PI + ANGLE_TOL):
            raise DomainError("theta outside [0, pi]")
        if arr.ndim == 0:
            th = float(arr)
            pc = self.pieces[self._piece_index(th)]
            return float(np.clip(pc.at(min(max(th, pc.start), pc.end)), 0.0, 1.0))
        out = np.empty(arr.shape)
        flat, res = arr.ravel(), out.ravel()
        for k, th in enumerate(flat):
            pc = self.pieces[self._piece_index(float(th))]
            res[k] = pc.at(min(max(th, pc.start), pc.end))
        return np.clip(out, 0.0, 1.0)

    __call__ = eval

    # -- inversion ---------------------------------------------------------

    def inverse_set(self, p: float, include_limits: bool = False) -> Preimage:
        """All angles with ``g(theta) = p``.

        With ``include_limits`` an endpoint not owned by a piece still counts
        when the piece's one-sided limit equals ``p`` (the value a jump
        approaches without attaining).
        """
        if not (-VALUE_TOL <= p <= 1.0 + VALUE_TOL):
            raise DomainError(f"p={p} outside [0, 1]")
        hits: list[float] = []
        non_unique = False
        for i, pc in enumerate(self.pieces):
            own_s = self.owns_start(i) or include_limits
            own_e = self.owns_end(i) or include_limits
            if pc.constant:
                if abs(pc.v_start - p) <= VALUE_TOL:
                    non_unique = True
                    hits.extend(x for x, ok in ((pc.start, own_s), (pc.end, own_e)) if ok)
                continue
            th = pc.start + (p - pc.v_start) * (pc.end - pc.start) / (pc.v_end - pc.v_start)
            if th < pc.start - ANGLE_TOL or th > pc.end + ANGLE_TOL:
                continue
            if abs(th - pc.start) <= ANGLE_TOL:
                if own_s:
                    hits.append(pc.start)
                continue
            if abs(th - pc.end) <= ANGLE_TOL:
                if own_e:
                    hits.append(pc.end)
                continue
            hits.append(th)
        return Preimage(tuple(_dedup(hits, ANGLE_TOL)), non_unique)

    def _value_interval(self, i: int):
        pc = self.pieces[i]
        ends = [(pc.v_start, self.owns_start(i)), (pc.v_end, self.owns_end(i))]
        ends.sort(key=lambda e: e[0])
        return ends[0], ends[1]

    def invertible(self) -> bool:
        """True iff g is injective on [0, pi] (ownership of breakpoints respected)."""
        if any(pc.constant for pc in self.pieces):
            return False
        ivs = [self._value_interval(i) for i in range(len(self.pieces))]
        for i in range(len(ivs)):
            for j in range(i + 1, len(ivs)):
                (lo1, c_lo1), (hi1, c_hi1) = ivs[i]
                (lo2, c_lo2), (hi2, c_hi2) = ivs[j]
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if hi - lo > VALUE_TOL:
                    return False
                if abs(hi - lo) <= VALUE_TOL:
                    # touching at a single value: collide only if both own it
                    c1 = c_hi1 if abs(hi1 - lo) <= VALUE_TOL else c_lo1
                    c2 = c_hi2 if abs(hi2 - lo) <= VALUE_TOL else c_lo2
                    if abs(hi1 - lo) <= VALUE_TOL and abs(lo1 - lo) <= VALUE_TOL:
                        c1 = c_lo1 or c_hi1
                    if abs(hi2 - lo) <= VALUE_TOL and abs(lo2 - lo) <= VALUE_TOL:
                        c2 = c_lo2 or c_hi2
                    if c1 and c2:
                        return False
        return True

    def inverse(self, p):
        """Single-valued inverse for arrays; NaN where ``p`` is not attained.

        Raises for a non-invertible g: use :meth:`inverse_set` there.
        """
        if not self.invertible():
            raise DomainError(f"{self.name} is not invertible")
        arr = np.asarray(p, dtype=float)
        out = np.full(arr.shape, np.nan)
        flat, res = arr.ravel(), out.ravel()
        for k, v in enumerate(flat):
            pre = self.inverse_set(float(v))
            if pre.angles:
                res[k] = pre.angles[0]
        return float(out) if arr.ndim == 0 else out

    def breakpoints(self) -> list[float]:
        return [pc.start for pc in self.pieces[1:]]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "pieces": [
                {"from": pc.start, "to": pc.end, "v_from": pc.v_start, "v_to": pc.v_end,
                 "closed_left": pc.closed_left}
                for pc in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GFunction":
        pieces = [
            Piece(float(d["from"]), float(d["to"]), float(d["v_from"]), float(d["v_to"]),
                  bool(d.get("closed_left", True)))
            for d in data["pieces"]
        ]
        return cls(tuple(pieces), data.get("name", "custom"), dict(data.get("params", {})))


# --- built-ins --------------------------------------------------------------

def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta={delta} must lie in (0, 1)")


def _check_eps(eps):
    if not 0.0 < eps < PI:
        raise DomainError(f"eps={eps} must lie in (0, pi)")


def g1() -> GFunction:
    return GFunction((Piece(0.0, PI, 0.0, 1.0),), "g1")


def g2() -> GFunction:
    return GFunction((Piece(0.0, PI, 1.0, 0.0),), "g2")


def g3(delta: float = 0.5, eps: float = PI / 4) -> GFunction:
    _check_delta(delta)
    _check_eps(eps)
    return GFunction((
        Piece(0.0, eps, delta, 0.0),
        Piece(eps, PI, delta, 1.0, closed_left=False),
    ), "g3", {"delta": delta, "eps": eps})


def g4(delta: float = 0.5) -> GFunction:
    _check_delta(delta)
    return GFunction((
        Piece(0.0, PI / 2, delta, 0.0),
        Piece(PI / 2, PI, 1.0, delta, closed_left=False),
    ), "g4", {"delta": delta})


def g5(delta: float = 0.5) -> GFunction:
    _check_delta(delta)
    return GFunction((
        Piece(0.0, PI / 2, delta, 1.0),
        Piece(PI / 2, PI, 0.0, delta, closed_left=False),
    ), "g5", {"delta": delta})


def g6(delta: float = 0.5, eps: float = PI / 4) -> GFunction:
    _check_delta(delta)
    _check_eps(eps)
    return GFunction((
        Piece(0.0, eps, delta, 1.0),
        Piece(eps, PI, delta, 0.0, closed_left=False),
    ), "g6", {"delta": delta, "eps": eps})


def g7(delta: float = 0.5, eps: float = PI / 4) -> GFunction:
    _check_delta(delta)
    _check_eps(eps)
    return GFunction((
        Piece(0.0, eps, 1.0, delta),
        Piece(eps, PI, 0.0, delta, closed_left=False),
    ), "g7", {"delta": delta, "eps": eps})


def g8() -> GFunction:
    return GFunction((
        Piece(0.0, PI / 2, 0.0, 1.0),
        Piece(PI / 2, PI, 1.0, 0.0, closed_left=False),
    ), "g8")


BUILTINS = {
    "g1": (g1, ()),
    "g2": (g2, ()),
    "g3": (g3, ("delta", "eps")),
    "g4": (g4, ("delta",)),
    "g5": (g5, ("delta",)),
    "g6": (g6, ("delta", "eps")),
    "g7": (g7, ("delta", "eps")),
    "g8": (g8, ()),
}


def builtin(name: str, **params) -> GFunction:
    try:
        factory, accepted = BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown g-function {name!r}; built-ins: {sorted(BUILTINS)}") from None
    kwargs = {k: float(v) for k, v in params.items() if v is not None and k in accepted}
    extra = {k for k, v in params.items() if v is not None} - set(accepted)
    if extra:
        raise DomainError(f"{name} does not take {sorted(extra)}")
    return factory(**kwargs)


def parse_g(text: str) -> GFunction:
    """``"g3?delta=0.5&eps=0.785"``, a bare built-in name, or a JSON file path."""
    name, _, query = text.partition("?")
    if name in BUILTINS:
        return builtin(name, **dict(parse_qsl(query)))
    path = Path(text)
    if path.exists():
        return GFunction.from_dict(json.loads(path.read_text()))
    raise DomainError(f"cannot resolve g-function {text!r}")


# --- derived maps -----------------------------------------------------------

def _clamp_unit(x, slack=1e-12):
    x = np.asarray(x, dtype=float)
    if np.any(x < -1.0 - slack) or np.any(x > 1.0 + slack):
        raise DomainError("argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def big_G(g: GFunction, x):
    """Probability attached to a correlation ``x`` in [-1, 1]."""
    x = _clamp_unit(x)
    out = g.eval(np.clip(PI / 2 * (1.0 + x), 0.0, PI))
    return out


def q_branches(g: GFunction, p: float) -> list[tuple[float, float, float]]:
    """``(theta, phi, g(phi))`` for each preimage ``theta`` of ``p``, with
    ``phi = pi/2 (1 - cos theta)``."""
    out = []
    for th in g.inverse_set(p):
        phi = min(max(PI / 2 * (1.0 - math.cos(th)), 0.0), PI)
        out.append((th, phi, float(g.eval(phi))))
    return out


def q_transform(g: GFunction, p: float) -> tuple[float, ...]:
    """Distinct effective probabilities for a player announcing ``p``.

    Empty when ``p`` is not attained; more than one value means the
    equilibrium structure can split.
    """
    return tuple(_dedup((v for _, _, v in q_branches(g, p)), VALUE_TOL))


def q_inverse(g: GFunction, target: float) -> list[tuple[float, float]]:
    """Solutions ``(p, theta)`` of ``Q_g(p) = target`` built from the preimages of
    ``target``: ``theta = arccos(1 - 2 phi / pi)`` for ``phi`` in ``g^-1(target)``.

    Sorted by ``p``; entries with equal ``p`` but different angles are kept.
    """
    out = []
    for phi in g.inverse_set(target):
        th = math.acos(float(_clamp_unit(1.0 - 2.0 * phi / PI)))
        out.append((float(g.eval(th)), th))
    out.sort()
    return out
