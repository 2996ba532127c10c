"""Exact one- and two-qubit linear algebra for reference checks.

Basis order is binary ascending, ``|00>, |01>, |10>, |11>``, with the left
factor belonging to the first party. Everything is dense complex128.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-12
UNIT_TOL = 1e-9
SEPARABLE_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).ravel().copy()
        if amp.size not in (2, 4):
            raise DomainError("only one- and two-qubit states are supported")
        if abs(np.vdot(amp, amp).real - 1.0) > NORM_TOL:
            raise DomainError("state is not normalized")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex)
        return cls(amp / np.linalg.norm(amp))

    @property
    def n_qubits(self) -> int:
        return 1 if self.amplitudes.size == 2 else 2

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def ket(bits: str) -> PureState:
    amp = np.zeros(2 ** len(bits), dtype=complex)
    amp[int(bits, 2)] = 1.0
    return PureState(amp)


SINGLET = PureState(np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2))


def is_unitary(u: np.ndarray, tol: float = NORM_TOL) -> bool:
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol))


def is_hermitian(a: np.ndarray, tol: float = NORM_TOL) -> bool:
    return bool(np.allclose(a, a.conj().T, atol=tol))


def is_separable(state: PureState, tol: float = SEPARABLE_TOL) -> bool:
    """A two-qubit pure state is a product iff ``c00 c11 = c01 c10``."""
    if state.n_qubits != 2:
        raise DomainError("separability is defined here for two qubits")
    c00, c01, c10, c11 = state.amplitudes
    return bool(abs(c00 * c11 - c01 * c10) <= tol)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise DomainError(f"{v!r} is not a unit 3-vector")
    return v


def spin_along(direction) -> np.ndarray:
    x, y, z = _unit(direction)
    return x * SX + y * SY + z * SZ


def correlation(state: PureState, dir_a, dir_b) -> float:
    """``<(sigma.a) x (sigma.b)>`` on a two-qubit state."""
    op = np.kron(spin_along(dir_a), spin_along(dir_b))
    return float(state.expect(op).real)


def singlet_correlation(dir_a, dir_b) -> float:
    return correlation(SINGLET, dir_a, dir_b)


def benenti_correlation(c00: float, c11: float, dir_a, dir_b) -> float:
    """Closed-form correlation on ``c00|00> + c11|11>`` for real coefficients."""
    xa, ya, za = _unit(dir_a)
    xb, yb, zb = _unit(dir_b)
    return za * zb + 2 * c00 * c11 * (xa * xb - ya * yb)


def chsh_settings(x_b: float, z_b: float):
    return (np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]),
            np.array([x_b, 0.0, z_b]), np.array([-x_b, 0.0, z_b]))


def _check_coeffs(c00, c11):
    if abs(c00 ** 2 + c11 ** 2 - 1.0) > 1e-9:
        raise DomainError(f"c00^2 + c11^2 = {c00 ** 2 + c11 ** 2!r}, not 1")


def chsh_combination(corr, a, a2, b, b2) -> float:
    return corr(a, b) + corr(a2, b2) + corr(a2, b) - corr(a, b2)


def chsh_quantum(c00: float, c11: float, settings=None, *, x_b: float | None = None,
                 z_b: float | None = None) -> float:
    """CHSH value on ``c00|00> + c11|11>`` via the closed-form correlation.

    ``settings`` is ``(a, a', b, b')``; alternatively give ``x_b, z_b`` for the
    one-parameter family of :func:`chsh_settings`.
    """
    _check_coeffs(c00, c11)
    if settings is None:
        if x_b is None or z_b is None:
            raise DomainError("give either settings or x_b and z_b")
        settings = chsh_settings(x_b, z_b)
    return chsh_combination(lambda u, v: benenti_correlation(c00, c11, u, v), *settings)


def chsh_operator(state: PureState, settings) -> float:
    """Same combination evaluated by full operator expectations."""
    return chsh_combination(lambda u, v: correlation(state, u, v), *settings)


def chsh_family_closed_form(c00: float, c11: float, x_b: float, z_b: float) -> float:
    return 2.0 * (2.0 * c00 * c11 * x_b + z_b)


# --- penny flip ----------------------------------------------------------------

def meyer_penny_flip(picard_flip_prob: float) -> float:
    """Probability that a quantum player wins (penny ends heads-up, |0>)
    playing H before and after a classical player who flips with the given
    probability."""
    if not 0.0 <= picard_flip_prob <= 1.0:
        raise DomainError("flip probability outside [0, 1]")
    rho = np.outer(ket("0").amplitudes, ket("0").amplitudes.conj())
    rho = H @ rho @ H.conj().T
    rho = (1 - picard_flip_prob) * rho + picard_flip_prob * (SX @ rho @ SX)
    rho = H @ rho @ H.conj().T
    return float(rho[0, 0].real)


def classical_penny_flip(picard_flip_prob: float, q_flip_prob: float = 0.5) -> float:
    """Heads probability when both players are restricted to flip / no-flip."""
    if not (0.0 <= picard_flip_prob <= 1.0 and 0.0 <= q_flip_prob <= 1.0):
        raise DomainError("flip probability outside [0, 1]")
    # three independent flips: Q, Picard, Q; heads iff an even number happen
    odd = 0.0
    for flips in ((q_flip_prob, 1 - q_flip_prob), (picard_flip_prob, 1 - picard_flip_prob),
                  (q_flip_prob, 1 - q_flip_prob)):
        odd = odd * flips[1] + (1 - odd) * flips[0]
    return 1.0 - odd


# --- quantized prisoners' dilemma --------------------------------------------

def eisert_unitary(theta: float, phi: float) -> np.ndarray:
    if not (-1e-12 <= theta <= math.pi + 1e-12 and -1e-12 <= phi <= math.pi / 2 + 1e-12):
        raise DomainError("need theta in [0, pi] and phi in [0, pi/2]")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[np.exp(1j * phi) * c, s], [-s, np.exp(-1j * phi) * c]], dtype=complex)


COOPERATE = (0.0, 0.0)
DEFECT = (math.pi, 0.0)
QUANTUM_MOVE = (0.0, math.pi / 2)


def entangler(gamma: float) -> np.ndarray:
    """``exp(i gamma D x D / 2)`` with ``D = U(pi, 0)``; ``D x D`` squares to
    the identity, so the exponential is ``cos(gamma/2) I + i sin(gamma/2) D x D``."""
    if not -1e-12 <= gamma <= math.pi / 2 + 1e-12:
        raise DomainError("gamma outside [0, pi/2]")
    dd = np.kron(eisert_unitary(*DEFECT), eisert_unitary(*DEFECT))
    return math.cos(gamma / 2) * np.eye(4) + 1j * math.sin(gamma / 2) * dd


def eisert_final_state(theta_a, phi_a, theta_b, phi_b, gamma) -> np.ndarray:
    j = entangler(gamma)
    u = np.kron(eisert_unitary(theta_a, phi_a), eisert_unitary(theta_b, phi_b))
    return j.conj().T @ u @ j @ ket("00").amplitudes


def eisert_pd(cells, theta_a, phi_a, theta_b, phi_b, gamma) -> tuple[float, float]:
    """Expected payoffs; ``cells = (r, s, t, u)`` are Alice's CC, CD, DC, DD."""
    r, s, t, u = cells
    probs = np.abs(eisert_final_state(theta_a, phi_a, theta_b, phi_b, gamma)) ** 2
    return (float(probs @ np.array([r, s, t, u])),
            float(probs @ np.array([r, t, s, u])))
