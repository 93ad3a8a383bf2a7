"""Two-level system Hamiltonian and its short-time propagators.

The system Hamiltonian is

    H0 = epsilon * sigma_z + delta * sigma_x

acting on the two spin states ``+1`` and ``-1`` (hbar = 1).  ``epsilon``
is the energy bias between the two states and ``delta`` the spin-flip
frequency.  Density matrices are plain 2x2 complex arrays indexed by
spin: row/column 0 is spin ``+1``, row/column 1 is spin ``-1``, so that
``sigma_z = diag(1, -1)``.

The bath counter-term ``-sum_j c_j^2/(2 omega_j^2) sigma_z^2`` that is
sometimes folded into the reference Hamiltonian is a multiple of the
identity here (``sigma_z^2 = I``); its phase cancels exactly between the
forward and backward branch propagators in every product this package
forms, so it is omitted throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPINS",
    "SystemParams",
    "spin_index",
    "h0_element",
    "short_time_propagator",
    "sigma_z_expectation",
]

#: Admissible spin values, in index order (index 0 -> +1, index 1 -> -1).
SPINS = (1, -1)


def spin_index(s: int) -> int:
    """Map a spin value +1/-1 to its matrix index 0/1."""
    if s == 1:
        return 0
    if s == -1:
        return 1
    raise ValueError(f"spin value must be +1 or -1, got {s!r}")


@dataclass
class SystemParams:
    """Parameters of the two-level Hamiltonian H0 = epsilon sigma_z + delta sigma_x."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and math.isfinite(self.delta)):
            raise ValueError("epsilon and delta must be finite")
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")


def h0_element(p: SystemParams, bra: int, ket: int) -> float:
    """Matrix element <bra|H0|ket> of the system Hamiltonian.

    Diagonal elements are ``epsilon * s`` (s = +-1), off-diagonal
    elements are ``delta``.  Always real.
    """
    spin_index(bra), spin_index(ket)  # validate
    if bra == ket:
        return p.epsilon * bra
    return p.delta


def short_time_propagator(p: SystemParams, dt: float, direction: str = "forward") -> np.ndarray:
    """Closed-form propagator exp(-+ i H0 dt) as a 2x2 complex array.

    ``direction="forward"`` gives exp(-i H0 dt), ``"backward"`` its
    conjugate transpose exp(+i H0 dt).  Uses the Pauli decomposition

        exp(-i a (n . sigma)) = cos(a) I - i sin(a) (n . sigma)

    with a = sqrt(epsilon^2 + delta^2) dt, so the result is unitary to
    machine precision for any dt.
    """
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if direction == "forward":
        sign = -1.0
    elif direction == "backward":
        sign = 1.0
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    lam = math.hypot(p.epsilon, p.delta)
    ident = np.eye(2, dtype=complex)
    if lam == 0.0 or dt == 0.0:
        return ident
    h_unit = np.array([[p.epsilon, p.delta], [p.delta, -p.epsilon]], dtype=complex) / lam
    a = lam * dt
    return math.cos(a) * ident + 1j * sign * math.sin(a) * h_unit


def sigma_z_expectation(rho: np.ndarray) -> complex:
    """<sigma_z> = rho[+1,+1] - rho[-1,-1] for a 2x2 density matrix."""
    return rho[0, 0] - rho[1, 1]
