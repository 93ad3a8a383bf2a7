"""Ohmic bath discretization and bath response coefficients.

A harmonic bath is represented by a finite comb of ``L`` oscillators
with frequencies ``omega_j`` and couplings ``c_j``, sampled from an
Ohmic spectral density

    J(omega) = (pi/2) sum_j (c_j^2 / omega_j) delta(omega - omega_j).

The continuous bath response function at inverse temperature ``beta`` is

    eta_tilde(tau) = (1/pi) int_0^inf J(w) (coth(beta w / 2) cos(w tau)
                                            - i sin(w tau)) dw
                   = (1/2) sum_j (c_j^2 / w_j) (coth(beta w_j / 2) cos(w_j tau)
                                                - i sin(w_j tau)),

and the discrete influence-functional coefficients ``eta(m)`` are its
cell integrals over time-step squares (lag m >= 1) and over the triangle
t2 <= t1 within one step (lag 0), so that eta(m) / dt^2 -> eta_tilde(m dt)
as dt -> 0.

All sums run in fixed ascending oscillator order and every integral is
evaluated from per-oscillator closed-form antiderivatives; numerical
quadrature appears only in the test suite as an independent oracle.

The same interior cell-integrated form is used for every index pair
including the endpoints and the lag-0 self term: the endpoint half-cell
corrections are of the same order as the Trotter error already accepted
by the propagation scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OhmicSpec",
    "DiscreteBath",
    "EtaTable",
    "discretize",
    "eta_tilde",
    "eta_coefficient",
    "build_eta_table",
    "eta_tilde_primitive",
    "eta_tilde_double_primitive",
    "eta_tilde_box",
    "eta_tilde_wedge",
    "quadratic_coupling_sum",
]


@dataclass
class OhmicSpec:
    """Ohmic bath parameters: J(w) ~ (pi/2) xi w exp(-w/omega_c).

    ``count`` oscillators are drawn from ``[0, omega_max]``; ``beta`` is
    the inverse temperature used wherever a thermal factor is needed.
    """

    xi: float
    omega_c: float
    beta: float
    omega_max: float
    count: int

    def __post_init__(self):
        for name in ("xi", "omega_c", "beta", "omega_max"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")


@dataclass
class DiscreteBath:
    """Frequencies and couplings of a finite harmonic-oscillator comb."""

    frequencies: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        c = np.asarray(self.couplings, dtype=float)
        if w.ndim != 1 or c.shape != w.shape:
            raise ValueError("frequencies and couplings must be 1-D arrays of equal length")
        if not np.all(np.diff(w) > 0) or w[0] <= 0:
            raise ValueError("frequencies must be strictly increasing and positive")
        if np.any(c < 0):
            raise ValueError("couplings must be nonnegative")
        self.frequencies = w
        self.couplings = c


@dataclass
class EtaTable:
    """Memoized influence coefficients eta(m) for lags m = 0..max_lag.

    The interior two-index coefficient depends only on the lag, so a
    single array per time step covers every index pair.
    """

    dt: float
    max_lag: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=complex)
        if coeff.shape != (self.max_lag + 1,):
            raise ValueError("coefficients must have length max_lag + 1")
        if not np.all(np.isfinite(coeff)):
            raise ValueError("eta coefficients must be finite")
        self.coefficients = coeff

    def __call__(self, lag: int) -> complex:
        return complex(self.coefficients[lag])


def discretize(spec: OhmicSpec) -> DiscreteBath:
    """Sample an Ohmic bath into ``spec.count`` oscillators.

    Frequencies follow the exponential (Poisson-spacing) rule

        w_j = -omega_c ln(1 - (j/L)(1 - exp(-omega_max/omega_c)))

    for j = 1..L, which places w_L exactly at omega_max, with couplings

        c_j = w_j sqrt((xi omega_c / L)(1 - exp(-omega_max/omega_c))).
    """
    L = spec.count
    j = np.arange(1, L + 1, dtype=float)
    depletion = 1.0 - math.exp(-spec.omega_max / spec.omega_c)
    freqs = -spec.omega_c * np.log(1.0 - (j / L) * depletion)
    coups = freqs * math.sqrt(spec.xi * spec.omega_c / L * depletion)
    return DiscreteBath(frequencies=freqs, couplings=coups)


def _thermal(bath: DiscreteBath, beta: float) -> np.ndarray:
    """coth(beta w_j / 2) per oscillator."""
    return 1.0 / np.tanh(0.5 * beta * bath.frequencies)


def eta_tilde(bath: DiscreteBath, beta: float, tau):
    """Continuous bath response eta_tilde(tau); vectorized over tau."""
    tau = np.asarray(tau, dtype=float)
    w = bath.frequencies
    amp = 0.5 * bath.couplings**2 / w
    coth = _thermal(bath, beta)
    phase = np.multiply.outer(tau, w)
    out = np.sum(amp * (coth * np.cos(phase) - 1j * np.sin(phase)), axis=-1)
    return out[()] if out.ndim == 0 else out


def eta_coefficient(bath: DiscreteBath, beta: float, dt: float, lag: int) -> complex:
    """Cell-integrated influence coefficient eta(lag) for one time step.

    For lag >= 1 this is the square-cell integral of eta_tilde, which per
    oscillator reduces to

        2 (c^2/w^3) sin^2(w dt / 2) (coth(beta w/2) cos(w dt lag) - i sin(w dt lag)),

    and for lag = 0 the triangle integral int_0^dt int_0^t1 eta_tilde(t1-t2):

        (c^2/w^3) (coth(beta w/2) sin^2(w dt/2) - i (w dt - sin(w dt)) / 2).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    w = bath.frequencies
    amp = bath.couplings**2 / w**3
    coth = _thermal(bath, beta)
    half = np.sin(0.5 * w * dt) ** 2
    if lag == 0:
        val = amp * (coth * half - 0.5j * (w * dt - np.sin(w * dt)))
    else:
        phase = w * dt * lag
        val = 2.0 * amp * half * (coth * np.cos(phase) - 1j * np.sin(phase))
    return complex(np.sum(val))


def build_eta_table(bath: DiscreteBath, beta: float, dt: float, max_lag: int) -> EtaTable:
    """Tabulate eta(m) for m = 0..max_lag."""
    if max_lag < 0:
        raise ValueError(f"max_lag must be nonnegative, got {max_lag}")
    coeff = np.array([eta_coefficient(bath, beta, dt, m) for m in range(max_lag + 1)])
    return EtaTable(dt=dt, max_lag=max_lag, coefficients=coeff)


def eta_tilde_primitive(bath: DiscreteBath, beta: float, x):
    """First antiderivative E(x) = int_0^x eta_tilde(tau) dtau; E(0) = 0."""
    x = np.asarray(x, dtype=float)
    w = bath.frequencies
    amp = 0.5 * bath.couplings**2 / w**2
    coth = _thermal(bath, beta)
    phase = np.multiply.outer(x, w)
    out = np.sum(amp * (coth * np.sin(phase) + 1j * (np.cos(phase) - 1.0)), axis=-1)
    return out[()] if out.ndim == 0 else out


def eta_tilde_double_primitive(bath: DiscreteBath, beta: float, x):
    """Second-order kernel Q(x) = sum_j (c_j^2 / 2 w_j^3)(coth cos(w x) - i sin(w x)).

    Q is the building block of the rectangle double integral of
    eta_tilde: see :func:`eta_tilde_box`.
    """
    x = np.asarray(x, dtype=float)
    w = bath.frequencies
    amp = 0.5 * bath.couplings**2 / w**3
    coth = _thermal(bath, beta)
    phase = np.multiply.outer(x, w)
    out = np.sum(amp * (coth * np.cos(phase) - 1j * np.sin(phase)), axis=-1)
    return out[()] if out.ndim == 0 else out


def quadratic_coupling_sum(bath: DiscreteBath) -> float:
    """sum_j c_j^2 / (2 w_j^2), the linear-in-length part of the wedge integral."""
    return float(np.sum(0.5 * bath.couplings**2 / bath.frequencies**2))


def eta_tilde_box(bath: DiscreteBath, beta: float, a1, b1, a2, b2):
    """int_{a1}^{b1} dx1 int_{a2}^{b2} dx2 eta_tilde(x1 - x2), in closed form.

    Equals Q(b1-b2) - Q(b1-a2) - Q(a1-b2) + Q(a1-a2) with Q from
    :func:`eta_tilde_double_primitive`; vectorized over the bounds.
    """
    q = lambda x: eta_tilde_double_primitive(bath, beta, x)
    a1, b1, a2, b2 = np.broadcast_arrays(
        np.asarray(a1, float), np.asarray(b1, float), np.asarray(a2, float), np.asarray(b2, float)
    )
    return q(b1 - b2) - q(b1 - a2) - q(a1 - b2) + q(a1 - a2)


def eta_tilde_wedge(bath: DiscreteBath, beta: float, length):
    """int_a^{a+length} dx1 int_a^{x1} dx2 eta_tilde(x1 - x2), in closed form.

    Depends on the interval only through its length; equals
    Q(0) - Q(length) - i length sum_j c_j^2/(2 w_j^2).
    """
    length = np.asarray(length, dtype=float)
    q0 = eta_tilde_double_primitive(bath, beta, 0.0)
    return q0 - eta_tilde_double_primitive(bath, beta, length) - 1j * length * quadratic_coupling_sum(bath)
