"""Iterative path-integral tensor propagation for the spin-boson model.

The reduced density matrix is evolved by iterating complex-valued maps
``A_l`` over discrete path segments of ``dk`` pair states, where ``dk``
is the memory window in time steps.  Segment keys pack one pair state
(2 bits) per step, oldest state in the lowest bits, so a table is a
dense array of ``4**dk`` amplitudes.

Each pair interaction is the factor

    I(S_j, S_j') = exp(-(s_j^+ - s_j^-)(eta(m) s_j'^+ - eta(m)* s_j'^-)),
    m = j - j',

multiplied for m = 1 by the one-step system propagators
``<s_j^+|exp(-i H0 dt)|s_j-1^+> <s_j-1^-|exp(+i H0 dt)|s_j^->``.  The
table update sums the oldest pair state out of the window against the
product of all interactions with the newly appended state.

A brute-force full-path summation over all ``4**(N+1)`` discrete paths
(no memory truncation) is provided as the exactness oracle; iterating
the windowed scheme with ``dk = N`` reproduces it identically.
"""

from __future__ import annotations

import cmath
import weakref
from dataclasses import dataclass, field
from typing import Iterator, Tuple

import numpy as np

from .bath import EtaTable
from .spinsys import SystemParams, SPINS, short_time_propagator, spin_index

__all__ = [
    "DEFAULT_TABLE_BUDGET_BYTES",
    "BRUTE_FORCE_MAX_STEPS",
    "QuapiConfig",
    "AmplitudeTable",
    "influence_factor",
    "init_a0",
    "quapi_step",
    "reduced_density",
    "brute_force_density",
    "density_series",
    "table_bytes",
]

#: Default cap on one amplitude table (4**dk complex128 entries).
DEFAULT_TABLE_BUDGET_BYTES = 2**28

#: Path enumeration guard for the brute-force oracle: 4**(N+1) <= 4**12.
BRUTE_FORCE_MAX_STEPS = 11

#: Pair-state codes 0..3 <-> (s^+, s^-); code c maps to (SPINS[c >> 1], SPINS[c & 1]).
PAIR_STATES = tuple((SPINS[c >> 1], SPINS[c & 1]) for c in range(4))


@dataclass(eq=False)
class QuapiConfig:
    """Propagation parameters: step dt, memory window dk, horizon, system, bath table."""

    dt: float
    memory_steps: int
    total_steps: int
    system: SystemParams
    eta: EtaTable
    rho0: np.ndarray
    table_budget_bytes: int = DEFAULT_TABLE_BUDGET_BYTES

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.memory_steps < 1:
            raise ValueError(f"memory_steps must be >= 1, got {self.memory_steps}")
        if self.total_steps < 0:
            raise ValueError(f"total_steps must be >= 0, got {self.total_steps}")
        if self.eta.dt != self.dt:
            raise ValueError("eta table was built for a different time step")
        if self.eta.max_lag < self.memory_steps:
            raise ValueError("eta table must cover lags up to memory_steps")
        rho = np.asarray(self.rho0, dtype=complex)
        if rho.shape != (2, 2) or not np.all(np.isfinite(rho)):
            raise ValueError("rho0 must be a finite 2x2 complex matrix")
        self.rho0 = rho

    @property
    def memory_time(self) -> float:
        return self.memory_steps * self.dt


@dataclass
class AmplitudeTable:
    """Dense amplitude map over 4**dk packed path-segment keys."""

    step_index: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = v.size
        if n == 0 or n & (n - 1) or n.bit_length() % 2 == 0:
            raise ValueError("table length must be a power of 4")
        self.values = v

    @property
    def memory_steps(self) -> int:
        return (self.values.size.bit_length() - 1) // 2


def table_bytes(memory_steps: int) -> int:
    """Bytes of one amplitude table: 2**(2 dk) complex128 entries, 16 bytes each."""
    return 16 * 4**memory_steps


def _check_budget(cfg: QuapiConfig):
    need = table_bytes(cfg.memory_steps)
    if need > cfg.table_budget_bytes:
        raise MemoryError(
            f"memory window dk={cfg.memory_steps} needs 2**(2*{cfg.memory_steps}) * 16 bytes "
            f"= {need} bytes per table, exceeding the configured budget of "
            f"{cfg.table_budget_bytes} bytes"
        )


def influence_factor(
    eta: EtaTable,
    sj: Tuple[int, int],
    sjp: Tuple[int, int],
    lag: int,
    system: SystemParams,
    dt: float,
) -> complex:
    """Pair interaction I(S_j, S_j') at the given lag j - j'.

    The lag-1 factor carries the forward/backward one-step propagator
    bra-kets in addition to the bath exponential.
    """
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    e = eta(lag)
    val = cmath.exp(-(sj[0] - sj[1]) * (e * sjp[0] - e.conjugate() * sjp[1]))
    if lag == 1:
        kf = short_time_propagator(system, dt, "forward")
        kb = short_time_propagator(system, dt, "backward")
        val *= kf[spin_index(sj[0]), spin_index(sjp[0])]
        val *= kb[spin_index(sjp[1]), spin_index(sj[1])]
    return val


def _lag_matrix(cfg: QuapiConfig, lag: int) -> np.ndarray:
    """4x4 matrix of I(S_a, S_b) over pair-state codes (a newer, b older)."""
    mat = np.empty((4, 4), dtype=complex)
    for a, sa in enumerate(PAIR_STATES):
        for b, sb in enumerate(PAIR_STATES):
            mat[a, b] = influence_factor(cfg.eta, sa, sb, lag, cfg.system, cfg.dt)
    return mat


def _digits(n_states: int, dtype=np.int16) -> list:
    """Per-position pair-state codes of all packed keys 0..4**n_states - 1."""
    idx = np.arange(4**n_states, dtype=np.int64)
    return [((idx >> (2 * i)) & 3).astype(dtype) for i in range(n_states)]


def init_a0(cfg: QuapiConfig) -> AmplitudeTable:
    """Initial amplitude table over dk pair states.

    Entry at key (S_0, ..., S_{dk-1}) is the product of I(S_k1, S_k2)
    over all ordered pairs k2 <= k1 < dk times the initial density
    element <s_0^+|rho0|s_0^->.
    """
    _check_budget(cfg)
    dk = cfg.memory_steps
    digits = _digits(dk)
    vals = cfg.rho0.ravel()[digits[0]].astype(complex)
    for k1 in range(dk):
        for k2 in range(k1 + 1):
            mat = _lag_matrix(cfg, k1 - k2)
            vals *= mat[digits[k1], digits[k2]]
    return AmplitudeTable(step_index=0, values=vals)


_kernel_cache: "weakref.WeakKeyDictionary[QuapiConfig, np.ndarray]" = weakref.WeakKeyDictionary()


def _step_kernel(cfg: QuapiConfig) -> np.ndarray:
    """Propagation weights Lambda(S_new, window) as a (4, 4**dk) array.

    Time independent, so cached per configuration.  Digit position i of
    the window key holds the state at lag dk - i behind the new state.
    """
    kern = _kernel_cache.get(cfg)
    if kern is not None:
        return kern
    dk = cfg.memory_steps
    digits = _digits(dk)
    kern = np.ones((4, 4**dk), dtype=complex)
    for i in range(dk):
        mat = _lag_matrix(cfg, dk - i)
        for a in range(4):
            kern[a] *= mat[a, digits[i]]
    self_mat = _lag_matrix(cfg, 0)
    kern *= np.diagonal(self_mat)[:, None]
    _kernel_cache[cfg] = kern
    return kern


def quapi_step(cfg: QuapiConfig, table: AmplitudeTable) -> AmplitudeTable:
    """Advance the amplitude table one time step.

    Sums the oldest pair state (lowest two key bits) against the
    propagation weights and appends the new state at the top; the
    four-term sum runs in ascending state order.
    """
    dk = cfg.memory_steps
    if table.values.size != 4**dk:
        raise ValueError("table size does not match memory_steps")
    kern = _step_kernel(cfg)
    old = table.values
    quarter = 4 ** (dk - 1)
    new = np.empty(4**dk, dtype=complex)
    for a in range(4):
        prod = (kern[a] * old).reshape(quarter, 4)
        new[a * quarter : (a + 1) * quarter] = prod[:, 0] + prod[:, 1] + prod[:, 2] + prod[:, 3]
    return AmplitudeTable(step_index=table.step_index + 1, values=new)


def reduced_density(cfg: QuapiConfig, table: AmplitudeTable) -> np.ndarray:
    """2x2 reduced density matrix from an amplitude table.

    The entry for final pair (s^+, s^-) sums the table over the dk - 1
    older pair states, in ascending key order.
    """
    dk = cfg.memory_steps
    if table.values.size != 4**dk:
        raise ValueError("table size does not match memory_steps")
    sums = table.values.reshape(4, 4 ** (dk - 1)).sum(axis=1)
    return sums.reshape(2, 2)


def brute_force_density(cfg: QuapiConfig) -> np.ndarray:
    """Full path summation over all 4**(N+1) discrete paths, N = total_steps.

    Uses the untruncated influence functional (every pair of time
    points interacts), so it requires a memory window covering the whole
    horizon; serves as the exactness oracle for the iterated scheme.
    """
    n = cfg.total_steps
    if n > BRUTE_FORCE_MAX_STEPS:
        raise ValueError(
            f"brute-force enumeration of 4**{n + 1} paths exceeds the 4**{BRUTE_FORCE_MAX_STEPS + 1} guard"
        )
    if cfg.memory_steps < n:
        raise ValueError("brute force requires memory_steps >= total_steps (untruncated)")
    digits = _digits(n + 1)
    vals = cfg.rho0.ravel()[digits[0]].astype(complex)
    for j1 in range(n + 1):
        for j2 in range(j1 + 1):
            mat = _lag_matrix(cfg, j1 - j2)
            vals *= mat[digits[j1], digits[j2]]
    sums = vals.reshape(4, 4**n).sum(axis=1)
    return sums.reshape(2, 2)


def density_series(cfg: QuapiConfig) -> Iterator[Tuple[float, np.ndarray]]:
    """Yield (t, rho) at t = 0, dt, ..., total_steps * dt.

    The first dk - 1 steps grow the path window exactly (no truncation
    is active until the window is full); from then on the windowed
    iteration slides.  The growing tables peak at the same 4**dk size as
    the steady-state tables.
    """
    _check_budget(cfg)
    dk, n_steps = cfg.memory_steps, cfg.total_steps

    self_mat = _lag_matrix(cfg, 0)
    table = cfg.rho0.ravel() * np.diagonal(self_mat)
    yield 0.0, table.reshape(2, 2).copy()

    # Growing window: C_n over pair states S_0..S_n, newest in the top bits.
    for n in range(1, min(dk, n_steps + 1)):
        digits = _digits(n)
        grown = np.empty(4 ** (n + 1), dtype=complex)
        for a in range(4):
            block = table * np.diagonal(self_mat)[a]
            for j in range(n):
                mat = _lag_matrix(cfg, n - j)
                block = block * mat[a, digits[j]]
            grown[a * 4**n : (a + 1) * 4**n] = block
        table = grown
        rho = table.reshape(4, 4**n).sum(axis=1).reshape(2, 2)
        yield n * cfg.dt, rho

    if n_steps < dk:
        return

    amp = AmplitudeTable(step_index=0, values=table)
    for n in range(dk, n_steps + 1):
        amp = quapi_step(cfg, amp)
        yield n * cfg.dt, reduced_density(cfg, amp)
