"""Hybrid photon-spin state vectors.

A single photon carries a circular polarization (R or L) and sits in one of a
set of labeled spatial modes; each NV electron spin is a qubit over
{|+> = |m_s=+1>, |-> = |m_s=-1>}.  The joint state is a dense complex vector
of shape (2, n_modes, 2**n_spins) and may be subnormalized: 1 - |psi|^2 is
the accumulated photon-loss probability.  Lossy reflections only attenuate
amplitudes, and the lost fraction never re-interferes, so no explicit "lost
photon" basis state is kept.

States are immutable values; every operation returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Polarization indices.
R = 0
L = 1

# Spin basis indices: PLUS = |m_s=+1>, MINUS = |m_s=-1>.
PLUS = 0
MINUS = 1

#: Tolerance used for normalization preconditions.
NORM_ATOL = 1e-12


class StateError(ValueError):
    """Base class for state construction/manipulation errors."""


class NormalizationError(StateError):
    """An input amplitude pair was not normalized to 1."""


class DimensionMismatchError(StateError):
    """Two states (or a state and a circuit) disagree in shape."""


class ModeError(StateError):
    """A spatial-mode label is not part of the state's declared mode set."""


def spin_config_index(bits) -> int:
    """Index of a spin configuration, spin 0 being the most significant bit.

    ``bits`` is a sequence over {PLUS, MINUS}; e.g. for two spins,
    (PLUS, MINUS) -> 1 and (MINUS, PLUS) -> 2.
    """
    idx = 0
    for b in bits:
        if b not in (PLUS, MINUS):
            raise StateError(f"spin basis value must be PLUS or MINUS, got {b!r}")
        idx = (idx << 1) | b
    return idx


def spin_config_bits(index: int, n_spins: int) -> tuple[int, ...]:
    """Inverse of :func:`spin_config_index`."""
    return tuple((index >> (n_spins - 1 - k)) & 1 for k in range(n_spins))


@dataclass(frozen=True, eq=False)
class SpinState:
    """Spin-only state vector over 2**n_spins configurations.

    ``is_null`` flags the empty state returned by a zero-probability
    photon collapse.
    """

    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex)
        if a.ndim != 1 or a.size == 0 or a.size & (a.size - 1):
            raise DimensionMismatchError(
                f"spin amplitude vector must have length 2**n, got shape {a.shape}"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def n_spins(self) -> int:
        return self.amps.size.bit_length() - 1

    @property
    def is_null(self) -> bool:
        return not np.any(self.amps)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True, eq=False)
class HybridState:
    """Photon (polarization x mode) tensor spin register state.

    ``amps[pol, mode, config]`` with pol in {R, L}, mode indexed by position
    in ``modes``, and config per :func:`spin_config_index`.
    """

    modes: tuple[str, ...]
    n_spins: int
    amps: np.ndarray

    def __post_init__(self):
        modes = tuple(str(m) for m in self.modes)
        if len(set(modes)) != len(modes):
            raise StateError("duplicate mode labels")
        a = np.asarray(self.amps, dtype=complex)
        expected = (2, len(modes), 2**self.n_spins)
        if a.shape != expected:
            raise DimensionMismatchError(
                f"amplitude array has shape {a.shape}, expected {expected}"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "amps", a)

    def mode_index(self, label) -> int:
        try:
            return self.modes.index(str(label))
        except ValueError:
            raise ModeError(f"unknown mode {label!r}; declared modes: {self.modes}") from None

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def loss(self) -> float:
        """Accumulated photon-loss probability, 1 - |psi|^2."""
        return 1.0 - self.norm2()

    def with_amps(self, amps: np.ndarray) -> HybridState:
        return HybridState(self.modes, self.n_spins, amps)

    def spin_view(self) -> np.ndarray:
        """Read-only view reshaped to (2, n_modes, 2, 2, ..., 2)."""
        return self.amps.reshape((2, len(self.modes)) + (2,) * self.n_spins)


def _check_pair(pair, what: str) -> np.ndarray:
    v = np.asarray(pair, dtype=complex)
    if v.shape != (2,):
        raise DimensionMismatchError(f"{what} must be a pair of amplitudes, got shape {v.shape}")
    n2 = float(np.sum(np.abs(v) ** 2))
    if abs(n2 - 1.0) > NORM_ATOL:
        raise NormalizationError(f"{what} has squared norm {n2!r}, expected 1 within {NORM_ATOL}")
    return v


def make_product_state(pol_amps, photon_mode, spin_amps, modes) -> HybridState:
    """Tensor product of a photon polarization state at one mode with N spins.

    Every amplitude pair must be normalized to 1 within 1e-12; the result has
    unit norm.
    """
    modes = tuple(str(m) for m in modes)
    pol = _check_pair(pol_amps, "photon polarization pair")
    spins = [_check_pair(s, f"spin {k} pair") for k, s in enumerate(spin_amps)]
    n = len(spins)
    cfg = np.ones(1, dtype=complex)
    for s in spins:
        cfg = np.kron(cfg, s)
    amps = np.zeros((2, len(modes), 2**n), dtype=complex)
    state = HybridState(modes, n, amps)  # validates modes before indexing
    mi = state.mode_index(photon_mode)
    amps[R, mi, :] = pol[0] * cfg
    amps[L, mi, :] = pol[1] * cfg
    return HybridState(modes, n, amps)


def overlap(a: HybridState, b: HybridState) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    if a.modes != b.modes or a.n_spins != b.n_spins:
        raise DimensionMismatchError("states live on different (modes, spins) spaces")
    return complex(np.vdot(a.amps, b.amps))


def partial_trace_photon_collapse(state: HybridState, outcome: str, mode):
    """Project the photon at ``mode`` onto |F> or |S> and drop it.

    F = (|R>+|L>)/sqrt(2), S = (|R>-|L>)/sqrt(2).  Returns
    ``(probability, spin_state)`` where the spin state is renormalized; a
    zero-probability outcome returns the flagged null spin state.
    """
    if outcome not in ("F", "S"):
        raise StateError(f"detector outcome must be 'F' or 'S', got {outcome!r}")
    mi = state.mode_index(mode)
    sign = 1.0 if outcome == "F" else -1.0
    spin = (state.amps[R, mi, :] + sign * state.amps[L, mi, :]) / math.sqrt(2)
    prob = float(np.sum(np.abs(spin) ** 2))
    if prob <= 0.0:
        return 0.0, SpinState(np.zeros_like(spin))
    return prob, SpinState(spin / math.sqrt(prob))


def states_close(a: HybridState, b: HybridState, atol: float = NORM_ATOL) -> bool:
    """Exact (global-phase-sensitive) amplitude comparison."""
    if a.modes != b.modes or a.n_spins != b.n_spins:
        return False
    return bool(np.max(np.abs(a.amps - b.amps)) <= atol)


def phase_aligned_deviation(actual: np.ndarray, expected: np.ndarray) -> float:
    """Max amplitude deviation after removing one optimal global phase.

    Gate-equivalence assertions permit a single global phase; everything else
    (relative phases, moduli) must match.
    """
    actual = np.asarray(actual, dtype=complex).ravel()
    expected = np.asarray(expected, dtype=complex).ravel()
    if actual.shape != expected.shape:
        raise DimensionMismatchError("cannot compare vectors of different shapes")
    ov = np.vdot(expected, actual)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.max(np.abs(actual - phase * expected)))
