"""Passive linear-optical elements and single-spin operations.

Conventions (all sign choices matter for the downstream interference):

- PBS (R/L basis): R transmits, L reflects, no reflection phase.
  With inputs (a, b) and outputs (c, d): R@a -> c, L@a -> d, R@b -> d, L@b -> c.
- HWP at 22.5 degrees (photon Hadamard): |R> -> (|R>+|L>)/sqrt2,
  |L> -> (|R>-|L>)/sqrt2.
- 50:50 BS with inputs (a, b) and outputs (c, d): amplitude at b splits as
  (c + d)/sqrt2, amplitude at a splits as (c - d)/sqrt2 (a carries the minus
  on the second output), identically for both polarizations.
- PBS in the F/S basis: the (|R>+|L>)/sqrt2 component routes to the F output,
  (|R>-|L>)/sqrt2 to the S output, keeping its polarization state.
- Spin Hadamard: |+> -> (|+>+|->)/sqrt2, |-> -> (|+>-|->)/sqrt2.
- Spin Paulis in the {|+>, |->} basis: Z = |+><+| - |-><-| and
  -Z = -|+><+| + |-><-| (Z up to global phase; the distinction matters for
  feedforward bookkeeping).

Every routing element is realized as a genuine unitary on the whole mode
space: besides the forward routing above, content already sitting on an
output wire routes back to the matching input wire (a lossless device is
bidirectional).  In a well-formed feed-forward circuit output wires are
vacuum, so the backward direction never carries amplitude; the completion
matters only for norm preservation on arbitrary states.  To keep the
routing well defined, input and output wire sets must not partially
overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cavity import IDEAL_PAIR, ReflectionPair, scatter
from .state import L, R, HybridState, StateError

_SQRT1_2 = 1.0 / math.sqrt(2.0)


class Kind(Enum):
    PBS_RL = "pbs"
    PBS_FS = "pbsfs"
    HWP = "hwp"
    BS5050 = "bs"
    NV_SCATTER = "nv"
    SPIN_H = "spinh"
    SPIN_PAULI = "spinpauli"


class Pauli(Enum):
    I = "I"
    Z = "Z"
    MINUS_Z = "-Z"


class WiringError(StateError):
    """An element's in/out wiring overlaps in a way that merges occupied modes."""


@dataclass(frozen=True)
class Element:
    """One circuit component with its mode wiring and optional spin target."""

    kind: Kind
    in_modes: tuple[str, ...] = ()
    out_modes: tuple[str, ...] = ()
    spin: int | None = None
    pauli: Pauli | None = None
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "in_modes", tuple(str(m) for m in self.in_modes))
        object.__setattr__(self, "out_modes", tuple(str(m) for m in self.out_modes))
        _ARITY_CHECKS[self.kind](self)


def _check_pbs_rl(el: Element):
    if not (1 <= len(el.in_modes) <= 2) or len(el.out_modes) != 2:
        raise WiringError("pbs takes 1-2 input modes and exactly 2 output modes")
    _check_distinct(el)


def _check_pbs_fs(el: Element):
    if len(el.in_modes) != 1 or len(el.out_modes) != 2:
        raise WiringError("pbsfs takes 1 input mode and 2 output modes")
    _check_distinct(el)


def _check_hwp(el: Element):
    if len(el.in_modes) != 1 or el.out_modes != el.in_modes:
        raise WiringError("hwp acts in place on a single mode")


def _check_bs(el: Element):
    if len(el.in_modes) != 2 or len(el.out_modes) != 2:
        raise WiringError("bs takes exactly 2 input and 2 output modes")
    _check_distinct(el)


def _check_nv(el: Element):
    if len(el.in_modes) != 1 or el.out_modes != el.in_modes:
        raise WiringError("nv acts in place on a single mode")
    if el.spin is None:
        raise WiringError("nv needs a spin target")


def _check_spin_only(el: Element):
    if el.in_modes or el.out_modes:
        raise WiringError("spin operations take no modes")
    if el.spin is None:
        raise WiringError("spin operations need a spin index")
    if el.kind is Kind.SPIN_PAULI and el.pauli is None:
        raise WiringError("spin Pauli needs an operator")


def _check_distinct(el: Element):
    if len(set(el.in_modes)) != len(el.in_modes):
        raise WiringError(f"duplicate input modes {el.in_modes}")
    if len(set(el.out_modes)) != len(el.out_modes):
        raise WiringError(f"duplicate output modes {el.out_modes}")
    if set(el.in_modes) & set(el.out_modes):
        raise WiringError(
            f"input modes {el.in_modes} and output modes {el.out_modes} overlap; "
            "routing through a shared wire would merge occupied modes"
        )


_ARITY_CHECKS = {
    Kind.PBS_RL: _check_pbs_rl,
    Kind.PBS_FS: _check_pbs_fs,
    Kind.HWP: _check_hwp,
    Kind.BS5050: _check_bs,
    Kind.NV_SCATTER: _check_nv,
    Kind.SPIN_H: _check_spin_only,
    Kind.SPIN_PAULI: _check_spin_only,
}

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _SQRT1_2
_PAULI_DIAG = {
    Pauli.I: np.array([1.0, 1.0], dtype=complex),
    Pauli.Z: np.array([1.0, -1.0], dtype=complex),
    Pauli.MINUS_Z: np.array([-1.0, 1.0], dtype=complex),
}


def apply_pbs_rl(state: HybridState, in_modes, out_modes) -> HybridState:
    """Route R to the same-index output and L to the opposite one.

    With a single input mode the absent port is vacuum.  The routing is a
    permutation of (polarization, wire) slots, swapping each input slot with
    its destination, so the operation is exactly unitary.
    """
    el = Element(Kind.PBS_RL, tuple(in_modes), tuple(out_modes))
    idx = [state.mode_index(m) for m in el.in_modes]
    odx = [state.mode_index(m) for m in el.out_modes]
    a = state.amps.copy()
    for k, i in enumerate(idx):
        a[R, i], a[R, odx[k]] = a[R, odx[k]].copy(), a[R, i].copy()
        a[L, i], a[L, odx[1 - k]] = a[L, odx[1 - k]].copy(), a[L, i].copy()
    return state.with_amps(a)


def apply_hwp(state: HybridState, mode) -> HybridState:
    """Photon Hadamard on one mode (half-wave plate at 22.5 degrees)."""
    mi = state.mode_index(mode)
    a = state.amps.copy()
    r_amp, l_amp = a[R, mi].copy(), a[L, mi].copy()
    a[R, mi] = (r_amp + l_amp) * _SQRT1_2
    a[L, mi] = (r_amp - l_amp) * _SQRT1_2
    return state.with_amps(a)


def apply_bs(state: HybridState, in_modes, out_modes) -> HybridState:
    """Polarization-independent 50:50 beam splitter.

    Forward: in0 -> (out0 - out1)/sqrt2, in1 -> (out0 + out1)/sqrt2.  The
    backward direction is the Hermitian completion, making the element an
    involutory unitary on the four wires.
    """
    el = Element(Kind.BS5050, tuple(in_modes), tuple(out_modes))
    i0, i1 = (state.mode_index(m) for m in el.in_modes)
    o0, o1 = (state.mode_index(m) for m in el.out_modes)
    a = state.amps.copy()
    a0, a1 = a[:, i0, :].copy(), a[:, i1, :].copy()
    b0, b1 = a[:, o0, :].copy(), a[:, o1, :].copy()
    a[:, o0, :] = (a0 + a1) * _SQRT1_2
    a[:, o1, :] = (a1 - a0) * _SQRT1_2
    a[:, i0, :] = (b0 - b1) * _SQRT1_2
    a[:, i1, :] = (b0 + b1) * _SQRT1_2
    return state.with_amps(a)


def apply_pbs_fs(state: HybridState, in_mode, out_modes) -> HybridState:
    """Split one mode into its F and S polarization components.

    The F output carries polarization (|R>+|L>)/sqrt2, the S output
    (|R>-|L>)/sqrt2.  Unitary completion: the F component of the F output
    and the S component of the S output swap back to the input wire.
    """
    el = Element(Kind.PBS_FS, (in_mode,), tuple(out_modes))
    mi = state.mode_index(el.in_modes[0])
    of, os_ = (state.mode_index(m) for m in el.out_modes)
    a = state.amps.copy()
    f_in = (a[R, mi] + a[L, mi]) * _SQRT1_2
    s_in = (a[R, mi] - a[L, mi]) * _SQRT1_2
    f_of = (a[R, of] + a[L, of]) * _SQRT1_2
    s_of = (a[R, of] - a[L, of]) * _SQRT1_2
    f_os = (a[R, os_] + a[L, os_]) * _SQRT1_2
    s_os = (a[R, os_] - a[L, os_]) * _SQRT1_2
    a[R, mi] = (f_of + s_os) * _SQRT1_2
    a[L, mi] = (f_of - s_os) * _SQRT1_2
    a[R, of] = (f_in + s_of) * _SQRT1_2
    a[L, of] = (f_in - s_of) * _SQRT1_2
    a[R, os_] = (f_os + s_in) * _SQRT1_2
    a[L, os_] = (f_os - s_in) * _SQRT1_2
    return state.with_amps(a)


def _spin_transform(state: HybridState, spin_index: int, mat_or_diag: np.ndarray) -> HybridState:
    if not 0 <= spin_index < state.n_spins:
        raise StateError(f"spin index {spin_index} out of range for {state.n_spins} spins")
    n = state.n_spins
    a = state.spin_view().copy()
    a = np.moveaxis(a, 2 + spin_index, -1)
    if mat_or_diag.ndim == 1:
        a = a * mat_or_diag
    else:
        a = a @ mat_or_diag.T
    a = np.moveaxis(a, -1, 2 + spin_index)
    return state.with_amps(a.reshape(state.amps.shape))


def apply_spin_hadamard(state: HybridState, spin_index: int) -> HybridState:
    """Hadamard on one electron spin."""
    return _spin_transform(state, spin_index, _HADAMARD)


def apply_spin_pauli(state: HybridState, spin_index: int, op: Pauli) -> HybridState:
    """I, Z, or -Z on one electron spin."""
    return _spin_transform(state, spin_index, _PAULI_DIAG[Pauli(op)])


def apply_element(state: HybridState, el: Element, reflection: ReflectionPair = IDEAL_PAIR) -> HybridState:
    """Dispatch one element; NV scattering uses the given reflection pair."""
    if el.kind is Kind.PBS_RL:
        return apply_pbs_rl(state, el.in_modes, el.out_modes)
    if el.kind is Kind.PBS_FS:
        return apply_pbs_fs(state, el.in_modes[0], el.out_modes)
    if el.kind is Kind.HWP:
        return apply_hwp(state, el.in_modes[0])
    if el.kind is Kind.BS5050:
        return apply_bs(state, el.in_modes, el.out_modes)
    if el.kind is Kind.NV_SCATTER:
        return scatter(state, el.spin, el.in_modes[0], reflection)
    if el.kind is Kind.SPIN_H:
        return apply_spin_hadamard(state, el.spin)
    if el.kind is Kind.SPIN_PAULI:
        return apply_spin_pauli(state, el.spin, el.pauli)
    raise StateError(f"unhandled element kind {el.kind}")
