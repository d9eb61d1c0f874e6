"""NV-cavity input-output reflection and the photon-spin scattering rule.

A single photon reflecting off a single-sided cavity containing an NV center
picks up a spin-dependent reflection coefficient: the transitions
|+> <-> |A2> and |-> <-> |A2> are driven by R- and L-polarized light
respectively, so (R,+) and (L,-) see the coupled ("hot") cavity while (R,-)
and (L,+) see the empty ("cold") one.  In the steady state and weak
excitation the hot coefficient is

    r = [(i*dc - k/2)(i*d0 + y/2) + g^2] / [(i*dc + k/2)(i*d0 + y/2) + g^2]

with dc = omega_c - omega_p, d0 = omega_0 - omega_p; the cold coefficient is
the same expression at g = 0.  On resonance these reduce to
r = (g^2 - k*y/4)/(g^2 + k*y/4) and r0 = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import L, MINUS, PLUS, R, HybridState

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class ParameterError(ValueError):
    """Unphysical cavity parameters."""


@dataclass(frozen=True)
class CavityParams:
    """Physical rates of one NV-cavity block.

    All quantities share one arbitrary frequency unit; only ratios and
    detunings enter the reflection coefficient.  ``omega_*`` default to a
    common value, i.e. the fully resonant condition.
    """

    g: float
    kappa: float
    gamma: float
    omega_c: float = 0.0
    omega_0: float = 0.0
    omega_p: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ParameterError(f"cavity damping rate must be positive, got {self.kappa}")
        if self.gamma <= 0:
            raise ParameterError(f"NV decay rate must be positive, got {self.gamma}")
        if self.g < 0:
            raise ParameterError(f"coupling rate must be nonnegative, got {self.g}")

    @classmethod
    def from_coupling_ratio(cls, ratio: float) -> CavityParams:
        """Resonant parameters with kappa = gamma = 1 and g = ratio*sqrt(kappa*gamma)."""
        if ratio < 0:
            raise ParameterError(f"coupling ratio must be nonnegative, got {ratio}")
        return cls(g=float(ratio), kappa=1.0, gamma=1.0)

    @property
    def coupling_ratio(self) -> float:
        return self.g / np.sqrt(self.kappa * self.gamma)


@dataclass(frozen=True)
class ReflectionPair:
    """Hot (coupled) and cold (empty) cavity reflection coefficients."""

    r_hot: complex
    r_cold: complex

    def magnitudes(self) -> tuple[float, float]:
        return abs(self.r_hot), abs(self.r_cold)


#: Idealization r -> 1, r0 = -1; used for exact ideal-circuit checks rather
#: than a large-g limit.
IDEAL_PAIR = ReflectionPair(r_hot=1.0 + 0.0j, r_cold=-1.0 + 0.0j)


def _steady_state_r(delta_c: float, delta_0: float, kappa: float, gamma: float, g: float) -> complex:
    num = (1j * delta_c - kappa / 2.0) * (1j * delta_0 + gamma / 2.0) + g * g
    den = (1j * delta_c + kappa / 2.0) * (1j * delta_0 + gamma / 2.0) + g * g
    return num / den


def reflection_coefficient(params: CavityParams) -> ReflectionPair:
    """Hot and cold reflection coefficients for one NV-cavity block.

    Only detunings relative to the photon frequency enter.  At exact
    resonance both coefficients are real and r_cold = -1 exactly.
    """
    dc = params.omega_c - params.omega_p
    d0 = params.omega_0 - params.omega_p
    r_hot = _steady_state_r(dc, d0, params.kappa, params.gamma, params.g)
    r_cold = _steady_state_r(dc, d0, params.kappa, params.gamma, 0.0)
    return ReflectionPair(r_hot=r_hot, r_cold=r_cold)


def coupling_ratio_to_r(ratio: float) -> float:
    """Resonant hot reflection amplitude for a given g/sqrt(kappa*gamma)."""
    if ratio < 0:
        raise ParameterError(f"coupling ratio must be nonnegative, got {ratio}")
    x = ratio * ratio
    return (x - 0.25) / (x + 0.25)


def reflection_at_ratio(ratio: float) -> ReflectionPair:
    """Resonant reflection pair controlled by the coupling ratio alone."""
    return reflection_coefficient(CavityParams.from_coupling_ratio(ratio))


def resonant_pair(r_hot: float | complex) -> ReflectionPair:
    """Reflection pair with a freely chosen hot amplitude and resonant cold = -1."""
    return ReflectionPair(r_hot=complex(r_hot), r_cold=-1.0 + 0.0j)


def kappa_from_quality_factor(q: float, wavelength: float) -> float:
    """Cavity damping from quality factor and transition wavelength: c/(lambda*Q).

    The result carries the same frequency convention as c/lambda (an ordinary
    frequency in Hz for wavelength in meters).  See
    :func:`quality_factor_conventions` for the angular/ordinary variants; the
    literature is not consistent about which is meant.
    """
    if q <= 0:
        raise ParameterError(f"quality factor must be positive, got {q}")
    if wavelength <= 0:
        raise ParameterError(f"wavelength must be positive, got {wavelength}")
    return SPEED_OF_LIGHT / (wavelength * q)


def quality_factor_conversions(q: float, wavelength: float) -> dict[str, float]:
    """All Q -> kappa readings for the Q = c/(lambda*kappa) relation.

    Returns ordinary and angular variants:

    - ``ordinary``: kappa = c/(lambda*Q), kappa an ordinary frequency (Hz).
    - ``angular``:  kappa = 2*pi*c/(lambda*Q), kappa in rad/s (Q = omega/kappa
      with both angular).
    - ``mixed``:    kappa = c/(lambda*Q)/(2*pi), i.e. Q compares the ordinary
      optical frequency against an angular kappa, reported back in Hz.

    For Q = 1e5 at 637 nm these give ~4.71 GHz, ~29.6e9 rad/s, and ~0.75 GHz.
    """
    base = kappa_from_quality_factor(q, wavelength)
    return {
        "ordinary": base,
        "angular": 2.0 * np.pi * base,
        "mixed": base / (2.0 * np.pi),
    }


def scatter(state: HybridState, nv_index: int, mode, r: ReflectionPair) -> HybridState:
    """Reflect the photon amplitude in ``mode`` off the NV at ``nv_index``.

    (R,+) and (L,-) amplitudes pick up r_hot, (R,-) and (L,+) pick up r_cold;
    amplitudes in other modes are untouched.
    """
    if not 0 <= nv_index < state.n_spins:
        raise ParameterError(f"spin index {nv_index} out of range for {state.n_spins} spins")
    mi = state.mode_index(mode)
    n = state.n_spins
    a = state.amps.reshape((2, len(state.modes)) + (2,) * n).copy()
    for pol, spin_val, factor in (
        (R, PLUS, r.r_hot),
        (L, MINUS, r.r_hot),
        (R, MINUS, r.r_cold),
        (L, PLUS, r.r_cold),
    ):
        sl: list = [slice(None)] * (2 + n)
        sl[0] = pol
        sl[1] = mi
        sl[2 + nv_index] = spin_val
        a[tuple(sl)] *= factor
    return state.with_amps(a.reshape(state.amps.shape))
