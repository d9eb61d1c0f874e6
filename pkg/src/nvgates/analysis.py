"""Gate fidelity and efficiency: closed forms, full simulation, and sweeps.

Fidelity is the squared overlap of a realistic gate output with the ideal
gate output; efficiency is the probability that the photon survives the
circuit (pre-detection squared norm).  Both are available two ways:

- closed forms in the hot-reflection magnitude |r| (functions of |r| only,
  with the cold reflection at its resonant value -1), and
- direct state-vector simulation of the gate circuits at an arbitrary
  reflection pair.

The two do NOT have to agree: the closed forms treat every cavity pass as an
independent branch-averaged attenuation, whereas in an exact simulation the
loss at one pass reweights the branches seen by later passes.
:func:`efficiency_factorized` reconstructs the independent-pass model from
the circuit structure itself and matches the closed forms to machine
precision; :func:`fidelity_convention_report` quantifies the residuals of
the simulated quantities against the closed forms for every input/
normalization convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cavity import IDEAL_PAIR, ReflectionPair, coupling_ratio_to_r, resonant_pair
from .elements import Kind
from .gates import GATE_NAMES, build_gate_circuit, ideal_gate_unitary
from .netlist import (
    Netlist,
    apply_elements,
    balanced_product_input,
    product_input,
    run_netlist,
)
from .state import L, MINUS, PLUS, R

INPUT_CONVENTIONS = ("balanced", "random")
NORMALIZATIONS = ("postselected", "unnormalized")

_CIRCUITS: dict[str, Netlist] = {}


def _circuit(gate: str) -> Netlist:
    net = _CIRCUITS.get(gate)
    if net is None:
        net = _CIRCUITS[gate] = build_gate_circuit(gate)
    return net


def _check_r(r_mag) -> None:
    if not 0 <= r_mag <= 1:
        raise ValueError(f"reflection magnitude must lie in [0, 1], got {r_mag}")


def fidelity_closed_form(gate: str, r_mag):
    """Closed-form gate fidelity as a function of |r|.

    Accepts floats or :class:`fractions.Fraction` (exact arithmetic for
    endpoint checks).  Equals 1 at |r| = 1 for all gates.
    """
    _check_r(r_mag)
    x = r_mag
    gate = gate.lower()
    if gate == "cnot":
        return (2 + x + x**2) ** 2 / (2 * (5 - 2 * x + 2 * x**2 + 2 * x**3 + x**4))
    if gate == "toffoli":
        return (3 + x) ** 4 / (16 * (3 + x**2) ** 2)
    if gate == "fredkin":
        zeta = (29 + 19 * x + 8 * x**2 + 4 * x**3 + 3 * x**4 + x**5) ** 2
        xi = 8 * (
            237
            - 10 * x
            + 165 * x**2
            - 8 * x**3
            + 66 * x**4
            - 12 * x**5
            + 26 * x**6
            + x**7 * (3 + x) * (8 + 3 * x + x**2)
        )
        return zeta / xi
    raise ValueError(f"unknown gate {gate!r}")


def efficiency_closed_form(gate: str, r_mag):
    """Closed-form photon yield as a function of |r|.

    Accepts floats or Fractions.  Equals 1 at |r| = 1 for all gates.
    """
    _check_r(r_mag)
    x2 = r_mag * r_mag
    gate = gate.lower()
    if gate == "cnot":
        return ((3 + x2) ** 2) / 16
    if gate == "toffoli":
        return (3 + x2) ** 2 * (7 + x2) / 128
    if gate == "fredkin":
        return (3 + x2) * (4 + (1 + x2) ** 2) * (12 + (1 + x2) ** 2) / 512
    raise ValueError(f"unknown gate {gate!r}")


def _ideal_spin_output(gate: str, spin_pairs) -> np.ndarray:
    target = ideal_gate_unitary(gate)
    vec = np.ones(1, dtype=complex)
    for pair in spin_pairs:
        vec = np.kron(vec, np.asarray(pair, dtype=complex))
    return target.unitary @ vec


def _random_spin_pairs(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    pairs = []
    for _ in range(n):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        pairs.append(v / np.linalg.norm(v))
    return pairs


def _input_ensemble(net: Netlist, convention: str, trials: int, seed):
    """Yield (input state, spin pairs) for one convention."""
    b = 1.0 / math.sqrt(2.0)
    if convention == "balanced":
        pairs = [np.array([b, b], dtype=complex)] * net.n_spins
        yield balanced_product_input(net), pairs
    elif convention == "random":
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            pairs = _random_spin_pairs(rng, net.n_spins)
            yield product_input(net, pairs), pairs
    else:
        raise ValueError(f"unknown input convention {convention!r}")


def fidelity_simulated(
    gate: str,
    r: ReflectionPair,
    convention: str = "balanced",
    normalization: str = "postselected",
    trials: int = 32,
    seed: int | None = 0,
) -> float:
    """Gate fidelity from full circuit simulation.

    Per detector outcome o with probability p_o, let F_o be the squared
    overlap of the feedforward-corrected, renormalized spin state with the
    ideal gate output.  ``postselected`` returns sum_o p_o F_o / sum_o p_o
    (loss is accounted separately, in the efficiency); ``unnormalized``
    returns sum_o p_o F_o (loss counts as infidelity).  Returns NaN if the
    photon is lost with certainty.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    net = _circuit(gate)
    values = []
    for state, pairs in _input_ensemble(net, convention, trials, seed):
        ideal = _ideal_spin_output(gate, pairs)
        weighted = 0.0
        total = 0.0
        for outcome in run_netlist(net, state, r):
            if outcome.probability == 0.0:
                continue
            f = abs(np.vdot(ideal, outcome.spins.amps)) ** 2
            weighted += outcome.probability * f
            total += outcome.probability
        if total == 0.0:
            return math.nan
        values.append(weighted / total if normalization == "postselected" else weighted)
    return float(np.mean(values))


def efficiency_simulated(
    gate: str,
    r: ReflectionPair,
    convention: str = "balanced",
    trials: int = 32,
    seed: int | None = 0,
) -> float:
    """Photon survival probability from full circuit simulation:
    the pre-detection squared norm, averaged over the input convention."""
    net = _circuit(gate)
    values = [
        apply_elements(net, state, r).norm2()
        for state, _ in _input_ensemble(net, convention, trials, seed)
    ]
    return float(np.mean(values))


def _nv_stages(net: Netlist):
    """Group NV elements into interferometric passes ("stages").

    A *run* is a maximal sequence of NV reflections on one wire with no
    intervening element on that wire; the photon amplitude crossing a run
    accumulates the product of its scatter factors.  Runs whose wires sit at
    the same NV-path depth are parallel alternatives of one physical pass
    and form one stage; stages at increasing depth are traversed in
    sequence.  Returns {depth: [(start position, mode, [spin indices])]}.
    """
    depth = {m: 0 for m in net.modes}
    open_runs: dict[str, int] = {}
    runs: list[dict] = []
    for pos, el in enumerate(net.elements):
        if el.kind is Kind.NV_SCATTER:
            m = el.in_modes[0]
            idx = open_runs.get(m)
            if idx is None:
                runs.append({"start": pos, "mode": m, "spins": [el.spin], "depth": depth[m]})
                open_runs[m] = len(runs) - 1
            else:
                runs[idx]["spins"].append(el.spin)
            depth[m] += 1
        elif el.kind in (Kind.PBS_RL, Kind.BS5050, Kind.PBS_FS):
            d = max(depth[m] for m in el.in_modes)
            for m in el.in_modes:
                depth[m] = 0
                open_runs.pop(m, None)
            for m in el.out_modes:
                depth[m] = max(depth[m], d)
                open_runs.pop(m, None)
        elif el.kind is Kind.HWP:
            open_runs.pop(el.in_modes[0], None)
    stages: dict[int, list] = {}
    for run in runs:
        stages.setdefault(run["depth"], []).append((run["start"], run["mode"], run["spins"]))
    return stages


def efficiency_factorized(gate: str, r_mag: float) -> float:
    """Independent-pass reconstruction of the closed-form efficiency.

    Treats each interferometric pass (see :func:`_nv_stages`) as an
    uncorrelated attenuation: branch weights at each pass are taken from the
    *ideal* circuit averaged over all spin basis inputs (photon balanced),
    each branch loses 1 - |f|^2 with f its accumulated scatter factor, and
    the per-pass survival factors multiply.  Matches
    :func:`efficiency_closed_form` to machine precision for all three gates,
    which identifies the modeling assumption behind the closed forms; an
    exact simulation deviates because loss correlates the photon with the
    spins between passes.
    """
    _check_r(r_mag)
    net = _circuit(gate)
    n = net.n_spins
    stages = _nv_stages(net)
    basis_pairs = ((1.0, 0.0), (0.0, 1.0))
    inputs = []
    for cfg in range(2**n):
        pairs = [basis_pairs[(cfg >> (n - 1 - k)) & 1] for k in range(n)]
        inputs.append(product_input(net, pairs))

    eta = 1.0
    for depth_key in sorted(stages):
        stage_loss = 0.0
        for start, mode, spins in stages[depth_key]:
            # ensemble-averaged branch weights on this wire before the run
            weights = np.zeros((2, 2**n))
            for state in inputs:
                before = apply_elements(net, state, IDEAL_PAIR, upto=start)
                mi = before.mode_index(mode)
                weights += np.abs(before.amps[:, mi, :]) ** 2
            weights /= len(inputs)
            for pol in (R, L):
                for cfg in range(2**n):
                    f2 = 1.0
                    for spin in spins:
                        bit = (cfg >> (n - 1 - spin)) & 1
                        hot = (pol == R and bit == PLUS) or (pol == L and bit == MINUS)
                        f2 *= r_mag**2 if hot else 1.0  # |r_cold| = 1 on resonance
                    stage_loss += weights[pol, cfg] * (1.0 - f2)
        eta *= 1.0 - stage_loss
    return float(eta)


@dataclass(frozen=True)
class SweepRecord:
    """One (coupling ratio, gate) row of a figure-reproduction sweep."""

    coupling_ratio: float
    r_magnitude: float
    gate: str
    fidelity_closed: float
    fidelity_sim: float
    efficiency_closed: float
    efficiency_sim: float


def sweep(
    gates,
    coupling_ratios,
    convention: str = "balanced",
    trials: int = 16,
    seed: int | None = 0,
) -> list[SweepRecord]:
    """Closed-form and simulated metrics over a grid of coupling ratios.

    The resonant mapping ratio -> r is used throughout; records are sorted
    by ratio, then gate name.  Deterministic for fixed inputs.
    """
    records = []
    for ratio in coupling_ratios:
        r_val = coupling_ratio_to_r(ratio)
        r_mag = abs(r_val)
        pair = resonant_pair(r_val)
        for gate in gates:
            records.append(
                SweepRecord(
                    coupling_ratio=float(ratio),
                    r_magnitude=r_mag,
                    gate=gate.lower(),
                    fidelity_closed=float(fidelity_closed_form(gate, r_mag)),
                    fidelity_sim=fidelity_simulated(gate, pair, convention, "postselected", trials, seed),
                    efficiency_closed=float(efficiency_closed_form(gate, r_mag)),
                    efficiency_sim=efficiency_simulated(gate, pair, convention, trials, seed),
                )
            )
    records.sort(key=lambda rec: (rec.coupling_ratio, rec.gate))
    return records


CSV_HEADER = ("ratio", "r", "gate", "fidelity_closed", "fidelity_sim", "efficiency_closed", "efficiency_sim")


def write_sweep_csv(records, fh) -> None:
    """CSV with 9-significant-digit floats, one row per (ratio, gate)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [
                f"{rec.coupling_ratio:.9g}",
                f"{rec.r_magnitude:.9g}",
                rec.gate,
                f"{rec.fidelity_closed:.9g}",
                f"{rec.fidelity_sim:.9g}",
                f"{rec.efficiency_closed:.9g}",
                f"{rec.efficiency_sim:.9g}",
            ]
        )


@dataclass(frozen=True)
class ConventionResidual:
    """Worst-case |simulated - closed-form| for one gate and mode."""

    gate: str
    convention: str
    normalization: str
    max_fidelity_residual: float
    max_efficiency_residual: float
    fidelity_at_r1: float
    efficiency_at_r1: float


@dataclass(frozen=True)
class ConventionReport:
    """Comparison of simulated metrics against the closed forms.

    ``best`` names the (convention, normalization) pair whose simulated
    fidelity tracks the closed form most closely over the grid.
    """

    r_grid: tuple[float, ...]
    residuals: tuple[ConventionResidual, ...]
    best: tuple[str, str]
    best_max_residual: float

    def render(self) -> str:
        lines = [
            "Fidelity/efficiency convention report",
            f"grid: {len(self.r_grid)} points over |r| in [{self.r_grid[0]:g}, {self.r_grid[-1]:g}]",
            "",
            f"{'gate':<8} {'inputs':<9} {'normalization':<13} {'max |dF|':>12} {'max |dEta|':>12} {'F(r=1)':>10} {'Eta(r=1)':>10}",
        ]
        for res in self.residuals:
            lines.append(
                f"{res.gate:<8} {res.convention:<9} {res.normalization:<13} "
                f"{res.max_fidelity_residual:>12.3e} {res.max_efficiency_residual:>12.3e} "
                f"{res.fidelity_at_r1:>10.8f} {res.efficiency_at_r1:>10.8f}"
            )
        lines += [
            "",
            f"best-matching fidelity mode: inputs={self.best[0]}, normalization={self.best[1]} "
            f"(max residual {self.best_max_residual:.3e})",
            "",
            "The closed forms model each NV reflection as an independent",
            "branch-averaged attenuation (see efficiency_factorized, which",
            "reproduces them exactly); exact state-vector simulation retains",
            "photon-spin correlations between passes, so nonzero residuals at",
            "|r| < 1 are expected and are a property of the model, not a bug.",
        ]
        return "\n".join(lines)


def fidelity_convention_report(
    gates=GATE_NAMES,
    r_grid=None,
    trials: int = 16,
    seed: int | None = 0,
) -> ConventionReport:
    """Compare simulated fidelity/efficiency to the closed forms for every
    input convention x normalization mode over an |r| grid ending at 1."""
    if r_grid is None:
        r_grid = np.linspace(0.0, 1.0, 21)
    r_grid = tuple(float(x) for x in r_grid)
    if not math.isclose(r_grid[-1], 1.0):
        raise ValueError("the grid must end at |r| = 1 for the exactness check")
    residuals = []
    best = None
    for convention in INPUT_CONVENTIONS:
        for normalization in NORMALIZATIONS:
            worst_f_all = 0.0
            for gate in gates:
                worst_f = worst_e = 0.0
                f_at_1 = e_at_1 = math.nan
                for r_mag in r_grid:
                    pair = resonant_pair(r_mag)
                    f_sim = fidelity_simulated(gate, pair, convention, normalization, trials, seed)
                    e_sim = efficiency_simulated(gate, pair, convention, trials, seed)
                    worst_f = max(worst_f, abs(f_sim - fidelity_closed_form(gate, r_mag)))
                    worst_e = max(worst_e, abs(e_sim - efficiency_closed_form(gate, r_mag)))
                    if r_mag == 1.0:
                        f_at_1, e_at_1 = f_sim, e_sim
                residuals.append(
                    ConventionResidual(
                        gate=gate.lower(),
                        convention=convention,
                        normalization=normalization,
                        max_fidelity_residual=worst_f,
                        max_efficiency_residual=worst_e,
                        fidelity_at_r1=f_at_1,
                        efficiency_at_r1=e_at_1,
                    )
                )
                worst_f_all = max(worst_f_all, worst_f)
            if best is None or worst_f_all < best[1]:
                best = ((convention, normalization), worst_f_all)
    return ConventionReport(
        r_grid=r_grid,
        residuals=tuple(residuals),
        best=best[0],
        best_max_residual=best[1],
    )


def exact_endpoint_values() -> dict[str, tuple[Fraction, Fraction]]:
    """Rational-arithmetic closed-form values at |r| = 1 (all exactly 1)."""
    one = Fraction(1)
    return {
        gate: (fidelity_closed_form(gate, one), efficiency_closed_form(gate, one))
        for gate in GATE_NAMES
    }
