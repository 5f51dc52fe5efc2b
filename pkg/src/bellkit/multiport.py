"""Interferometric measurement model: phase shifters feeding a Fourier multiport.

Each party holds a symmetric d-port whose unitary is the discrete Fourier
transform; a measurement setting is a list of input-port phases, and the
outcome is the index of the output port that fires.  Born probabilities are
the authoritative path; the shift-product form of the correlations is an
algebraically equal fast path used by the optimizer and cross-checked against
the Born path in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .core import (
    CorrelationTensor,
    ProbabilityTable,
    Scenario,
    as_mask,
    correlation_from_probabilities,
    settings_tuples,
    unit_roots,
)

__all__ = [
    "MultiportUnitary",
    "QuantumSetup",
    "fourier_multiport",
    "born_probabilities",
    "probability_table",
    "quantum_correlation_tensor",
    "born_correlation_tensor",
]


@dataclass(frozen=True)
class MultiportUnitary:
    """The d x d optical Fourier transform M_uj = d^(-1/2) alpha^(u*j)."""

    dimension: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.dimension, self.dimension):
            raise ValueError(f"expected {self.dimension}x{self.dimension} matrix")
        if not np.allclose(mat @ mat.conj().T, np.eye(self.dimension), atol=1e-12):
            raise ValueError("multiport matrix must be unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def fourier_multiport(d: int) -> MultiportUnitary:
    if d < 2:
        raise ValueError("need d >= 2")
    grid = np.outer(np.arange(d), np.arange(d)) % d
    return MultiportUnitary(d, unit_roots(d)[grid] / np.sqrt(d))


@dataclass(frozen=True)
class QuantumSetup:
    """Input-state amplitudes plus per-party, per-setting input port phases.

    amplitudes has shape (d,)*N and unit norm; phases has shape (N, k, d) in
    radians with port 0 fixed to zero (the global phase of each setting is
    unobservable).
    """

    scenario: Scenario
    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        n, k, d = self.scenario.parties, self.scenario.settings, self.scenario.outcomes
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (d,) * n:
            raise ValueError(f"expected amplitude shape {(d,) * n}, got {amps.shape}")
        norm = np.linalg.norm(amps.ravel())
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} is not 1; use QuantumSetup.normalized")
        phases = np.asarray(self.phases, dtype=float)
        if phases.shape != (n, k, d):
            raise ValueError(f"expected phase shape {(n, k, d)}, got {phases.shape}")
        if np.abs(phases[:, :, 0]).max() > 0:
            raise ValueError("port-0 phases must be zero; use QuantumSetup.normalized")
        amps.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def normalized(cls, scenario: Scenario, amplitudes, phases) -> "QuantumSetup":
        """Build a setup from raw data: normalize the state, gauge-fix port 0."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps.ravel())
        if norm == 0:
            raise ValueError("cannot normalize the zero state")
        phases = np.asarray(phases, dtype=float)
        phases = phases - phases[:, :, :1]
        return cls(scenario, amps / norm, phases)


def _final_amplitudes(setup: QuantumSetup, x: tuple[int, ...]) -> np.ndarray:
    """State after the phase shifters and multiports for joint settings x."""
    scenario = setup.scenario
    d = scenario.outcomes
    fourier = fourier_multiport(d).matrix
    psi = setup.amplitudes
    for p, xp in enumerate(x):
        transfer = fourier * np.exp(1j * setup.phases[p, xp])[None, :]
        psi = np.moveaxis(np.tensordot(transfer, psi, axes=([1], [p])), 0, p)
    return psi


def born_probabilities(setup: QuantumSetup, x: tuple[int, ...]) -> np.ndarray:
    """p(a|x) = |<a|Psi'>|^2, shape (d,)*N; sums to 1."""
    if len(x) != setup.scenario.parties:
        raise ValueError("settings tuple length does not match the party count")
    psi = _final_amplitudes(setup, tuple(int(v) for v in x))
    return np.abs(psi) ** 2


def probability_table(setup: QuantumSetup) -> ProbabilityTable:
    """Born probabilities for every joint setting, as a ProbabilityTable."""
    scenario = setup.scenario
    n, k, d = scenario.parties, scenario.settings, scenario.outcomes
    values = np.empty((d,) * n + (k,) * n)
    for x in settings_tuples(scenario):
        values[(slice(None),) * n + x] = born_probabilities(setup, x)
    return ProbabilityTable(scenario, values)


def quantum_correlation_tensor(setup: QuantumSetup, mask) -> CorrelationTensor:
    """E_x(r) via the shift-product form: the Fourier sums collapse the double
    Born sum onto amplitude pairs displaced by the mask."""
    scenario = setup.scenario
    mask = as_mask(scenario, mask)
    d = scenario.outcomes
    shifted = setup.amplitudes
    for p, r in enumerate(mask.entries):
        shifted = np.roll(shifted, -r, axis=p)  # entry j -> s_(j + r)
    values = np.empty(scenario.settings_shape(), dtype=complex)
    for x in settings_tuples(scenario):
        factors = []
        for p, r in enumerate(mask.entries):
            e = np.exp(1j * setup.phases[p, x[p]])
            factors.append(e * np.roll(e, -r).conj())
        weight = reduce(np.multiply.outer, factors)
        values[x] = np.sum(weight * setup.amplitudes * shifted.conj())
    # round-off can push |E| a hair above 1; clip the modulus, not the phase
    mags = np.abs(values)
    over = mags > 1.0
    if np.any(over):
        if mags.max() > 1 + 1e-10:
            raise ValueError(f"correlation modulus {mags.max()} exceeds 1 beyond round-off")
        values = np.where(over, values / mags, values)
    return CorrelationTensor(scenario, mask, values)


def born_correlation_tensor(setup: QuantumSetup, mask) -> CorrelationTensor:
    """Correlations through the Born path; the oracle for the shift-product form."""
    return correlation_from_probabilities(probability_table(setup), mask)
