"""Density-matrix simulation of one qubit pair with gate and readout noise.

The noise model is deliberately small: a single two-qubit depolarizing
event after the CZ gate (single-qubit gates are treated as ideal, since
the CZ fidelity dominates on the devices this models), followed by
independent asymmetric readout bit flips on each qubit. An optional
crosstalk knob adds extra depolarizing probability when a neighbouring
pair is active in the same batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import NativeCircuit, gate_matrix

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_TOL = -1e-10


def fidelity_to_depolarizing(f: float) -> float:
    """Depolarizing probability p with average gate fidelity f for the
    two-qubit channel rho -> (1-p) rho + p I/4; p = 4(1-f)/3, clamped to [0,1]."""
    if not (0.0 < f <= 1.0):
        raise ValueError(f"fidelity must be in (0, 1], got {f}")
    return min(max(4.0 * (1.0 - f) / 3.0, 0.0), 1.0)


@dataclass(frozen=True)
class PairNoiseSpec:
    """Noise parameters of one qubit pair.

    readout holds per-qubit (eps01, eps10) rates where eps01 = P(read 1 |
    prepared 0) and eps10 = P(read 0 | prepared 1).
    """

    cz_fidelity: float = 1.0
    readout: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))
    crosstalk_p: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.cz_fidelity <= 1.0):
            raise ValueError(f"cz_fidelity must be in (0, 1], got {self.cz_fidelity}")
        if not (0.0 <= self.crosstalk_p <= 1.0):
            raise ValueError(f"crosstalk_p must be in [0, 1], got {self.crosstalk_p}")
        for q, (e01, e10) in enumerate(self.readout):
            for name, e in (("eps01", e01), ("eps10", e10)):
                if not (0.0 <= e < 0.5):
                    raise ValueError(f"qubit {q} {name} must be in [0, 0.5), got {e}")

    @property
    def depol_p(self) -> float:
        return fidelity_to_depolarizing(self.cz_fidelity)

    def confusion_map(self) -> np.ndarray:
        """Exact 4x4 readout confusion matrix (column-stochastic, q0 (x) q1)."""
        cols = []
        for (e01, e10) in self.readout:
            cols.append(np.array([[1.0 - e01, e10], [e01, 1.0 - e10]]))
        return np.kron(cols[0], cols[1])


NOISELESS = PairNoiseSpec()


@dataclass(frozen=True)
class ShotHistogram:
    """Counts over outcomes {00, 01, 10, 11} (index 2*b0 + b1)."""

    counts: tuple[int, int, int, int]
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if sum(self.counts) != self.shots:
            raise ValueError(f"counts sum to {sum(self.counts)}, expected {self.shots}")

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.shots


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise if rho is not Hermitian, unit-trace and positive (within tolerance)."""
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValueError(f"trace is {np.trace(rho).real}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < EIGENVALUE_TOL:
        raise ValueError("density matrix has a negative eigenvalue")


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    """Two-qubit depolarizing channel rho -> (1-p) rho + p I/4."""
    return (1.0 - p) * rho + p * np.eye(4) / 4.0


def run_circuit(circuit: NativeCircuit, noise: PairNoiseSpec = NOISELESS,
                crosstalk_active: bool = False) -> np.ndarray:
    """Simulate the circuit on |00><00| and return the final density matrix.

    Gates are applied as exact conjugations; the depolarizing event fires
    immediately after the CZ with probability depol_p (plus crosstalk_p if
    the caller flags a simultaneously active neighbouring pair). Readout
    error is not applied here; it belongs to the measurement step.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    p_eff = noise.depol_p
    if crosstalk_active:
        p_eff = min(p_eff + noise.crosstalk_p, 1.0)
    for gate in circuit.gates:
        u = gate_matrix(gate)
        rho = u @ rho @ u.conj().T
        if gate.kind == "CZ" and p_eff > 0.0:
            rho = depolarize(rho, p_eff)
    return rho


def exact_distribution(rho: np.ndarray, noise: PairNoiseSpec = NOISELESS) -> np.ndarray:
    """Computational-basis outcome probabilities after readout error.

    The diagonal of rho is pushed through the tensor-product confusion map
    of the two qubits' flip rates. Tiny negative diagonal entries from
    round-off are clipped before normalisation.
    """
    diag = np.real(np.diag(rho))
    diag = np.clip(diag, 0.0, None)
    diag = diag / diag.sum()
    return noise.confusion_map() @ diag


def sample_shots(rho: np.ndarray, noise: PairNoiseSpec, shots: int,
                 stream: np.random.Generator) -> ShotHistogram:
    """Multinomial sample of the exact outcome distribution."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = exact_distribution(rho, noise)
    counts = stream.multinomial(shots, probs)
    return ShotHistogram(counts=tuple(int(c) for c in counts), shots=shots)
