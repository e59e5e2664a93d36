"""Native-gate circuits for the two measurement settings.

The compiled circuit uses the RX/RZ/CZ gate set with the half-angle
convention RX(a) = exp(-i a X / 2), RZ(a) = exp(-i a Z / 2),
CZ = diag(1, 1, 1, -1). Under that convention the evolution angles
(phi, theta) of the variational state enter the gate arguments doubled:
RZ(-pi + 2 phi) prepares the onsite-evolved state and RZ(pi +- 2 theta)
realises the hopping evolution inside the measurement-basis change.

Measured bits map to eigenvalues through a fixed sign map, determined
once against the exact model and locked by regression tests:

  * onsite setting: <Z(x)Z> = ONSITE_ZZ_SIGN * <(1-2b0)(1-2b1)>
  * hopping setting: <X(x)I> = HOPPING_SIGNS[0] * <1-2b0> and
    <I(x)X> = HOPPING_SIGNS[1] * <1-2b1>

Bit order everywhere: outcome index i = 2*b0 + b1 (qubit 0 is the top
wire and the most significant bit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hubbard import AnsatzParams

# frozen bit-to-eigenvalue sign map (see module docstring)
ONSITE_ZZ_SIGN = -1
HOPPING_SIGNS = (1, 1)

# eigenvalue tables over outcome index 2*b0 + b1
ZZ_OUTCOMES = np.array([1.0, -1.0, -1.0, 1.0])
Z0_OUTCOMES = np.array([1.0, 1.0, -1.0, -1.0])
Z1_OUTCOMES = np.array([1.0, -1.0, 1.0, -1.0])

_HALF_PI = math.pi / 2


class MeasurementSetting(Enum):
    ONSITE = "onsite"
    HOPPING = "hopping"


@dataclass(frozen=True)
class NativeGate:
    kind: str                  # 'RX', 'RZ' or 'CZ'
    angle: float | None        # radians; None for CZ
    targets: tuple[int, ...]   # qubit indices in {0, 1}

    def __post_init__(self):
        if self.kind not in ("RX", "RZ", "CZ"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CZ":
            if self.angle is not None:
                raise ValueError("CZ takes no angle")
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError("CZ needs two distinct targets")
        else:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
            if len(self.targets) != 1:
                raise ValueError(f"{self.kind} acts on one qubit")
            if self.kind == "RX":
                # hardware-native constraint: RX only at multiples of pi/2
                ratio = self.angle / _HALF_PI
                if abs(ratio - round(ratio)) > 1e-9:
                    raise ValueError(f"RX angle {self.angle} is not a multiple of pi/2")
        if any(q not in (0, 1) for q in self.targets):
            raise ValueError(f"targets must be qubits 0/1, got {self.targets}")


@dataclass(frozen=True)
class NativeCircuit:
    gates: tuple[NativeGate, ...]
    setting: MeasurementSetting

    def __post_init__(self):
        n_cz = sum(1 for g in self.gates if g.kind == "CZ")
        if n_cz != 1:
            raise ValueError(f"circuit must contain exactly one CZ, found {n_cz}")
        if len(self.gates) > 10:
            raise ValueError(f"circuit has {len(self.gates)} gates, expected <= 10")


def _rx(q: int, angle: float) -> NativeGate:
    return NativeGate("RX", angle, (q,))


def _rz(q: int, angle: float) -> NativeGate:
    return NativeGate("RZ", angle, (q,))


def build_circuit(a: AnsatzParams, setting: MeasurementSetting) -> NativeCircuit:
    """Compiled circuit preparing |psi(phi, theta)> for one measurement setting.

    Common prefix (state preparation, onsite evolution, the single CZ and
    the post-CZ RX on qubit 0), then the setting-specific tail: the
    hopping setting appends RX(pi) on qubit 1; the onsite setting appends
    the RZ(pi +- 2 theta) / RX(-+ pi/2) columns on both qubits.
    """
    prefix = [
        _rx(0, -_HALF_PI),
        _rx(1, -_HALF_PI),
        _rz(1, -math.pi + 2.0 * a.phi),
        _rx(1, _HALF_PI),
        NativeGate("CZ", None, (0, 1)),
        _rx(0, -_HALF_PI),
    ]
    if setting is MeasurementSetting.HOPPING:
        tail = [_rx(1, math.pi)]
    else:
        tail = [
            _rz(0, math.pi + 2.0 * a.theta),
            _rx(0, -_HALF_PI),
            _rz(1, math.pi - 2.0 * a.theta),
            _rx(1, _HALF_PI),
        ]
    return NativeCircuit(gates=tuple(prefix + tail), setting=setting)


def gate_matrix(gate: NativeGate) -> np.ndarray:
    """The 4x4 unitary of one gate in the q0 (x) q1 ordering."""
    if gate.kind == "CZ":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    half = gate.angle / 2.0
    if gate.kind == "RX":
        g = np.array([[math.cos(half), -1j * math.sin(half)],
                      [-1j * math.sin(half), math.cos(half)]])
    else:
        g = np.array([[np.exp(-1j * half), 0.0], [0.0, np.exp(1j * half)]])
    if gate.targets[0] == 0:
        return np.kron(g, np.eye(2))
    return np.kron(np.eye(2), g)


def circuit_unitary(circuit: NativeCircuit) -> np.ndarray:
    """Product of the gate unitaries, first gate applied first."""
    u = np.eye(4, dtype=complex)
    for gate in circuit.gates:
        u = gate_matrix(gate) @ u
    return u


def zz_expectation(probs: np.ndarray) -> float:
    """<Z(x)Z> from an onsite-setting outcome distribution."""
    return ONSITE_ZZ_SIGN * float(np.dot(probs, ZZ_OUTCOMES))


def x_expectations(probs: np.ndarray) -> tuple[float, float]:
    """(<X(x)I>, <I(x)X>) from a hopping-setting outcome distribution."""
    return (
        HOPPING_SIGNS[0] * float(np.dot(probs, Z0_OUTCOMES)),
        HOPPING_SIGNS[1] * float(np.dot(probs, Z1_OUTCOMES)),
    )


def format_circuit(circuit: NativeCircuit) -> str:
    """Debug dump, one gate per line: KIND angle targets."""
    lines = [f"# setting: {circuit.setting.value}"]
    for g in circuit.gates:
        if g.kind == "CZ":
            lines.append(f"CZ {g.targets[0]} {g.targets[1]}")
        else:
            lines.append(f"{g.kind} {g.angle!r} {g.targets[0]}")
    return "\n".join(lines) + "\n"
