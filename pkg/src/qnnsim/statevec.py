"""Dense state-vector simulation of real rotations and multi-controlled NOT.

Only used to cross-check the closed-form neuron amplitude; the training path
never touches it. Qubit 0 is the least-significant bit of a basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 24


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        n = amps.size.bit_length() - 1
        if amps.ndim != 1 or amps.size != 1 << n or n < 1:
            raise ValueError("amplitude vector length must be 2**n with n >= 1")
        if n > MAX_QUBITS:
            raise ValueError(f"dense simulation is capped at {MAX_QUBITS} qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class Rotation:
    theta: float
    target: int


@dataclass(frozen=True)
class MultiControlledX:
    controls: tuple
    target: int


GateOp = Union[Rotation, MultiControlledX]


def _check_index(state: StateVector, q: int) -> None:
    if not (isinstance(q, (int, np.integer)) and 0 <= q < state.n_qubits):
        raise IndexError(f"qubit index {q} outside [0, {state.n_qubits})")


def init_product_state(angles: Sequence[float], plus_target: bool = False) -> StateVector:
    """Tensor product of (cos a, sin a) qubits, optionally followed by a |0> target.

    ``angles[i]`` sets qubit i; the target, when present, is the highest qubit.
    """
    n = len(angles) + (1 if plus_target else 0)
    if n == 0:
        raise ValueError("a state needs at least one qubit")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    amps = np.ones(1, dtype=np.complex128)
    for a in angles:
        # new qubit becomes the more significant one
        amps = np.kron(np.array([math.cos(a), math.sin(a)]), amps)
    if plus_target:
        amps = np.kron(np.array([1.0, 0.0]), amps)
    return StateVector(amps)


def apply_rotation(state: StateVector, theta: float, target: int) -> StateVector:
    _check_index(state, target)
    n = state.n_qubits
    v = state.amplitudes.reshape(1 << (n - target - 1), 2, 1 << target)
    c, s = math.cos(theta), math.sin(theta)
    out = np.empty_like(v)
    out[:, 0, :] = c * v[:, 0, :] - s * v[:, 1, :]
    out[:, 1, :] = s * v[:, 0, :] + c * v[:, 1, :]
    return StateVector(out.reshape(-1))


def apply_multi_controlled_x(state: StateVector, controls: Sequence[int], target: int) -> StateVector:
    """Flip ``target`` on basis states where every control qubit is 1."""
    controls = tuple(controls)
    for q in (*controls, target):
        _check_index(state, q)
    if len(set(controls)) != len(controls) or target in controls:
        raise ValueError("control and target indices must be distinct")
    cmask = 0
    for q in controls:
        cmask |= 1 << q
    tbit = 1 << target
    idx = np.arange(state.amplitudes.size)
    low = idx[((idx & cmask) == cmask) & ((idx & tbit) == 0)]
    out = state.amplitudes.copy()
    out[low], out[low | tbit] = state.amplitudes[low | tbit], state.amplitudes[low]
    return StateVector(out)


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    if isinstance(op, Rotation):
        return apply_rotation(state, op.theta, op.target)
    if isinstance(op, MultiControlledX):
        return apply_multi_controlled_x(state, op.controls, op.target)
    raise TypeError(f"unsupported gate {op!r}")


def run_circuit(state: StateVector, ops: Sequence[GateOp]) -> StateVector:
    for op in ops:
        state = apply_gate(state, op)
    return state


def prob_qubit_one(state: StateVector, qubit: int) -> float:
    _check_index(state, qubit)
    idx = np.arange(state.amplitudes.size)
    mask = (idx >> qubit) & 1 == 1
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def neuron_circuit(n_inputs: int, theta: Sequence[float]) -> list:
    """Rotation on every input qubit, then one NOT onto qubit ``n_inputs`` controlled by all inputs."""
    ops = [Rotation(float(t), k) for k, t in enumerate(theta)]
    ops.append(MultiControlledX(tuple(range(n_inputs)), n_inputs))
    return ops


def neuron_oracle(phi: Sequence[float], theta: Sequence[float]) -> float:
    """|1> probability of the neuron's target qubit, by full simulation."""
    if len(phi) != len(theta) or len(phi) == 0:
        raise ValueError("phi and theta must be non-empty and of equal length")
    if len(phi) + 1 > MAX_QUBITS:
        raise ValueError(f"{len(phi)} inputs exceed the dense limit")
    state = init_product_state(phi, plus_target=True)
    state = run_circuit(state, neuron_circuit(len(phi), theta))
    return prob_qubit_one(state, len(phi))
