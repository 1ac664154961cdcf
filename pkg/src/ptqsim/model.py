"""Two-qubit gain/loss model: parameters, Pauli operators, Hamiltonian.

Fixed conventions used repo-wide: computational basis ordered
|00>, |01>, |10>, |11> with sigma_z|1> = +|1>, sigma_z|0> = -|0>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("00", "01", "10", "11")

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)

# Parity operator (flips both qubits); time reversal is entrywise conjugation.
PARITY = np.kron(SIGMA_X, SIGMA_X)
SIGMA_X1 = np.kron(SIGMA_X, IDENTITY_2)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)
# Permutation exchanging the two qubit labels (basis index 1 <-> 2).
EXCHANGE = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class SystemParams:
    """Model rates: coherent coupling omega, Ising coupling j, gain/loss gamma.

    gamma is the unit scale; all bundled presets quote omega and j in units
    of gamma = 1.  gamma = 0 labels the Hermitian limit.
    """

    omega: float
    j: float
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("omega", "j", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    def in_preset_domain(self) -> bool:
        """True inside the domain all bundled presets use (omega, j >= 0, gamma > 0)."""
        return self.omega >= 0 and self.j >= 0 and self.gamma > 0

    def replace(self, **kw) -> "SystemParams":
        data = {"omega": self.omega, "j": self.j, "gamma": self.gamma}
        data.update(kw)
        return SystemParams(**data)


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Assemble H = (omega*sx - i*gamma*sz)/2 per qubit + j*sz(x)sz, 4x4 complex."""
    om, j, g = params.omega, params.j, params.gamma
    single = 0.5 * (om * SIGMA_X - 1j * g * SIGMA_Z)
    h = np.kron(single, IDENTITY_2) + np.kron(IDENTITY_2, single)
    h += j * np.kron(SIGMA_Z, SIGMA_Z)
    return h


def pt_residual_of_matrix(h: np.ndarray) -> float:
    """Max-entry magnitude of P*conj(H)*P - H for an arbitrary 4x4 matrix."""
    h = np.asarray(h, dtype=complex)
    return float(np.max(np.abs(PARITY @ h.conj() @ PARITY - h)))


def pt_symmetry_residual(params: SystemParams) -> float:
    """Defect of the combined parity/conjugation symmetry; zero for the model."""
    return pt_residual_of_matrix(build_hamiltonian(params))


def exchange_residual(params: SystemParams) -> float:
    """Defect of qubit-exchange symmetry; zero for identical qubits."""
    h = build_hamiltonian(params)
    return float(np.max(np.abs(EXCHANGE @ h @ EXCHANGE - h)))


def as_state(vec) -> np.ndarray:
    """Coerce to a complex 4-vector without copying when possible."""
    v = np.asarray(vec, dtype=complex)
    if v.shape != (4,):
        raise ValueError(f"expected a 4-component state vector, got shape {v.shape}")
    return v
