import numpy as np
import pytest


def random_amplitudes(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def basis_vector(index: int, n_qubits: int) -> np.ndarray:
    v = np.zeros(2**n_qubits, dtype=complex)
    v[index] = 1
    return v


def overlap(a: dict, b: dict) -> complex:
    """<a|b> for two canonical() dictionaries (registry independent)."""
    return sum(np.conj(amp) * b.get(key, 0) for key, amp in a.items())


def same_up_to_phase(a: dict, b: dict, tol: float = 1e-10) -> bool:
    na = np.sqrt(sum(abs(x) ** 2 for x in a.values()))
    nb = np.sqrt(sum(abs(x) ** 2 for x in b.values()))
    return abs(abs(overlap(a, b)) - na * nb) < tol


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
