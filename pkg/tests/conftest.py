"""Shared test oracles: exact two-mode beamsplitter, trace distance."""

import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm


def two_mode_beamsplitter(psi: np.ndarray, g: complex) -> np.ndarray:
    """Exact beamsplitter action on a two-mode Fock array psi[n_a, n_b].

    The generator conserves total photon number, so the unitary is applied
    block-by-block (no truncation error inside each block).
    """
    dim = psi.shape[0]
    phi = cmath.phase(g) if g != 0 else 0.0
    theta = abs(g)
    out = np.zeros_like(psi, dtype=complex)
    for n_tot in range(2 * dim - 1):
        js = np.arange(max(0, n_tot - (dim - 1)), min(n_tot, dim - 1) + 1)
        if len(js) == 0:
            continue
        nb = len(js)
        gen = np.zeros((nb, nb), dtype=complex)
        for idx, j in enumerate(js):
            if idx + 1 < nb:
                amp = math.sqrt((j + 1) * (n_tot - j))
                gen[idx + 1, idx] += cmath.exp(1j * phi) * amp
                gen[idx, idx + 1] -= cmath.exp(-1j * phi) * amp
        block = expm(theta * gen)
        vec = np.array([psi[j, n_tot - j] for j in js])
        new = block @ vec
        for idx, j in enumerate(js):
            out[j, n_tot - j] = new[idx]
    return out


def partial_trace_mode_a(psi: np.ndarray) -> np.ndarray:
    """rho_b from a pure two-mode array psi[n_a, n_b]."""
    return np.einsum("am,an->mn", psi, psi.conj())


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho1 - rho2)
    return 0.5 * float(np.sum(np.abs(eigs)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
