"""Photon-to-SPP beamsplitter transfer applied to quantum states.

The coupler is the 2x2 unitary [[gamma, beta], [-beta*, gamma*]] acting on
the (photon, SPP) annihilation operators, parameterized by the coupling
angle g with |beta| = sin|g|, arg(beta) = arg(g), gamma = cos|g|.  Tracing
out the photon after exciting a superposition of coherent states leaves a
mixture of coherent projectors, which is the primary (dimension-free)
representation here; rendering into a truncated Fock space is the
cross-check path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .qstate import DensityMatrix, StateVector, _coherent_column, coherent_overlap


@dataclass(frozen=True)
class CouplerSpec:
    """Coupler amplitudes derived from a (possibly complex) angle g."""

    g: complex

    @property
    def gamma_amp(self) -> float:
        """Photon-retention amplitude cos|g|."""
        return math.cos(abs(self.g))

    @property
    def beta_amp(self) -> complex:
        """Transmission amplitude e^{i arg g} sin|g|."""
        mag = abs(self.g)
        if mag == 0.0:
            return 0.0 + 0.0j
        return cmath.exp(1j * cmath.phase(self.g)) * math.sin(mag)

    def matrix(self) -> np.ndarray:
        """Heisenberg transformation [[gamma, beta], [-beta*, gamma*]]."""
        gam = self.gamma_amp
        bet = self.beta_amp
        return np.array([[gam, bet], [-np.conj(bet), np.conj(gam)]], dtype=complex)


def heisenberg_transform(g: complex) -> np.ndarray:
    """The coupler's 2x2 unitary on (a, b) annihilation operators."""
    return CouplerSpec(g).matrix()


@dataclass(frozen=True)
class CoherentMixture:
    """rho = sum_j w_j |ket_j><bra_j| over coherent states.

    terms is a tuple of (weight, ket amplitude, bra amplitude) triples;
    Hermiticity means every (w, a, b) is paired with (conj(w), b, a).
    """

    terms: tuple[tuple[complex, complex, complex], ...]

    def trace(self) -> float:
        tr = sum(w * coherent_overlap(b, a) for w, a, b in self.terms)
        return float(tr.real)

    def mean_photon(self) -> float:
        """<n> via Tr(n |a><b|) = conj(b) a <b|a>."""
        val = sum(w * np.conj(b) * a * coherent_overlap(b, a) for w, a, b in self.terms)
        return float(val.real)

    def purity(self) -> float:
        val = 0.0 + 0.0j
        for w1, a1, b1 in self.terms:
            for w2, a2, b2 in self.terms:
                val += w1 * w2 * coherent_overlap(b1, a2) * coherent_overlap(b2, a1)
        return float(val.real)

    def fidelity_pure(self, coeffs, amps) -> float:
        """<psi|rho|psi> for |psi> = sum_m c_m |alpha_m> (normalized input)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        amps = np.asarray(amps, dtype=complex)
        f = 0.0 + 0.0j
        for w, a, b in self.terms:
            bra = sum(np.conj(c) * coherent_overlap(m, a) for c, m in zip(coeffs, amps))
            ket = sum(c * coherent_overlap(b, m) for c, m in zip(coeffs, amps))
            f += w * bra * ket
        return float(f.real)

    def to_density_matrix(self, dim: int) -> DensityMatrix:
        """Render into a truncated Fock space (raw coherent columns; the
        tail outside the truncation is assumed negligible)."""
        rho = np.zeros((dim, dim), dtype=complex)
        cols: dict[complex, np.ndarray] = {}
        for w, a, b in self.terms:
            if a not in cols:
                cols[a] = _coherent_column(a, dim)
            if b not in cols:
                cols[b] = _coherent_column(b, dim)
            rho += w * np.outer(cols[a], cols[b].conj())
        return DensityMatrix(rho)

    def validate(self, tol: float = 1e-9) -> None:
        if abs(self.trace() - 1.0) > tol:
            raise ValueError(f"mixture trace {self.trace()} differs from 1")
        # Hermitian pairing: rho - rho^dagger == 0 term-by-term
        paired = {}
        for w, a, b in self.terms:
            key = (complex(a), complex(b))
            paired[key] = paired.get(key, 0.0 + 0.0j) + w
        for (a, b), w in paired.items():
            w_conj = paired.get((b, a))
            if w_conj is None or abs(np.conj(w_conj) - w) > tol * max(1.0, abs(w)):
                raise ValueError("mixture is not Hermitian")


def normalize_superposition(coeffs, amps) -> np.ndarray:
    """Rescale coefficients so sum_mn c_m* c_n <a_m|a_n> equals 1 exactly."""
    coeffs = np.asarray(coeffs, dtype=complex)
    amps = np.asarray(amps, dtype=complex)
    gram = np.array([[coherent_overlap(am, an) for an in amps] for am in amps])
    norm_sq = float(np.real(coeffs.conj() @ gram @ coeffs))
    if norm_sq <= 0.0:
        raise ValueError("degenerate coherent superposition")
    return coeffs / math.sqrt(norm_sq)


def superposition_vector(coeffs, amps, dim: int) -> StateVector:
    """Fock rendering of a normalized coherent superposition."""
    coeffs = normalize_superposition(coeffs, amps)
    vec = np.zeros(dim, dtype=complex)
    for c, a in zip(coeffs, np.asarray(amps, dtype=complex)):
        vec += c * _coherent_column(a, dim)
    return StateVector(vec).normalized()


def excite_superposition(coeffs, amps, g: complex) -> CoherentMixture:
    """Send sum_j c_j |a_j>_photon |0>_spp through the coupler and trace
    out the photon: each component maps to -conj(beta)*a_j on the SPP with
    cross weights <gamma a_k|gamma a_j>."""
    spec = CouplerSpec(g)
    gam = spec.gamma_amp
    bfac = -np.conj(spec.beta_amp)
    coeffs = normalize_superposition(coeffs, amps)
    amps = np.asarray(amps, dtype=complex)
    terms = []
    for cj, aj in zip(coeffs, amps):
        for ck, ak in zip(coeffs, amps):
            w = cj * np.conj(ck) * coherent_overlap(gam * ak, gam * aj)
            terms.append((complex(w), complex(bfac * aj), complex(bfac * ak)))
    return CoherentMixture(tuple(terms))


def excite_cat(alpha: complex, g: complex) -> CoherentMixture:
    """Even-cat input N(|a> + |-a>): diagonal projectors on +-a*sin g with
    cross terms weighted by c_out = exp(-2|a cos g|^2)."""
    return excite_superposition([1.0, 1.0], [alpha, -alpha], g)


def excite_code(c0: complex, c1: complex, alpha: complex, g: complex) -> CoherentMixture:
    """Four-component code word c0*|0L> + c1*|1L> through the coupler.

    The logical coefficients must satisfy |c0|^2 + |c1|^2 = 1; the
    physical coherent superposition is then normalized exactly (the code
    words are only approximately orthogonal at finite alpha).
    """
    if abs(abs(c0) ** 2 + abs(c1) ** 2 - 1.0) > 1e-8:
        raise ValueError("logical coefficients must satisfy |c0|^2 + |c1|^2 = 1")
    coeffs = [c0, c0, c1, c1]
    amps = [alpha, -alpha, 1j * alpha, -1j * alpha]
    return excite_superposition(coeffs, amps, g)
