"""Lossy propagation of SPP states along the graphene sheet.

Propagation over distance x is a pure-loss bosonic channel with energy
transmissivity eta = exp(-2*k0*kappa''*x).  On a coherent dyad it acts in
closed form,

    |a><b|  ->  exp[(1-eta)(conj(b) a - |a|^2/2 - |b|^2/2)] |sqrt(eta) a><sqrt(eta) b|,

which reproduces the decohered-cat mixture exactly and preserves the trace
term by term.  A truncated-Fock Kraus realization of the same channel is
provided as the independent cross-check path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import CoherentMixture, CouplerSpec, excite_cat, normalize_superposition
from .qstate import DensityMatrix

INITIAL = "initial"
AMPLITUDE_MATCHED = "matched"


@dataclass(frozen=True)
class ChannelSpec:
    """Attenuation factor k0*kappa'' (1/m), distance x (m) and optionally
    the group velocity for distance-to-time conversion."""

    k0_kappa2: float
    x: float
    v_g: float | None = None

    def __post_init__(self):
        if self.k0_kappa2 < 0.0:
            raise ValueError("attenuation factor must be >= 0")
        if self.x < 0.0:
            raise ValueError("distance must be >= 0")
        if self.v_g is not None and self.v_g <= 0.0:
            raise ValueError("group velocity must be > 0")

    @property
    def transmissivity(self) -> float:
        return math.exp(-2.0 * self.k0_kappa2 * self.x)


def flux_damping(spec: ChannelSpec) -> float:
    """Classical flux attenuation exp(-2*k0*kappa''*x)."""
    return spec.transmissivity


def propagate_mixture(rho: CoherentMixture, eta: float) -> CoherentMixture:
    """Pure-loss channel with energy transmissivity eta on a coherent mixture."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    root = math.sqrt(eta)
    terms = []
    for w, a, b in rho.terms:
        factor = np.exp((1.0 - eta) * (np.conj(b) * a - 0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2))
        terms.append((complex(w * factor), complex(root * a), complex(root * b)))
    return CoherentMixture(tuple(terms))


def propagate_cat(rho: CoherentMixture, spec: ChannelSpec) -> CoherentMixture:
    """Propagate a coherent mixture a distance x: amplitudes shrink by
    exp(-k0*kappa''*x) and cross weights decohere accordingly."""
    return propagate_mixture(rho, spec.transmissivity)


def damp_fock(rho: DensityMatrix, eta: float) -> DensityMatrix:
    """Kraus-sum pure-loss channel on a truncated Fock density matrix,
    K_l[n-l, n] = sqrt(C(n, l)) (1-eta)^{l/2} eta^{(n-l)/2}."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    dim = rho.dim
    if eta == 1.0:
        return DensityMatrix(rho.matrix.copy())
    out = np.zeros_like(rho.matrix)
    if eta == 0.0:
        out[0, 0] = np.trace(rho.matrix)
        return DensityMatrix(out)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, dim)))))
    for lost in range(dim):
        rows = np.arange(lost, dim)
        log_binom = log_fact[rows] - log_fact[lost] - log_fact[rows - lost]
        diag = np.exp(0.5 * (log_binom + lost * math.log1p(-eta)
                             + (rows - lost) * math.log(eta)))
        kraus = np.zeros((dim, dim), dtype=complex)
        kraus[rows - lost, rows] = diag
        out += kraus @ rho.matrix @ kraus.conj().T
    return DensityMatrix(out)


def _cat_reference(alpha: float | complex):
    """Normalized even-cat coefficient/amplitude lists at amplitude alpha."""
    amps = np.array([alpha, -alpha], dtype=complex)
    coeffs = normalize_superposition([1.0, 1.0], amps)
    return coeffs, amps


def fidelity_vs_distance(alpha: complex, g: complex, x_values, k0_kappa2: float,
                         reference: str = INITIAL) -> np.ndarray:
    """Fidelity of the propagated excited-cat state against a pure cat.

    reference='initial' compares against the original photon cat at
    amplitude alpha; reference='matched' against the amplitude-matched cat
    alpha' = alpha*sin g*exp(-k0*kappa''*x), via analytic overlaps only.
    """
    if reference not in (INITIAL, AMPLITUDE_MATCHED):
        raise ValueError("reference must be 'initial' or 'matched'")
    x_values = np.asarray(x_values, dtype=float)
    rho0 = excite_cat(alpha, g)
    beta_mag = abs(CouplerSpec(g).beta_amp)
    out = np.empty(x_values.shape, dtype=float)
    ref0 = _cat_reference(alpha)
    for i, x in enumerate(x_values.ravel()):
        spec = ChannelSpec(k0_kappa2=k0_kappa2, x=float(x))
        rho_x = propagate_cat(rho0, spec)
        if reference == INITIAL:
            coeffs, amps = ref0
        else:
            a_matched = alpha * beta_mag * math.exp(-k0_kappa2 * float(x))
            coeffs, amps = _cat_reference(a_matched)
        out.ravel()[i] = rho_x.fidelity_pure(coeffs, amps)
    return out


def matched_turning_point(beta_mag: float) -> float:
    """Location k0*kappa''*x = ln(sqrt(2)*beta) of the matched-reference
    fidelity minimum (exact for the even-cat channel)."""
    if not 1.0 / math.sqrt(2.0) < beta_mag <= 1.0:
        raise ValueError("turning point exists for beta in (1/sqrt(2), 1]")
    return math.log(math.sqrt(2.0) * beta_mag)
