"""Surface-wave dispersion on a conducting graphene sheet.

Solves the explicit TM/TE dispersion relations for the complex in-plane
wavenumber, selects the supported polarization from the sign of the
conductivity's reactive part, and derives the transverse decay constant,
group velocity, effective wavelength and propagation length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .material import CONSTANTS, Conductivity, GrapheneParams, PhysicalConstants, conductivity

TM = "TM"
TE = "TE"


class UnsupportedModeError(ValueError):
    """Requested polarization lies on the improper sheet (field grows away
    from the graphene) for the given conductivity."""


@dataclass(frozen=True)
class SppMode:
    """One solved surface-plasmon mode.

    k is the complex in-plane wavenumber (1/m), q0 the complex transverse
    decay constant (1/m), v_g the group velocity (m/s, nan when the mode
    is unsupported) and norm_n the quantization normalization length (m),
    filled in by the quantize module.
    """

    polarization: str
    omega: float
    k: complex
    q0: complex
    v_g: float
    supported: bool
    eps_r: float
    norm_n: float | None = None

    def __post_init__(self):
        if self.polarization not in (TM, TE):
            raise ValueError("polarization must be 'TM' or 'TE'")
        if self.k.imag < -1e-12 * abs(self.k):
            raise ValueError("forward-propagating mode needs Im(k) >= 0")
        if self.supported:
            if not self.q0.real > 0.0:
                raise ValueError("supported mode needs Re(q0) > 0")
            c_bg = CONSTANTS.c0 / math.sqrt(self.eps_r)
            if not math.isnan(self.v_g) and not (0.0 < self.v_g <= c_bg * (1.0 + 1e-9)):
                raise ValueError("group velocity outside (0, c0/sqrt(eps_r)]")

    @property
    def k0(self) -> float:
        return self.omega / CONSTANTS.c0

    @property
    def kappa(self) -> complex:
        """Normalized wavenumber k/k0."""
        return self.k / self.k0


def _impedance(eps_r: float, constants: PhysicalConstants = CONSTANTS) -> float:
    return math.sqrt(constants.mu0 / (constants.eps0 * eps_r))


def supported_polarization(sigma: Conductivity) -> str | None:
    """TM for inductive sheets (Im sigma > 0), TE for capacitive, else None."""
    if sigma.value.imag > 0.0:
        return TM
    if sigma.value.imag < 0.0:
        return TE
    return None


def _forward_branch(k: complex) -> complex:
    # k^2 fixes the mode only up to sign; pick the root decaying in +x.
    if k.imag < 0.0 or (k.imag == 0.0 and k.real < 0.0):
        return -k
    return k


def kappa_tm(sigma: complex, eps_r: float,
             constants: PhysicalConstants = CONSTANTS) -> complex:
    """Normalized TM wavenumber sqrt(eps_r*(1 - (2/(sigma*eta))^2))."""
    if sigma == 0:
        raise ValueError("sigma = 0: graphene absent, TM dispersion undefined")
    eta = _impedance(eps_r, constants)
    return _forward_branch(complex(np.sqrt(complex(eps_r * (1.0 - (2.0 / (sigma * eta)) ** 2)))))


def kappa_te(sigma: complex, eps_r: float,
             constants: PhysicalConstants = CONSTANTS) -> complex:
    """Normalized TE wavenumber sqrt(eps_r*(1 - (sigma*eta/2)^2))."""
    if sigma == 0:
        raise ValueError("sigma = 0: graphene absent, TE dispersion undefined")
    eta = _impedance(eps_r, constants)
    return _forward_branch(complex(np.sqrt(complex(eps_r * (1.0 - (sigma * eta / 2.0) ** 2)))))


def tm_wavenumber(params: GrapheneParams, omega: float, *,
                  sigma: Conductivity | None = None,
                  constants: PhysicalConstants = CONSTANTS) -> complex:
    """Complex TM wavenumber k (1/m) at radian frequency omega."""
    sig = sigma if sigma is not None else conductivity(params, omega, constants=constants)
    return (omega / constants.c0) * kappa_tm(sig.value, params.eps_r, constants)


def te_wavenumber(params: GrapheneParams, omega: float, *,
                  sigma: Conductivity | None = None,
                  constants: PhysicalConstants = CONSTANTS) -> complex:
    """Complex TE wavenumber k (1/m) at radian frequency omega."""
    sig = sigma if sigma is not None else conductivity(params, omega, constants=constants)
    return (omega / constants.c0) * kappa_te(sig.value, params.eps_r, constants)


def transverse_q0(polarization: str, sigma: Conductivity, eps_r: float,
                  constants: PhysicalConstants = CONSTANTS) -> complex:
    """Transverse decay constant with the boundary-condition-fixed sign.

    TM: q0 = 2i*omega*eps0*eps_r/sigma;  TE: q0 = i*sigma*mu0*omega/2.
    Re(q0) > 0 means the field decays away from the sheet (proper mode);
    Re(q0) < 0 marks the improper Riemann sheet for that polarization.
    """
    omega = sigma.omega
    if polarization == TM:
        return 2j * omega * constants.eps0 * eps_r / sigma.value
    if polarization == TE:
        return 1j * sigma.value * constants.mu0 * omega / 2.0
    raise ValueError("polarization must be 'TM' or 'TE'")


def group_velocity(params: GrapheneParams, omega: float, polarization: str,
                   rel_step: float = 1e-5,
                   constants: PhysicalConstants = CONSTANTS) -> float:
    """Group velocity 1/(d Re k/d omega) by Richardson-extrapolated central
    differences with relative step rel_step.

    Raises if Re k is not monotonic across the stencil (resonance or log
    singularity nearby) or if the slope is not positive.
    """
    wavenumber = tm_wavenumber if polarization == TM else te_wavenumber
    h = rel_step * omega
    offsets = (-h, -h / 2.0, h / 2.0, h)
    k_re = [wavenumber(params, omega + d, constants=constants).real for d in offsets]
    seq = [k_re[0], k_re[1], wavenumber(params, omega, constants=constants).real, k_re[2], k_re[3]]
    diffs = np.diff(seq)
    if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
        raise ValueError("Re k is not monotonic across the stencil; "
                         "cannot form a group velocity here")
    d_coarse = (k_re[3] - k_re[0]) / (2.0 * h)
    d_fine = (k_re[2] - k_re[1]) / h
    slope = (4.0 * d_fine - d_coarse) / 3.0
    if slope <= 0.0:
        raise ValueError("non-positive dispersion slope")
    return 1.0 / slope


def propagation_length(mode: SppMode) -> float:
    """1/e flux decay length 1/(2*k0*kappa''); +inf for a lossless mode."""
    k2 = mode.k.imag
    if k2 == 0.0:
        return math.inf
    return 1.0 / (2.0 * k2)


def effective_wavelength(mode: SppMode) -> float:
    """On-sheet wavelength 2*pi/Re(k)."""
    return 2.0 * math.pi / mode.k.real


def solve_mode(params: GrapheneParams, omega: float,
               polarization: str | None = None,
               constants: PhysicalConstants = CONSTANTS) -> SppMode:
    """Solve the dispersion relation at omega.

    With polarization=None the supported polarization is selected from
    the sign of Im sigma; passing an explicit polarization returns that
    branch, flagged unsupported when it lies on the improper sheet.
    """
    sig = conductivity(params, omega, constants=constants)
    selected = supported_polarization(sig)
    pol = polarization or selected
    if pol is None:
        raise UnsupportedModeError("Im sigma = 0: neither TM nor TE is supported")
    k = (tm_wavenumber if pol == TM else te_wavenumber)(params, omega, sigma=sig,
                                                        constants=constants)
    q0 = transverse_q0(pol, sig, params.eps_r, constants)
    supported = pol == selected
    # The group velocity is only a transport speed where dispersion is
    # normal; inside absorption windows it can exceed c0/sqrt(eps_r) and is
    # reported as nan there.
    v_g = math.nan
    if supported:
        try:
            cand = group_velocity(params, omega, pol, constants=constants)
        except ValueError:
            cand = math.nan
        if 0.0 < cand <= constants.c0 / math.sqrt(params.eps_r) * (1.0 + 1e-9):
            v_g = cand
    return SppMode(polarization=pol, omega=omega, k=k, q0=q0, v_g=v_g,
                   supported=supported, eps_r=params.eps_r)


def with_normalization(mode: SppMode, norm_n: float) -> SppMode:
    """Return a copy of the mode with the quantization length attached."""
    return replace(mode, norm_n=norm_n)
