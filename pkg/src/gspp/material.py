"""Graphene sheet conductivity.

Two evaluation paths are provided: the full finite-temperature form
(intraband Drude term plus an interband integral over the Fermi-Dirac
occupation difference) and the closed-form low-temperature limit (Drude
term plus step and logarithm).  All internal arithmetic is in SI; the
chemical potential is accepted in eV at the API boundary and converted
once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as _const
from scipy.integrate import quad
from scipy.special import expit


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not converge within its subdivision budget."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (attained error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class LogSingularityError(ValueError):
    """Low-temperature conductivity requested exactly at the interband
    logarithm singularity (photon energy equal to twice the chemical
    potential).  Offset the frequency slightly; the dispersion results
    are meaningless at the singular point."""


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used throughout (CODATA values from scipy; eps0 is
    derived from mu0 and c0 so that c0^2*eps0*mu0 = 1 holds exactly)."""

    e: float = _const.e
    hbar: float = _const.hbar
    kB: float = _const.k
    eps0: float = 1.0 / (_const.mu_0 * _const.c**2)
    mu0: float = _const.mu_0
    c0: float = _const.c

    def __post_init__(self):
        for name in ("e", "hbar", "kB", "eps0", "mu0", "c0"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name} must be positive")
        if abs(self.c0**2 * self.eps0 * self.mu0 - 1.0) > 1e-12:
            raise ValueError("constants violate c0^2 = 1/(eps0*mu0)")

    @property
    def eta0(self) -> float:
        """Vacuum wave impedance sqrt(mu0/eps0), ohms."""
        return math.sqrt(self.mu0 / self.eps0)


CONSTANTS = PhysicalConstants()

# Intraband scattering times reported for graphene: ~0.35 ps at room
# temperature, 3-5 ps at cryogenic temperature; interband 0.0658 ps.
TAU_INTRA_300K = 0.35e-12
TAU_INTRA_LOWT = 5.0e-12
TAU_INTER_DEFAULT = 0.0658e-12


@dataclass(frozen=True)
class GrapheneParams:
    """Material state of the graphene sheet.

    mu_c is the chemical potential in eV; gamma_intra / gamma_inter are
    the intraband and interband scattering rates in rad/s; eps_r is the
    relative permittivity of the (symmetric) background; n_layers scales
    the sheet conductivity for N closely spaced monolayers.
    """

    mu_c: float
    temperature: float
    gamma_intra: float
    gamma_inter: float
    eps_r: float = 1.0
    n_layers: int = 1
    # 'auto' dispatches on kB*T vs min(|mu_c|, hbar*omega); 'full' or 'low'
    # pin the evaluation path.  Near the interband edge the gamma-less
    # low-T closed form is log-singular, so edge studies at cryogenic
    # temperature should pin 'full'.
    conductivity_model: str = "auto"

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0 K")
        if self.gamma_intra <= 0.0:
            raise ValueError("gamma_intra must be > 0")
        if self.gamma_inter <= 0.0:
            raise ValueError("gamma_inter must be > 0")
        if self.eps_r < 1.0:
            raise ValueError("eps_r must be >= 1")
        if self.n_layers < 1 or int(self.n_layers) != self.n_layers:
            raise ValueError("n_layers must be a positive integer")
        if self.conductivity_model not in ("auto", "full", "low"):
            raise ValueError("conductivity_model must be 'auto', 'full' or 'low'")

    @classmethod
    def with_default_rates(cls, mu_c: float, temperature: float,
                           eps_r: float = 1.0, n_layers: int = 1) -> "GrapheneParams":
        """Build params with the standard scattering times: intraband
        tau = 0.35 ps for temperatures >= 150 K, 5 ps below; interband
        1/gamma = 0.0658 ps."""
        tau = TAU_INTRA_300K if temperature >= 150.0 else TAU_INTRA_LOWT
        return cls(mu_c=mu_c, temperature=temperature,
                   gamma_intra=1.0 / tau, gamma_inter=1.0 / TAU_INTER_DEFAULT,
                   eps_r=eps_r, n_layers=n_layers)


@dataclass(frozen=True)
class Conductivity:
    """Complex sheet conductivity (S) evaluated at radian frequency omega."""

    value: complex
    omega: float

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def sigma_min(constants: PhysicalConstants = CONSTANTS) -> float:
    """Universal sheet conductivity pi*e^2/(2h) = e^2/(4*hbar), siemens."""
    return constants.e**2 / (4.0 * constants.hbar)


def _intraband_full(params: GrapheneParams, omega: float,
                    constants: PhysicalConstants = CONSTANTS) -> complex:
    """Drude-like intraband term of the finite-temperature conductivity."""
    k = constants
    kT = k.kB * params.temperature
    mu = abs(params.mu_c) * k.e
    x = mu / kT
    bracket = x + 2.0 * math.log1p(math.exp(-x))
    return 1j * k.e**2 * kT * bracket / (math.pi * k.hbar**2 * (omega + 1j * params.gamma_intra))


def _interband_full(params: GrapheneParams, omega: float,
                    constants: PhysicalConstants = CONSTANTS) -> complex:
    """Interband term of the finite-temperature conductivity.

    The energy integral is rescaled with eps = hbar*omega*u/2 so the
    (gamma-shifted) resonance sits at u ~ 1.  The quadrature runs on
    [0, u_cut] where the Fermi occupation difference still deviates from
    1; beyond u_cut the occupation difference is 1 to machine precision
    and the remainder is added in closed form, so the truncation error is
    far below 1e-10 of the accumulated value.
    """
    k = constants
    kT = k.kB * params.temperature
    mu = abs(params.mu_c) * k.e
    a = omega + 1j * params.gamma_inter
    abar = a / omega
    s = k.hbar * omega / (2.0 * kT)      # u -> energy/kT scale
    xmu = mu / kT

    def occupation_diff(u):
        return expit(xmu + s * u) - expit(xmu - s * u)

    u_step = 2.0 * mu / (k.hbar * omega)          # interband onset
    step_width = 2.0 * kT / (k.hbar * omega)
    u_cut = max(4.0, 3.0 * abs(abar), u_step + 60.0 * step_width + 2.0)

    pole = abar.real if abar.real > 0 else abs(abar)
    pole_width = max(abar.imag, 1e-3)
    raw_points = [pole - 3 * pole_width, pole, pole + 3 * pole_width,
                  u_step - 30 * step_width, u_step, u_step + 30 * step_width]
    points = sorted({p for p in raw_points if 0.0 < p < u_cut})

    def integrand(u, part):
        val = occupation_diff(u) / (abar * abar - u * u)
        return val.real if part == 0 else val.imag

    pieces = []
    for part in (0, 1):
        out = quad(integrand, 0.0, u_cut, args=(part,), points=points,
                   epsabs=1e-9, epsrel=1e-9, limit=400, full_output=1)
        if len(out) > 3:
            raise QuadratureError("interband conductivity integral did not converge", out[1])
        pieces.append(out[0])
    integral = pieces[0] + 1j * pieces[1]

    # Closed-form remainder for u > u_cut with occupation difference == 1.
    ratio = (abar + u_cut) / (abar - u_cut)
    tail = (-1j * math.pi - np.log(ratio)) / (2.0 * abar)

    return 1j * k.e**2 * a * (integral + tail) / (2.0 * math.pi * k.hbar * omega)


def conductivity_full(params: GrapheneParams, omega: float,
                      constants: PhysicalConstants = CONSTANTS) -> Conductivity:
    """Finite-temperature sheet conductivity (intraband + interband integral).

    Requires temperature > 0; at T = 0 the closed low-temperature form is
    the appropriate (and exact) limit.
    """
    if omega <= 0.0:
        raise ValueError("omega must be > 0")
    if params.temperature <= 0.0:
        raise ValueError("finite-temperature form needs T > 0; use conductivity_lowT at T = 0")
    value = _intraband_full(params, omega, constants) + _interband_full(params, omega, constants)
    return Conductivity(value=params.n_layers * value, omega=omega)


def conductivity_lowT(params: GrapheneParams, omega: float,
                      constants: PhysicalConstants = CONSTANTS) -> Conductivity:
    """Low-temperature closed form: Drude term plus interband step and log.

    Valid for kB*T << min(|mu_c|, hbar*omega).  Exactly at
    hbar*omega = 2*|mu_c| the logarithm diverges and a
    LogSingularityError is raised.
    """
    if omega <= 0.0:
        raise ValueError("omega must be > 0")
    k = constants
    mu = abs(params.mu_c) * k.e
    hw = k.hbar * omega
    drude = 1j * k.e**2 * mu / (math.pi * k.hbar**2 * (omega + 1j * params.gamma_intra))
    if mu == 0.0:
        inter = k.e**2 / (4.0 * k.hbar)
    else:
        if hw == 2.0 * mu:
            raise LogSingularityError(
                "hbar*omega equals 2*mu_c exactly; offset omega away from the log singularity")
        step = 1.0 if hw > 2.0 * mu else 0.0
        inter = k.e**2 / (4.0 * k.hbar) * (step + 1j / math.pi * math.log(abs((hw - 2.0 * mu) / (hw + 2.0 * mu))))
    return Conductivity(value=params.n_layers * (drude + inter), omega=omega)


def select_mode(params: GrapheneParams, omega: float,
                constants: PhysicalConstants = CONSTANTS) -> str:
    """Dispatch rule: the low-T form when kB*T < 0.01*min(|mu_c|, hbar*omega)."""
    kT = constants.kB * params.temperature
    scale = min(abs(params.mu_c) * constants.e, constants.hbar * omega)
    return "low" if kT < 0.01 * scale else "full"


def conductivity(params: GrapheneParams, omega: float, mode: str = "auto",
                 constants: PhysicalConstants = CONSTANTS) -> Conductivity:
    """Sheet conductivity with backend selection: 'auto', 'full' or 'low'.

    With mode='auto' the params' own conductivity_model is honored first,
    then the temperature dispatch rule.
    """
    if mode == "auto":
        mode = params.conductivity_model
    if mode == "auto":
        mode = select_mode(params, omega, constants)
    if mode == "full":
        return conductivity_full(params, omega, constants)
    if mode == "low":
        return conductivity_lowT(params, omega, constants)
    raise ValueError(f"unknown conductivity mode {mode!r}")
