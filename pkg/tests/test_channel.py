import math

import numpy as np
import pytest

from conftest import trace_distance
from gspp.channel import (
    AMPLITUDE_MATCHED,
    INITIAL,
    ChannelSpec,
    damp_fock,
    fidelity_vs_distance,
    flux_damping,
    matched_turning_point,
    propagate_cat,
    propagate_mixture,
)
from gspp.coupling import excite_cat, normalize_superposition
from gspp.qstate import DensityMatrix, coherent_state


class TestFluxDamping:
    def test_zero_distance(self):
        assert flux_damping(ChannelSpec(k0_kappa2=5.0, x=0.0)) == 1.0

    def test_one_propagation_length(self):
        spec = ChannelSpec(k0_kappa2=2.0, x=1.0 / (2.0 * 2.0))
        assert flux_damping(spec) == pytest.approx(math.exp(-1.0))

    def test_fig5_tm_five_wavelengths(self):
        # TM mode of the long-wavelength figure set: finite damping factor
        from gspp.material import GrapheneParams, CONSTANTS
        from gspp.dispersion import effective_wavelength, solve_mode
        params = GrapheneParams.with_default_rates(1.4, 300.0)
        omega = 2.0 * math.pi * CONSTANTS.c0 / 1550e-9
        mode = solve_mode(params, omega, "TM")
        lam_eff = effective_wavelength(mode)
        spec = ChannelSpec(k0_kappa2=mode.k.imag, x=5.0 * lam_eff)
        val = flux_damping(spec)
        assert 0.0 < val < 1.0


class TestPropagateCat:
    def test_identity_at_origin(self):
        rho = excite_cat(3.0, 0.9)
        out = propagate_cat(rho, ChannelSpec(k0_kappa2=1.0, x=0.0))
        assert np.allclose([t[0] for t in out.terms], [t[0] for t in rho.terms])

    def test_vacuum_limit(self):
        rho = propagate_cat(excite_cat(3.0, math.pi / 2),
                            ChannelSpec(k0_kappa2=1.0, x=100.0))
        coeffs = normalize_superposition([1.0], [0.0])
        assert rho.fidelity_pure(coeffs, [0.0]) == pytest.approx(1.0, abs=1e-6)

    def test_trace_exact(self, rng):
        for _ in range(15):
            alpha = rng.uniform(0.5, 4.0)
            g = rng.uniform(0.1, math.pi / 2)
            x = rng.uniform(0.0, 2.0)
            out = propagate_cat(excite_cat(alpha, g), ChannelSpec(k0_kappa2=1.0, x=x))
            assert out.trace() == pytest.approx(1.0, abs=1e-9)

    def test_matches_fock_channel(self):
        alpha, g = 3.0, math.pi / 2
        spec = ChannelSpec(k0_kappa2=1.0, x=0.5)
        dim = 64
        analytic = propagate_cat(excite_cat(alpha, g), spec).to_density_matrix(dim)
        fock = damp_fock(excite_cat(alpha, g).to_density_matrix(dim), spec.transmissivity)
        assert trace_distance(analytic.matrix, fock.matrix) < 1e-8

    def test_cross_weight_decoherence_factor(self):
        # c(x) = c_out exp(-2|a sin g|^2 (1 - e^{-2 k0 k'' x}))
        alpha, g, x = 3.0, 0.8, 0.3
        spec = ChannelSpec(k0_kappa2=1.0, x=x)
        out = propagate_cat(excite_cat(alpha, g), spec)
        eta = spec.transmissivity
        c_out = math.exp(-2.0 * (alpha * math.cos(g)) ** 2)
        c_x = c_out * math.exp(-2.0 * (alpha * math.sin(g)) ** 2 * (1.0 - eta))
        n_sq = 1.0 / (2.0 + 2.0 * math.exp(-2.0 * alpha**2))
        a_out = alpha * math.sin(g) * math.sqrt(eta)
        weights = {(round(a.real, 9), round(b.real, 9)): w for w, a, b in out.terms}
        key = (round(a_out, 9), round(-a_out, 9))
        assert weights[key] == pytest.approx(n_sq * c_x, rel=1e-12)

    def test_energy_law(self, rng):
        for _ in range(10):
            alpha = rng.uniform(0.5, 3.5)
            g = rng.uniform(0.2, math.pi / 2)
            x = rng.uniform(0.0, 1.5)
            spec = ChannelSpec(k0_kappa2=1.0, x=x)
            rho0 = excite_cat(alpha, g)
            rho1 = propagate_cat(rho0, spec)
            assert rho1.mean_photon() == pytest.approx(
                spec.transmissivity * rho0.mean_photon(), rel=1e-9, abs=1e-12)


class TestDampFock:
    def test_identity(self):
        rho = coherent_state(2.0, 40).projector()
        out = damp_fock(rho, 1.0)
        assert trace_distance(out.matrix, rho.matrix) == 0.0

    def test_coherent_to_scaled_coherent(self):
        alpha, eta, dim = 2.0, 0.6, 50
        out = damp_fock(coherent_state(alpha, dim).projector(), eta)
        target = coherent_state(alpha * math.sqrt(eta), dim).projector()
        assert trace_distance(out.matrix, target.matrix) < 1e-10

    def test_semigroup_composition(self):
        rho = excite_cat(2.5, 0.9).to_density_matrix(48)
        step1 = damp_fock(damp_fock(rho, 0.8), 0.7)
        once = damp_fock(rho, 0.8 * 0.7)
        assert trace_distance(step1.matrix, once.matrix) < 1e-12

    def test_trace_preserved(self):
        rho = excite_cat(2.5, 0.9).to_density_matrix(48)
        out = damp_fock(rho, 0.37)
        assert out.trace() == pytest.approx(1.0, abs=1e-10)

    def test_vacuum_limit(self):
        rho = excite_cat(2.0, 0.9).to_density_matrix(40)
        out = damp_fock(rho, 0.0)
        assert out.matrix[0, 0] == pytest.approx(1.0, abs=1e-12)


class TestFidelityCurves:
    def test_perfect_start(self):
        f = fidelity_vs_distance(3.0, math.pi / 2, [0.0], 1.0, reference=INITIAL)
        assert f[0] == pytest.approx(1.0, abs=1e-12)

    def test_initial_monotone_decrease(self):
        x = np.linspace(0.0, 4.0, 80)
        for beta in (1.0, 0.95, 0.8):
            g = math.asin(beta)
            f = fidelity_vs_distance(3.0, g, x, 1.0, reference=INITIAL)
            assert np.all(np.diff(f) < 1e-12)
            assert f[-1] < 0.01

    def test_initial_asymptote(self):
        alpha = 3.0
        f_inf = fidelity_vs_distance(alpha, math.pi / 2, [50.0], 1.0, reference=INITIAL)[0]
        n_sq = 1.0 / (2.0 + 2.0 * math.exp(-2.0 * alpha**2))
        assert f_inf == pytest.approx(4.0 * n_sq * math.exp(-(alpha**2)), rel=1e-6)

    def test_matched_turning_point_and_plateau(self):
        alpha = 3.0
        x = np.linspace(0.0, 3.0, 1200)
        for beta in (1.0, 0.9, 0.8):
            g = math.asin(beta)
            f = fidelity_vs_distance(alpha, g, x, 1.0, reference=AMPLITUDE_MATCHED)
            i_min = int(np.argmin(f))
            assert x[i_min] == pytest.approx(matched_turning_point(beta), rel=0.05)
            assert abs(f[i_min] - 0.5) < 0.05
            assert f[-1] > 0.95

    def test_matched_limits_to_unity(self):
        f = fidelity_vs_distance(3.0, 0.9, [30.0], 1.0, reference=AMPLITUDE_MATCHED)
        assert f[0] == pytest.approx(1.0, abs=1e-6)

    def test_bad_reference_name(self):
        with pytest.raises(ValueError):
            fidelity_vs_distance(3.0, 0.9, [0.0], 1.0, reference="nope")


class TestChannelSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelSpec(k0_kappa2=-1.0, x=1.0)
        with pytest.raises(ValueError):
            ChannelSpec(k0_kappa2=1.0, x=-1.0)
        with pytest.raises(ValueError):
            propagate_mixture(excite_cat(1.0, 0.5), 0.0)
