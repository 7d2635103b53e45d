import math
import warnings
from dataclasses import replace

import numpy as np
import pytest

from gspp.material import CONSTANTS, GrapheneParams
from gspp.prism import (
    NotResonant,
    PrismGeometry,
    ValidityWarning,
    atr_solve,
    atr_solve_sigma,
    beta_sweep,
    beta_sweep_matched,
    boundary_residuals,
    coupling_from_beta,
    critical_angle,
    lossless_matching_frequency,
    matching_frequency,
    overlap_beta,
    prism_energy_fraction,
    prism_mode_normalization,
    reflectance_map,
    _photon_norm_from_solution,
)

K = CONSTANTS


def te_geom(**kw):
    base = dict(eps1=1.5, d=620e-9, theta_i=math.radians(54.74), polarization="TE")
    base.update(kw)
    return PrismGeometry(**base)


def tm_geom(**kw):
    base = dict(eps1=1.5, d=50e-6, theta_i=math.radians(64.0), polarization="TM")
    base.update(kw)
    return PrismGeometry(**base)


class TestCriticalAngle:
    def test_paper_value(self):
        assert math.degrees(critical_angle(1.5)) == pytest.approx(54.736, abs=1e-3)

    def test_unity(self):
        assert critical_angle(1.0) == pytest.approx(math.pi / 2.0)

    def test_arcsin_half(self):
        assert critical_angle(4.0) == pytest.approx(math.radians(30.0), abs=1e-12)


class TestAtrSolve:
    def test_fresnel_limit(self):
        # sigma -> 0, theta < theta_c: single-interface Fresnel amplitude
        omega = 2.0 * math.pi * 500e12
        k0 = omega / K.c0
        k1 = math.sqrt(1.5) * k0
        theta = math.radians(30.0)
        kz1 = k1 * math.cos(theta)
        kz0 = math.sqrt(k0**2 - (k1 * math.sin(theta)) ** 2)
        for pol, r_ref in (("TE", (kz1 - kz0) / (kz1 + kz0)),
                           ("TM", (kz1 / 1.5 - kz0) / (kz1 / 1.5 + kz0))):
            geom = te_geom(theta_i=theta, polarization=pol, d=500e-9)
            sol = atr_solve_sigma(geom, 1e-15 + 1e-15j, omega)
            assert abs(sol.r) == pytest.approx(abs(r_ref), rel=1e-9)

    def test_boundary_residuals_vanish(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        for geom, f in ((tm_geom(), 0.81e12), (te_geom(), 599e12)):
            sol = atr_solve(geom, params, 2.0 * math.pi * f)
            scale = abs(sol.k_z_prism)
            assert np.abs(boundary_residuals(sol)).max() / scale < 1e-12

    def test_lossless_evanescent_total_reflection(self):
        # sigma' = 0 and evanescent gap: |r| = 1 exactly
        geom = tm_geom()
        sol = atr_solve_sigma(geom, 1j * 8.8e-3, 2.0 * math.pi * 0.81e12)
        assert sol.reflectance == pytest.approx(1.0, abs=1e-10)

    def test_decoupled_large_gap(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        sol = atr_solve(tm_geom(d=5e-3), params, 2.0 * math.pi * 0.81e12)
        assert sol.reflectance == pytest.approx(1.0, abs=1e-6)

    def test_lossy_reflectance_below_one(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        sol = atr_solve(tm_geom(), params, 2.0 * math.pi * 0.81e12)
        assert sol.reflectance < 1.0


class TestReflectanceMap:
    def test_values_in_unit_interval_and_dip(self):
        # TM map around the Fig-6(b) parameter set shows a coupling locus
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        thetas = np.radians(np.linspace(56.0, 75.0, 9))
        omegas = 2.0 * math.pi * np.linspace(0.3e12, 1.5e12, 9)
        grid = reflectance_map(thetas, omegas, eps1=1.5, d=200e-6,
                               polarization="TM", params=params)
        assert grid.shape == (9, 9)
        assert np.all(grid >= 0.0) and np.all(grid <= 1.0 + 1e-12)
        assert grid.min() < 0.5

    def test_grid_point_equals_direct_call(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        theta, omega = math.radians(64.0), 2.0 * math.pi * 0.81e12
        grid = reflectance_map([theta], [omega], eps1=1.5, d=200e-6,
                               polarization="TM", params=params)
        direct = atr_solve(tm_geom(d=200e-6), params, omega).reflectance
        assert grid[0, 0] == direct


class TestMatchingFrequency:
    def test_te_resonance_near_interband_edge(self):
        params = GrapheneParams.with_default_rates(1.24, 0.0)
        w0 = matching_frequency(te_geom(), params, 2.0 * math.pi * 520e12,
                                2.0 * math.pi * 680e12)
        hw = K.hbar * w0 / K.e
        assert abs(hw - 2.48) / 2.48 < 0.05

    def test_below_critical_angle_not_resonant(self):
        params = GrapheneParams.with_default_rates(1.24, 0.0)
        geom = te_geom(theta_i=math.radians(40.0))
        with pytest.raises(NotResonant):
            matching_frequency(geom, params, 2.0 * math.pi * 520e12,
                               2.0 * math.pi * 680e12)

    def test_no_dip_in_window(self):
        params = GrapheneParams.with_default_rates(1.24, 0.0)
        with pytest.raises(NotResonant):
            matching_frequency(te_geom(d=1e-3), params, 2.0 * math.pi * 100e12,
                               2.0 * math.pi * 150e12)

    def test_lossless_root_agrees_with_lossy_dip(self):
        # reduce the intraband damping: the reflectance dip approaches the
        # reactive momentum-matching root (weak prism loading at large d)
        params = GrapheneParams(mu_c=0.5, temperature=300.0,
                                gamma_intra=(1.0 / 0.35e-12) / 100.0,
                                gamma_inter=1.0 / 0.0658e-12)
        geom = tm_geom(d=350e-6)
        lo, hi = 2.0 * math.pi * 0.3e12, 2.0 * math.pi * 1.5e12
        w_root = lossless_matching_frequency(geom, params, lo, hi)
        w_dip = matching_frequency(geom, params, lo, hi, n_scan=900)
        assert abs(w_dip - w_root) / w_root < 0.01


class TestOverlapBeta:
    def test_tm_sweep_peaks_above_07(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        omega = 2.0 * math.pi * 0.81e12
        ds = np.linspace(10e-6, 150e-6, 15)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            betas = beta_sweep(tm_geom(), params, omega, ds, n_points=512)
        assert np.abs(betas).max() > 0.7

    def test_te_matched_sweep_peaks_above_07(self):
        params = GrapheneParams.with_default_rates(1.24, 0.0)
        geom = te_geom()
        w_root = lossless_matching_frequency(geom, params, 2.0 * math.pi * 575e12,
                                             2.0 * math.pi * 599e12)
        ds = np.linspace(18e-6, 32e-6, 5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            betas, dips = beta_sweep_matched(
                geom, params, w_root - 2.0 * math.pi * 0.02e12,
                w_root + 2.0 * math.pi * 0.35e12, ds, n_scan=900, n_points=512)
        assert np.abs(betas).max() > 0.7

    def test_total_reflection_gives_zero(self):
        # (nearly) lossless graphene: |r| ~ 1 so the prefactor kills beta
        params = GrapheneParams(mu_c=0.5, temperature=0.0, gamma_intra=10.0,
                                gamma_inter=10.0, conductivity_model="low")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            beta = overlap_beta(tm_geom(), params, 2.0 * math.pi * 10e12, n_points=512)
        assert abs(beta) < 1e-3

    def test_below_critical_angle_raises(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        with pytest.raises(NotResonant):
            overlap_beta(tm_geom(theta_i=math.radians(40.0)), params,
                         2.0 * math.pi * 0.81e12)

    def test_wrong_polarization_raises(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        with pytest.raises(ValueError):
            overlap_beta(te_geom(theta_i=math.radians(60.0)), params,
                         2.0 * math.pi * 0.81e12)

    def test_cauchy_schwarz_bound(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        omega = 2.0 * math.pi * 0.81e12
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            for d in (20e-6, 60e-6, 120e-6):
                geom = tm_geom(d=d)
                sol = atr_solve(geom, params, omega)
                beta = overlap_beta(geom, params, omega, n_points=512)
                assert abs(beta) <= math.sqrt(max(0.0, 1.0 - sol.reflectance)) + 1e-9

    def test_background_permittivity_guard(self):
        params = GrapheneParams(mu_c=0.5, temperature=300.0, gamma_intra=1e12,
                                gamma_inter=1e13, eps_r=2.0)
        with pytest.raises(ValueError):
            atr_solve(tm_geom(), params, 2.0 * math.pi * 0.81e12)


class TestPrismNormalization:
    def test_positive(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        val = prism_mode_normalization(tm_geom(), params, 2.0 * math.pi * 0.81e12)
        assert val > 0.0

    def test_smooth_in_d(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        omega = 2.0 * math.pi * 0.81e12
        ds = np.linspace(20e-6, 120e-6, 9)
        vals = np.array([prism_mode_normalization(tm_geom(d=float(d)), params, omega,
                                                  n_points=512) for d in ds])
        rel_jump = np.abs(np.diff(vals)) / vals[:-1]
        assert rel_jump.max() < 0.8

    def test_grid_refinement_convergence(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        omega = 2.0 * math.pi * 0.81e12
        coarse = prism_mode_normalization(tm_geom(), params, omega, n_points=2048)
        fine = prism_mode_normalization(tm_geom(), params, omega, n_points=4096)
        assert abs(coarse - fine) / fine < 1e-6

    def test_below_critical_angle_raises(self):
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        with pytest.raises(NotResonant):
            prism_mode_normalization(tm_geom(theta_i=math.radians(30.0)), params,
                                     2.0 * math.pi * 0.81e12)

    def test_validity_guard_fires_when_prism_energy_dominates(self):
        # far off resonance the lower-region field is weak relative to the
        # prism standing wave
        params = GrapheneParams.with_default_rates(0.5, 300.0)
        geom = tm_geom(d=400e-6, theta_i=math.radians(74.0))
        with pytest.warns(ValidityWarning):
            overlap_beta(geom, params, 2.0 * math.pi * 1.4e12, n_points=512)


class TestCouplingFromBeta:
    def test_perfect(self):
        assert coupling_from_beta(1.0) == pytest.approx(math.pi / 2.0)

    def test_zero(self):
        assert coupling_from_beta(0.0) == 0.0

    def test_arcsin_value(self):
        g = coupling_from_beta(0.7)
        assert abs(g) == pytest.approx(0.775397, abs=1e-6)

    def test_phase_carried(self):
        g = coupling_from_beta(0.5j)
        assert g == pytest.approx(1j * math.asin(0.5), abs=1e-12)

    def test_overrange_raises(self):
        with pytest.raises(ValueError):
            coupling_from_beta(1.2)
