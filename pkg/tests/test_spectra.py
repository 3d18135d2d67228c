import cmath
import math

import numpy as np
import pytest

from src.models.domain import AnalyticNumberSpectrum, HexSteadyState, SpectrumPoint
from src.models.errors import MarginalModeError
from src.physics.fluctuations import build_reduced_Q, build_reduced_W, build_reduced_X
from src.physics.spectra import (
    analytic_number_spectrum,
    best_squeezing,
    frequency_grid,
    lorentzian_fit,
    mean_n_plus,
    output_correlation,
    quadrature_spectrum,
    scan_best_squeezing,
    spectrum,
)
from src.physics.steady_state import continue_branch, to_amplitudes


class TestFrequencyGrid:
    def test_layout(self):
        grid = frequency_grid()
        assert grid.size == 400
        assert grid[0] == 0.0 and grid[-1] == pytest.approx(100.0)
        assert np.all(np.diff(grid) > 0)


class TestPassiveCavity:
    @pytest.mark.parametrize("psi", [0.0, 0.4, 1.3, 2.9])
    def test_vacuum_noise_everywhere(self, passive_hexagon, psi):
        for build in (build_reduced_W, build_reduced_Q, build_reduced_X):
            points = spectrum(build(passive_hexagon), psi)
            np.testing.assert_allclose([p.s for p in points], 1.0, atol=1e-12)


class TestSpectrumProperties:
    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q, build_reduced_X])
    @pytest.mark.parametrize("omega", [0.05, 0.7, 3.0, 40.0])
    def test_period_pi_in_angle(self, hexagon, build, omega):
        system = build(hexagon)
        for psi in (0.0, 0.3, hexagon.phi, 2.2):
            assert quadrature_spectrum(system, psi + math.pi, omega) == pytest.approx(
                quadrature_spectrum(system, psi, omega), rel=1e-12, abs=1e-14
            )

    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q, build_reduced_X])
    def test_shot_noise_at_high_frequency(self, hexagon, build):
        system = build(hexagon)
        for psi in (0.0, 0.9, hexagon.phi):
            assert abs(quadrature_spectrum(system, psi, 1e3) - 1.0) < 1e-4
            assert abs(quadrature_spectrum(system, psi, 1e4) - 1.0) < 1e-6

    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q, build_reduced_X])
    def test_nonnegative(self, hexagon, build):
        system = build(hexagon)
        for psi in np.linspace(0.0, math.pi, 13):
            values = [quadrature_spectrum(system, float(psi), float(w)) for w in frequency_grid()[1:]]
            assert min(values) >= -1e-12


class TestTranslationModeSpectrum:
    def test_phase_quadrature_matches_analytic_shape(self, hexagon):
        system = build_reduced_X(hexagon)
        omegas = frequency_grid()
        values = np.array([quadrature_spectrum(system, hexagon.phi, w) for w in omegas])
        np.testing.assert_allclose(values, omegas**2 / (4.0 + omegas**2), atol=1e-9)

        n_plus = mean_n_plus(hexagon)
        shape = np.array([analytic_number_spectrum(w, 1.0, n_plus) for w in omegas]) / n_plus
        np.testing.assert_allclose(values, shape, atol=1e-9)

    def test_complete_suppression_at_zero_frequency(self, hexagon):
        assert best_squeezing(build_reduced_X(hexagon)).s_min < 1e-8

    @pytest.mark.parametrize("offset", [-0.05, 0.05])
    def test_off_angle_peak(self, hexagon, offset):
        assert quadrature_spectrum(build_reduced_X(hexagon), hexagon.phi + offset, 0.0) > 1.0

    def test_output_correlation_rejects_marginal_frequency(self, hexagon):
        with pytest.raises(MarginalModeError):
            output_correlation(build_reduced_X(hexagon), 0.0)
        assert output_correlation(build_reduced_X(hexagon), 0.5).shape == (2, 2)


class TestSqueezing:
    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q])
    def test_below_shot_noise(self, hexagon, build):
        best = best_squeezing(build(hexagon))
        assert best.s_min < 1.0
        assert 0.0 <= best.psi_opt < math.pi

    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q])
    def test_scan_never_beats_optimum(self, hexagon, build):
        system = build(hexagon)
        best = best_squeezing(system)
        scan = scan_best_squeezing(system)
        assert scan.s_min >= best.s_min - 1e-12
        assert scan.s_min - best.s_min < 0.05

    @pytest.mark.parametrize("build", [build_reduced_W, build_reduced_Q])
    def test_lorentzian_shape_at_optimal_angle(self, hexagon, build):
        system = build(hexagon)
        fit = lorentzian_fit(spectrum(system, best_squeezing(system).psi_opt))
        assert fit.goodness > 0.999

    def test_squeezing_on_bistable_branch(self, polished):
        drive = 0.98
        reports = continue_branch([1.2 - 0.02 * k for k in range(12)], initial=polished.report.vars)
        assert reports[-1].e0s_sq == pytest.approx(drive)
        beta0, beta = to_amplitudes(reports[-1].vars, math.sqrt(drive))
        hexagon = HexSteadyState(beta0=beta0, beta_mag=abs(beta), phi=cmath.phase(beta))
        assert best_squeezing(build_reduced_W(hexagon)).s_min < 1.0
        assert best_squeezing(build_reduced_Q(hexagon)).s_min < 1.0
        assert best_squeezing(build_reduced_X(hexagon)).s_min < 1e-8


class TestLorentzianFit:
    def test_exact_data(self):
        omegas = frequency_grid()
        points = [SpectrumPoint(omega=w, s=1.0 - 0.4 / (w**2 + 0.5)) for w in omegas]
        fit = lorentzian_fit(points)
        assert fit.goodness > 0.999999
        assert fit.a == pytest.approx(1.0, rel=1e-6)
        assert fit.b == pytest.approx(0.4, rel=1e-6)
        assert fit.c == pytest.approx(0.5, rel=1e-6)
        np.testing.assert_allclose(fit.evaluate(omegas), [p.s for p in points], atol=1e-8)

    def test_white_noise_fits_poorly(self):
        rng = np.random.default_rng(7)
        omegas = frequency_grid()
        noise = 1.0 + 0.1 * rng.standard_normal(omegas.size)
        fit = lorentzian_fit([SpectrumPoint(omega=w, s=s) for w, s in zip(omegas, noise)])
        assert fit.goodness < 0.5

    def test_needs_four_points(self):
        with pytest.raises(ValueError):
            lorentzian_fit([SpectrumPoint(omega=w, s=1.0) for w in (0.0, 1.0, 2.0)])


class TestAnalyticNumberSpectrum:
    def test_shape(self):
        model = AnalyticNumberSpectrum(gamma=1.0, n_plus_mean=2.0)
        assert model(0.0) == 0.0
        assert model(2.0) == pytest.approx(1.0)
        assert model(1e6) == pytest.approx(2.0, rel=1e-9)

    def test_rejects_negative_population(self):
        with pytest.raises(ValueError):
            analytic_number_spectrum(0.0, 1.0, -1.0)

    def test_mean_n_plus(self, hexagon):
        assert mean_n_plus(hexagon) == pytest.approx(4.0 * hexagon.beta_mag**2)
