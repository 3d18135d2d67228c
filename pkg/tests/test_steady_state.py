import cmath

import numpy as np
import pytest

from src.models.domain import RealVars
from src.models.errors import ConvergenceError, PhysicsDomainError
from src.physics.classical_dynamics import find_hexagon
from src.physics.steady_state import (
    closed_form_residual,
    continue_branch,
    from_hexagon,
    newton_solve,
    residual,
    solve_hexagon,
    to_amplitudes,
)
from src.workflows.operating_point import operating_point, polished_hexagon


class TestResidual:
    @pytest.mark.parametrize("delta", [None, 0.4, 1.7])
    def test_homogeneous_root(self, delta):
        np.testing.assert_allclose(residual(RealVars(), 1.1, delta), 0.0, atol=1e-14)

    def test_closed_form_agrees(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            vars = RealVars.from_array(rng.uniform(-0.5, 0.5, size=4))
            e0s_sq = float(rng.uniform(0.5, 1.5))
            np.testing.assert_allclose(
                closed_form_residual(vars, e0s_sq, 0.9),
                residual(vars, e0s_sq, 0.9),
                rtol=0.0, atol=1e-12,
            )

    def test_rejects_nonpositive_intensity(self):
        with pytest.raises(PhysicsDomainError):
            residual(RealVars(), 0.0)


class TestAmplitudes:
    def test_from_hexagon_inverts_to_amplitudes(self, hexagon):
        e0s = cmath.rect(1.1, 0.3)
        beta0, beta = to_amplitudes(from_hexagon(hexagon, e0s), e0s)
        assert beta0 == pytest.approx(hexagon.beta0)
        assert beta == pytest.approx(hexagon.beta)


class TestNewton:
    def test_polished_hexagon_residual(self, polished):
        assert polished.report.branch == "hexagon"
        assert polished.report.residual_norm < 1e-12

    def test_solve_from_default_guess(self):
        report = solve_hexagon(1.2)
        assert report.branch == "hexagon"
        assert report.residual_norm < 1e-12

    def test_argument_checks(self):
        with pytest.raises(PhysicsDomainError):
            newton_solve(RealVars(), -1.0)
        with pytest.raises(ValueError):
            newton_solve(RealVars(), 1.0, tol=0.0)

    @pytest.mark.parametrize("delta", [None, 0.5])
    def test_trivial_root_preserved(self, delta):
        report = newton_solve(RealVars(), 1.2, delta)
        assert report.iterations <= 2
        assert report.vars == RealVars()
        assert report.residual_norm < 1e-14
        assert report.branch == "homogeneous"

    def test_max_iter_exhausted(self):
        with pytest.raises(ConvergenceError) as info:
            newton_solve(RealVars(u0=2.0, v0=-1.5, u1=3.0, v1=-2.0), 1.2, max_iter=1)
        assert info.value.residual > 1e-12

    def test_homogeneous_branch_reported(self):
        report = newton_solve(RealVars(u0=0.01), 1.2)
        assert report.branch == "homogeneous"
        assert report.iterations >= 1


class TestContinuation:
    def test_branch_ends_at_fold(self, polished):
        drives = [1.3, 1.2, 1.1, 1.0, 0.9, 0.8]
        reports = continue_branch(drives, initial=polished.report.vars)
        assert [r.e0s_sq for r in reports] == drives[:4]
        assert all(r.branch == "hexagon" for r in reports)


@pytest.mark.slow
class TestMethodEquivalence:
    @pytest.mark.parametrize("drive", [1.0 + 0.03 * k for k in range(11)])
    def test_newton_matches_integration(self, run_config, drive):
        integrated = find_hexagon(operating_point(run_config, drive))
        newton = polished_hexagon(run_config, drive).hexagon
        assert newton.beta_mag == pytest.approx(integrated.beta_mag, abs=1e-6)
        assert abs(newton.beta0) == pytest.approx(abs(integrated.beta0), abs=1e-6)
