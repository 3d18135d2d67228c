"""
Error hierarchy for the hexagonal Kerr cavity toolkit.

Every error carries a short machine-readable ``code`` so the command line can
report failures as a single parsable line.
"""

from __future__ import annotations

from typing import Optional


class HexKerrError(Exception):
    """Base class for all toolkit errors."""

    code: str = "hexkerr"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class PhysicsDomainError(HexKerrError, ValueError):
    """Parameters outside the physical domain of the model."""

    code = "physics_domain"


class DivergenceError(HexKerrError, RuntimeError):
    """Integration produced a non-finite or runaway state."""

    code = "divergence"

    def __init__(self, time: float, detail: str = "non-finite state"):
        super().__init__(f"divergence at t={time:.6g}: {detail}")
        self.time = time


class SymmetryError(HexKerrError):
    """A steady state violates one of the hexagon symmetry conditions."""

    code = "symmetry"

    def __init__(self, condition: str, deviation: float, tol: float):
        super().__init__(
            f"condition '{condition}' violated: deviation {deviation:.3e} > tol {tol:.1e}"
        )
        self.condition = condition
        self.deviation = deviation
        self.tol = tol


class NoHexagonError(HexKerrError):
    """No hexagonal pattern exists (or was reached) at the requested drive."""

    code = "no_hexagon"


class ConvergenceError(HexKerrError):
    """Iterative solver did not converge."""

    code = "convergence"

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (last residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class SingularJacobianError(ConvergenceError):
    code = "singular_jacobian"


class GaugeError(HexKerrError, ValueError):
    """Operation requires a hexagon in the zero-phase-difference gauge."""

    code = "gauge"


class MarginalModeError(HexKerrError, ArithmeticError):
    """Drift matrix has an eigenvalue on the imaginary axis at the given frequency."""

    code = "marginal_mode"


class SpectrumConsistencyError(HexKerrError):
    code = "spectrum_consistency"


class BasisError(HexKerrError, ValueError):
    """Fock basis too large, mismatched, or violating a precondition."""

    code = "basis"


class ConfigError(HexKerrError, ValueError):
    code = "config"


class ArtifactError(HexKerrError):
    """An artifact file could not be written."""

    code = "io"
