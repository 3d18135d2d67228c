"""
Hexagon Steady-State Solver

Newton solution of the symmetric hexagon in the shifted real variables

    beta_0 = E_0s (1 + u0 + i v0),    beta = E_0s (u1 + i v1) / (2 sqrt 3)

with E_0s taken real. The residual is generated from the classical mode
equations evaluated at the symmetric state; the closed-form polynomial
version is kept as an independent check.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np
import structlog

from src.models.domain import HEX_DETUNING, HexSteadyState, RealVars, SolverReport
from src.models.errors import ConvergenceError, NoHexagonError, PhysicsDomainError, SingularJacobianError
from src.physics.classical_dynamics import rhs_kernel

log = structlog.get_logger(__name__)

SQRT3 = math.sqrt(3.0)
HEX_SCALE = 2.0 * SQRT3
FD_STEP = 1e-7
MAX_HALVINGS = 20
HEXAGON_THRESHOLD = 1e-8


def to_amplitudes(vars: RealVars, e0s: complex) -> tuple[complex, complex]:
    """(beta_0, beta) for the shifted variables."""
    beta0 = e0s * complex(1.0 + vars.u0, vars.v0)
    beta = e0s / HEX_SCALE * complex(vars.u1, vars.v1)
    return beta0, beta


def from_hexagon(hexagon: HexSteadyState, e0s: complex) -> RealVars:
    """Inverse of to_amplitudes for a hexagon (its beta = |beta| e^{i phi})."""
    w0 = hexagon.beta0 / e0s - 1.0
    w1 = HEX_SCALE * hexagon.beta / e0s
    return RealVars(u0=w0.real, v0=w0.imag, u1=w1.real, v1=w1.imag)


def _residual_array(x: np.ndarray, e0s_sq: float, delta: float) -> np.ndarray:
    e0s = math.sqrt(e0s_sq)
    e_in = e0s * complex(1.0, delta - e0s_sq)
    a = np.empty(7, dtype=np.complex128)
    a[0] = e0s * complex(1.0 + x[0], x[1])
    a[1:] = e0s / HEX_SCALE * complex(x[2], x[3])
    out = np.empty(7, dtype=np.complex128)
    rhs_kernel(a, e_in, delta, HEX_DETUNING, out)
    f0 = out[0] / e0s
    f1 = out[1] * HEX_SCALE / e0s
    return np.array([f0.real, f0.imag, f1.real, f1.imag])


def residual(vars: RealVars, e0s_sq: float, delta: Optional[float] = None) -> np.ndarray:
    """
    The four real steady-state equations of the symmetric hexagon.

    Args:
        vars: Shifted real variables
        e0s_sq: Homogeneous intracavity intensity |E_0s|^2
        delta: Cavity detuning; defaults to e0s_sq, where E_in = E_0s

    Returns:
        Array (r0, r1, r2, r3); zero at a steady state
    """
    if e0s_sq <= 0:
        raise PhysicsDomainError(f"|E_0s|^2 must be positive, got {e0s_sq}")
    d = e0s_sq if delta is None else delta
    return _residual_array(vars.as_array(), e0s_sq, d)


def closed_form_residual(vars: RealVars, e0s_sq: float, delta: Optional[float] = None) -> np.ndarray:
    """Expanded polynomial form of the same four equations."""
    u0, v0, u1, v1 = vars.as_array()
    x = e0s_sq
    d = (x if delta is None else delta) - x
    r3 = SQRT3

    eq1 = -u0 + d * v0 - x * (
        2 * u0 * v0 + u1 * v1 + u0**2 * v0 + 0.5 * v0 * u1**2
        + u1**2 * v1 / (2 * r3) + u0 * u1 * v1 + v0**3 + 1.5 * v0 * v1**2
        + v1**3 / (2 * r3)
    )
    eq2 = -v0 - d * u0 + x * (
        2 * u0 + 3 * u0**2 + 1.5 * u1**2 + v0**2 + 0.5 * v1**2 + u0**3
        + 1.5 * u0 * u1**2 + u1**3 / (2 * r3) + u0 * v0**2
        + 0.5 * u0 * v1**2
        + v0 * u1 * v1 + u1 * v1**2 / (2 * r3)
    )
    eq3 = -u1 + 2 * v1 - x * (
        v1 + 2 * u0 * v1 + 2 * v0 * u1 + 2 / r3 * u1 * v1 + v0 * u1**2 / r3
        + 2 * u0 * v0 * u1 + u0**2 * v1 + 1.25 * u1**2 * v1
        + 2 / r3 * u0 * u1 * v1
        + 3 * v0**2 * v1 + r3 * v0 * v1**2
        + 1.25 * v1**3
    )
    eq4 = -v1 - 2 * u1 + x * (
        3 * u1 + 6 * u0 * u1 + r3 * u1**2 + 2 * v0 * v1 + v1**2 / r3
        + 3 * u0**2 * u1 + r3 * u0 * u1**2 + 1.25 * u1**3 + 2 * u0 * v0 * v1
        + u0 * v1**2 / r3
        + v0**2 * u1 + 2 / r3 * v0 * u1 * v1
        + 1.25 * u1 * v1**2
    )
    return np.array([eq1, eq2, eq3, eq4])


def _jacobian(x: np.ndarray, e0s_sq: float, delta: float) -> np.ndarray:
    jac = np.empty((4, 4))
    for k in range(4):
        dx = np.zeros(4)
        dx[k] = FD_STEP
        jac[:, k] = (_residual_array(x + dx, e0s_sq, delta)
                     - _residual_array(x - dx, e0s_sq, delta)) / (2 * FD_STEP)
    return jac


def newton_solve(
    initial: RealVars,
    e0s_sq: float,
    delta: Optional[float] = None,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> SolverReport:
    """
    Damped Newton iteration on the four steady-state equations.

    The step is halved until the residual norm decreases, at most 20 times.
    Raises ConvergenceError after max_iter iterations and
    SingularJacobianError when the linearized system cannot be solved.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if e0s_sq <= 0:
        raise PhysicsDomainError(f"|E_0s|^2 must be positive, got {e0s_sq}")
    d = e0s_sq if delta is None else delta

    x = initial.as_array()
    r = _residual_array(x, e0s_sq, d)
    norm = float(np.linalg.norm(r))
    iterations = 0

    while norm >= tol:
        if iterations >= max_iter:
            raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", residual=norm)
        jac = _jacobian(x, e0s_sq, d)
        try:
            if np.linalg.cond(jac) > 1e14:
                raise np.linalg.LinAlgError("ill-conditioned")
            dx = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise SingularJacobianError(
                "singular Jacobian; try a different starting point", residual=norm
            ) from None

        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = x + t * dx
            r_trial = _residual_array(trial, e0s_sq, d)
            n_trial = float(np.linalg.norm(r_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            t *= 0.5
        else:
            raise ConvergenceError("line search failed to reduce the residual", residual=norm)

        x, r, norm = trial, r_trial, n_trial
        iterations += 1

    branch = "hexagon" if math.hypot(x[2], x[3]) > HEXAGON_THRESHOLD else "homogeneous"
    return SolverReport(
        vars=RealVars.from_array(x),
        residual_norm=norm,
        iterations=iterations,
        branch=branch,
        e0s_sq=e0s_sq,
        delta=d,
    )


def solve_hexagon(
    e0s_sq: float,
    delta: Optional[float] = None,
    initial: Optional[RealVars] = None,
    tol: float = 1e-12,
    max_iter: int = 50,
    magnitude: float = 0.5,
) -> SolverReport:
    """
    Newton solve targeting the hexagon root.

    Without an initial guess, (u1, v1) starts along the critical direction
    exp(i pi/4) with the given magnitude, retried with the phase rotated by
    pi and pi/2.
    """
    if initial is not None:
        starts = [initial]
    else:
        starts = [
            RealVars(u1=magnitude * math.cos(math.pi / 4 + rot), v1=magnitude * math.sin(math.pi / 4 + rot))
            for rot in (0.0, math.pi, math.pi / 2)
        ]

    last_error: Optional[Exception] = None
    for start in starts:
        try:
            report = newton_solve(start, e0s_sq, delta, tol=tol, max_iter=max_iter)
        except ConvergenceError as exc:
            last_error = exc
            continue
        if report.branch == "hexagon":
            return report
        log.debug("newton fell onto the homogeneous root", e0s_sq=e0s_sq)

    raise NoHexagonError(
        f"no hexagon root found at |E_0s|^2 = {e0s_sq:.6g}"
        + (f" ({last_error})" if last_error else "")
    )


def continue_branch(
    e0s_values: Sequence[float],
    delta: Optional[float] = None,
    initial: Optional[RealVars] = None,
    tol: float = 1e-12,
) -> List[SolverReport]:
    """
    Follow the hexagon root across a sequence of intensities.

    Each solve starts from the previous root; the walk stops at the first
    intensity where the hexagon is lost, which marks the end of the branch.
    """
    reports: List[SolverReport] = []
    guess = initial
    for e0s_sq in e0s_values:
        try:
            report = solve_hexagon(e0s_sq, delta, initial=guess, tol=tol)
        except NoHexagonError:
            log.info("hexagon branch ends", e0s_sq=e0s_sq, solved=len(reports))
            break
        reports.append(report)
        guess = report.vars
    return reports
