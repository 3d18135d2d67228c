"""
Output noise spectra of the reduced quadrature systems.

Frequencies are in units of gamma. With T(w) = 2 (M/gamma + i w)^-1 + I the
output correlation is C_out = T(w) C_in T(-w)^T and the quadrature spectrum
at angle psi is r C_out r^T with r = (cos psi, sin psi); vacuum gives 1.
"""

from __future__ import annotations

import math
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import linalg
from scipy.optimize import OptimizeWarning, curve_fit

from src.models.domain import (
    BestSqueezing,
    HexSteadyState,
    LorentzianFit,
    ReducedLinearSystem,
    SpectrumPoint,
)
from src.models.errors import MarginalModeError, SpectrumConsistencyError

log = structlog.get_logger(__name__)

MARGINAL_TOL = 1e-8
ORTHOGONAL_TOL = 1e-7
IMAG_TOL = 1e-10


def frequency_grid() -> np.ndarray:
    """Default grid: 0, 200 log-spaced points on [1e-3, 1], 199 linear points on (1, 100]."""
    return np.concatenate([[0.0], np.geomspace(1e-3, 1.0, 200), np.linspace(1.0, 100.0, 200)[1:]])


def _marginal(md: np.ndarray, omega: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    lam, right = linalg.eig(md)
    mask = np.abs(lam + 1j * omega) < MARGINAL_TOL
    return lam, right, mask


def output_correlation(sys: ReducedLinearSystem, omega: float) -> np.ndarray:
    """2x2 output correlation matrix at frequency omega."""
    md = sys.m_dimensionless
    _, _, mask = _marginal(md, omega)
    if mask.any():
        raise MarginalModeError(f"marginal mode at omega={omega:g} for system {sys.label}")
    eye = np.eye(2)
    t_plus = 2.0 * linalg.solve(md + 1j * omega * eye, eye) + eye
    t_minus = 2.0 * linalg.solve(md - 1j * omega * eye, eye) + eye
    return t_plus @ sys.c_in @ t_minus.T


def _row_transfer(sys: ReducedLinearSystem, r: np.ndarray, omega: float) -> Optional[np.ndarray]:
    """r T(omega); None when r has weight on a marginal mode at this frequency."""
    md = sys.m_dimensionless
    lam, right, mask = _marginal(md, omega)
    if not mask.any():
        return 2.0 * linalg.solve((md + 1j * omega * np.eye(2)).T, r.astype(complex)) + r

    left = linalg.inv(right)
    coeff = r @ right
    scale = max(float(np.linalg.norm(coeff)), 1.0)
    u = np.zeros(2, dtype=complex)
    for k in range(2):
        if mask[k]:
            if abs(coeff[k]) > ORTHOGONAL_TOL * scale:
                return None
            continue
        u += coeff[k] * (2.0 / (lam[k] + 1j * omega) + 1.0) * left[k]
    return u


def quadrature_spectrum(sys: ReducedLinearSystem, psi: float, omega: float) -> float:
    """
    S(psi, omega) = C11 cos^2 + C22 sin^2 + (C12 + C21) sin cos.

    Evaluated as u C_in u^H with u = r T(omega). At a marginal frequency the
    quadrature orthogonal to the marginal mode stays finite; any other
    quadrature returns +inf.
    """
    r = np.array([math.cos(psi), math.sin(psi)])
    u = _row_transfer(sys, r, omega)
    if u is None:
        return math.inf
    s = u @ sys.c_in @ u.conj()
    if abs(s.imag) > IMAG_TOL * max(1.0, abs(s.real)):
        raise SpectrumConsistencyError(
            f"imaginary residue {s.imag:.3e} in spectrum of {sys.label} at omega={omega:g}"
        )
    return float(s.real)


def spectrum(sys: ReducedLinearSystem, psi: float, omegas: Optional[Sequence[float]] = None) -> List[SpectrumPoint]:
    grid = frequency_grid() if omegas is None else np.asarray(omegas, dtype=float)
    return [SpectrumPoint(omega=float(w), s=quadrature_spectrum(sys, psi, float(w))) for w in grid]


def best_squeezing(sys: ReducedLinearSystem, omega: float = 0.0) -> BestSqueezing:
    """
    Quadrature angle in [0, pi) minimizing the noise at omega.

    The spectrum is a quadratic form in (cos psi, sin psi), so the optimum is
    the eigenvector of the smallest eigenvalue of its symmetric real part.
    At a marginal frequency the only finite quadrature is the one orthogonal
    to the marginal mode.
    """
    md = sys.m_dimensionless
    lam, right, mask = _marginal(md, omega)

    if mask.any():
        if mask.all():
            return BestSqueezing(psi_opt=0.0, s_min=math.inf)
        # left eigenvector of the surviving mode is orthogonal to the marginal one
        k = int(np.flatnonzero(~mask)[0])
        left = linalg.inv(right)[k]
        phase = left[np.argmax(np.abs(left))]
        v = (left / phase * abs(phase)).real
        psi = math.atan2(v[1], v[0]) % math.pi
    else:
        c_out = output_correlation(sys, omega)
        form = 0.5 * (c_out + c_out.T).real
        vals, vecs = linalg.eigh(form)
        if abs(vals[1] - vals[0]) < 1e-12 * max(1.0, abs(vals[1])):
            psi = 0.0
        else:
            v = vecs[:, 0]
            psi = math.atan2(v[1], v[0]) % math.pi
    if math.isclose(psi, math.pi):
        psi = 0.0
    return BestSqueezing(psi_opt=psi, s_min=quadrature_spectrum(sys, psi, omega))


def scan_best_squeezing(sys: ReducedLinearSystem, omega: float = 0.0, step_deg: float = 1.0) -> BestSqueezing:
    """Grid-scan minimum over psi in [0, pi)."""
    angles = np.deg2rad(np.arange(0.0, 180.0, step_deg))
    values = [quadrature_spectrum(sys, float(psi), omega) for psi in angles]
    k = int(np.argmin(values))
    return BestSqueezing(psi_opt=float(angles[k]), s_min=float(values[k]))


def analytic_number_spectrum(omega: float, gamma: float, n_plus_mean: float) -> float:
    """Noise of the conserved number difference: gamma <N+> (1 - 4 gamma^2 / (omega^2 + 4 gamma^2))."""
    if n_plus_mean < 0:
        raise ValueError(f"<N+> must be nonnegative, got {n_plus_mean}")
    return gamma * n_plus_mean * (1.0 - 4.0 * gamma**2 / (omega**2 + 4.0 * gamma**2))


def mean_n_plus(hexagon: HexSteadyState) -> float:
    """<N+> of the four modes in N_i + N_{i+1} + N_{i+3} + N_{i+4}, saturation-scaled."""
    return 4.0 * hexagon.beta_mag**2


def _lorentzian(omega, a, b, c):
    return a - b / (omega**2 + c)


def lorentzian_fit(points: Sequence[SpectrumPoint]) -> LorentzianFit:
    """
    Least-squares fit of S(omega) = a - b / (omega^2 + c).

    Goodness is the coefficient of determination; a failed or degenerate
    fit (c <= 0) is reported with goodness 0.
    """
    if len(points) < 4:
        raise ValueError(f"need at least 4 points for a Lorentzian fit, got {len(points)}")
    omega = np.array([p.omega for p in points])
    s = np.array([p.s for p in points])
    order = np.argsort(omega)
    omega, s = omega[order], s[order]

    a0 = s[-1]
    depth = a0 - s.min()
    half = np.flatnonzero(s >= s.min() + 0.5 * depth) if depth > 0 else np.array([])
    w_half = omega[half[0]] if half.size else 1.0
    c0 = w_half**2 if w_half > 0 else 1.0
    p0 = (a0, depth * c0, c0)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            params, _ = curve_fit(_lorentzian, omega, s, p0=p0, maxfev=20000,
                                  ftol=1e-12, xtol=1e-12)
    except (RuntimeError, ValueError) as exc:
        log.info("lorentzian fit failed", error=str(exc))
        return LorentzianFit(a=math.nan, b=math.nan, c=math.nan, goodness=0.0)

    a, b, c = (float(x) for x in params)
    if c <= 0:
        return LorentzianFit(a=a, b=b, c=c, goodness=0.0)
    ss_res = float(np.sum((s - _lorentzian(omega, a, b, c)) ** 2))
    ss_tot = float(np.sum((s - s.mean()) ** 2))
    goodness = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res < 1e-24 else 0.0)
    return LorentzianFit(a=a, b=b, c=c, goodness=goodness)
