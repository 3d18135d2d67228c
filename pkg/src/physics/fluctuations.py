"""
Linearized Quantum Fluctuations

Drift matrices for small fluctuations around a classical state: the full
14x14 system on (da_0..da_6, da_0^+..da_6^+) and the closed 2x2 systems of
the W, Q(i) and X(i) mode combinations.

Matrices are dimensionless (time in units of 1/gamma) unless stated; the
reduced drift M carries the factor gamma.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import structlog

from src.models.domain import (
    HEX_DETUNING,
    N_MODES,
    EmbedCheck,
    FullLinearSystem,
    HexSteadyState,
    ModeState,
    ReducedLinearSystem,
)
from src.models.errors import GaugeError, SpectrumConsistencyError
from src.physics.model_core import oplus

log = structlog.get_logger(__name__)

PRINTED_TOL = 1e-12


def drift_blocks(state: ModeState, delta: float, hex_detuning: float = HEX_DETUNING) -> tuple[np.ndarray, np.ndarray]:
    """
    Jacobian blocks of the classical drift at an arbitrary seven-mode state.

    Returns (J, K) with d(da)/dt = J da + K da^+, i.e. J = df/d(alpha) and
    K = df/d(alpha^*).
    """
    a = np.asarray(state.alpha)
    ac = a.conj()
    a0, a0c = a[0], ac[0]
    hexes = range(1, 7)
    s = float(np.sum(np.abs(a[1:]) ** 2))
    p = sum(a[j] * a[oplus(j, 3)] for j in hexes)

    jac = np.zeros((N_MODES, N_MODES), dtype=complex)
    kac = np.zeros((N_MODES, N_MODES), dtype=complex)

    # homogeneous mode
    jac[0, 0] = -complex(1.0, delta) + 2j * abs(a0) ** 2 + 2j * s
    kac[0, 0] = 1j * a0**2 + 1j * p
    for m in hexes:
        m1, m2, m3, m4, m5 = (oplus(m, k) for k in range(1, 6))
        jac[0, m] = (2j * a0 * ac[m] + 2j * a0c * a[m3]
                     + 2j * (ac[m5] * a[m4] + ac[m1] * a[m2]))
        kac[0, m] = 2j * a0 * a[m] + 2j * a[m1] * a[m5]

    # hexagonal modes
    for j in hexes:
        j1, j2, j3, j4, j5 = (oplus(j, k) for k in range(1, 6))
        jac[j, 0] = (2j * a[j] * a0c + 2j * a0 * ac[j3]
                     + 2j * (ac[j4] * a[j5] + a[j1] * ac[j2]))
        kac[j, 0] = 2j * a[j] * a0 + 2j * a[j5] * a[j1]

        for m in hexes:
            if m == j:
                continue
            jac[j, m] = 2j * a[j] * ac[m]
            kac[j, m] = 2j * a[j] * a[m]
        jac[j, j] = (-complex(1.0, hex_detuning) + 2j * abs(a[j]) ** 2
                     + 2j * abs(a0) ** 2 + 2j * (s - abs(a[j]) ** 2))
        kac[j, j] = 1j * a[j] ** 2

        jac[j, j1] += 2j * ac[j3] * a[j4] + 2j * a0c * a[j5] + 2j * a0 * ac[j2]
        jac[j, j2] += 2j * ac[j3] * a[j5]
        jac[j, j4] += 2j * ac[j3] * a[j1]
        jac[j, j5] += 2j * ac[j3] * a[j2] + 2j * a0c * a[j1] + 2j * a0 * ac[j4]

        kac[j, j3] += 2j * (a[j4] * a[j1] + a[j5] * a[j2]) + 1j * a0**2
        kac[j, j4] += 2j * a0 * a[j5]
        kac[j, j2] += 2j * a0 * a[j1]

    return jac, kac


def full_drift(state: ModeState, delta: float, hex_detuning: float = HEX_DETUNING) -> np.ndarray:
    jac, kac = drift_blocks(state, delta, hex_detuning)
    return np.block([[jac, kac], [kac.conj(), jac.conj()]])


def printed_drift(hexagon: HexSteadyState, delta: float, hex_detuning: float = HEX_DETUNING) -> np.ndarray:
    """
    14x14 drift assembled from the tabulated coefficients of the gauged hexagon.

    Every hexagonal mode carries the same amplitude beta, so each row is a
    fixed pattern of coefficients over j, j+1, ..., j+5. The homogeneous row's
    coupling to da_j^+ includes 2i beta^2 (the tabulated entry lists only
    2i beta_0 beta); with it, K is symmetric as the da_j row requires.
    """
    if not hexagon.is_gauged:
        raise GaugeError("the tabulated drift needs a hexagon in the zero-phase-difference gauge")
    b0, b = complex(hexagon.beta0), hexagon.beta
    b0c, bc = b0.conjugate(), b.conjugate()
    nb0, nb = abs(b0) ** 2, abs(b) ** 2
    cross = 2j * b0 * bc + 2j * b0c * b + 4j * nb
    pair = 2j * b0 * b + 2j * b**2

    jac = np.zeros((N_MODES, N_MODES), dtype=complex)
    kac = np.zeros((N_MODES, N_MODES), dtype=complex)
    jac[0, 0] = -1 - 1j * delta + 2j * nb0 + 12j * nb
    kac[0, 0] = 1j * b0**2 + 6j * b**2
    jac[0, 1:] = cross
    kac[0, 1:] = pair

    # coefficients of da_{j+k} and da_{j+k}^+ for k = 0..5
    same = [-1 - 1j * hex_detuning + 2j * nb0 + 12j * nb, cross, 4j * nb, 2j * nb, 4j * nb, cross]
    conj = [1j * b**2, 2j * b**2, pair, 1j * b0**2 + 6j * b**2, pair, 2j * b**2]
    for j in range(1, 7):
        jac[j, 0] = cross
        kac[j, 0] = pair
        for k in range(6):
            m = j if k == 0 else oplus(j, k)
            jac[j, m] = same[k]
            kac[j, m] = conj[k]
    return np.block([[jac, kac], [kac.conj(), jac.conj()]])


def build_full(hexagon: HexSteadyState, delta: float, gamma: float = 1.0) -> FullLinearSystem:
    """
    14x14 fluctuation drift around a hexagon in the zero-phase-difference gauge.

    The Jacobian of the mode equations is cross-checked against the tabulated
    coefficients; a mismatch raises SpectrumConsistencyError.
    """
    if not hexagon.is_gauged:
        raise GaugeError(
            f"hexagon not gauged (dphi1={hexagon.dphi1:.3e}, dphi3={hexagon.dphi3:.3e}); "
            "apply gauge_translate first"
        )
    drift = full_drift(hexagon.to_mode_state(), delta)
    deviation = float(np.max(np.abs(drift - printed_drift(hexagon, delta))))
    if deviation > PRINTED_TOL * max(1.0, float(np.max(np.abs(drift)))):
        raise SpectrumConsistencyError(f"drift deviates from the tabulated form by {deviation:.3e}")
    return FullLinearSystem(drift=drift, gamma=gamma)


# ============================================================================
# REDUCED SYSTEMS
# ============================================================================

def _quadrature_drift(a: complex, kstar: complex, gamma: float) -> np.ndarray:
    # dc/dt = a c + k c^+  ->  (Z(0), Z(pi/2)) drift with A+- = a +- k^*
    ap, am = a + kstar, a - kstar
    return gamma * np.array([[ap.real, -ap.imag], [am.imag, am.real]])


def _check_index(i: int) -> None:
    if not 1 <= i <= 6:
        raise ValueError(f"combination index must lie in 1..6, got {i}")


def _amplitudes(hexagon: HexSteadyState) -> tuple[complex, complex]:
    if not hexagon.is_gauged:
        raise GaugeError("reduced systems need a hexagon in the zero-phase-difference gauge")
    return complex(hexagon.beta0), hexagon.beta


def build_reduced_W(hexagon: HexSteadyState, gamma: float = 1.0) -> ReducedLinearSystem:
    """Alternating combination of all six hexagonal modes."""
    b0, b = _amplitudes(hexagon)
    b0c, bc = b0.conjugate(), b.conjugate()
    nb0, nb = abs(b0) ** 2, abs(b) ** 2
    a = -1 - 2j + 2j * nb0 + 10j * nb - 4j * b0 * bc - 4j * b0c * b
    kstar = -4j * b0c * bc + 5j * bc**2 + 1j * b0c**2
    return ReducedLinearSystem(m=_quadrature_drift(a, kstar, gamma), label="W", gamma=gamma)


def build_reduced_Q(hexagon: HexSteadyState, i: int = 1, gamma: float = 1.0) -> ReducedLinearSystem:
    """Combination (a_i + a_{i+3} - a_{i+1} - a_{i+4}) / 2."""
    _check_index(i)
    b0, b = _amplitudes(hexagon)
    b0c, bc = b0.conjugate(), b.conjugate()
    nb0, nb = abs(b0) ** 2, abs(b) ** 2
    a = -1 - 2j + 2j * nb0 + 6j * nb - 2j * b0 * bc - 2j * b0c * b
    kstar = 2j * b0c * bc - 3j * bc**2 - 1j * b0c**2
    return ReducedLinearSystem(m=_quadrature_drift(a, kstar, gamma), label=f"Q{i}", gamma=gamma)


def build_reduced_X(hexagon: HexSteadyState, i: int = 1, gamma: float = 1.0) -> ReducedLinearSystem:
    """Combination (a_i + a_{i+1} - a_{i+3} - a_{i+4}) / 2; carries the translation mode."""
    _check_index(i)
    b0, b = _amplitudes(hexagon)
    b0c, bc = b0.conjugate(), b.conjugate()
    nb0, nb = abs(b0) ** 2, abs(b) ** 2
    a = -1 - 2j + 2j * nb0 + 10j * nb + 2j * b0 * bc + 2j * b0c * b
    kstar = 2j * b0c * bc + 5j * bc**2 + 1j * b0c**2
    return ReducedLinearSystem(m=_quadrature_drift(a, kstar, gamma), label=f"X{i}", gamma=gamma)


def combination_vector(label: str) -> np.ndarray:
    """Real unit weights over all seven modes for 'W', 'Q<i>' or 'X<i>'."""
    w = np.zeros(N_MODES)
    if label == "W":
        w[1:] = [(-1) ** j for j in range(6)]
        return w / math.sqrt(6.0)
    if len(label) == 2 and label[0] in "QX" and label[1].isdigit():
        i = int(label[1])
        if label[0] == "Q":
            plus, minus = (i, oplus(i, 3)), (oplus(i, 1), oplus(i, 4))
        else:
            plus, minus = (i, oplus(i, 1)), (oplus(i, 3), oplus(i, 4))
        w[list(plus)] = 1.0
        w[list(minus)] = -1.0
        return w / 2.0
    raise ValueError(f"Unknown combination: {label}. Available: W, Q1..Q6, X1..X6")


def embed_check(
    full: FullLinearSystem,
    reduced: ReducedLinearSystem,
    weights: Optional[np.ndarray] = None,
) -> EmbedCheck:
    """
    Project the full drift onto the quadrature pair of a mode combination.

    Returns the largest coupling out of the two-dimensional subspace and the
    largest deviation of the projected 2x2 drift from the reduced one.
    """
    w = combination_vector(reduced.label) if weights is None else np.asarray(weights, dtype=float)
    w = w / np.linalg.norm(w)
    proj = np.vstack([
        np.concatenate([w, w]),
        np.concatenate([-1j * w, 1j * w]),
    ])
    pd = proj @ full.drift
    m_fit = pd @ proj.conj().T / 2.0
    out_coupling = float(np.max(np.abs(pd - m_fit @ proj)))
    m_deviation = float(np.max(np.abs(m_fit - reduced.m_dimensionless)))
    log.debug("embed check", label=reduced.label, out_coupling=out_coupling, m_deviation=m_deviation)
    return EmbedCheck(out_coupling=out_coupling, m_deviation=m_deviation)


def matrix_rows(full: FullLinearSystem):
    """Row-major (row, col, re, im) entries of the dimensionless drift."""
    n = full.drift.shape[0]
    for r in range(n):
        for c in range(n):
            z = full.drift[r, c]
            yield r, c, float(z.real), float(z.imag)
