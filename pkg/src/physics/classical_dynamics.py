"""
Classical Seven-Mode Dynamics

Fixed-step RK4 integration of the coupled mode equations of the driven Kerr
cavity, slow drive sweeps for the hysteresis cycle, and extraction of the
hexagonal steady state from a converged run.

The numerical kernels are compiled with numba; the Python layer wraps them
with validation, logging and domain types.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import structlog
from numba import njit

from src.models.domain import (
    DriveRamp,
    HexSteadyState,
    IntegrationResult,
    ModeState,
    ModelParams,
    SweepPoint,
    SweepResult,
    wrap_angle,
)
from src.models.errors import ConvergenceError, DivergenceError, NoHexagonError, SymmetryError
from src.physics.model_core import homogeneous_state, wave_vectors

log = structlog.get_logger(__name__)

RUNAWAY = 1e8


# ============================================================================
# KERNELS
# ============================================================================

@njit(cache=True, nogil=True)
def _op(i, j):
    return (i + j - 1) % 6 + 1


@njit(cache=True, nogil=True)
def rhs_kernel(a, e_in, delta, hex_det, out):
    # Mode 0 reads alpha_0^* alpha_0^2 in its self-phase term.
    a0 = a[0]
    s = 0.0
    for j in range(1, 7):
        s += a[j].real * a[j].real + a[j].imag * a[j].imag
    p = 0.0j
    t = 0.0j
    for j in range(1, 7):
        p += a[j] * a[_op(j, 3)]
        t += np.conj(a[j]) * a[_op(j, 1)] * a[_op(j, 5)]
    a0c = np.conj(a0)
    n0 = a0.real * a0.real + a0.imag * a0.imag
    out[0] = (e_in - complex(1.0, delta) * a0 + 1j * a0c * a0 * a0
              + 2j * a0 * s + 1j * a0c * p + 2j * t)

    for j in range(1, 7):
        aj = a[j]
        j1 = _op(j, 1)
        j2 = _op(j, 2)
        j3 = _op(j, 3)
        j4 = _op(j, 4)
        j5 = _op(j, 5)
        nj = aj.real * aj.real + aj.imag * aj.imag
        others = s - nj
        out[j] = (-complex(1.0, hex_det) * aj + 1j * np.conj(aj) * aj * aj
                  + 2j * aj * n0 + 2j * aj * others
                  + 2j * np.conj(a[j3]) * (a[j4] * a[j1] + a[j5] * a[j2])
                  + 1j * a0 * a0 * np.conj(a[j3])
                  + 2j * a0c * a[j5] * a[j1]
                  + 2j * a0 * (np.conj(a[j4]) * a[j5] + a[j1] * np.conj(a[j2])))


@njit(cache=True, nogil=True)
def _rk4_step(a, h, e_in, delta, hex_det, k1, k2, k3, k4, tmp):
    rhs_kernel(a, e_in, delta, hex_det, k1)
    for i in range(7):
        tmp[i] = a[i] + 0.5 * h * k1[i]
    rhs_kernel(tmp, e_in, delta, hex_det, k2)
    for i in range(7):
        tmp[i] = a[i] + 0.5 * h * k2[i]
    rhs_kernel(tmp, e_in, delta, hex_det, k3)
    for i in range(7):
        tmp[i] = a[i] + h * k3[i]
    rhs_kernel(tmp, e_in, delta, hex_det, k4)
    for i in range(7):
        a[i] = a[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True, nogil=True)
def _healthy(a, limit):
    for i in range(7):
        x = a[i]
        if not (np.isfinite(x.real) and np.isfinite(x.imag)):
            return False
        if abs(x) > limit:
            return False
    return True


@njit(cache=True, nogil=True)
def _rk4_evolve(a, n_steps, h, t0, i0, rate, phase, delta0, track_delta, hex_det):
    """Advance a in place; drive intensity i0 + rate*t, constant over each step. Returns failing step or -1."""
    k1 = np.empty(7, np.complex128)
    k2 = np.empty(7, np.complex128)
    k3 = np.empty(7, np.complex128)
    k4 = np.empty(7, np.complex128)
    tmp = np.empty(7, np.complex128)
    rot = complex(math.cos(phase), math.sin(phase))
    for n in range(n_steps):
        t = t0 + n * h
        intensity = i0 + rate * t
        if intensity < 0.0:
            intensity = 0.0
        e_in = math.sqrt(intensity) * rot
        delta = intensity if track_delta else delta0
        _rk4_step(a, h, e_in, delta, hex_det, k1, k2, k3, k4, tmp)
        if not _healthy(a, RUNAWAY):
            return n
    return -1


@njit(cache=True, nogil=True)
def _relax(a, max_steps, h, e_in, delta, hex_det, tol, patience):
    """Integrate until max|rhs| < tol for `patience` consecutive steps. Returns (steps, converged, failed)."""
    k1 = np.empty(7, np.complex128)
    k2 = np.empty(7, np.complex128)
    k3 = np.empty(7, np.complex128)
    k4 = np.empty(7, np.complex128)
    tmp = np.empty(7, np.complex128)
    streak = 0
    for n in range(max_steps):
        rhs_kernel(a, e_in, delta, hex_det, k1)
        worst = 0.0
        for i in range(7):
            v = abs(k1[i])
            if v > worst:
                worst = v
        if worst < tol:
            streak += 1
            if streak >= patience:
                return n, True, False
        else:
            streak = 0
        _rk4_step(a, h, e_in, delta, hex_det, k1, k2, k3, k4, tmp)
        if not _healthy(a, RUNAWAY):
            return n, False, True
    return max_steps, False, False


# ============================================================================
# PYTHON API
# ============================================================================

def rhs(state: ModeState, params: ModelParams) -> ModeState:
    """d(alpha)/d(gamma t) for all seven modes."""
    out = np.empty(7, dtype=np.complex128)
    rhs_kernel(np.array(state.alpha, dtype=np.complex128), complex(params.e_in),
               float(params.delta), float(params.hex_detuning), out)
    return ModeState(out)


def integrate(
    state0: ModeState,
    params: ModelParams,
    step: float = 1e-3,
    duration: float = 1.0,
    drive_ramp: Optional[DriveRamp] = None,
    record_every: Optional[int] = None,
) -> IntegrationResult:
    """
    Fixed-step RK4 evolution of the classical mode equations.

    Args:
        state0: Initial amplitudes
        params: Cavity parameters (drive and detuning, unless drive_ramp overrides them)
        step: Integration step in units of 1/gamma
        duration: Total time in units of 1/gamma
        drive_ramp: Optional linear schedule of |E_in|^2
        record_every: If set, store the state every that many steps

    Returns:
        IntegrationResult with the final state and, optionally, the trajectory
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if duration < step:
        raise ValueError(f"duration {duration} shorter than step {step}")

    n_total = int(round(duration / step))
    if drive_ramp is not None:
        i0, rate, phase = drive_ramp.start, drive_ramp.rate, drive_ramp.phase
        track = drive_ramp.track_delta
    else:
        i0, rate = params.drive_intensity, 0.0
        phase = float(np.angle(params.e_in))
        track = False

    a = np.array(state0.alpha, dtype=np.complex128)
    chunk = record_every or n_total
    times = [0.0] if record_every else None
    frames = [a.copy()] if record_every else None

    done = 0
    while done < n_total:
        n = min(chunk, n_total - done)
        failed = _rk4_evolve(a, n, step, done * step, i0, rate, phase,
                             float(params.delta), track, float(params.hex_detuning))
        if failed >= 0:
            t_fail = (done + failed + 1) * step
            log.warning("integration diverged", time=t_fail)
            raise DivergenceError(t_fail)
        done += n
        if record_every:
            times.append(done * step)
            frames.append(a.copy())

    return IntegrationResult(
        final=ModeState(a),
        time=done * step,
        steps=done,
        times=np.array(times) if times is not None else None,
        trajectory=np.array(frames) if frames is not None else None,
    )


def converge(
    state0: ModeState,
    params: ModelParams,
    step: float = 1e-3,
    tol: float = 1e-9,
    max_time: float = 1e4,
    patience: int = 100,
) -> IntegrationResult:
    """Integrate at fixed parameters until max|rhs| < tol holds for `patience` consecutive steps."""
    a = np.array(state0.alpha, dtype=np.complex128)
    max_steps = int(round(max_time / step))
    steps, ok, failed = _relax(a, max_steps, step, complex(params.e_in), float(params.delta),
                               float(params.hex_detuning), tol, patience)
    if failed:
        raise DivergenceError((steps + 1) * step)
    log.debug("relaxation finished", steps=steps, converged=ok, time=steps * step)
    return IntegrationResult(final=ModeState(a), time=steps * step, steps=steps, converged=bool(ok))


def seed_pattern(seed: int = 0, amplitude: float = 1e-6) -> np.ndarray:
    """Deterministic hexagonal-mode perturbation amplitude * exp(i phi_j)."""
    rng = np.random.default_rng(seed)
    return amplitude * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=6))


def sweep(
    params: ModelParams,
    drive_range: tuple[float, float],
    direction: str = "forward",
    ramp_rate: float = 5e-6,
    step: float = 1e-2,
    record_step: float = 1e-2,
    seed: int = 0,
    seed_amplitude: float = 1e-6,
    track_delta: bool = True,
    start_state: Optional[ModeState] = None,
) -> SweepResult:
    """
    Slow linear sweep of |E_in|^2 across drive_range, recording the branch.

    Forward sweeps start on the homogeneous branch plus a seeded perturbation,
    re-seeded whenever the hexagonal modes have decayed below the seed
    amplitude. Backward sweeps start from a hexagon converged at the upper end
    unless start_state is given.
    """
    low, high = drive_range
    if not 0 <= low < high:
        raise ValueError(f"drive range must satisfy 0 <= low < high, got {drive_range}")
    if ramp_rate <= 0 or step <= 0 or record_step <= 0:
        raise ValueError("ramp_rate, step and record_step must be positive")
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown sweep direction: {direction}")

    forward = direction == "forward"
    start = low if forward else high
    rate = ramp_rate if forward else -ramp_rate
    here = params.with_drive(start, track_delta=track_delta)
    pattern = seed_pattern(seed, seed_amplitude)

    if start_state is not None:
        state = start_state
    elif forward:
        state = ModeState.homogeneous(homogeneous_state(here).a0, pattern)
    else:
        state = find_hexagon(here, seed=seed, step=step).to_mode_state()

    log.info("sweep starting", direction=direction, start=start, rate=rate,
             duration=(high - low) / ramp_rate)

    n_records = int(math.floor((high - low) / record_step + 1e-9))
    steps_per_record = max(1, int(round(record_step / ramp_rate / step)))
    ramp = DriveRamp(start=start, rate=rate, phase=float(np.angle(here.e_in)), track_delta=track_delta)

    a = np.array(state.alpha, dtype=np.complex128)
    points = [SweepPoint(e_in_sq=start, beta_mag=float(np.mean(np.abs(a[1:]))),
                         beta0_mag=float(abs(a[0])))]
    t = 0.0
    for k in range(1, n_records + 1):
        if forward and np.max(np.abs(a[1:])) < seed_amplitude:
            a[1:] = pattern
        failed = _rk4_evolve(a, steps_per_record, step, t, ramp.start, ramp.rate, ramp.phase,
                             float(here.delta), track_delta, float(here.hex_detuning))
        if failed >= 0:
            raise DivergenceError(t + (failed + 1) * step)
        t += steps_per_record * step
        drive = ramp.intensity_at(t)
        points.append(SweepPoint(e_in_sq=drive, beta_mag=float(np.mean(np.abs(a[1:]))),
                                 beta0_mag=float(abs(a[0]))))

    result = SweepResult(direction=direction, points=points)
    log.info("sweep finished", direction=direction, points=len(points))
    return result


def extract_hexagon(state: ModeState, tol: float = 1e-6) -> HexSteadyState:
    """
    Check the hexagon symmetries of a converged state and return its parameters.

    Conditions, in order: equal hexagonal intensities, phase sums of symmetric
    modes equal to 2 phi, and phi_1 + phi_3 + phi_5 = 3 phi. Angles are compared
    on wrapped differences.
    """
    hexagonal = state.hexagonal
    mags = np.abs(hexagonal)
    beta_mag = float(np.mean(mags))
    if beta_mag < 1e-9:
        raise NoHexagonError(f"hexagonal modes vanish (|beta| = {beta_mag:.3e})")

    intensity_dev = float(np.max(np.abs(mags - beta_mag)))
    if intensity_dev > tol:
        raise SymmetryError("intensity", intensity_dev, tol)

    theta = np.angle(hexagonal)
    odd_sum = theta[0] + theta[2] + theta[4]
    half = 0.5 * (theta[0] + theta[3])
    phi = min((half, half + math.pi), key=lambda c: abs(wrap_angle(3.0 * c - odd_sum)))

    sum_dev = max(abs(wrap_angle(theta[j] + theta[j + 3] - 2.0 * phi)) for j in range(3))
    if sum_dev > tol:
        raise SymmetryError("sumphases", sum_dev, tol)

    diff_dev = max(abs(wrap_angle(odd_sum - 3.0 * phi)),
                   abs(wrap_angle(theta[1] + theta[3] + theta[5] - 3.0 * phi)))
    if diff_dev > tol:
        raise SymmetryError("diffphases", diff_dev, tol)

    return HexSteadyState(
        beta0=state.a0,
        beta_mag=beta_mag,
        phi=phi,
        dphi1=2.0 * wrap_angle(theta[0] - phi),
        dphi3=2.0 * wrap_angle(theta[2] - phi),
    )


def gauge_translate(hexagon: HexSteadyState) -> HexSteadyState:
    """Rigid transverse translation zeroing both free phase differences."""
    return hexagon.model_copy(update={"dphi1": 0.0, "dphi3": 0.0})


def translation_vector(dphi1: float, dphi3: float, kc: float = 1.0) -> np.ndarray:
    """Displacement dx with k_1.dx = dphi1/2 and k_3.dx = dphi3/2."""
    k = wave_vectors(kc)
    return np.linalg.solve(np.vstack([k[0], k[2]]), np.array([dphi1, dphi3]) / 2.0)


def find_hexagon(
    params: ModelParams,
    seed: int = 0,
    amplitude: float = 0.2,
    step: float = 1e-2,
    tol: float = 1e-9,
    max_time: float = 2e4,
    symmetry_tol: float = 1e-6,
) -> HexSteadyState:
    """Integrate from a seeded pattern on the homogeneous state to a converged hexagon."""
    start = ModeState.homogeneous(homogeneous_state(params).a0, seed_pattern(seed, amplitude))
    result = converge(start, params, step=step, tol=tol, max_time=max_time)
    if float(np.max(np.abs(result.final.hexagonal))) < 1e-6:
        raise NoHexagonError(f"pattern decays at |E_in|^2 = {params.drive_intensity:.6g}")
    if not result.converged:
        raise ConvergenceError(
            f"no steady state within t = {max_time:g} at |E_in|^2 = {params.drive_intensity:.6g}",
            residual=rhs(result.final, params).max_abs(),
        )
    return extract_hexagon(result.final, symmetry_tol)
