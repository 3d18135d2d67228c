"""
Fock-Space Oracle

Exact sparse representation of the discretized seven-mode Hamiltonian in a
truncated Fock basis, used to check that the photon-number combination

    N_- = N_i + N_{i+1} - N_{i+3} - N_{i+4}

commutes with every piece of the Hamiltonian. hbar = 1; gamma and g are
plain prefactors. Drive amplitudes are in photon units.
"""

from __future__ import annotations

from typing import Dict, List, Literal

import numpy as np
import structlog
from pydantic import BaseModel

from src.models.domain import HEX_DETUNING
from src.models.errors import BasisError, PhysicsDomainError
from src.models.fock import FockBasis, SparseOperator
from src.physics.model_core import oplus

log = structlog.get_logger(__name__)

INTERACTION_TERMS = ("spm", "cpm", "fwm1", "fwm2", "fwm3")


class ConservationRow(BaseModel):
    observable: str
    operator: str
    norm: float
    expected: Literal["zero", "nonzero"]
    passed: bool


def ladder(mode: int, basis: FockBasis) -> SparseOperator:
    """Truncated annihilation operator a_mode."""
    states = basis.states
    cols = np.flatnonzero(states[:, mode] > 0)
    lowered = states[cols].copy()
    lowered[:, mode] -= 1
    rows = [basis.index[tuple(int(n) for n in s)] for s in lowered]
    values = np.sqrt(states[cols, mode].astype(float))
    return SparseOperator.from_triplets(basis, rows, cols, values)


def number(mode: int, basis: FockBasis) -> SparseOperator:
    return SparseOperator.diagonal(basis, basis.states[:, mode].astype(float))


def interaction_terms(g: float, gamma: float, basis: FockBasis) -> Dict[str, SparseOperator]:
    """The five pieces of the discretized Kerr interaction, keyed spm, cpm, fwm1, fwm2, fwm3."""
    if basis.cutoffs[0] < 2:
        raise BasisError(
            f"mode-0 cutoff must be at least 2 for the four-wave-mixing terms, got {basis.cutoffs[0]}"
        )
    a = [ladder(m, basis) for m in range(7)]
    ad = [op.dagger() for op in a]
    n = [number(m, basis) for m in range(7)]
    zero = SparseOperator(basis, number(0, basis).matrix * 0)

    spm = zero
    for j in range(7):
        spm = spm + ad[j] @ ad[j] @ a[j] @ a[j]
    spm = spm * (-gamma * g / 2.0)

    cpm = zero
    for i in range(7):
        for j in range(i + 1, 7):
            cpm = cpm + n[i] @ n[j]
    cpm = cpm * (-2.0 * gamma * g)

    fwm1 = zero
    for j in range(1, 4):
        fwm1 = fwm1 + a[0] @ a[0] @ ad[j] @ ad[oplus(j, 3)]
    fwm1 = (fwm1 + fwm1.dagger()) * (-gamma * g)

    fwm2 = zero
    for i in range(1, 4):
        for j in range(i + 1, 4):
            fwm2 = fwm2 + a[i] @ a[oplus(i, 3)] @ ad[j] @ ad[oplus(j, 3)]
    fwm2 = (fwm2 + fwm2.dagger()) * (-2.0 * gamma * g)

    fwm3 = zero
    for j in range(1, 7):
        fwm3 = fwm3 + a[0] @ a[j] @ ad[oplus(j, 1)] @ ad[oplus(j, 5)]
    fwm3 = (fwm3 + fwm3.dagger()) * (-2.0 * gamma * g)

    return {"spm": spm, "cpm": cpm, "fwm1": fwm1, "fwm2": fwm2, "fwm3": fwm3}


def build_interaction(g: float, gamma: float, basis: FockBasis) -> SparseOperator:
    """Full interaction Hamiltonian, Hermitian by construction."""
    terms = interaction_terms(g, gamma, basis)
    total = terms["spm"]
    for name in INTERACTION_TERMS[1:]:
        total = total + terms[name]
    return total


def build_free_and_drive(
    delta: float,
    e_in: complex,
    basis: FockBasis,
    gamma: float = 1.0,
    hex_detuning: float = HEX_DETUNING,
) -> SparseOperator:
    """gamma (delta N_0 + hex_detuning sum_j N_j) + i gamma (e_in a_0^+ - e_in^* a_0)."""
    if basis.cutoffs[0] < 2:
        raise BasisError(f"mode-0 cutoff must be at least 2, got {basis.cutoffs[0]}")
    occ = basis.states
    diag = gamma * (delta * occ[:, 0] + hex_detuning * occ[:, 1:].sum(axis=1))
    free = SparseOperator.diagonal(basis, diag.astype(float))
    if e_in == 0:
        return free
    a0 = ladder(0, basis)
    drive = (a0.dagger() * e_in - a0 * np.conj(e_in)) * (1j * gamma)
    return free + drive


def number_combination(i: int, basis: FockBasis) -> SparseOperator:
    """N_i + N_{i+1} - N_{i+3} - N_{i+4} as a diagonal operator."""
    if not 1 <= i <= 6:
        raise PhysicsDomainError(f"number combination needs a hexagonal mode index, got {i}")
    occ = basis.states
    values = occ[:, i] + occ[:, oplus(i, 1)] - occ[:, oplus(i, 3)] - occ[:, oplus(i, 4)]
    return SparseOperator.diagonal(basis, values.astype(float))


def commutator_norm(a: SparseOperator, b: SparseOperator) -> float:
    """Largest absolute entry of ab - ba."""
    if a.basis != b.basis:
        raise BasisError("commutator of operators on different bases")
    return (a @ b - b @ a).max_abs()


def ladder_defect(mode: int, basis: FockBasis) -> float:
    """Largest deviation of [a, a^+] from the identity on states below the cutoff shell."""
    a = ladder(mode, basis)
    comm = (a @ a.dagger() - a.dagger() @ a).matrix.tocsr()
    keep = np.flatnonzero(basis.below_cutoff(mode))
    block = comm[keep][:, keep].toarray() - np.eye(keep.size)
    leak = comm[keep].toarray()
    leak[:, keep] = 0.0
    return float(max(np.max(np.abs(block), initial=0.0), np.max(np.abs(leak), initial=0.0)))


def conservation_report(
    g: float,
    gamma: float,
    delta: float,
    e_in: complex,
    basis: FockBasis,
    tol: float = 1e-12,
) -> List[ConservationRow]:
    """
    Commutator checks of the conserved combination against the Hamiltonian.

    Rows cover N_-(i) for i = 1..6 against the total Hamiltonian and each of
    its pieces, the non-conserved difference N_1 - N_4 against the third
    four-wave-mixing term, and the ladder algebra of every mode.
    """
    terms = interaction_terms(g, gamma, basis)
    terms["free_drive"] = build_free_and_drive(delta, e_in, basis, gamma)
    total = terms["spm"]
    for name in list(terms)[1:]:
        total = total + terms[name]

    rows: List[ConservationRow] = []

    def add(observable: str, operator: str, norm: float, expected: str) -> None:
        passed = norm < tol if expected == "zero" else norm > tol
        rows.append(ConservationRow(observable=observable, operator=operator, norm=norm,
                                    expected=expected, passed=passed))

    for i in range(1, 7):
        n_minus = number_combination(i, basis)
        add(f"N-({i})", "H_total", commutator_norm(n_minus, total), "zero")
        for name, op in terms.items():
            add(f"N-({i})", name, commutator_norm(n_minus, op), "zero")

    diff14 = number(1, basis) - number(4, basis)
    add("N1-N4", "fwm3", commutator_norm(diff14, terms["fwm3"]), "nonzero")

    for mode in range(7):
        add(f"[a{mode},a{mode}^+]-I", "below_cutoff", ladder_defect(mode, basis), "zero")

    failed = sum(not r.passed for r in rows)
    log.info("conservation report", basis_size=basis.size, rows=len(rows), failed=failed)
    return rows
