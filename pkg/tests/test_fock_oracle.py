import numpy as np
import pytest

from src.models.errors import BasisError, PhysicsDomainError
from src.models.fock import FockBasis, SparseOperator
from src.physics.fock_oracle import (
    build_free_and_drive,
    build_interaction,
    commutator_norm,
    conservation_report,
    interaction_terms,
    ladder,
    ladder_defect,
    number,
    number_combination,
)

SMALL = (2, 1, 1, 1, 1, 1, 1)
LARGER = (3, 2, 2, 2, 2, 2, 2)


@pytest.fixture(scope="module")
def small_basis():
    return FockBasis(SMALL)


class TestFockBasis:
    def test_size_and_order(self, small_basis):
        assert small_basis.size == 3 * 2**6
        assert tuple(small_basis.states[0]) == (0,) * 7
        assert tuple(small_basis.states[1]) == (0, 0, 0, 0, 0, 0, 1)
        assert small_basis.index[(2, 1, 1, 1, 1, 1, 1)] == small_basis.size - 1

    def test_total_cutoff(self):
        basis = FockBasis(SMALL, total_cutoff=1)
        assert basis.size == 8
        assert basis.states.sum(axis=1).max() == 1

    def test_size_cap(self):
        with pytest.raises(BasisError, match="exceeds cap"):
            FockBasis((3,) * 7, max_size=100)

    @pytest.mark.parametrize("cutoffs", [(1,) * 6, (1, 1, 1, -1, 1, 1, 1)])
    def test_invalid_cutoffs(self, cutoffs):
        with pytest.raises(BasisError):
            FockBasis(cutoffs)


class TestLadderOperators:
    def test_number_from_ladder(self, small_basis):
        for mode in range(7):
            a = ladder(mode, small_basis)
            assert (a.dagger() @ a - number(mode, small_basis)).max_abs() < 1e-12

    def test_canonical_commutator_below_cutoff(self, small_basis):
        assert all(ladder_defect(mode, small_basis) < 1e-12 for mode in range(7))

    def test_mismatched_bases(self, small_basis):
        other = FockBasis(LARGER)
        with pytest.raises(BasisError):
            commutator_norm(number(0, small_basis), number(0, other))

    def test_operator_shape_checked(self, small_basis):
        with pytest.raises(BasisError):
            SparseOperator.identity(small_basis) @ SparseOperator.identity(FockBasis((1,) * 7))


class TestHamiltonian:
    def test_hermitian(self, small_basis):
        assert build_interaction(0.1, 1.0, small_basis).is_hermitian()
        assert build_free_and_drive(1.2, 0.8 + 0.3j, small_basis).is_hermitian()

    def test_vacuum_is_annihilated(self, small_basis):
        column = build_interaction(0.1, 1.0, small_basis).matrix.toarray()[:, 0]
        assert tuple(small_basis.states[0]) == (0,) * 7
        np.testing.assert_array_equal(column, 0.0)

    def test_pair_creation_matrix_element(self, small_basis):
        g, gamma = 0.3, 1.7
        fwm1 = interaction_terms(g, gamma, small_basis)["fwm1"].matrix.toarray()
        pump = small_basis.index[(2, 0, 0, 0, 0, 0, 0)]
        pair = small_basis.index[(0, 1, 0, 0, 1, 0, 0)]
        assert fwm1[pair, pump] == pytest.approx(-gamma * g * np.sqrt(2.0), abs=1e-14)
        assert fwm1[pump, pair] == pytest.approx(np.conj(fwm1[pair, pump]), abs=1e-14)

    def test_mode_zero_cutoff_precondition(self):
        basis = FockBasis((1,) * 7)
        with pytest.raises(BasisError):
            build_interaction(0.1, 1.0, basis)
        with pytest.raises(BasisError):
            interaction_terms(0.1, 1.0, basis)

    def test_number_combination_index(self, small_basis):
        with pytest.raises(PhysicsDomainError):
            number_combination(0, small_basis)


class TestConservation:
    @pytest.mark.parametrize("cutoffs", [SMALL, LARGER])
    def test_n_minus_commutes_with_hamiltonian(self, cutoffs):
        basis = FockBasis(cutoffs)
        rng = np.random.default_rng(2024)
        for _ in range(3):
            g, delta = rng.uniform(0.01, 1.0), rng.uniform(-2.0, 2.0)
            e_in = complex(*rng.normal(size=2))
            total = build_interaction(g, 1.0, basis) + build_free_and_drive(delta, e_in, basis)
            for i in range(1, 7):
                assert commutator_norm(number_combination(i, basis), total) < 1e-12

    def test_pair_difference_not_conserved(self, small_basis):
        fwm3 = interaction_terms(0.1, 1.0, small_basis)["fwm3"]
        diff = number(1, small_basis) - number(4, small_basis)
        assert commutator_norm(diff, fwm3) > 1e-3

    def test_report(self, small_basis):
        rows = conservation_report(0.1, 1.0, 1.2, 1.1, small_basis)
        assert all(r.passed for r in rows)
        by_key = {(r.observable, r.operator): r for r in rows}
        assert by_key[("N-(1)", "H_total")].expected == "zero"
        assert by_key[("N1-N4", "fwm3")].norm > 1e-3
        assert len(rows) == 6 * 7 + 1 + 7
