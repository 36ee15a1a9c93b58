import numpy as np
import pytest
from hypothesis import given

from blockcoh.core import (
    BlockOperator,
    assemble,
    block,
    block_dephase,
    block_diagonal_unitary,
    block_state,
    block_view,
    contiguous_structure,
    decompose,
    haar_random_unitary,
    incoherent_mixture,
    make_block_structure,
    maximally_coherent_state,
    partial_trace,
    product_structure,
    random_density,
    random_state,
    tensor,
    uniform_structure,
)
from blockcoh.errors import (
    DimensionMismatch,
    EmptyGroup,
    IncompleteCover,
    NotADensityMatrix,
    NotNormalized,
    OverlappingGroups,
)
from blockcoh.core import check_density_matrix

from .conftest import seeds, structures


class TestBlockStructure:
    def test_contiguous_pair(self):
        s = make_block_structure([[0, 1], [2, 3]], 4)
        assert s.num_blocks == 2 and s.dims == (2, 2) and s.total_dim == 4
        assert s.is_contiguous()

    def test_non_contiguous_is_valid(self):
        s = make_block_structure([[0, 3], [1, 2]], 4)
        assert s.dims == (2, 2)
        assert not s.is_contiguous()
        assert list(s.block_of()) == [0, 1, 1, 0]

    def test_overlap_rejected(self):
        with pytest.raises(OverlappingGroups):
            make_block_structure([[0], [0, 1]], 2)

    def test_gap_rejected(self):
        with pytest.raises(IncompleteCover):
            make_block_structure([[0], [2]], 3)

    def test_empty_group_rejected(self):
        with pytest.raises(EmptyGroup):
            make_block_structure([[0, 1], []], 2)

    def test_projectors_resolve_identity(self):
        s = make_block_structure([[0, 3], [1], [2, 4]])
        total = sum(s.projector(mu) for mu in range(s.num_blocks))
        assert np.allclose(total, np.eye(5))
        for mu in range(3):
            for nu in range(3):
                p = s.projector(mu) @ s.projector(nu)
                assert np.allclose(p, s.projector(mu) if mu == nu else 0)

    def test_str(self):
        assert str(contiguous_structure([2, 2])) == "{0,1} | {2,3}"

    def test_product_structure_labels(self):
        a, b = uniform_structure(2, 1), uniform_structure(2, 2)
        p = product_structure(a, b)
        assert p.num_blocks == 4 and p.dims == (2, 2, 2, 2)
        assert p.groups[1] == (2, 3)


class TestBlockViews:
    @given(structures(), seeds)
    def test_view_assemble_roundtrip(self, s, seed):
        rng = np.random.default_rng(seed)
        d = s.total_dim
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        assert np.array_equal(assemble(block_view(a, s), s), a)

    def test_block_operator_checks_dims(self):
        with pytest.raises(DimensionMismatch):
            BlockOperator(np.eye(3), contiguous_structure([2, 2]))


class TestStates:
    def test_single_block_support(self):
        st = decompose([1, 0, 0, 0], contiguous_structure([2, 2]))
        assert np.allclose(st.weights, [1, 0])
        assert np.allclose(st.components[0], [1, 0])
        assert st.components[1] is None

    def test_uniform_vector(self):
        st = decompose([0.5] * 4, contiguous_structure([2, 2]))
        assert np.allclose(st.weights, [2**-0.5] * 2)
        assert np.allclose(st.components[1], [2**-0.5] * 2)

    def test_restriction_norms(self):
        v = np.array([np.sqrt(0.8), 0, 0, np.sqrt(0.2)])
        st = decompose(v, contiguous_structure([2, 2]))
        assert np.allclose(st.weights, [np.sqrt(0.8), np.sqrt(0.2)])

    def test_unnormalized_rejected(self):
        with pytest.raises(NotNormalized):
            decompose([1, 1, 0, 0], contiguous_structure([2, 2]))

    @given(structures(), seeds)
    def test_reassemble(self, s, seed):
        st = decompose(random_state(s.total_dim, seed), s)
        assert np.allclose(st.reassemble(), st.amplitudes)
        assert np.isclose(np.sum(st.probabilities), 1)

    def test_mc_default(self):
        assert np.allclose(maximally_coherent_state(contiguous_structure([2, 2])).amplitudes, [0.5] * 4)

    def test_mc_singletons_is_uniform(self):
        v = maximally_coherent_state(uniform_structure(5, 1)).amplitudes
        assert np.allclose(v, np.full(5, 5**-0.5))

    def test_mc_with_components(self):
        s = contiguous_structure([2, 1])
        v = maximally_coherent_state(s, [[1, 0], [1]]).amplitudes
        assert np.allclose(v, [2**-0.5, 0, 2**-0.5])

    def test_block_state_component_length(self):
        with pytest.raises(DimensionMismatch):
            block_state(contiguous_structure([2, 1]), [1, 0], [[1, 0], [1, 0]])


class TestDephasing:
    def test_fixed_point(self):
        s = contiguous_structure([2, 1])
        rho = incoherent_mixture(s, [0.3, 0.7], [np.eye(2) / 2, np.eye(1)])
        assert np.array_equal(block_dephase(rho, s), rho)

    def test_mc_decoheres_to_block_mixture(self):
        s = contiguous_structure([2, 2])
        out = block_dephase(maximally_coherent_state(s).density(), s)
        phi = np.full(2, 2**-0.5)
        expected = np.zeros((4, 4))
        expected[:2, :2] = expected[2:, 2:] = np.outer(phi, phi) / 2
        assert np.allclose(out, expected)

    @given(structures(), seeds)
    def test_projector_sandwich(self, s, seed):
        rho = random_density(s.total_dim, seed)
        expected = sum(s.projector(m) @ rho @ s.projector(m) for m in range(s.num_blocks))
        out = block_dephase(rho, s)
        assert np.allclose(out, expected, atol=1e-12)
        assert np.isclose(np.trace(out).real, 1)
        assert np.allclose(block_dephase(out, s), out)


class TestRandom:
    def test_unit_modulus_1x1(self):
        assert np.isclose(abs(haar_random_unitary(1, 3)[0, 0]), 1)

    def test_deterministic(self):
        assert np.array_equal(haar_random_unitary(4, 7), haar_random_unitary(4, 7))

    @given(seeds)
    def test_unitary(self, seed):
        u = haar_random_unitary(4, seed)
        assert np.allclose(np.linalg.norm(u, axis=0), 1, atol=1e-10)
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)

    @given(structures(), seeds)
    def test_block_diagonal_unitary(self, s, seed):
        u = block_diagonal_unitary(s, seed)
        assert np.allclose(u.conj().T @ u, np.eye(s.total_dim))
        assert np.allclose(block_dephase(u, s), u)

    @given(seeds)
    def test_random_density_valid(self, seed):
        check_density_matrix(random_density(5, seed, rank=2))

    def test_density_check(self):
        with pytest.raises(NotADensityMatrix):
            check_density_matrix(np.diag([1.5, -0.5]))


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_blocks_are_scaled_copies(self, rng):
        u, v = haar_random_unitary(2, rng), haar_random_unitary(2, rng)
        s = uniform_structure(2, 2)
        w = tensor(u, v)
        for mu in range(2):
            for nu in range(2):
                assert np.allclose(block(w, s, mu, nu), u[mu, nu] * v)

    def test_action(self, rng):
        u, v = haar_random_unitary(2, rng), haar_random_unitary(3, rng)
        x, y = random_state(2, rng), random_state(3, rng)
        assert np.allclose(tensor(u, v) @ np.kron(x, y), np.kron(u @ x, v @ y))

    def test_partial_trace(self, rng):
        a, b = random_density(2, rng), random_density(3, rng)
        rho = np.kron(a, b)
        assert np.allclose(partial_trace(rho, [2, 3], 0), a)
        assert np.allclose(partial_trace(rho, [2, 3], 1), b)
