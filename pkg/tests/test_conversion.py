import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockcoh.channels import KrausChannel, apply, classify_block_incoherent, validate_cptp
from blockcoh.conversion import (
    build_conversion_channel,
    circulant,
    first_failing_prefix,
    majorizes,
    necessity_certificate,
    sample_majorized,
    solve_gammas,
    t_transform_maps,
    verify_conversion,
)
from blockcoh.core import (
    block_state,
    contiguous_structure,
    decompose,
    fidelity_pure,
    maximally_coherent_state,
    random_state,
    uniform_component,
    uniform_structure,
)
from blockcoh.errors import CertificateViolation, Infeasible, NotAConversion, NotIncoherent, VerificationFailed
from blockcoh.gates import block_hadamard

from .conftest import seeds, structures


def prob(rng, m):
    p = rng.dirichlet(np.ones(m) * 0.7)
    return p / p.sum()


class TestMajorization:
    def test_point_mass(self):
        assert majorizes([1, 0], [0.5, 0.5])

    @given(seeds, st.integers(1, 6))
    def test_everything_majorizes_uniform(self, seed, m):
        assert majorizes(prob(np.random.default_rng(seed), m), np.full(m, 1 / m))

    def test_prefix_oracle(self):
        assert majorizes([0.6, 0.3, 0.1], [0.5, 0.3, 0.2])
        assert not majorizes([0.5, 0.3, 0.2], [0.6, 0.3, 0.1])
        assert first_failing_prefix([0.5, 0.3, 0.2], [0.6, 0.3, 0.1]) == 1

    def test_order_insensitive(self):
        assert majorizes([0.1, 0.6, 0.3], [0.2, 0.3, 0.5])

    @given(seeds, st.integers(1, 5))
    def test_sampled_pairs_are_majorized(self, seed, m):
        rng = np.random.default_rng(seed)
        y = prob(rng, m)
        assert majorizes(y, sample_majorized(y, rng))

    @given(seeds, st.integers(2, 5))
    def test_t_transforms_reproduce_x(self, seed, m):
        rng = np.random.default_rng(seed)
        y = np.sort(prob(rng, m))[::-1]
        x = np.sort(sample_majorized(y, rng))[::-1]
        maps = t_transform_maps(x, y)
        assert np.isclose(sum(w for _, w in maps), 1)
        got = np.array([sum(w * y[pi[j]] for pi, w in maps) for j in range(m)])
        assert np.allclose(got, x, atol=1e-12)


class TestGammas:
    def test_identity(self):
        assert np.allclose(solve_gammas([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]), [1, 0, 0])

    def test_two_block_example(self):
        assert np.allclose(solve_gammas([0.5, 0.5], [0.7, 0.3]), [0.5, 0.5])

    def test_reverse_is_infeasible(self):
        with pytest.raises(Infeasible):
            solve_gammas([0.7, 0.3], [0.5, 0.5])

    @given(seeds, st.integers(2, 5))
    def test_solution_satisfies_system(self, seed, m):
        rng = np.random.default_rng(seed)
        y = np.sort(prob(rng, m))[::-1]
        x = np.sort(sample_majorized(y, rng))[::-1]
        try:
            g = solve_gammas(x, y)
        except Infeasible:
            return
        assert np.allclose(circulant(y) @ g, x, atol=1e-9)
        assert np.isclose(g.sum(), 1)

    def test_cyclic_family_misses_some_majorized_pairs(self):
        # Majorized, yet the cyclic system has a negative component.
        x, y = [0.6, 0.2, 0.2], [0.6, 0.3, 0.1]
        assert majorizes(y, x)
        with pytest.raises(Infeasible) as exc:
            solve_gammas(x, y)
        assert exc.value.detail.min() < 0


class TestBuild:
    def test_two_block_example(self):
        s = contiguous_structure([2, 3])
        src, dst = block_state(s, np.sqrt([0.5, 0.5])), block_state(s, np.sqrt([0.7, 0.3]))
        plan = build_conversion_channel(src, dst)
        assert plan.feasible and plan.method == "circulant"
        assert np.allclose(plan.gammas, [0.5, 0.5])
        out = apply(plan.channel, src.density())
        assert np.max(np.abs(out - dst.density())) < 1e-9
        # A0 constant is gamma_0, the family constant gamma_1 / sqrt(d1 d2).
        kinds = [l.kind for l in plan.labels]
        assert kinds.count("diag") == 1 and kinds.count("family") == 6
        assert np.isclose(plan.constants[kinds.index("diag")], np.sqrt(0.5))
        assert np.allclose(plan.constants[np.array(kinds) == "family"], np.sqrt(0.5 / 6))

    def test_conversion_kraus_set_is_complete(self):
        s = contiguous_structure([2, 2])
        plan = build_conversion_channel(block_state(s, np.sqrt([0.5, 0.5])), block_state(s, np.sqrt([0.7, 0.3])))
        assert validate_cptp(plan.channel)[0]

    def test_reverse_reports_prefix(self):
        s = contiguous_structure([2, 2])
        plan = build_conversion_channel(block_state(s, np.sqrt([0.7, 0.3])), block_state(s, np.sqrt([0.5, 0.5])))
        assert not plan.feasible
        assert "prefix sum 1" in plan.message

    def test_three_block_matrices(self):
        s = contiguous_structure([1, 2, 3])
        src = maximally_coherent_state(s)
        y2 = np.array([0.5, 0.3, 0.2])
        dst = block_state(s, np.sqrt(y2))
        plan = build_conversion_channel(src, dst)
        assert plan.method == "circulant"
        g = plan.gammas
        assert np.allclose(g, 1 / 3)
        x, y, dims = np.full(3, 3**-0.5), np.sqrt(y2), s.dims
        phis = [uniform_component(n) for n in dims]
        d, dslash = s.total_dim, int(np.prod(dims))
        expected = {}
        a0 = np.zeros((6, 6), dtype=complex)
        for mu in range(3):
            a0[np.ix_(s.index(mu), s.index(mu))] = np.sqrt(g[0]) * y[mu] / x[mu] * np.eye(dims[mu])
        expected[(0, ())] = a0
        for sh in (1, 2):
            for idx in itertools.product(*[range(n) for n in dims]):
                k = np.zeros((d, d), dtype=complex)
                for mu in range(3):
                    src_b = (mu + sh) % 3
                    coef = np.sqrt(g[sh] / dslash) * y[mu] / x[src_b] * np.sqrt(dims[src_b])
                    k[s.index(mu), s.index(src_b)[idx[src_b]]] = coef * phis[mu]
                expected[(sh, idx)] = k
        got = {(l.shift, l.index): k for l, k in zip(plan.labels, plan.canonical_kraus)}
        assert set(got) == set(expected)
        for key, k in expected.items():
            assert np.allclose(got[key], k), key
        # Summing both families reproduces the trace-preservation identity.
        assert validate_cptp(KrausChannel(tuple(plan.canonical_kraus), s))[0]

    def test_birkhoff_fallback(self):
        s = contiguous_structure([2, 1, 2])
        src, dst = block_state(s, np.sqrt([0.6, 0.2, 0.2])), block_state(s, np.sqrt([0.6, 0.3, 0.1]))
        assert build_conversion_channel(src, dst, allow_birkhoff=False).feasible is False
        plan = build_conversion_channel(src, dst)
        assert plan.feasible and plan.method == "birkhoff"
        rep = verify_conversion(plan, src, dst)
        assert rep.passed

    def test_mc_reaches_anything(self, rng):
        for m in (2, 3, 4):
            s = contiguous_structure(list(rng.integers(1, 4, size=m)))
            dst = decompose(random_state(s.total_dim, rng), s)
            plan = build_conversion_channel(maximally_coherent_state(s), dst)
            assert plan.feasible
            verify_conversion(plan, maximally_coherent_state(s), dst)

    def test_zero_weight_source_block(self):
        s = contiguous_structure([2, 2, 1])
        src = block_state(s, np.sqrt([0.5, 0.5, 0.0]))
        dst = block_state(s, np.sqrt([0.8, 0.2, 0.0]))
        plan = build_conversion_channel(src, dst)
        assert any(l.kind == "null" for l in plan.labels)
        verify_conversion(plan, src, dst)

    @given(structures(max_blocks=4, max_dim=3), seeds)
    def test_random_majorized_pairs(self, s, seed):
        rng = np.random.default_rng(seed)
        dst = decompose(random_state(s.total_dim, rng), s)
        x2 = sample_majorized(dst.probabilities, rng)
        comps = [random_state(n, rng) for n in s.dims]
        src = block_state(s, np.sqrt(x2), comps)
        plan = build_conversion_channel(src, dst)
        assert plan.feasible
        rep = verify_conversion(plan, src, dst)
        assert rep.fidelity >= 1 - 1e-9
        cert = necessity_certificate(plan.channel, src, dst)
        assert all(cert.chain)

    def test_verify_rejects_infeasible_plan(self):
        s = contiguous_structure([1, 1])
        src, dst = block_state(s, np.sqrt([0.9, 0.1])), block_state(s, np.sqrt([0.5, 0.5]))
        with pytest.raises(VerificationFailed) as exc:
            verify_conversion(build_conversion_channel(src, dst), src, dst)
        assert exc.value.clause == "feasibility"


class TestCertificate:
    def test_two_block(self):
        s = contiguous_structure([2, 2])
        src, dst = block_state(s, np.sqrt([0.5, 0.5])), block_state(s, np.sqrt([0.7, 0.3]))
        cert = necessity_certificate(build_conversion_channel(src, dst).channel, src, dst)
        assert np.isclose(np.sum(np.abs(cert.alphas) ** 2), 1)
        assert np.allclose(cert.B.sum(0), 1) and np.allclose(cert.B.sum(1), 1)
        assert np.all(cert.B >= 0)

    def test_identity(self):
        s = contiguous_structure([2, 1])
        psi = block_state(s, np.sqrt([0.3, 0.7]))
        cert = necessity_certificate(KrausChannel((np.eye(3),), s), psi, psi)
        assert np.allclose(cert.B, np.eye(2))
        assert all(cert.chain)

    def test_rejects_coherent_channel(self):
        s = uniform_structure(2, 2)
        psi = maximally_coherent_state(s)
        with pytest.raises(NotIncoherent):
            necessity_certificate(KrausChannel((block_hadamard(2),), s), psi, psi)

    def test_rejects_non_conversion(self):
        s = contiguous_structure([1, 1])
        a, b = block_state(s, np.sqrt([0.5, 0.5])), block_state(s, np.sqrt([0.8, 0.2]))
        with pytest.raises(NotAConversion):
            necessity_certificate(KrausChannel((np.eye(2),), s), a, b)
