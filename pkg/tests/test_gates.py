import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockcoh.channels import apply
from blockcoh.core import (
    contiguous_structure,
    haar_random_unitary,
    maximally_coherent_state,
    projector,
    random_state,
    uniform_component,
)
from blockcoh.errors import DimensionMismatch, NotUnitary
from blockcoh.gates import (
    block_hadamard,
    block_rotation,
    build_gate_protocol,
    check_unitary,
    decohered_resource,
    protocol_checks,
    run_gate_protocol,
)
from blockcoh.measures import c_l1

from .conftest import seeds, structures


def embedded_phi(s, mu):
    v = np.zeros(s.total_dim, dtype=complex)
    v[s.index(mu)] = uniform_component(s.dims[mu])
    return v


def test_identity_gate_leaves_system():
    s = contiguous_structure([2, 1])
    psi = random_state(3, 0)
    p = build_gate_protocol(np.eye(3), s)
    out = apply(p.channel, projector(np.kron(psi, maximally_coherent_state(s).amplitudes)))
    assert np.allclose(out, np.kron(projector(psi), decohered_resource(s)))


def test_block_hadamard_output(rng):
    s = contiguous_structure([2, 2])
    h = block_hadamard(2)
    psi = random_state(4, rng)
    p = build_gate_protocol(h, s)
    out = apply(p.channel, projector(np.kron(psi, maximally_coherent_state(s).amplitudes)))
    assert np.allclose(out, np.kron(projector(h @ psi), decohered_resource(s)))


@given(structures(max_blocks=3, max_dim=3, shuffle=False), seeds)
def test_each_shift_operator(s, seed):
    rng = np.random.default_rng(seed)
    u = haar_random_unitary(s.total_dim, rng)
    psi = random_state(s.total_dim, rng)
    p = build_gate_protocol(u, s)
    xi = np.kron(psi, maximally_coherent_state(s).amplitudes)
    m = s.num_blocks
    for sh, k in enumerate(p.shift_kraus):
        assert np.allclose(k @ xi, np.kron(u @ psi, embedded_phi(s, sh)) / np.sqrt(m))
    # The completion operator annihilates the resource.
    assert np.allclose(p.channel.kraus[-1] @ xi, 0)


@given(st.integers(2, 3), seeds, st.booleans())
def test_protocol_implements_gate(m, seed, shuffle):
    rng = np.random.default_rng(seed)
    dims = list(rng.integers(1, 4, size=m))
    s = contiguous_structure(dims)
    if shuffle:
        from blockcoh.core import make_block_structure

        perm = rng.permutation(s.total_dim)
        s = make_block_structure([sorted(perm[list(g)]) for g in s.groups])
    u = haar_random_unitary(s.total_dim, rng)
    p = build_gate_protocol(u, s)
    res, inco = protocol_checks(p)
    assert res <= 1e-9 and inco
    psi = random_state(s.total_dim, rng)
    sys_m, anc_m = run_gate_protocol(p, psi)
    t = u @ psi
    assert np.real(t.conj() @ sys_m @ t) >= 1 - 1e-8
    assert c_l1(anc_m, s) <= 1e-8


def test_resource_consumed():
    s = contiguous_structure([1, 2, 2])
    assert np.isclose(c_l1(maximally_coherent_state(s).density(), s), 2)
    p = build_gate_protocol(haar_random_unitary(5, 1), s)
    _, anc = run_gate_protocol(p, random_state(5, 2))
    assert np.allclose(anc, decohered_resource(s))
    assert c_l1(anc, s) < 1e-12


def test_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        build_gate_protocol(np.diag([1.0, 0.5]), contiguous_structure([1, 1]))


def test_rejects_wrong_size():
    with pytest.raises(DimensionMismatch):
        build_gate_protocol(np.eye(3), contiguous_structure([2, 2]))


def test_block_rotation_is_unitary(rng):
    a, b = 0.6, 0.8j
    check_unitary(block_rotation(a, b, haar_random_unitary(3, rng)))
    check_unitary(block_hadamard(3))
