import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockcoh import io
from blockcoh.channels import random_block_incoherent_channel
from blockcoh.core import contiguous_structure, random_state
from blockcoh.errors import SchemaViolation

from .conftest import seeds, structures

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_minimal_state():
    st_ = io.state_from_doc({"amplitudes": [1, 0]})
    assert st_.structure.num_blocks == 1
    assert np.allclose(st_.weights, [1])


def test_incomplete_channel_names_residual():
    with pytest.raises(SchemaViolation) as exc:
        io.channel_from_doc({"kraus": [[[1, 0], [0, 0.5]]]})
    assert exc.value.pointer == "/kraus"
    assert "residual" in str(exc.value)


def test_non_covering_structure():
    with pytest.raises(SchemaViolation) as exc:
        io.structure_from_doc({"groups": [[0, 1], [3]]})
    assert exc.value.pointer == "/groups"


def test_bad_scalar_pointer():
    with pytest.raises(SchemaViolation) as exc:
        io.density_from_doc({"density": [[1, 0], [0, "x"]]})
    assert exc.value.pointer == "/density/1/1"


def test_ragged_matrix():
    with pytest.raises(SchemaViolation) as exc:
        io.matrix_from_doc({"matrix": [[1, 0], [0]]})
    assert exc.value.pointer == "/matrix/1"


def test_missing_key():
    with pytest.raises(SchemaViolation):
        io.state_from_doc({"amps": [1]})


def test_non_integer_group_index():
    with pytest.raises(SchemaViolation) as exc:
        io.structure_from_doc({"groups": [[0, 1.5]]})
    assert exc.value.pointer == "/groups/0/1"


def test_complex_pairs():
    v = io.parse_vector([[0.6, 0], [0, 0.8], 0])
    assert np.allclose(v, [0.6, 0.8j, 0])


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=6))
def test_vector_roundtrip_bit_identical(pairs):
    v = np.array([complex(a, b) for a, b in pairs])
    text = json.dumps(io.encode_vector(v))
    back = io.parse_vector(json.loads(text))
    assert back.view(np.uint64).tolist() == v.view(np.uint64).tolist()


@given(structures(), seeds)
def test_file_roundtrip(tmp_path_factory, s, seed):
    path = tmp_path_factory.mktemp("io")
    io.save(path / "s.json", io.structure_to_doc(s))
    assert io.load_structure(path / "s.json") == s
    psi = random_state(s.total_dim, seed)
    io.save(path / "psi.json", io.state_to_doc(psi))
    first = io.load_state(path / "psi.json", s)
    io.save(path / "psi2.json", io.state_to_doc(first))
    second = io.load_state(path / "psi2.json", s)
    assert np.array_equal(first.amplitudes, psi) and np.array_equal(second.amplitudes, psi)
    ch = random_block_incoherent_channel(s, 2, seed)
    io.save(path / "ch.json", io.channel_to_doc(ch))
    back = io.load_channel(path / "ch.json", s)
    assert all(np.array_equal(a, b) for a, b in zip(back.kraus, ch.kraus))


def test_structure_roundtrip_doc():
    s = contiguous_structure([2, 1])
    assert io.structure_from_doc(io.structure_to_doc(s)) == s
