import json
import math

import numpy as np
import pytest

from adqec.codes import (QuantumCode, bare_qubit_code, build_bosonic_code,
                         build_family_code, build_literature_41_code,
                         build_two_qutrit_code, code_to_document,
                         family_excitations, load_code, pis_state)
from adqec.errors import (LevelOverflow, NotOrthonormal, OutOfRange,
                          SchemaError)
from adqec.linalg import ket


def bitstring_index(bits):
    return int(bits, 2)


def test_pis_three_qubits_single_excitation():
    v = pis_state(3, 1)
    expected = (ket(0b100, 8) + ket(0b010, 8) + ket(0b001, 8)) / math.sqrt(3)
    assert np.allclose(v, expected)


def test_pis_three_qubits_full_excitation():
    assert np.allclose(pis_state(3, 3), ket(0b111, 8))


def test_pis_five_two_matches_printed_codeword():
    v = pis_state(5, 2)
    strings = ["11000", "10100", "10010", "10001", "01100",
               "01010", "01001", "00110", "00101", "00011"]
    amp = 1.0 / math.sqrt(10)
    for s in strings:
        assert v[bitstring_index(s)] == pytest.approx(amp)
    assert np.count_nonzero(np.abs(v) > 1e-15) == 10


def test_pis_amplitude_structure():
    for n, e in [(4, 2), (6, 3), (7, 5)]:
        v = pis_state(n, e)
        nz = np.abs(v) > 1e-15
        assert nz.sum() == math.comb(n, e)
        assert np.allclose(v[nz], 1.0 / math.sqrt(math.comb(n, e)))


def test_pis_range_check():
    with pytest.raises(OutOfRange):
        pis_state(3, 4)


def test_family_three_qubit_code():
    code = build_family_code(1, 1)
    assert (code.n, code.k, code.q_p, code.q_l) == (3, 1, 2, 2)
    assert np.allclose(code.codewords[0], pis_state(3, 1))
    assert np.allclose(code.codewords[1], ket(0b111, 8))


def test_family_five_qubit_code():
    code = build_family_code(1, 2)
    assert code.n == 5 and code.correctable_order == 2
    assert np.allclose(code.codewords[0], pis_state(5, 2))
    assert np.allclose(code.codewords[1], ket(0b11111, 32))


def test_family_two_logical_qubits():
    code = build_family_code(2, 1)
    assert code.n == 7
    assert family_excitations(2, 1) == [1, 3, 5, 7]
    assert code.num_codewords == 4
    for i, e in enumerate(family_excitations(2, 1)):
        assert np.allclose(code.codewords[i], pis_state(7, e))


def test_family_excitations_strictly_increasing_and_capped():
    for k, t in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)]:
        n = 2 ** k * (t + 1) - 1
        exc = family_excitations(k, t)
        assert len(exc) == 2 ** k
        assert all(b > a for a, b in zip(exc, exc[1:]))
        assert exc[-1] == n  # the all-ones label uses every qubit


def test_family_orthonormality_tight():
    for k, t in [(1, 1), (1, 2), (1, 3), (2, 1)]:
        code = build_family_code(k, t)
        gram = code.codeword_matrix @ np.conj(code.codeword_matrix.T)
        assert np.max(np.abs(gram - np.eye(code.num_codewords))) < 1e-12


def test_literature_41_code():
    code = build_literature_41_code()
    root2 = math.sqrt(2)
    assert np.allclose(code.codewords[0], (ket(0, 16) + ket(15, 16)) / root2)
    assert np.allclose(code.codewords[1], (ket(0b0011, 16) + ket(0b1100, 16)) / root2)


def test_two_qutrit_code():
    code = build_two_qutrit_code()
    assert (code.n, code.q_p) == (2, 3)
    assert np.allclose(code.codewords[0], (ket(1, 9) + ket(3, 9)) / math.sqrt(2))
    assert np.allclose(code.codewords[1], (ket(7, 9) + ket(5, 9)) / math.sqrt(2))


def test_bosonic_code_levels():
    code = build_bosonic_code(1, 2, 1, 4)
    assert np.allclose(code.codewords[0], ket(1, 4))
    assert np.allclose(code.codewords[1], ket(3, 4))
    code = build_bosonic_code(1, 2, 2, 6)
    assert np.allclose(code.codewords[0], ket(2, 6))
    assert np.allclose(code.codewords[1], ket(5, 6))


def test_bosonic_overflow():
    with pytest.raises(LevelOverflow):
        build_bosonic_code(1, 2, 1, 3)


def test_bare_qubit():
    code = bare_qubit_code()
    assert code.dim == 2 and code.num_codewords == 2


def test_orthonormality_enforced():
    with pytest.raises(NotOrthonormal):
        QuantumCode(n=1, q_p=2, k=1, q_l=2,
                    codewords=[np.array([1.0, 0.0]), np.array([0.6, 0.8j])])
    with pytest.raises(NotOrthonormal):
        QuantumCode(n=1, q_p=2, k=1, q_l=2,
                    codewords=[np.array([2.0, 0.0]), np.array([0.0, 1.0])])


def test_document_round_trip():
    code = build_family_code(1, 1)
    doc = code_to_document(code)
    loaded = load_code(doc)
    assert loaded.n == code.n and loaded.q_p == code.q_p
    for a, b in zip(loaded.codewords, code.codewords):
        assert np.allclose(a, b)
    # JSON text round trip too
    loaded2 = load_code(json.dumps(doc))
    assert np.allclose(loaded2.codewords[0], code.codewords[0])


def test_document_round_trip_two_logical_qubits():
    doc = code_to_document(build_family_code(2, 1))
    loaded = load_code(doc)
    assert loaded.num_codewords == 4 and loaded.q_l ** loaded.k == 4


def test_document_validation_errors():
    doc = code_to_document(build_family_code(1, 1))
    bad = dict(doc)
    del bad["codewords"]
    with pytest.raises(SchemaError):
        load_code(bad)
    bad = dict(doc)
    bad["n"] = "three"
    with pytest.raises(SchemaError):
        load_code(bad)
    bad = json.loads(json.dumps(doc))
    bad["codewords"][0][0] = [0.5]          # not a [re, im] pair
    with pytest.raises(SchemaError):
        load_code(bad)
    bad = json.loads(json.dumps(doc))
    bad["codewords"][0] = bad["codewords"][0][:4]
    with pytest.raises(SchemaError):
        load_code(bad)
    unnorm = json.loads(json.dumps(doc))
    unnorm["codewords"][0] = [[0.5 * re, 0.5 * im] for re, im in unnorm["codewords"][0]]
    with pytest.raises(NotOrthonormal):
        load_code(unnorm)
