import json

import numpy as np
import pytest

from usdpovm import fileio
from usdpovm.errors import DomainError
from usdpovm.families import FamilySpec, gen


class TestComplexEncoding:
    def test_round_trip(self):
        z = 1.25 - 0.5j
        assert fileio.decode_complex(fileio.encode_complex(z)) == z

    def test_rejects_bad_pair(self):
        with pytest.raises(DomainError):
            fileio.decode_complex([1.0])


class TestMatrixEncoding:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        again = fileio.decode_matrix(fileio.encode_matrix(m))
        assert np.array_equal(again, m)

    def test_column_major(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        cols = fileio.encode_matrix(m)
        assert cols[0] == [[1.0, 0.0], [3.0, 0.0]]  # first column vector

    def test_ragged_rejected(self):
        with pytest.raises(DomainError):
            fileio.decode_matrix([[[1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]])


class TestStatesDocument:
    def test_round_trip_bit_identical(self):
        inst = gen(FamilySpec("equal-overlap", 4, {"s": 0.25}))
        doc = fileio.states_document(inst.states, np.full(4, 0.25), inst.spec, inst.known_pm)
        text = fileio.canonical_json(doc)
        states, priors, spec = fileio.parse_states(json.loads(text))
        doc2 = fileio.states_document(states, priors, spec, inst.known_pm)
        assert fileio.canonical_json(doc2) == text

    def test_digest_stable_under_key_order(self):
        a = {"x": 1, "y": [1, 2]}
        b = {"y": [1, 2], "x": 1}
        assert fileio.digest(a) == fileio.digest(b)

    def test_parse_rejects_inconsistent_n(self):
        inst = gen(FamilySpec("two-state", 2, {"r": 0.4}))
        doc = fileio.states_document(inst.states)
        doc["n"] = 3
        with pytest.raises(DomainError):
            fileio.parse_states(doc)

    def test_parse_rejects_missing_states(self):
        with pytest.raises(DomainError):
            fileio.parse_states({"n": 2})

    def test_family_params_round_trip(self):
        spec = FamilySpec("three-general", 3,
                          {"k_xy": 0.6 + 0.2j, "k_za": np.sqrt(1 - 0.4), "lam3": 1.1})
        inst = gen(spec)
        doc = fileio.states_document(inst.states, None, spec)
        _, _, spec2 = fileio.parse_states(json.loads(fileio.canonical_json(doc)))
        assert spec2.family == "three-general"
        assert spec2.params["k_xy"] == 0.6 + 0.2j

    def test_result_document_embeds_digest(self):
        inst = gen(FamilySpec("two-state", 2, {"r": 0.4}))
        input_doc = fileio.states_document(inst.states)
        doc = fileio.result_document("optimize", input_doc, {"seed": 0}, {"p_m": 1.0})
        assert doc["input_digest"] == fileio.digest(input_doc)
        assert doc["version"]
