"""JSON serialization of states, priors, family specs and result documents.

Complex numbers serialize as two-element real arrays [re, im] and matrices
as arrays of column vectors - unambiguous across languages, no string
parsing of "a+bi". Result documents are self-describing: they embed the
input they were computed from plus its digest, so verification needs no
side files. Serialization is canonical (sorted keys, fixed separators) so
generate -> parse -> serialize round-trips are bit-identical.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from . import __version__
from .analytic import StateSet
from .errors import DomainError
from .families import FamilySpec

SCHEMA = "usdpovm/1"


def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def decode_complex(pair) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise DomainError(f"complex entries must be [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    """Matrix as a list of column vectors of [re, im] pairs."""
    a = np.asarray(m, dtype=complex)
    return [[encode_complex(a[i, j]) for i in range(a.shape[0])] for j in range(a.shape[1])]


def decode_matrix(cols, field: str = "matrix") -> np.ndarray:
    if not isinstance(cols, list) or not cols:
        raise DomainError(f"{field}: expected a non-empty list of column vectors")
    n_rows = len(cols[0])
    out = np.empty((n_rows, len(cols)), dtype=complex)
    for j, col in enumerate(cols):
        if len(col) != n_rows:
            raise DomainError(f"{field}: column {j} has length {len(col)}, expected {n_rows}")
        for i, pair in enumerate(col):
            out[i, j] = decode_complex(pair)
    return out


def encode_real_vector(v) -> list[float]:
    return [float(x) for x in np.asarray(v, dtype=float)]


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _decode_param(value):
    """Family parameters: scalars stay scalars, [re, im] pairs become
    complex, lists of pairs become complex lists."""
    if isinstance(value, (int, float, str, bool)):
        return value
    if isinstance(value, list):
        if len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
            return decode_complex(value)
        return [_decode_param(v) for v in value]
    raise DomainError(f"unsupported parameter encoding: {value!r}")


def _encode_param(value):
    if isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, complex):
        return encode_complex(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_encode_param(v) for v in np.asarray(value).tolist()]
    raise DomainError(f"unsupported parameter type: {type(value)}")


def states_document(states: StateSet, priors=None, spec: FamilySpec | None = None,
                    known_pm: float | None = None) -> dict:
    doc: dict[str, Any] = {
        "schema": SCHEMA,
        "n": states.n,
        "states": encode_matrix(states.matrix),
    }
    if priors is not None:
        doc["priors"] = encode_real_vector(priors)
    if spec is not None:
        fam: dict[str, Any] = {
            "family": spec.family,
            "n": spec.n,
            "params": {k: _encode_param(v) for k, v in sorted(spec.params.items())},
        }
        if known_pm is not None:
            fam["known_pm"] = float(known_pm)
        doc["family"] = fam
    return doc


def parse_states(doc: dict) -> tuple[StateSet, np.ndarray | None, FamilySpec | None]:
    """Parse a states document; raises DomainError with the failing field."""
    if not isinstance(doc, dict):
        raise DomainError("input document must be a JSON object")
    if "states" not in doc:
        raise DomainError("missing field 'states'")
    matrix = decode_matrix(doc["states"], "states")
    if "n" in doc and int(doc["n"]) != matrix.shape[0]:
        raise DomainError(
            f"field 'n'={doc['n']} does not match the {matrix.shape[0]} state vectors"
        )
    fam = None
    if "family" in doc and doc["family"] is not None:
        f = doc["family"]
        fam = FamilySpec(
            family=f["family"],
            n=int(f.get("n", matrix.shape[0])),
            params={k: _decode_param(v) for k, v in f.get("params", {}).items()},
        )
    states = StateSet(matrix, family=fam.family if fam else None)
    priors = None
    if "priors" in doc and doc["priors"] is not None:
        priors = np.asarray(doc["priors"], dtype=float)
    return states, priors, fam


def result_document(command: str, input_doc: dict, config: dict, result: dict) -> dict:
    return {
        "schema": SCHEMA,
        "tool": "usdpovm",
        "version": __version__,
        "command": command,
        "input": input_doc,
        "input_digest": digest(input_doc),
        "config": config,
        "result": result,
    }


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(doc: dict, path: str | None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
