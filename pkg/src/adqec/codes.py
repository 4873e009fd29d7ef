"""Builders for the amplitude-damping-adapted codes used throughout.

The workhorse family encodes k logical qubits into n = 2^k (t+1) - 1
physical qubits using permutation-invariant states: codeword i (an n-bit
label read as a binary number) is the uniform superposition of all
weight-((t+1) decimal(i) + t) strings.  All codewords then carry distinct
excitation numbers, which is what makes damping orders distinguishable.

Also provided: the standard four-qubit amplitude-damping code from the
literature (comparison baseline), a two-qutrit code, single-mode (Fock
basis) codes, and a JSON loader for user-supplied codes.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import dim_cap
from .errors import (DimensionCap, LevelOverflow, NotOrthonormal, OutOfRange,
                     SchemaError, ShapeMismatch)
from .linalg import as_complex, ket

ORTHONORMALITY_TOL = 1e-10


@dataclass
class QuantumCode:
    """An [n, k] code: q_l^k orthonormal codewords in dimension q_p^n.

    ``correctable_order`` records the damping order t the code is designed
    to correct (None for ad hoc codes); downstream helpers use it as the
    default truncation order when grouping errors.
    """

    n: int
    q_p: int
    k: int
    q_l: int
    codewords: list
    label: str = ""
    correctable_order: int | None = field(default=None)

    def __post_init__(self):
        self.codewords = [as_complex(c).reshape(-1) for c in self.codewords]
        if self.q_l ** self.k > self.q_p ** self.n:
            raise OutOfRange(
                f"codespace dimension {self.q_l}^{self.k} exceeds {self.q_p}^{self.n}")
        if len(self.codewords) != self.q_l ** self.k:
            raise ShapeMismatch(
                f"expected {self.q_l ** self.k} codewords, got {len(self.codewords)}")
        dim = self.q_p ** self.n
        for c in self.codewords:
            if c.shape != (dim,):
                raise ShapeMismatch(f"codeword length {c.shape[0]} != {dim}")
        gram = self.codeword_matrix @ np.conj(self.codeword_matrix.T)
        if np.max(np.abs(gram - np.eye(len(self.codewords)))) > ORTHONORMALITY_TOL:
            raise NotOrthonormal(
                f"codewords deviate from orthonormality by "
                f"{np.max(np.abs(gram - np.eye(len(self.codewords)))):.2e}")

    @property
    def dim(self) -> int:
        return self.q_p ** self.n

    @property
    def num_codewords(self) -> int:
        return len(self.codewords)

    @property
    def codeword_matrix(self) -> np.ndarray:
        """Codewords stacked as rows, shape (q_l^k, q_p^n)."""
        return np.array(self.codewords)

    def projector(self) -> np.ndarray:
        c = self.codeword_matrix
        return np.conj(c.T) @ c

    def encode(self, coeffs) -> np.ndarray:
        """Logical amplitudes -> physical state vector."""
        coeffs = as_complex(coeffs).reshape(-1)
        if coeffs.shape[0] != self.num_codewords:
            raise ShapeMismatch(
                f"expected {self.num_codewords} logical amplitudes, got {coeffs.shape[0]}")
        return coeffs @ self.codeword_matrix


def pis_state(n: int, e: int) -> np.ndarray:
    """Permutation-invariant n-qubit state with excitation number e.

    Uniform superposition of all C(n, e) weight-e bitstrings; basis index of
    a string is its big-endian binary value.
    """
    if not 0 <= e <= n:
        raise OutOfRange(f"excitation number {e} outside [0, {n}]")
    v = np.zeros(2 ** n, dtype=complex)
    amp = 1.0 / math.sqrt(math.comb(n, e))
    for positions in itertools.combinations(range(n), e):
        idx = sum(1 << (n - 1 - p) for p in positions)
        v[idx] = amp
    return v


def family_excitations(k: int, t: int) -> list:
    """Excitation numbers (t+1) * decimal(i) + t for i = 0 .. 2^k - 1."""
    return [(t + 1) * i + t for i in range(2 ** k)]


def build_family_code(k: int, t: int, cap: int | None = None) -> QuantumCode:
    """Permutation-invariant [2^k (t+1) - 1, k] code correcting damping order t."""
    if k < 1 or t < 1:
        raise OutOfRange(f"need k >= 1 and t >= 1, got k={k}, t={t}")
    n = 2 ** k * (t + 1) - 1
    cap = dim_cap() if cap is None else cap
    if 2 ** n > cap:
        raise DimensionCap(f"dimension 2^{n} exceeds cap {cap}")
    codewords = [pis_state(n, e) for e in family_excitations(k, t)]
    return QuantumCode(n=n, q_p=2, k=k, q_l=2, codewords=codewords,
                       label=f"[{n},{k}] order-{t} PIS", correctable_order=t)


def build_literature_41_code() -> QuantumCode:
    """The standard four-qubit amplitude-damping code (comparison baseline).

    Codewords (|0000> + |1111>)/sqrt(2) and (|0011> + |1100>)/sqrt(2); it
    satisfies the grouped correction conditions for damping order 1.
    """
    zero = (ket(0b0000, 16) + ket(0b1111, 16)) / math.sqrt(2)
    one = (ket(0b0011, 16) + ket(0b1100, 16)) / math.sqrt(2)
    return QuantumCode(n=4, q_p=2, k=1, q_l=2, codewords=[zero, one],
                       label="[4,1] literature", correctable_order=1)


def build_two_qutrit_code() -> QuantumCode:
    """Single logical qubit in two qutrits: (|01>+|10>)/sqrt2, (|21>+|12>)/sqrt2."""
    d = 9
    zero = (ket(0 * 3 + 1, d) + ket(1 * 3 + 0, d)) / math.sqrt(2)
    one = (ket(2 * 3 + 1, d) + ket(1 * 3 + 2, d)) / math.sqrt(2)
    return QuantumCode(n=2, q_p=3, k=1, q_l=2, codewords=[zero, one],
                       label="two-qutrit", correctable_order=1)


def build_bosonic_code(n_logical: int, q_l: int, t: int, q_p: int) -> QuantumCode:
    """Single-mode code on q_p Fock levels: |j_L> = |(t+1) decimal(j) + t>.

    ``j`` runs over all length-``n_logical`` strings of digits < q_l, read
    big-endian.  Raises ``LevelOverflow`` when the top level does not fit.
    """
    if n_logical < 1 or q_l < 2 or t < 1 or q_p < 2:
        raise OutOfRange("need n_logical >= 1, q_l >= 2, t >= 1, q_p >= 2")
    top_level = (t + 1) * (q_l ** n_logical - 1) + t
    if top_level >= q_p:
        raise LevelOverflow(
            f"encoding needs level {top_level} but only {q_p} levels exist")
    codewords = [ket((t + 1) * j + t, q_p) for j in range(q_l ** n_logical)]
    return QuantumCode(n=1, q_p=q_p, k=n_logical, q_l=q_l, codewords=codewords,
                       label=f"bosonic t={t} on {q_p} levels", correctable_order=t)


def bare_qubit_code() -> QuantumCode:
    """Trivial unencoded qubit, used as the no-protection baseline."""
    return QuantumCode(n=1, q_p=2, k=1, q_l=2,
                       codewords=[ket(0, 2), ket(1, 2)], label="bare qubit")


# =============================================================================
# JSON code documents
# =============================================================================

def code_to_document(code: QuantumCode) -> dict:
    """Serialize a code to the JSON document schema."""
    return {
        "label": code.label,
        "n": code.n,
        "q_p": code.q_p,
        "k": code.k,
        "q_l": code.q_l,
        "codewords": [[[float(a.real), float(a.imag)] for a in c]
                      for c in code.codewords],
    }


def load_code(document) -> QuantumCode:
    """Validate a JSON code document and build the QuantumCode.

    Schema: ``{"label": str, "n": int, "q_p": int, "k": int, "q_l": int,
    "codewords": [[[re, im], ...], ...]}`` with q_l^k codewords of length
    q_p^n each.  Raises ``SchemaError`` on malformed documents and
    ``NotOrthonormal`` when amplitudes fail the orthonormality check.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("code document must be a JSON object")
    for key in ("n", "q_p", "k", "q_l", "codewords"):
        if key not in document:
            raise SchemaError(f"missing field {key!r}")
    for key in ("n", "q_p", "k", "q_l"):
        if not isinstance(document[key], int) or document[key] < 1:
            raise SchemaError(f"field {key!r} must be a positive integer")
    label = document.get("label", "")
    if not isinstance(label, str):
        raise SchemaError("field 'label' must be a string")
    dim = document["q_p"] ** document["n"]
    raw = document["codewords"]
    if not isinstance(raw, list):
        raise SchemaError("field 'codewords' must be a list")
    codewords = []
    for ci, amps in enumerate(raw):
        if not isinstance(amps, list) or len(amps) != dim:
            raise SchemaError(f"codeword {ci} must list {dim} amplitudes")
        vec = np.zeros(dim, dtype=complex)
        for ai, pair in enumerate(amps):
            if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                    or not all(isinstance(x, (int, float)) for x in pair)):
                raise SchemaError(
                    f"codeword {ci} amplitude {ai} must be a [re, im] pair")
            vec[ai] = complex(pair[0], pair[1])
        codewords.append(vec)
    return QuantumCode(n=document["n"], q_p=document["q_p"], k=document["k"],
                       q_l=document["q_l"], codewords=codewords, label=label)
