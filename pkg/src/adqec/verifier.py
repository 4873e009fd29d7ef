"""Checks of the grouped (probabilistic) error-correction conditions.

Two condition variants are implemented for a code with logical states
|i_L> and a channel whose Kraus operators are partitioned into groups
E^(a) = {E_m^(a)} of size eta_a:

* strict (``theorem1``):
    (i)  <i_L| E_m^(a)† E_p^(b) |j_L> = 0 for all m, p whenever i != j
         or a != b, and
    (ii) sum_m <i_L| E_m^(a)† E_p^(a) |i_L> = chi_i^a, independent of p,
         with every chi_i^a nonzero;

* relaxed (``theoremS2``): only the group-summed overlaps must vanish,
    sum_m <i_L| E_m^(a)† E_p^(b) |j_L> = chi_i^a delta_ij delta_ab
  for every p, so individual error states from different groups may overlap.

A strict pass implies a relaxed pass.  Either condition guarantees that a
probabilistic recovery built from the chi table corrects every grouped
error exactly (see ``adqec.recovery``).

All checks are numeric: every overlap is computed by direct matrix algebra
on the error states E_m^(a)|i_L>, at one or more damping strengths.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .channels import (ErrorGrouping, KrausChannel, ad_code_channel,
                       ad_qubit_kraus, ad_qudit_kraus)
from .codes import QuantumCode
from .errors import ChiZero, OutOfRange, ShapeMismatch
from .linalg import DEFAULT_TOL, gram_schmidt

#: Damping strengths used by default when sweeping a condition check.
DEFAULT_GAMMA_SAMPLES = (0.05, 0.1, 0.2, 0.3)

#: chi magnitudes at or below this floor count as formally zero.
DEFAULT_CHI_FLOOR = 1e-12

THEOREM1 = "theorem1"
THEOREM_S2 = "theoremS2"


@dataclass
class AqecReport:
    """Outcome of a condition check, with the chi table per sampled gamma."""

    condition: str
    passed: bool
    gammas: list
    chi: dict  # (codeword i, group a) -> one value per gamma
    eta: dict  # group a -> size
    max_violation: float
    violating_entries: list  # (i, j, a, b, m, p, magnitude), m = -1 for p-spread

    def to_jsonable(self) -> dict:
        return {
            "condition": self.condition,
            "passed": bool(self.passed),
            "gammas": [None if g is None else float(g) for g in self.gammas],
            "chi": {f"{i},{a}": [[float(np.real(v)), float(np.imag(v))] for v in vals]
                    for (i, a), vals in sorted(self.chi.items())},
            "eta": {str(a): int(s) for a, s in sorted(self.eta.items())},
            "max_violation": float(self.max_violation),
            "violating_entries": [
                {"i": i, "j": j, "a": a, "b": b, "m": m, "p": p,
                 "magnitude": float(mag)}
                for (i, j, a, b, m, p, mag) in self.violating_entries],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_jsonable(), indent=indent)


# =============================================================================
# Error-state tables
# =============================================================================

def error_state_table(code: QuantumCode, channel: KrausChannel,
                      grouping: ErrorGrouping) -> dict:
    """States E_m^(a)|i_L> from explicit operators.

    Returns ``{a: array of shape (eta_a, num_codewords, dim)}``.
    """
    if channel.dim_in != code.dim:
        raise ShapeMismatch(
            f"channel dimension {channel.dim_in} != code dimension {code.dim}")
    cw = code.codeword_matrix  # (K, dim)
    table = {}
    for a in grouping.orders:
        ops = [channel.kraus[idx] for idx in grouping.members[a]]
        table[a] = np.array([cw @ op.T for op in ops])
    return table


def ad_error_state_table(code: QuantumCode, gamma: float, t: int | None = None) -> dict:
    """States E_m^(a)|i_L> for the amplitude-damping channel, orders <= t.

    Applies the single-site damping operators factor by factor, so no dense
    n-site operator is ever materialized; usable up to a few thousand
    dimensions.  ``t`` defaults to the full order range n (q_p - 1).
    """
    q, n = code.q_p, code.n
    base = ad_qudit_kraus(q, gamma) if q != 2 else ad_qubit_kraus(gamma)
    max_t = n * (q - 1) if t is None else t
    shaped = [c.reshape((q,) * n) for c in code.codewords]
    table = {}
    for multi in itertools.product(range(q), repeat=n):
        a = sum(multi)
        if a > max_t:
            continue
        states = []
        for psi in shaped:
            out = psi
            for site, idx in enumerate(multi):
                out = np.moveaxis(
                    np.tensordot(base.kraus[idx], out, axes=([1], [site])),
                    0, site)
            states.append(out.reshape(-1))
        table.setdefault(a, []).append(np.array(states))
    return {a: np.array(v) for a, v in sorted(table.items())}


# =============================================================================
# Condition checks
# =============================================================================

def _flatten_table(table):
    """Stack all error states; return (matrix, row metadata (a, m, i))."""
    rows, meta = [], []
    for a in sorted(table):
        block = table[a]  # (eta_a, K, dim)
        eta_a, num_cw, _ = block.shape
        for m in range(eta_a):
            for i in range(num_cw):
                rows.append(block[m, i])
                meta.append((a, m, i))
    return np.array(rows), meta


def _evaluate_conditions(table, condition, tol, chi_floor):
    """Single-gamma evaluation; returns (violations, chi, zero_chi, max_viol)."""
    states, meta = _flatten_table(table)
    gram = np.conj(states) @ states.T
    a_idx = np.array([m[0] for m in meta])
    i_idx = np.array([m[2] for m in meta])
    m_idx = np.array([m[1] for m in meta])
    same_block = (a_idx[:, None] == a_idx[None, :]) & (i_idx[:, None] == i_idx[None, :])

    violations = []
    if condition == THEOREM1:
        off = np.abs(gram) * ~same_block
        max_viol = float(off.max(initial=0.0))
        bad_r, bad_c = np.nonzero(off > tol)
        if bad_r.size > 200:  # keep only the worst offenders
            order = np.argsort(-off[bad_r, bad_c])[:200]
            bad_r, bad_c = bad_r[order], bad_c[order]
        for r, c in zip(bad_r, bad_c):
            violations.append((int(i_idx[r]), int(i_idx[c]), int(a_idx[r]),
                               int(a_idx[c]), int(m_idx[r]), int(m_idx[c]),
                               float(off[r, c])))
    else:
        # group-sum rows over (a, i) blocks, columns stay individual (b, j, p)
        max_viol = 0.0
        for (a, i) in sorted({(int(a_), int(i_)) for a_, i_ in zip(a_idx, i_idx)}):
            block_rows = np.nonzero((a_idx == a) & (i_idx == i))[0]
            sums = gram[block_rows, :].sum(axis=0)
            outside = np.abs(sums) * ~((a_idx == a) & (i_idx == i))
            max_viol = max(max_viol, float(outside.max(initial=0.0)))
            for c in np.nonzero(outside > tol)[0]:
                violations.append((i, int(i_idx[c]), a, int(a_idx[c]), -1,
                                   int(m_idx[c]), float(outside[c])))

    # chi table: group-summed diagonal overlaps, equal for every p
    chi, zero_chi = {}, []
    chi_scale = 0.0
    per_p = {}
    for (a, i) in sorted({(int(a_), int(i_)) for a_, i_ in zip(a_idx, i_idx)}):
        block_rows = np.nonzero((a_idx == a) & (i_idx == i))[0]
        sums = gram[np.ix_(block_rows, block_rows)].sum(axis=0)
        per_p[(i, a)] = sums
        chi_scale = max(chi_scale, float(np.abs(sums).max(initial=0.0)))
    for (i, a), sums in per_p.items():
        spread = float(np.abs(sums - sums.mean()).max(initial=0.0))
        if spread > tol * max(chi_scale, 1.0):
            violations.append((i, i, a, a, -1, int(np.abs(sums - sums.mean()).argmax()),
                               spread))
            max_viol = max(max_viol, spread)
        value = complex(sums.mean())
        chi[(i, a)] = value
        if abs(value) <= chi_floor:
            zero_chi.append((i, a))
    return violations, chi, zero_chi, max_viol


def _as_factory(channel, grouping, gammas):
    if callable(channel):
        gs = list(DEFAULT_GAMMA_SAMPLES if gammas is None else gammas)
        return channel, gs
    if grouping is None:
        raise ShapeMismatch("explicit channel requires an explicit grouping")
    gs = [None] if gammas is None else list(gammas)
    if len(gs) != 1:
        raise ShapeMismatch("explicit channel carries a single operating point")
    return (lambda _g: (channel, grouping)), gs


def _run_check(code, channel, grouping, gammas, condition, tol, chi_floor):
    factory, gs = _as_factory(channel, grouping, gammas)
    chi_series, eta = {}, {}
    all_violations, max_viol = [], 0.0
    zero_chi_everywhere = []
    for g in gs:
        ch, grp = factory(g)
        table = error_state_table(code, ch, grp)
        violations, chi, zero_chi, mv = _evaluate_conditions(
            table, condition, tol, chi_floor)
        for a in grp.orders:
            eta[a] = len(grp.members[a])
        for key, value in chi.items():
            chi_series.setdefault(key, []).append(value)
        all_violations.extend(violations)
        max_viol = max(max_viol, mv)
        zero_chi_everywhere.extend((i, a, g) for i, a in zero_chi)
    passed = max_viol <= tol
    if passed and zero_chi_everywhere:
        i, a, g = zero_chi_everywhere[0]
        raise ChiZero(
            f"chi[{i},{a}] is zero within floor {chi_floor:.1e}"
            + ("" if g is None else f" at gamma={g}"))
    if zero_chi_everywhere:
        passed = False
    all_violations.sort(key=lambda rec: -rec[-1])
    return AqecReport(condition=condition, passed=passed, gammas=gs,
                      chi=chi_series, eta=eta, max_violation=max_viol,
                      violating_entries=all_violations[:16])


def check_theorem1(code: QuantumCode, channel, grouping: ErrorGrouping | None = None,
                   gammas=None, tol: float = DEFAULT_TOL,
                   chi_floor: float = DEFAULT_CHI_FLOOR) -> AqecReport:
    """Check the strict grouped conditions (pairwise orthogonality + chi).

    ``channel`` is either a callable ``gamma -> (KrausChannel, ErrorGrouping)``
    evaluated at every gamma in ``gammas`` (default ``DEFAULT_GAMMA_SAMPLES``),
    or an explicit ``KrausChannel`` together with ``grouping`` for a single
    operating point.

    Raises ``ChiZero`` when the orthogonality conditions hold but some
    chi_i^a vanishes (e.g. at gamma = 0 or 1); orthogonality violations are
    reported as a failed ``AqecReport`` instead.
    """
    return _run_check(code, channel, grouping, gammas, THEOREM1, tol, chi_floor)


def check_theoremS2(code: QuantumCode, channel, grouping: ErrorGrouping | None = None,
                    gammas=None, tol: float = DEFAULT_TOL,
                    chi_floor: float = DEFAULT_CHI_FLOOR) -> AqecReport:
    """Check the relaxed conditions (only group-summed overlaps must vanish)."""
    return _run_check(code, channel, grouping, gammas, THEOREM_S2, tol, chi_floor)


def ad_grouped_channel(code: QuantumCode, t: int | None = None, cap: int | None = None):
    """Factory gamma -> (AD channel truncated to order t, grouping) for a code."""
    t = code.correctable_order if t is None else t

    def factory(gamma):
        return ad_code_channel(code.q_p, code.n, gamma, t=t, cap=cap)

    return factory


# =============================================================================
# chi closed form for the permutation-invariant family
# =============================================================================

def chi_closed_form(n: int, e: int, a: int, gamma: float) -> float:
    """chi for a weight-e permutation-invariant codeword under order-a damping.

        chi = C(n-a, e-a)^2 * C(n, a) / (C(n, e) * C(n, e-a))
              * (1-gamma)^(e-a) * gamma^a

    valid for 0 <= a <= e <= n; at a = 0 this collapses to (1-gamma)^e.
    """
    if not (0 <= a <= e <= n):
        raise OutOfRange(f"need 0 <= a <= e <= n, got n={n}, e={e}, a={a}")
    if not 0.0 <= gamma <= 1.0:
        raise OutOfRange(f"gamma must be in [0, 1], got {gamma}")
    eta_a = math.comb(n, a)
    coeff = (math.comb(n - a, e - a) ** 2 * eta_a
             / (math.comb(n, e) * math.comb(n, e - a)))
    return coeff * (1.0 - gamma) ** (e - a) * gamma ** a


# =============================================================================
# Subspace atlas
# =============================================================================

@dataclass
class SubspaceAtlas:
    """Orthonormal bases of the error subspaces S_i^(a) = span{E_m^(a)|i_L>}.

    ``bases[(a, i)]`` has orthonormal rows (possibly zero rows removed), with
    dimension at most eta_a.  ``cross_overlaps`` records, for every pair of
    distinct (a, i) blocks, the largest absolute overlap between their basis
    vectors; a strict-condition pass makes all of these vanish, a relaxed
    pass need not.
    """

    bases: dict
    cross_overlaps: dict

    def dimension(self, a: int, i: int) -> int:
        return self.bases[(a, i)].shape[0]

    def max_cross_overlap(self) -> float:
        return max(self.cross_overlaps.values(), default=0.0)


def build_subspace_atlas(code: QuantumCode, channel, grouping: ErrorGrouping | None = None,
                         table: dict | None = None,
                         discard_tol: float = DEFAULT_TOL) -> SubspaceAtlas:
    """Gram-Schmidt bases of every S_i^(a), plus their mutual overlaps.

    Accepts either an explicit (channel, grouping) pair or a prebuilt error
    state table.
    """
    if table is None:
        table = error_state_table(code, channel, grouping)
    bases = {}
    for a in sorted(table):
        block = table[a]
        for i in range(block.shape[1]):
            basis = gram_schmidt(block[:, i, :], discard_tol=discard_tol)
            if basis.size == 0:
                basis = np.zeros((0, code.dim), dtype=complex)
            bases[(a, i)] = basis
    cross = {}
    keys = sorted(bases)
    for x in range(len(keys)):
        for y in range(x + 1, len(keys)):
            bx, by = bases[keys[x]], bases[keys[y]]
            if bx.shape[0] == 0 or by.shape[0] == 0:
                cross[(keys[x], keys[y])] = 0.0
            else:
                cross[(keys[x], keys[y])] = float(
                    np.abs(np.conj(bx) @ by.T).max())
    return SubspaceAtlas(bases=bases, cross_overlaps=cross)
