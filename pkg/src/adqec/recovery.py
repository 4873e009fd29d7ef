"""Synthesis and evaluation of the probabilistic recovery channel.

Once a (code, channel, grouping) triple passes the strict grouped
conditions, the recovery is built constructively:

* P_a projects onto the direct sum of the error subspaces S_i^(a) (the
  syndrome measurement; an extra projector P_abort = I - sum_a P_a aborts
  the protocol),
* R_a = lambda_a sum_i (1/chi_i^a) |i_L><i_L| sum_m E_m^(a)†  undoes the
  group-a distortion, with lambda_a fixed so the largest eigenvalue of
  R_a† R_a is one,
* {R_a P_a} is then a trace non-increasing channel; the trace of its output
  is the probability that post-selection succeeds.

Two unitary-dilation constructions are provided as independent simulation
oracles: embedding the whole trace non-increasing channel with one ancilla
qubit (Kraus {M_k x I, M_alpha x X}), and realizing a single contraction R
through the block unitary

    U~ = [[sqrt(R†R), -sqrt(I-R†R)], [sqrt(I-R†R), sqrt(R†R)]]

followed by the polar unitary of R and ancilla post-selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .channels import (TRACE_NON_INCREASING, TRACE_PRESERVING, ErrorGrouping,
                       KrausChannel, apply_channel)
from .codes import QuantumCode
from .errors import (ChiZero, ConditionsNotMet, NotContraction, ShapeMismatch,
                     SingularSupport)
from .linalg import (DEFAULT_TOL, dag, kron, largest_eigenvalue_psd,
                     principal_sqrt_psd, pseudo_inverse_sqrt_psd,
                     support_projector)
from .verifier import (DEFAULT_CHI_FLOOR, THEOREM1, SubspaceAtlas,
                       _evaluate_conditions, ad_error_state_table,
                       build_subspace_atlas, error_state_table)

#: Error-state blocks whose largest amplitude is below this are treated as
#: identically-zero error sets (e.g. damping groups at gamma = 0) and dropped
#: from the plan instead of tripping the chi != 0 requirement.
ZERO_GROUP_FLOOR = 1e-13


@dataclass
class RecoveryPlan:
    """Projectors, recovery operators and scales for one operating point.

    The plan is stored in low-rank form (group-summed error states ``w_i^a``
    plus the subspace atlas); dense ``projectors``/``recovery_ops``/``abort``
    matrices are assembled on demand.
    """

    code: QuantumCode
    gamma: float | None
    orders: list
    eta: list
    chi: np.ndarray          # (num_codewords, num_groups)
    scales: np.ndarray       # lambda_a
    group_sums: list         # per group: array (num_codewords, dim) of w_i^a
    atlas: SubspaceAtlas
    _dense: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.code.dim

    @property
    def group_count(self) -> int:
        return len(self.orders)

    @property
    def projectors(self) -> list:
        """Dense P_a, one per kept group."""
        if "P" not in self._dense:
            ps = []
            for a in self.orders:
                basis = np.vstack([self.atlas.bases[(a, i)]
                                   for i in range(self.code.num_codewords)
                                   if self.atlas.bases[(a, i)].shape[0] > 0])
                ps.append(np.conj(basis.T) @ basis)
            self._dense["P"] = ps
        return self._dense["P"]

    @property
    def recovery_ops(self) -> list:
        """Dense R_a = lambda_a sum_i |i_L><w_i^a| / chi_i^a."""
        if "R" not in self._dense:
            cw = self.code.codeword_matrix
            ops = []
            for g, _a in enumerate(self.orders):
                weighted = np.conj(self.group_sums[g]) / self.chi[:, g][:, None]
                ops.append(self.scales[g] * (cw.T @ weighted))
            self._dense["R"] = ops
        return self._dense["R"]

    @property
    def abort(self) -> np.ndarray:
        """P_abort = I - sum_a P_a."""
        if "abort" not in self._dense:
            total = np.eye(self.dim, dtype=complex)
            for p in self.projectors:
                total = total - p
            self._dense["abort"] = total
        return self._dense["abort"]

    def success_channel(self) -> KrausChannel:
        """The trace non-increasing channel {R_a P_a}."""
        ops = [r @ p for r, p in zip(self.recovery_ops, self.projectors)]
        return KrausChannel(self.dim, self.dim, ops, TRACE_NON_INCREASING)

    def success_probability_correctable(self) -> float:
        """sum_a |lambda_a|^2 eta_a, the state-independent success weight
        when only grouped (correctable) errors act."""
        return float(np.sum(np.abs(self.scales) ** 2 * np.array(self.eta)))

    def correct_vectors(self, vectors) -> tuple:
        """Recover a batch of pure noisy branches without dense operators.

        ``vectors`` has shape (num_branches, dim), one row per Kraus branch
        E_p |psi>.  Returns ``(amplitudes, p_success)`` where ``amplitudes``
        has shape (num_groups, num_branches, num_codewords): row (a, p) holds
        the codeword-basis amplitudes of R_a P_a E_p |psi>.  The recovered
        density matrix is supported on the codespace, so these amplitudes
        determine it completely.
        """
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        amps = np.empty((self.group_count, vectors.shape[0],
                         self.code.num_codewords), dtype=complex)
        for g in range(self.group_count):
            w_tilde = self.group_sums[g] / self.chi[:, g][:, None]
            amps[g] = self.scales[g] * (vectors @ dag(w_tilde))
        p_success = float(np.sum(np.abs(amps) ** 2))
        return amps, p_success


def _synthesize_from_table(code, table, gamma, tol, chi_floor):
    kept = {a: blk for a, blk in table.items()
            if np.max(np.abs(blk), initial=0.0) > ZERO_GROUP_FLOOR}
    if not kept:
        raise ConditionsNotMet("all error groups are identically zero")
    violations, chi_map, zero_chi, max_viol = _evaluate_conditions(
        kept, THEOREM1, tol, chi_floor)
    ortho_viol = [v for v in violations if v[4] != -1 or (v[0], v[2]) != (v[1], v[3])]
    if max_viol > tol:
        raise ConditionsNotMet(
            f"grouped conditions violated by {max_viol:.3e} "
            f"({len(ortho_viol)} orthogonality entries)")
    if zero_chi:
        i, a = zero_chi[0]
        raise ChiZero(f"chi[{i},{a}] vanishes for a non-zero error group")
    orders = sorted(kept)
    num_cw = code.num_codewords
    chi = np.array([[chi_map[(i, a)] for a in orders] for i in range(num_cw)])
    group_sums, scales, eta = [], [], []
    for g, a in enumerate(orders):
        block = kept[a]                       # (eta_a, K, dim)
        eta.append(block.shape[0])
        w = block.sum(axis=0)                 # (K, dim)
        group_sums.append(w)
        w_tilde = w / chi[:, g][:, None]
        gram = np.conj(w_tilde) @ w_tilde.T
        top = largest_eigenvalue_psd(gram, tol=1e-9)
        scales.append(1.0 / math.sqrt(top))
    atlas = build_subspace_atlas(code, None, table=kept)
    return RecoveryPlan(code=code, gamma=gamma, orders=orders, eta=eta,
                        chi=chi, scales=np.array(scales),
                        group_sums=group_sums, atlas=atlas)


def synthesize_recovery(code: QuantumCode, channel: KrausChannel,
                        grouping: ErrorGrouping, gamma: float | None = None,
                        tol: float = DEFAULT_TOL,
                        chi_floor: float = DEFAULT_CHI_FLOOR) -> RecoveryPlan:
    """Build the recovery plan for an explicit (channel, grouping) pair.

    The strict grouped conditions are re-checked on the given operators;
    failures raise ``ConditionsNotMet`` (orthogonality broken) or ``ChiZero``
    (a non-zero group with vanishing chi).  Identically-zero groups are
    dropped, so the degenerate gamma = 0 point synthesizes to the bare
    codespace projection.
    """
    table = error_state_table(code, channel, grouping)
    return _synthesize_from_table(code, table, gamma, tol, chi_floor)


def standard_recovery(code: QuantumCode, gamma: float, t: int | None = None,
                      tol: float = DEFAULT_TOL,
                      chi_floor: float = DEFAULT_CHI_FLOOR) -> RecoveryPlan:
    """Recovery plan for the amplitude-damping channel truncated to order t.

    ``t`` defaults to the code's design order.  Error states are built
    site-by-site, so this stays cheap even for ~10-qubit codes.
    """
    t = code.correctable_order if t is None else t
    if t is None:
        raise ShapeMismatch("code has no design order; pass t explicitly")
    table = ad_error_state_table(code, gamma, t=t)
    return _synthesize_from_table(code, table, gamma, tol, chi_floor)


def correct_state(plan: RecoveryPlan, rho: np.ndarray) -> tuple:
    """Apply the probabilistic recovery to a (generally mixed) noisy state.

    Returns ``(recovered, p_success, p_abort)`` with the recovered state left
    unnormalized: its trace is the success probability of the post-selected
    protocol.  ``p_abort`` is the weight caught by the abort projector.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (plan.dim, plan.dim):
        raise ShapeMismatch(f"state shape {rho.shape} != ({plan.dim}, {plan.dim})")
    recovered = np.zeros_like(rho)
    for r, p in zip(plan.recovery_ops, plan.projectors):
        rp = r @ p
        recovered += rp @ rho @ dag(rp)
    p_success = float(np.real(np.trace(recovered)))
    ab = plan.abort
    p_abort = float(np.real(np.trace(ab @ rho @ dag(ab))))
    return recovered, p_success, p_abort


def three_qubit_success_probability(theta: float, gamma: float) -> float:
    """Closed-form success probability of the three-qubit code's recovery.

        p(theta, gamma) = (1 - gamma)^2 (1 + gamma^2 sin^2(theta/2))

    for the logical input cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L>
    under the full damping channel.  The phase phi drops out; the minimum
    over inputs sits at theta = 0 and equals (1 - gamma)^2.  This is the
    form validated by the brute-force trace computation in the test suite
    (one widely-circulated variant flips the sign of the gamma^2 term; the
    direct computation rules it out).
    """
    return (1.0 - gamma) ** 2 * (1.0 + gamma ** 2 * math.sin(theta / 2.0) ** 2)


# =============================================================================
# Unitary dilations (independent simulation oracles)
# =============================================================================

@dataclass
class DilationCircuit:
    """A unitary embedding of a trace non-increasing map, one ancilla qubit.

    Ancilla outcome |0> heralds success.  ``kind = "channel"`` carries the
    extended Kraus channel {M_k x I, M_alpha x X} on system (x) ancilla;
    ``kind = "gate"`` carries the block unitary U~ (ancilla (x) system
    ordering) together with the polar unitary U of the embedded contraction.
    """

    kind: str
    system_dim: int
    extended: KrausChannel | None = None
    residual: np.ndarray | None = None
    block_unitary: np.ndarray | None = None
    polar_unitary: np.ndarray | None = None

    def success_branch(self, rho_sys: np.ndarray) -> np.ndarray:
        """Simulate on system x ancilla(|0>) and project the ancilla on |0>."""
        rho_sys = np.asarray(rho_sys, dtype=complex)
        if rho_sys.shape != (self.system_dim, self.system_dim):
            raise ShapeMismatch("state dimension does not match the dilation")
        if self.kind == "channel":
            anc0 = np.zeros((2, 2), dtype=complex)
            anc0[0, 0] = 1.0
            out = apply_channel(self.extended, kron(rho_sys, anc0))
            return out[0::2, 0::2]
        # gate: |0> x psi lives in the top block of the ancilla-major layout
        d = self.system_dim
        full = np.kron(np.eye(2), self.polar_unitary) @ self.block_unitary
        effective = full[:d, :d]
        return effective @ rho_sys @ dag(effective)


def build_dilation_channel(plan_or_ops, tol: float = DEFAULT_TOL) -> DilationCircuit:
    """Embed a trace non-increasing channel {M_k} into a unitary dilation.

    Accepts a RecoveryPlan (uses its {R_a P_a}) or an explicit KrausChannel.
    The residual operator M_alpha = sqrt(I - sum_k M_k† M_k) completes the
    set; the extended channel {M_k x I, M_alpha x X} is trace preserving on
    system (x) ancilla, and measuring the ancilla in the Z basis reproduces
    the original map on outcome |0>.
    """
    if isinstance(plan_or_ops, RecoveryPlan):
        channel = plan_or_ops.success_channel()
    else:
        channel = plan_or_ops
    d = channel.dim_in
    deficit = np.eye(d, dtype=complex) - channel.completeness_matrix()
    m_alpha = principal_sqrt_psd(deficit, tol=1e-9)
    eye2 = np.eye(2, dtype=complex)
    pauli_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    ops = [kron(m, eye2) for m in channel.kraus] + [kron(m_alpha, pauli_x)]
    extended = KrausChannel(2 * d, 2 * d, ops, TRACE_PRESERVING)
    return DilationCircuit(kind="channel", system_dim=d, extended=extended,
                           residual=m_alpha)


def build_nonunitary_gate(r_op: np.ndarray, tol: float = 1e-9) -> DilationCircuit:
    """Realize a contraction R (R†R ⪯ I) as a block unitary plus ancilla.

    Raises ``NotContraction`` when R†R has an eigenvalue above 1 + tol.
    Post-selecting the ancilla on |0> after U~ and the polar unitary U
    applies R with probability ||R psi||^2.
    """
    r_op = np.asarray(r_op, dtype=complex)
    d = r_op.shape[0]
    if r_op.shape != (d, d):
        raise ShapeMismatch("contraction must be square")
    rdr = dag(r_op) @ r_op
    top = largest_eigenvalue_psd(rdr, tol=tol)
    if top > 1.0 + tol:
        raise NotContraction(f"largest eigenvalue of R†R is {top:.6f} > 1")
    c_block = principal_sqrt_psd(rdr, tol=tol)
    s_block = principal_sqrt_psd(np.eye(d) - rdr, tol=tol)
    u_tilde = np.block([[c_block, -s_block], [s_block, c_block]])
    gap = np.max(np.abs(dag(u_tilde) @ u_tilde - np.eye(2 * d)))
    if gap > 1e-9:
        raise NotContraction(f"dilation unitary deviates from unitarity by {gap:.2e}")
    polar_u, _ = scipy.linalg.polar(r_op)
    return DilationCircuit(kind="gate", system_dim=d, block_unitary=u_tilde,
                           polar_unitary=polar_u)


def run_gate_dilated_recovery(plan: RecoveryPlan, rho: np.ndarray) -> tuple:
    """Syndrome measurement + per-branch gate dilation of each R_a.

    Independent of ``correct_state``'s direct algebra: each branch applies
    the numerically assembled circuit operator of the R_a dilation to
    P_a rho P_a and keeps the ancilla-|0> block.  Returns
    ``(recovered, p_success)``.
    """
    rho = np.asarray(rho, dtype=complex)
    recovered = np.zeros_like(rho)
    for r, p in zip(plan.recovery_ops, plan.projectors):
        branch = p @ rho @ dag(p)
        circuit = build_nonunitary_gate(r)
        recovered += circuit.success_branch(branch)
    return recovered, float(np.real(np.trace(recovered)))


# =============================================================================
# Petz recovery (deterministic comparison baseline)
# =============================================================================

def petz_recovery(code: QuantumCode, channel: KrausChannel,
                  rcond: float = 1e-12) -> KrausChannel:
    """Petz (transpose) recovery channel with the flat codespace reference.

    Kraus operators are rho^{1/2} C_i† N(rho)^{-1/2} with rho = P / q_l^k,
    plus the projector onto the complement of N(rho)'s support to make the
    channel trace preserving (that completion never receives weight from
    states reached through the noisy codespace).
    """
    proj = code.projector()
    rho_ref = proj / code.num_codewords
    n_out = apply_channel(channel, rho_ref)
    if largest_eigenvalue_psd(n_out, tol=1e-9) < 1e-14:
        raise SingularSupport("channel output of the codespace reference is zero")
    n_inv_sqrt = pseudo_inverse_sqrt_psd(n_out, rcond=rcond)
    rho_sqrt = proj / math.sqrt(code.num_codewords)
    ops = [rho_sqrt @ dag(k) @ n_inv_sqrt for k in channel.kraus]
    completion = np.eye(code.dim, dtype=complex) - support_projector(n_out, rcond=rcond)
    ops.append(completion)
    return KrausChannel(code.dim, code.dim, ops, TRACE_PRESERVING)
