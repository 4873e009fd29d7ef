"""Figures of merit: state/worst-case/entanglement fidelity, series fits,
and robustness of the recovery against a misestimated damping strength.

Fidelity convention.  The probabilistic recovery produces an unnormalized
state whose trace is the success probability of the post-selection.  All
fidelities reported here are those of the *post-selected* (trace-normalized)
output,

    F = <psi| rho_out |psi> / Tr(rho_out) .

This is the convention under which the three-qubit code's closed forms
(state fidelity, worst-case 1/(1+gamma^2), entanglement fidelity
1/(1+0.5 gamma^2)) are reproduced exactly; for deterministic recoveries the
trace is one and the division is a no-op.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .channels import KrausChannel, ad_code_channel, apply_channel, extend_with_identity
from .codes import QuantumCode
from .errors import InsufficientSamples, OutOfRange, ShapeMismatch, UnsupportedK
from .linalg import dag, kron
from .recovery import RecoveryPlan, petz_recovery, standard_recovery

METRIC_STATE = "state"
METRIC_WORST = "worst_case"
METRIC_ENT = "entanglement"
METRIC_SUCCESS = "success_prob"
METRIC_ROBUST = "robust_entanglement"

_FIDELITY_METRICS = (METRIC_STATE, METRIC_WORST, METRIC_ENT, METRIC_ROBUST)


@dataclass
class FidelityCurve:
    """A metric sampled on a gamma grid, tagged with code/recovery labels."""

    gammas: list
    values: list
    metric: str
    code_label: str = ""
    recovery_label: str = ""

    def __post_init__(self):
        if len(self.gammas) != len(self.values):
            raise ShapeMismatch("gamma grid and value list differ in length")
        vals = np.asarray(self.values, dtype=float)
        if vals.size and (vals.min() < -1e-9 or vals.max() > 1.0 + 1e-9):
            raise OutOfRange(f"curve values outside [0, 1]: "
                             f"[{vals.min():.3e}, {vals.max():.3e}]")
        if self.metric in _FIDELITY_METRICS:
            for g, v in zip(self.gammas, self.values):
                if g == 0.0 and abs(v - 1.0) > 1e-9:
                    raise OutOfRange(f"fidelity at gamma=0 is {v}, expected 1")

    def rows(self):
        for g, v in zip(self.gammas, self.values):
            yield (f"{g:.17g}", f"{v:.17g}", self.metric,
                   self.code_label, self.recovery_label)


def curves_to_csv(curves) -> str:
    """Serialize curves: header gamma,value,metric,code,recovery."""
    lines = ["gamma,value,metric,code,recovery"]
    for curve in curves:
        for row in curve.rows():
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# =============================================================================
# Recovery handling
# =============================================================================

def _recovery_kraus(recovery, dim: int) -> list:
    """Kraus list of the recovery map: plan, explicit channel, or identity."""
    if recovery is None:
        return [np.eye(dim, dtype=complex)]
    if isinstance(recovery, RecoveryPlan):
        if recovery.dim != dim:
            raise ShapeMismatch("recovery plan dimension does not match the code")
        return [r @ p for r, p in zip(recovery.recovery_ops, recovery.projectors)]
    if isinstance(recovery, KrausChannel):
        if recovery.dim_in != dim:
            raise ShapeMismatch("recovery channel dimension does not match the code")
        return list(recovery.kraus)
    raise ShapeMismatch(f"unsupported recovery object {type(recovery).__name__}")


def logical_bloch_state(code: QuantumCode, theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L> (single logical qubit)."""
    if code.num_codewords != 2:
        raise UnsupportedK("Bloch parameterization needs exactly two codewords")
    return (math.cos(theta / 2.0) * code.codewords[0]
            + np.exp(1j * phi) * math.sin(theta / 2.0) * code.codewords[1])


# =============================================================================
# Point metrics
# =============================================================================

def state_fidelity(code: QuantumCode, recovery, theta: float, phi: float,
                   gamma: float) -> float:
    """Post-selected fidelity of one Bloch-sphere input under full damping."""
    psi = logical_bloch_state(code, theta, phi)
    channel, _ = ad_code_channel(code.q_p, code.n, gamma)
    noisy = apply_channel(channel, np.outer(psi, np.conj(psi)))
    num = 0.0
    den = 0.0
    for k in _recovery_kraus(recovery, code.dim):
        branch = k @ noisy @ dag(k)
        num += float(np.real(np.conj(psi) @ branch @ psi))
        den += float(np.real(np.trace(branch)))
    return num / den


def success_probability(code: QuantumCode, plan: RecoveryPlan, theta: float,
                        phi: float, gamma: float) -> float:
    """Trace of the unnormalized recovered state under the full channel."""
    psi = logical_bloch_state(code, theta, phi)
    channel, _ = ad_code_channel(code.q_p, code.n, gamma)
    branches = np.array([k @ psi for k in channel.kraus])
    _, p_success = plan.correct_vectors(branches)
    return p_success


def entanglement_fidelity(code: QuantumCode, recovery, gamma: float) -> float:
    """Post-selected overlap with the purification of the maximally mixed
    logical state, (1/sqrt(q_l^k)) sum_i |i_L>|i>."""
    ref = code.num_codewords
    cw = code.codeword_matrix
    psi_p = np.zeros(code.dim * ref, dtype=complex)
    for i in range(ref):
        psi_p += kron(cw[i], np.eye(ref)[i])
    psi_p /= math.sqrt(ref)
    channel, _ = ad_code_channel(code.q_p, code.n, gamma)
    noisy = apply_channel(extend_with_identity(channel, ref),
                          np.outer(psi_p, np.conj(psi_p)))
    num = 0.0
    den = 0.0
    eye_ref = np.eye(ref, dtype=complex)
    for k in _recovery_kraus(recovery, code.dim):
        op = kron(k, eye_ref)
        branch = op @ noisy @ dag(op)
        num += float(np.real(np.conj(psi_p) @ branch @ psi_p))
        den += float(np.real(np.trace(branch)))
    return num / den


# =============================================================================
# Worst-case fidelity over the logical Bloch sphere
# =============================================================================

def _bloch_overlap_tensors(code, recovery, gamma):
    """Amplitude tensor A[b, u, x] = <u_L| K_b E_p |x_L> (b runs over all
    recovery x channel Kraus pairs) and full-norm Gram D[x, y]."""
    channel, _ = ad_code_channel(code.q_p, code.n, gamma)
    cw = code.codeword_matrix
    vecs = []
    for k in _recovery_kraus(recovery, code.dim):
        for e in channel.kraus:
            vecs.append((k @ (e @ cw.T)).T)
    vecs = np.array(vecs)                     # (B, num_cw, dim): K E |x_L>
    amp = np.einsum("ud,bxd->bux", np.conj(cw), vecs)
    gramd = np.einsum("bxd,byd->xy", np.conj(vecs), vecs)
    return amp, gramd


def _bloch_fidelity_from_tensors(amp, gramd, thetas, phis):
    betas = np.stack([np.cos(thetas / 2.0),
                      np.exp(1j * phis) * np.sin(thetas / 2.0)], axis=-1)
    s = np.einsum("bux,gu,gx->gb", amp, np.conj(betas), betas)
    num = np.sum(np.abs(s) ** 2, axis=-1)
    den = np.real(np.einsum("xy,gx,gy->g", gramd, np.conj(betas), betas))
    return np.real(num) / den


def worst_case_fidelity(code: QuantumCode, recovery, gamma: float,
                        grid: tuple = (181, 73), refine: bool = True) -> tuple:
    """Minimize the post-selected fidelity over pure logical inputs.

    Grid search over (theta, phi) followed by Nelder-Mead refinement.
    Returns ``(f_min, theta_star, phi_star)``.  Only single-logical-qubit
    codes are supported.
    """
    if code.num_codewords != 2:
        raise UnsupportedK("worst-case search needs exactly two codewords")
    amp, gramd = _bloch_overlap_tensors(code, recovery, gamma)
    thetas = np.linspace(0.0, math.pi, grid[0])
    phis = np.linspace(0.0, 2.0 * math.pi, grid[1], endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    values = _bloch_fidelity_from_tensors(amp, gramd, tt.ravel(), pp.ravel())
    best = int(np.argmin(values))
    f_min, th, ph = float(values[best]), float(tt.ravel()[best]), float(pp.ravel()[best])
    if refine:
        def objective(x):
            return float(_bloch_fidelity_from_tensors(
                amp, gramd, np.array([x[0]]), np.array([x[1]]))[0])
        res = scipy.optimize.minimize(objective, [th, ph], method="Nelder-Mead",
                                      options={"xatol": 1e-10, "fatol": 1e-12,
                                               "maxiter": 400})
        if res.fun <= f_min:
            f_min, th, ph = float(res.fun), float(res.x[0]), float(res.x[1])
    return f_min, th, ph


# =============================================================================
# Leading-order series fits
# =============================================================================

@dataclass
class FitResult:
    """Coefficients c_j of 1 - F = sum_j c_j gamma^j with standard errors."""

    degree: int
    coefficients: np.ndarray   # index j-1 holds c_j
    stderr: np.ndarray

    def coefficient(self, power: int) -> float:
        return float(self.coefficients[power - 1])


def fit_leading_order(gammas, values=None, degree: int = 4) -> FitResult:
    """Least-squares fit of the infidelity 1 - F in powers of gamma.

    Accepts a FidelityCurve or parallel (gammas, values) arrays; the model
    has no constant term, so the curve should approach 1 as gamma -> 0.
    """
    if isinstance(gammas, FidelityCurve):
        curve = gammas
        gs = np.asarray(curve.gammas, dtype=float)
        vals = np.asarray(curve.values, dtype=float)
    else:
        gs = np.asarray(gammas, dtype=float)
        vals = np.asarray(values, dtype=float)
    if gs.size < max(degree + 2, 20):
        raise InsufficientSamples(
            f"need at least {max(degree + 2, 20)} samples, got {gs.size}")
    target = 1.0 - vals
    design = np.vander(gs, degree + 1, increasing=True)[:, 1:]
    coeff, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    residual = target - design @ coeff
    dof = max(gs.size - degree, 1)
    sigma2 = float(residual @ residual) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return FitResult(degree=degree, coefficients=coeff,
                     stderr=np.sqrt(np.clip(np.diag(cov), 0.0, None)))


# =============================================================================
# Robustness against misestimated damping strength
# =============================================================================

@dataclass
class RobustnessConfig:
    """Averaging setup for a Gaussian-distributed damping estimate.

    The recovery is synthesized at the estimated strength gamma_e while the
    channel damps at the true gamma; the entanglement fidelity is averaged
    over gamma_e ~ N(gamma, sigma^2) restricted to ``clip``.
    """

    sigma: float
    rule: str = "gauss_legendre"
    nodes: int = 129
    shots: int = 2000
    seed: int = 0
    clip: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.sigma < 0:
            raise OutOfRange("sigma must be >= 0")
        if self.nodes < 1 or self.shots < 1:
            raise OutOfRange("node/shot counts must be >= 1")
        if self.rule not in ("gauss_legendre", "monte_carlo"):
            raise OutOfRange(f"unknown integration rule {self.rule!r}")


def robust_entanglement_fidelity(code: QuantumCode, gamma_true: float,
                                 cfg: RobustnessConfig, t: int | None = None) -> float:
    """Average entanglement fidelity under a misestimated damping strength.

    sigma = 0 reduces exactly to ``entanglement_fidelity`` at gamma_true.
    The Gaussian weight is truncated to clip ∩ [gamma - 6 sigma,
    gamma + 6 sigma] and renormalized (the discarded mass is < 2e-9).
    """
    if cfg.sigma == 0.0:
        plan = standard_recovery(code, gamma_true, t=t)
        return entanglement_fidelity(code, plan, gamma_true)
    lo = max(cfg.clip[0], gamma_true - 6.0 * cfg.sigma)
    hi = min(cfg.clip[1], gamma_true + 6.0 * cfg.sigma)
    if cfg.rule == "gauss_legendre":
        nodes, weights = np.polynomial.legendre.leggauss(cfg.nodes)
        ge = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        density = np.exp(-0.5 * ((ge - gamma_true) / cfg.sigma) ** 2)
        w = weights * density
        w /= w.sum()
        total = 0.0
        for gamma_e, weight in zip(ge, w):
            plan = standard_recovery(code, float(gamma_e), t=t)
            total += weight * entanglement_fidelity(code, plan, gamma_true)
        return float(total)
    rng = np.random.default_rng(cfg.seed)
    draws = np.clip(rng.normal(gamma_true, cfg.sigma, size=cfg.shots), lo, hi)
    total = 0.0
    for gamma_e in draws:
        plan = standard_recovery(code, float(gamma_e), t=t)
        total += entanglement_fidelity(code, plan, gamma_true)
    return float(total / cfg.shots)


# =============================================================================
# Curve sweeps
# =============================================================================

def make_recovery(code: QuantumCode, kind: str, gamma: float, t: int | None = None):
    """Recovery object for a sweep: 'probabilistic', 'petz', or 'none'."""
    if kind == "probabilistic":
        return standard_recovery(code, gamma, t=t)
    if kind == "petz":
        channel, _ = ad_code_channel(code.q_p, code.n, gamma)
        return petz_recovery(code, channel)
    if kind == "none":
        return None
    raise OutOfRange(f"unknown recovery kind {kind!r}")


def fidelity_curve(code: QuantumCode, metric: str, gammas,
                   recovery_kind: str = "probabilistic", t: int | None = None,
                   theta: float = 0.0, phi: float = 0.0,
                   sigma: float = 0.0, cfg: RobustnessConfig | None = None) -> FidelityCurve:
    """Sweep one metric over a gamma grid, synthesizing recovery per point."""
    values = []
    for gamma in gammas:
        gamma = float(gamma)
        if metric == METRIC_ROBUST:
            config = cfg if cfg is not None else RobustnessConfig(sigma=sigma)
            values.append(robust_entanglement_fidelity(code, gamma, config, t=t))
            continue
        recovery = make_recovery(code, recovery_kind, gamma, t=t)
        if metric == METRIC_ENT:
            values.append(entanglement_fidelity(code, recovery, gamma))
        elif metric == METRIC_STATE:
            values.append(state_fidelity(code, recovery, theta, phi, gamma))
        elif metric == METRIC_WORST:
            values.append(worst_case_fidelity(code, recovery, gamma)[0])
        elif metric == METRIC_SUCCESS:
            if not isinstance(recovery, RecoveryPlan):
                raise OutOfRange("success probability needs the probabilistic recovery")
            values.append(success_probability(code, recovery, theta, phi, gamma))
        else:
            raise OutOfRange(f"unknown metric {metric!r}")
    return FidelityCurve(gammas=[float(g) for g in gammas], values=values,
                         metric=metric, code_label=code.label,
                         recovery_label=recovery_kind if metric != METRIC_ROBUST
                         else f"probabilistic sigma={sigma}")
