"""Amplitude-damping channels and their tensor-product extensions.

The single-site qubit channel has Kraus operators

    A0 = |0><0| + sqrt(1-gamma) |1><1| ,   A1 = sqrt(gamma) |0><1| ,

so the excited state decays to the ground state with probability ``gamma``.
The qudit generalization damps k levels at once:

    A_k = sum_{r=k}^{q-1} sqrt(C(r,k)) sqrt((1-gamma)^(r-k) gamma^k) |r-k><r| .

On ``n`` sites the Kraus operators are all tensor products
``A_{i1} x ... x A_{in}``; the total damping order ``a = i1 + ... + in``
partitions them into error sets, which is the grouping every correction
condition in this package is stated against.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionCap, OutOfRange, ShapeMismatch
from .linalg import as_complex, dag, kron

#: Default cap on tensor-product Hilbert-space dimension (env override).
DEFAULT_DIM_CAP = 4096

TRACE_PRESERVING = "trace_preserving"
TRACE_NON_INCREASING = "trace_non_increasing"


def dim_cap() -> int:
    """Active dimension cap; override with the ADQEC_DIM_CAP env variable."""
    return int(os.environ.get("ADQEC_DIM_CAP", DEFAULT_DIM_CAP))


@dataclass
class KrausChannel:
    """Ordered list of Kraus operators with a trace flag.

    ``kind`` is ``trace_preserving`` (sum K†K = I) or ``trace_non_increasing``
    (sum K†K ⪯ I); the invariant is checked at construction.  ``labels``
    optionally records a multi-index per operator (site-wise damping counts).
    """

    dim_in: int
    dim_out: int
    kraus: list
    kind: str = TRACE_PRESERVING
    labels: list = field(default_factory=list)

    def __post_init__(self):
        self.kraus = [as_complex(k) for k in self.kraus]
        for k in self.kraus:
            if k.shape != (self.dim_out, self.dim_in):
                raise ShapeMismatch(
                    f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})")
        if self.kind not in (TRACE_PRESERVING, TRACE_NON_INCREASING):
            raise OutOfRange(f"unknown channel kind {self.kind!r}")
        total = self.completeness_matrix()
        gap = np.linalg.eigvalsh(total - np.eye(self.dim_in))
        if self.kind == TRACE_PRESERVING:
            if max(abs(gap[0]), abs(gap[-1])) > 1e-10:
                raise ShapeMismatch(
                    f"sum K†K deviates from identity by {max(abs(gap[0]), abs(gap[-1])):.2e}")
        else:
            if gap[-1] > 1e-10:
                raise ShapeMismatch(
                    f"sum K†K exceeds identity by {gap[-1]:.2e}")

    def completeness_matrix(self) -> np.ndarray:
        total = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for k in self.kraus:
            total += dag(k) @ k
        return total

    def __len__(self):
        return len(self.kraus)


@dataclass
class ErrorGrouping:
    """Partition of a channel's Kraus indices by total damping order.

    ``groups`` maps each order ``a`` to the member operator indices; ``eta``
    lists the group sizes in the same order as ``orders``.
    """

    orders: list
    members: dict  # order a -> list of Kraus indices

    def __post_init__(self):
        seen = [i for idxs in self.members.values() for i in idxs]
        if len(seen) != len(set(seen)):
            raise ShapeMismatch("grouping assigns a Kraus index to more than one group")

    @property
    def eta(self) -> list:
        return [len(self.members[a]) for a in self.orders]

    def restrict(self, max_order: int) -> "ErrorGrouping":
        orders = [a for a in self.orders if a <= max_order]
        return ErrorGrouping(orders, {a: list(self.members[a]) for a in orders})


def ad_qubit_kraus(gamma: float) -> KrausChannel:
    """Single-qubit amplitude-damping channel {A0, A1}."""
    if not 0.0 <= gamma <= 1.0:
        raise OutOfRange(f"gamma must be in [0, 1], got {gamma}")
    a0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    a1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(2, 2, [a0, a1], TRACE_PRESERVING, labels=[(0,), (1,)])


def ad_qudit_kraus(q: int, gamma: float) -> KrausChannel:
    """q-level amplitude-damping channel {A_0 .. A_{q-1}}.

    ``A_k`` is the k-level damping event; at q=2 this reduces to the qubit
    channel.
    """
    if q < 2:
        raise OutOfRange(f"local dimension must be >= 2, got {q}")
    if not 0.0 <= gamma <= 1.0:
        raise OutOfRange(f"gamma must be in [0, 1], got {gamma}")
    ops = []
    for k in range(q):
        a = np.zeros((q, q), dtype=complex)
        for r in range(k, q):
            a[r - k, r] = math.sqrt(math.comb(r, k)) * math.sqrt(
                (1.0 - gamma) ** (r - k) * gamma ** k)
        ops.append(a)
    return KrausChannel(q, q, ops, TRACE_PRESERVING,
                        labels=[(k,) for k in range(q)])


def tensor_channel(base: KrausChannel, n: int, cap: int | None = None):
    """n-fold tensor power of a single-site channel, grouped by damping order.

    Returns ``(channel, grouping)`` where the channel's operators are all
    ``A_{i1} x ... x A_{in}`` enumerated with the leftmost index most
    significant, and the grouping collects indices by ``a = i1 + ... + in``.
    For qubits the order-a group size is C(n, a).
    """
    if n < 1:
        raise OutOfRange(f"site count must be >= 1, got {n}")
    cap = dim_cap() if cap is None else cap
    q = base.dim_in
    dim = q ** n
    if dim > cap:
        raise DimensionCap(f"dimension {q}^{n} = {dim} exceeds cap {cap}")
    ops, labels, members = [], [], {}
    for multi in itertools.product(range(q), repeat=n):
        ops.append(kron(*[base.kraus[i] for i in multi]))
        labels.append(multi)
        members.setdefault(sum(multi), []).append(len(ops) - 1)
    orders = sorted(members)
    channel = KrausChannel(dim, dim, ops, base.kind, labels=labels)
    return channel, ErrorGrouping(orders, members)


def apply_channel(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Operator-sum action: rho -> sum_i K_i rho K_i†."""
    rho = as_complex(rho)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise ShapeMismatch(f"state shape {rho.shape} != ({ch.dim_in}, {ch.dim_in})")
    out = np.zeros((ch.dim_out, ch.dim_out), dtype=complex)
    for k in ch.kraus:
        out += k @ rho @ dag(k)
    return out


def compose(outer_ch: KrausChannel, inner_ch: KrausChannel) -> KrausChannel:
    """Channel composition (outer after inner); Kraus products K_out K_in."""
    if inner_ch.dim_out != outer_ch.dim_in:
        raise ShapeMismatch("inner output dimension != outer input dimension")
    ops = [ko @ ki for ki in inner_ch.kraus for ko in outer_ch.kraus]
    kind = (TRACE_PRESERVING
            if outer_ch.kind == inner_ch.kind == TRACE_PRESERVING
            else TRACE_NON_INCREASING)
    return KrausChannel(inner_ch.dim_in, outer_ch.dim_out, ops, kind)


def extend_with_identity(ch: KrausChannel, ref_dim: int) -> KrausChannel:
    """Act with the channel on a system while an appended reference idles."""
    ops = [kron(k, np.eye(ref_dim)) for k in ch.kraus]
    return KrausChannel(ch.dim_in * ref_dim, ch.dim_out * ref_dim, ops, ch.kind)


def truncate_to_order(ch: KrausChannel, grouping: ErrorGrouping, t: int):
    """Keep only Kraus operators of damping order <= t.

    The result is trace non-increasing in general (it drops error weight);
    the grouping is restricted accordingly.
    """
    kept = grouping.restrict(t)
    index_map = {}
    ops, labels, members = [], [], {}
    for a in kept.orders:
        members[a] = []
        for old in kept.members[a]:
            index_map[old] = len(ops)
            members[a].append(len(ops))
            ops.append(ch.kraus[old])
            if ch.labels:
                labels.append(ch.labels[old])
    channel = KrausChannel(ch.dim_in, ch.dim_out, ops, TRACE_NON_INCREASING,
                           labels=labels)
    return channel, ErrorGrouping(kept.orders, members)


def ad_code_channel(q: int, n: int, gamma: float, t: int | None = None,
                    cap: int | None = None):
    """Full (or order-truncated) n-site amplitude-damping channel.

    Convenience wrapper: builds the single-site channel for local dimension
    ``q``, tensors it over ``n`` sites, and truncates to order ``t`` when
    given.
    """
    base = ad_qudit_kraus(q, gamma) if q != 2 else ad_qubit_kraus(gamma)
    channel, grouping = tensor_channel(base, n, cap=cap)
    if t is None:
        return channel, grouping
    return truncate_to_order(channel, grouping, t)
