"""Noise-adapted Hamming bounds for amplitude damping, in exact arithmetic.

The number of damping errors of order a on n sites with local dimension q_p
is the coefficient of x^a in (1 + x + ... + x^(q_p - 1))^n,

    zeta_a = sum_i (-1)^i C(n, i) C(a - i q_p + n - 1, n - 1) ,

and a code storing k logical qudits of dimension q_l that corrects damping
up to order t must satisfy the packing inequality

    q_p^n >= sum_{a=0}^{t} zeta_a * q_l^k .

For qubits this reduces to 2^(n-k) >= sum_{i<=t} C(n, i); the
permutation-invariant [2t+1, 1] family saturates it, which is what
``verify_family_optimality`` checks.  Everything here is integer-exact:
saturation is an equality claim, so floating point is inadmissible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import AdqecError, OutOfRange


def binomial(m: int, r: int) -> int:
    """C(m, r), defined as 0 outside 0 <= r <= m."""
    if r < 0 or r > m or m < 0:
        return 0
    return math.comb(m, r)


def zeta_polynomial(n: int, q_p: int) -> list:
    """All coefficients of (1 + x + ... + x^(q_p-1))^n by exact convolution."""
    if n < 0 or q_p < 2:
        raise OutOfRange(f"need n >= 0 and q_p >= 2, got n={n}, q_p={q_p}")
    coeffs = [1]
    block = [1] * q_p
    for _ in range(n):
        out = [0] * (len(coeffs) + q_p - 1)
        for i, c in enumerate(coeffs):
            for j, b in enumerate(block):
                out[i + j] += c * b
        coeffs = out
    return coeffs


def zeta(n: int, a: int, q_p: int = 2) -> int:
    """Number of order-a damping errors on n q_p-level sites.

    Computed by the inclusion-exclusion sum and cross-checked against the
    generating-function expansion; the two routes must agree exactly.
    """
    if not 0 <= a <= n * (q_p - 1):
        raise OutOfRange(f"order {a} outside [0, {n * (q_p - 1)}]")
    total = 0
    for i in range(a // q_p + 1):
        total += (-1) ** i * binomial(n, i) * binomial(a - i * q_p + n - 1, n - 1)
    expansion = zeta_polynomial(n, q_p)[a]
    if total != expansion:
        raise AdqecError(
            f"zeta routes disagree: inclusion-exclusion {total} vs expansion {expansion}")
    return total


def binomial_identity_holds(n: int, a: int) -> bool:
    """C(n, a) = sum_i (-1)^i C(n, i) C(a - 2i + n - 1, n - 1), exactly."""
    rhs = sum((-1) ** i * binomial(n, i) * binomial(a - 2 * i + n - 1, n - 1)
              for i in range(a // 2 + 1))
    return math.comb(n, a) == rhs


@dataclass
class BoundReport:
    """Exact evaluation of the packing inequality for one parameter tuple."""

    n: int
    k: int
    t: int
    q_p: int
    q_l: int
    lhs: int
    rhs: int

    @property
    def satisfied(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def saturated(self) -> bool:
        return self.lhs == self.rhs

    def to_jsonable(self) -> dict:
        return {"n": self.n, "k": self.k, "t": self.t,
                "q_p": self.q_p, "q_l": self.q_l,
                "lhs": self.lhs, "rhs": self.rhs,
                "satisfied": self.satisfied, "saturated": self.saturated}


def check_bound(n: int, k: int, t: int, q_p: int = 2, q_l: int = 2) -> BoundReport:
    """Exact big-integer comparison q_p^n >= sum_{a<=t} zeta_a q_l^k."""
    if n < 1 or k < 1 or t < 0 or q_p < 2 or q_l < 2:
        raise OutOfRange("parameters must be positive (q >= 2)")
    if t > n * (q_p - 1):
        raise OutOfRange(f"order {t} exceeds maximum {n * (q_p - 1)}")
    lhs = q_p ** n
    rhs = sum(zeta(n, a, q_p) for a in range(t + 1)) * q_l ** k
    return BoundReport(n=n, k=k, t=t, q_p=q_p, q_l=q_l, lhs=lhs, rhs=rhs)


def verify_family_optimality(t_max: int) -> list:
    """Saturation reports for the [2t+1, 1] qubit family, t = 1 .. t_max.

    Each report must be an exact equality 4^t = sum_{a<=t} C(2t+1, a);
    a non-saturated member raises, since the family is optimal by
    construction.
    """
    if t_max < 1:
        raise OutOfRange("t_max must be >= 1")
    reports = []
    for t in range(1, t_max + 1):
        report = check_bound(2 * t + 1, 1, t)
        if not report.saturated:
            raise AdqecError(
                f"[{2 * t + 1},1] member unexpectedly not saturated: "
                f"{report.lhs} vs {report.rhs}")
        reports.append(report)
    return reports


def reports_to_csv(reports) -> str:
    lines = ["n,k,t,q_p,q_l,lhs,rhs,satisfied,saturated"]
    for r in reports:
        lines.append(f"{r.n},{r.k},{r.t},{r.q_p},{r.q_l},{r.lhs},{r.rhs},"
                     f"{str(r.satisfied).lower()},{str(r.saturated).lower()}")
    return "\n".join(lines) + "\n"


def reports_to_json(reports, indent: int = 2) -> str:
    return json.dumps([r.to_jsonable() for r in reports], indent=indent)
