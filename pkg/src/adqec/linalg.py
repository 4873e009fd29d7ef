"""Dense complex linear algebra primitives.

Everything in this package works on plain ``numpy`` arrays of dtype
``complex128``; the helpers here add the tolerance-aware predicates and the
Hermitian matrix functions (top eigenvalue, principal square root,
pseudo-inverse square root) that the channel/recovery layers rely on.
Hilbert-space dimensions stay small (<= a few thousand), so dense storage and
full eigendecompositions are always adequate.
"""

from __future__ import annotations

import numpy as np

from .errors import AdqecError, NotPSD, ShapeMismatch

#: Default tolerance for equality/orthogonality/positivity tests.
DEFAULT_TOL = 1e-10


def as_complex(a) -> np.ndarray:
    """Return ``a`` as a complex128 ndarray (no copy when already one)."""
    return np.asarray(a, dtype=complex)


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more operators, left factor most significant.

    ``kron(A, B)[i1*d2 + i2, j1*d2 + j2] = A[i1, j1] * B[i2, j2]``, i.e. basis
    labels concatenate big-endian, matching the multi-index convention used
    for tensor-product Kraus operators and codewords.
    """
    if not ops:
        raise ShapeMismatch("kron needs at least one operand")
    out = as_complex(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_complex(op))
    _require_finite(out, "kron")
    return out


def ket(index: int, dim: int) -> np.ndarray:
    """Computational basis column vector |index> in the given dimension."""
    if not 0 <= index < dim:
        raise ShapeMismatch(f"basis index {index} outside dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a><b| for vectors a, b."""
    return np.outer(as_complex(a), np.conj(as_complex(b)))


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_complex(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dag(m))) <= tol


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_complex(m)
    if m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(dag(m) @ m - np.eye(m.shape[0]))) <= tol


def is_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = as_complex(m)
    if not is_hermitian(m, tol):
        return False
    return float(np.min(np.linalg.eigvalsh((m + dag(m)) / 2))) >= -tol


def largest_eigenvalue_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Largest eigenvalue of a PSD Hermitian matrix.

    Raises ``NotPSD`` when the matrix is not Hermitian within ``tol`` or has
    an eigenvalue below ``-tol``.  The returned value is clamped to be >= 0.
    """
    m = as_complex(m)
    if not is_hermitian(m, tol):
        raise NotPSD("matrix is not Hermitian within tolerance")
    eigs = np.linalg.eigvalsh((m + dag(m)) / 2)
    if eigs[0] < -tol:
        raise NotPSD(f"negative eigenvalue {eigs[0]:.3e} below -{tol:.1e}")
    return max(float(eigs[-1]), 0.0)


def principal_sqrt_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal (PSD) square root of a PSD Hermitian matrix.

    Computed by Hermitian eigendecomposition; eigenvalues in ``[-tol, 0]``
    are clamped to zero, anything more negative raises ``NotPSD``.
    """
    m = as_complex(m)
    if not is_hermitian(m, tol):
        raise NotPSD("matrix is not Hermitian within tolerance")
    eigs, vecs = np.linalg.eigh((m + dag(m)) / 2)
    if eigs[0] < -tol:
        raise NotPSD(f"negative eigenvalue {eigs[0]:.3e} below -{tol:.1e}")
    root = np.sqrt(np.clip(eigs, 0.0, None))
    out = (vecs * root) @ dag(vecs)
    _require_finite(out, "principal_sqrt_psd")
    return out


def pseudo_inverse_sqrt_psd(m: np.ndarray, tol: float = DEFAULT_TOL,
                            rcond: float = 1e-12) -> np.ndarray:
    """Moore-Penrose inverse of the principal square root, on the support.

    Eigenvalues below ``rcond * max_eig`` are treated as exact zeros (their
    inverse contribution is dropped), so the result acts as ``m^{-1/2}`` on
    the support of ``m`` and as zero on its kernel.
    """
    m = as_complex(m)
    if not is_hermitian(m, tol):
        raise NotPSD("matrix is not Hermitian within tolerance")
    eigs, vecs = np.linalg.eigh((m + dag(m)) / 2)
    if eigs[0] < -tol:
        raise NotPSD(f"negative eigenvalue {eigs[0]:.3e} below -{tol:.1e}")
    cutoff = rcond * max(float(eigs[-1]), 0.0)
    inv_root = np.where(eigs > cutoff, 1.0 / np.sqrt(np.clip(eigs, cutoff, None)), 0.0)
    out = (vecs * inv_root) @ dag(vecs)
    _require_finite(out, "pseudo_inverse_sqrt_psd")
    return out


def support_projector(m: np.ndarray, tol: float = DEFAULT_TOL,
                      rcond: float = 1e-12) -> np.ndarray:
    """Orthogonal projector onto the support (range) of a PSD matrix."""
    m = as_complex(m)
    eigs, vecs = np.linalg.eigh((m + dag(m)) / 2)
    cutoff = rcond * max(float(eigs[-1]), 0.0)
    keep = eigs > cutoff
    basis = vecs[:, keep]
    return basis @ dag(basis)


def gram_schmidt(vectors, discard_tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormalize a sequence of vectors by modified Gram-Schmidt.

    Vectors whose residual norm falls below ``discard_tol`` are dropped (they
    are linearly dependent on the ones kept).  Returns an array of shape
    ``(kept, dim)`` whose rows are orthonormal.
    """
    basis = []
    for v in vectors:
        w = as_complex(v).copy()
        for b in basis:
            w -= np.vdot(b, w) * b
        # second pass for numerical stability of near-dependent inputs
        for b in basis:
            w -= np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > discard_tol:
            basis.append(w / norm)
    if not basis:
        return np.zeros((0, 0), dtype=complex)
    return np.array(basis)


def _require_finite(a: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(a)):
        raise AdqecError(f"non-finite entries produced in {where}")
