"""Dense linear algebra for 2x2 and 4x4 Hermitian operators.

The eigensolver is a cyclic Jacobi iteration run on the real symmetric
embedding ``[[Re H, -Im H], [Im H, Re H]]`` of a complex Hermitian matrix,
so the package does not lean on an external eigen-decomposition routine.
At these dimensions (<= 4x4 complex, <= 8x8 real) Jacobi converges in a
handful of sweeps and is accurate to near machine precision.

Conventions
-----------
* Bloch 4-vectors ``(a0, ax, ay, az)`` represent ``A = (a0 I + a.sigma)/2``.
* Affine map matrices are 4x4 real with first row ``(1, 0, 0, 0)``; see
  :mod:`divimark.bloch`.
* Choi matrices use the unnormalized maximally entangled reference, i.e.
  trace 2 for trace-preserving qubit maps; complete positivity is the
  statement ``min eigenvalue >= 0``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, ValidationError
from .tolerances import TOLS

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (ID2, SIGMA_X, SIGMA_Y, SIGMA_Z)

_MAX_SWEEPS = 60


def check_hermitian(mat: np.ndarray, tol: float = TOLS.hermiticity) -> np.ndarray:
    """Validate a (2x2 or 4x4) Hermitian matrix, returning it hermitized.

    Raises ValidationError when the matrix is not square of dimension 2 or 4,
    contains non-finite entries, or deviates from ``H == H^dag`` by more than
    ``tol`` in the max-entry norm.
    """
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] not in (2, 4):
        raise ValidationError(f"expected dimension 2 or 4, got {m.shape[0]}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError("matrix contains non-finite entries")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValidationError(f"matrix is not Hermitian (deviation {dev:.3e} > {tol:.1e})")
    return 0.5 * (m + m.conj().T)


def _off_mass(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def _jacobi(sym: np.ndarray, need_vectors: bool):
    """Cyclic Jacobi sweeps on a real symmetric matrix.

    Returns (diagonal, rotation) with ``sym == rotation @ diag @ rotation.T``.
    Convergence: off-diagonal Frobenius mass below ``TOLS.jacobi_off`` (scaled
    by the matrix norm for very large inputs).
    """
    a = np.array(sym, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n) if need_vectors else None
    thresh = max(TOLS.jacobi_off, 1e-15 * np.linalg.norm(a))
    for _ in range(_MAX_SWEEPS):
        if _off_mass(a) < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    else:
        if _off_mass(a) > 1e-10 * max(1.0, np.linalg.norm(a)):
            raise ConvergenceError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def sym_eigvals(sym: np.ndarray, tol: float = TOLS.hermiticity) -> np.ndarray:
    """Ascending eigenvalues of a small real symmetric matrix."""
    a = np.asarray(sym, dtype=float)
    if np.max(np.abs(a - a.T)) > tol:
        raise ValidationError("matrix is not symmetric")
    vals, _ = _jacobi(0.5 * (a + a.T), need_vectors=False)
    return np.sort(vals)


def _embed(h: np.ndarray) -> np.ndarray:
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def herm_eigvals(mat: np.ndarray, tol: float = TOLS.hermiticity) -> np.ndarray:
    """Ascending eigenvalues of a 2x2 or 4x4 complex Hermitian matrix."""
    h = check_hermitian(mat, tol)
    if not np.any(h.imag):
        vals, _ = _jacobi(h.real, need_vectors=False)
        return np.sort(vals)
    vals2, _ = _jacobi(_embed(h), need_vectors=False)
    vals2 = np.sort(vals2)
    # the embedding doubles every eigenvalue; collapse adjacent pairs
    return 0.5 * (vals2[0::2] + vals2[1::2])


def herm_eig(mat: np.ndarray, tol: float = TOLS.hermiticity):
    """Eigenvalues and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(vals, vecs)`` with ascending ``vals`` and eigenvectors in the
    columns of ``vecs``; the spectral reconstruction is checked against
    ``TOLS.reconstruction``.
    """
    h = check_hermitian(mat, tol)
    n = h.shape[0]
    vals2, rot = _jacobi(_embed(h), need_vectors=True)
    order = np.argsort(vals2)
    vals2 = vals2[order]
    rot = rot[:, order]
    scale = max(1.0, float(np.max(np.abs(vals2))))
    ctol = 1e-11 * scale

    vals = 0.5 * (vals2[0::2] + vals2[1::2])
    vecs: list[np.ndarray] = []
    idx = 0
    while idx < 2 * n:
        end = idx + 1
        while end < 2 * n and vals2[end] - vals2[end - 1] <= ctol:
            end += 1
        want = (end - idx) // 2
        got = 0
        for k in range(idx, end):
            z = rot[:n, k] + 1j * rot[n:, k]
            for u in vecs:
                z = z - u * np.vdot(u, z)
            norm = np.linalg.norm(z)
            if norm > 1e-6:
                vecs.append(z / norm)
                got += 1
            if got == want:
                break
        if got != want:
            raise ConvergenceError("eigenvector extraction failed on the real embedding")
        idx = end

    v = np.column_stack(vecs)
    recon = (v * vals) @ v.conj().T
    err = np.max(np.abs(recon - h))
    if err > TOLS.reconstruction * scale:
        raise ConvergenceError(f"spectral reconstruction error {err:.3e}")
    return vals, v


def op_norm(mat: np.ndarray, tol: float = TOLS.hermiticity) -> float:
    """Operator (spectral) norm of a Hermitian matrix: max |eigenvalue|."""
    return float(np.max(np.abs(herm_eigvals(mat, tol))))


def trace_norm(mat: np.ndarray, tol: float = TOLS.hermiticity) -> float:
    """Trace norm of a Hermitian matrix: sum of |eigenvalues|."""
    return float(np.sum(np.abs(herm_eigvals(mat, tol))))


def expi(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Unitary ``exp(-i t H)`` of a Hermitian matrix via its spectral form."""
    vals, vecs = herm_eig(h)
    return (vecs * np.exp(-1j * t * vals)) @ vecs.conj().T


def bloch4_to_matrix(a4: np.ndarray) -> np.ndarray:
    """Hermitian 2x2 matrix from a (possibly complex) Bloch 4-vector."""
    a4 = np.asarray(a4)
    return 0.5 * (a4[0] * PAULI[0] + a4[1] * PAULI[1] + a4[2] * PAULI[2] + a4[3] * PAULI[3])


def matrix_to_bloch4(mat: np.ndarray) -> np.ndarray:
    """Bloch 4-vector of a 2x2 Hermitian matrix (real components)."""
    m = np.asarray(mat, dtype=complex)
    return np.array([np.trace(m @ p).real for p in PAULI])


def choi_from_bloch(m4: np.ndarray) -> np.ndarray:
    """Choi matrix (trace-2 convention) of a qubit map in affine Bloch form.

    The map sends ``A = (a0 I + a.sigma)/2`` to the operator whose Bloch
     4-vector is ``m4 @ (a0, a)``; matrix units are pushed through by complex
    linearity and assembled as ``sum_ij Phi[E_ij] (x) E_ij``.  The map is
    completely positive iff the result has no negative eigenvalue.
    """
    m4 = np.asarray(m4, dtype=float)
    if m4.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 affine map matrix, got {m4.shape}")
    # matrix units in the (complex-coefficient) Pauli expansion
    unit_coeffs = {
        (0, 0): np.array([1.0, 0.0, 0.0, 1.0], dtype=complex),
        (0, 1): np.array([0.0, 1.0, 1.0j, 0.0]),
        (1, 0): np.array([0.0, 1.0, -1.0j, 0.0]),
        (1, 1): np.array([1.0, 0.0, 0.0, -1.0], dtype=complex),
    }
    choi = np.zeros((4, 4), dtype=complex)
    for (i, j), coeff in unit_coeffs.items():
        img = bloch4_to_matrix(m4 @ coeff)
        unit = np.zeros((2, 2), dtype=complex)
        unit[i, j] = 1.0
        choi += np.kron(img, unit)
    return 0.5 * (choi + choi.conj().T)


def ptrace(mat4: np.ndarray, keep: int) -> np.ndarray:
    """Partial trace of a 4x4 two-qubit operator; ``keep`` 0 traces out the
    second factor, 1 the first."""
    m = np.asarray(mat4, dtype=complex).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ikjk->ij", m)
    if keep == 1:
        return np.einsum("kikj->ij", m)
    raise ValidationError("keep must be 0 or 1")
