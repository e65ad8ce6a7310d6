"""Dense linear algebra kernels for small multi-qubit operators.

All operators live on n <= 8 qubits, so matrices are tiny (at most
256 x 256) and everything is done dense in complex128.

Convention used throughout the package: qubit 0 is the leftmost tensor
factor, i.e. the most significant bit of the computational-basis index.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

# Max allowed |m - m^dag| before an operator is rejected as non-Hermitian.
HERMITICITY_TOL = 1e-10
# Most negative eigenvalue tolerated when treating an operator as PSD.
PSD_EIG_FLOOR = -1e-9


def as_complex_matrix(m) -> np.ndarray:
    """Coerce input to a finite 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest absolute entry of m - m^dag."""
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def kron(a, b) -> np.ndarray:
    """Kronecker product with the usual block layout.

    entry[(i*rows_b + k), (j*cols_b + l)] = a[i, j] * b[k, l]
    """
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def _check_square_qubit_operator(rho: np.ndarray, n_qubits: int) -> None:
    dim = 2**n_qubits
    if rho.shape != (dim, dim):
        raise ValueError(
            f"operator shape {rho.shape} does not match {n_qubits} qubits "
            f"(expected {(dim, dim)})"
        )


def partial_trace(rho, n_qubits: int, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not listed in `keep`.

    The returned operator acts on the kept qubits in their original
    relative order.  Keeping all qubits returns a copy of the input.
    """
    rho = as_complex_matrix(rho)
    _check_square_qubit_operator(rho, n_qubits)
    keep_sorted = sorted(set(keep))
    if not keep_sorted:
        raise ValueError("keep must name at least one qubit")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n_qubits:
        raise ValueError(f"keep {keep_sorted} out of range for {n_qubits} qubits")

    traced = [q for q in range(n_qubits) if q not in keep_sorted]
    if not traced:
        return rho.copy()

    # Axis q is the row index of qubit q, axis q + n_live the column index.
    t = rho.reshape([2] * (2 * n_qubits))
    n_live = n_qubits
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + n_live)
        n_live -= 1
    d = 2 ** len(keep_sorted)
    return t.reshape(d, d)


def permute_qubits(rho, n_qubits: int, source: Iterable[int]) -> np.ndarray:
    """Reorder tensor factors: output qubit j is input qubit source[j]."""
    rho = as_complex_matrix(rho)
    _check_square_qubit_operator(rho, n_qubits)
    src = list(source)
    if sorted(src) != list(range(n_qubits)):
        raise ValueError(f"source {src} is not a permutation of 0..{n_qubits - 1}")
    axes = src + [q + n_qubits for q in src]
    t = rho.reshape([2] * (2 * n_qubits)).transpose(axes)
    dim = 2**n_qubits
    return np.ascontiguousarray(t.reshape(dim, dim))


def herm_eigvals(h) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, descending."""
    h = as_complex_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix is not square: {h.shape}")
    defect = hermiticity_defect(h)
    if defect > HERMITICITY_TOL:
        raise ValueError(
            f"matrix is not Hermitian: max |h - h^dag| = {defect:.3e} "
            f"exceeds {HERMITICITY_TOL:.1e}"
        )
    return np.linalg.eigvalsh(h)[::-1]


def general_eigvals(m) -> np.ndarray:
    """Complex eigenvalues of an arbitrary square matrix (no order promise)."""
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: {m.shape}")
    return np.linalg.eigvals(m)


def psd_sqrt(rho) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [PSD_EIG_FLOOR, 0) are treated as numerical noise and
    clamped to zero; anything more negative raises.
    """
    rho = as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"matrix is not square: {rho.shape}")
    defect = hermiticity_defect(rho)
    if defect > HERMITICITY_TOL:
        raise ValueError(
            f"matrix is not Hermitian: max |m - m^dag| = {defect:.3e} "
            f"exceeds {HERMITICITY_TOL:.1e}"
        )
    w, v = np.linalg.eigh(rho)
    if w[0] < PSD_EIG_FLOOR:
        raise ValueError(
            f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e} "
            f"below {PSD_EIG_FLOOR:.1e}"
        )
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (s + s.conj().T)
