"""Validated density matrices and seeded random-state samplers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_FLOOR = -1e-9
# Purity above this counts as pure for dispatch purposes.
PURITY_PURE_THRESHOLD = 1.0 - 1e-8

PURE_KIND = "pure-constructed"
MIXED_KIND = "mixed-constructed"
UNKNOWN_KIND = "unknown"


class StateValidationError(ValueError):
    """A matrix failed one of the density-matrix invariants."""


class NotHermitianError(StateValidationError):
    pass


class NonUnitTraceError(StateValidationError):
    pass


class NotPositiveSemidefiniteError(StateValidationError):
    pass


@dataclass
class DensityMatrix:
    """A validated n-qubit density matrix.

    `mat` is Hermitian (to working precision), unit trace, PSD up to a
    -1e-9 eigenvalue floor.  Qubit 0 is the leftmost tensor factor.
    """

    n_qubits: int
    mat: np.ndarray
    purity_kind: str = field(default=UNKNOWN_KIND)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def purity(self) -> float:
        # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.real(np.vdot(self.mat, self.mat)))

    def is_pure(self) -> bool:
        return self.purity() > PURITY_PURE_THRESHOLD


def validate(m, n_qubits: int, purity_kind: str = UNKNOWN_KIND) -> DensityMatrix:
    """Check density-matrix invariants and wrap the result.

    Asymmetry up to 1e-10 is repaired by symmetrizing (m + m^dag)/2;
    larger defects raise NotHermitianError.  Trace must be 1 within
    1e-10 and eigenvalues must sit above -1e-9.
    """
    a = linalg.as_complex_matrix(m)
    dim = 2**n_qubits
    if a.shape != (dim, dim):
        raise StateValidationError(
            f"matrix shape {a.shape} does not match {n_qubits} qubits"
        )
    defect = linalg.hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise NotHermitianError(
            f"not Hermitian: max |m - m^dag| = {defect:.3e} exceeds {HERMITICITY_TOL:.1e}"
        )
    a = 0.5 * (a + a.conj().T)
    trace_defect = abs(np.trace(a) - 1.0)
    if trace_defect > TRACE_TOL:
        raise NonUnitTraceError(
            f"trace differs from 1 by {trace_defect:.3e} (tolerance {TRACE_TOL:.1e})"
        )
    min_eig = float(np.linalg.eigvalsh(a)[0])
    if min_eig < EIG_FLOOR:
        raise NotPositiveSemidefiniteError(
            f"not positive semidefinite: min eigenvalue {min_eig:.3e} below {EIG_FLOOR:.1e}"
        )
    return DensityMatrix(n_qubits=n_qubits, mat=a, purity_kind=purity_kind)


def state_hash(dm: DensityMatrix, decimals: int = 6) -> str:
    """Hash of the matrix entries rounded to `decimals` decimals.

    Used for dataset deduplication and train/test disjointness.
    """
    rounded = np.round(dm.mat.real, decimals) + 0.0  # fold -0.0 into +0.0
    rounded_im = np.round(dm.mat.imag, decimals) + 0.0
    payload = rounded.tobytes() + rounded_im.tobytes()
    return hashlib.sha1(payload).hexdigest()


def ket_to_dm(ket: np.ndarray, n_qubits: int, purity_kind: str = PURE_KIND) -> DensityMatrix:
    """Outer product |psi><psi| of a normalized ket, validated."""
    v = np.asarray(ket, dtype=np.complex128).reshape(-1)
    if v.shape[0] != 2**n_qubits:
        raise StateValidationError(
            f"ket length {v.shape[0]} does not match {n_qubits} qubits"
        )
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-10:
        raise StateValidationError(f"ket norm differs from 1 by {abs(norm - 1.0):.3e}")
    return validate(np.outer(v, v.conj()), n_qubits, purity_kind)


def random_pure_ket(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed pure state: normalized i.i.d. complex Gaussian vector."""
    dim = 2**n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Haar-random pure n-qubit density matrix."""
    return ket_to_dm(random_pure_ket(n_qubits, rng), n_qubits, PURE_KIND)


def random_mixed(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Induced-measure mixed state: Haar pure on 2n qubits, ancilla traced out.

    The ancilla has the same dimension as the system (square case), so the
    result is full rank almost surely.
    """
    dim = 2**n_qubits
    psi = random_pure_ket(2 * n_qubits, rng).reshape(dim, dim)
    rho = psi @ psi.conj().T
    return validate(rho, n_qubits, MIXED_KIND)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_local_unitary(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Tensor product of independent Haar 2x2 unitaries, one per qubit."""
    u = haar_unitary(2, rng)
    for _ in range(n_qubits - 1):
        u = np.kron(u, haar_unitary(2, rng))
    return u


def apply_unitary(dm: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    """Conjugate the state by a unitary: U rho U^dag."""
    return validate(u @ dm.mat @ u.conj().T, dm.n_qubits, dm.purity_kind)


def _check_partition(n_qubits: int, partition: Sequence[Sequence[int]]) -> list[list[int]]:
    blocks = [sorted(b) for b in partition]
    flat = sorted(q for b in blocks for q in b)
    if flat != list(range(n_qubits)):
        raise ValueError(f"partition {partition} does not cover qubits 0..{n_qubits - 1}")
    if any(not b for b in blocks):
        raise ValueError("partition contains an empty block")
    return blocks


def _block_is_fully_entangled(ket: np.ndarray, k: int, epsilon: float) -> bool:
    # Pure-state check: every bipartition marginal must be mixed enough that
    # 2 * (1 - purity) stays above epsilon.
    rho = np.outer(ket, ket.conj())
    for mask in range(1, 2 ** (k - 1)):
        keep = [q for q in range(k) if (mask >> (k - 1 - q)) & 1]
        marg = linalg.partial_trace(rho, k, keep)
        c_sq = 2.0 * (1.0 - float(np.real(np.vdot(marg, marg))))
        if c_sq <= epsilon:
            return False
    return True


def _product_ket_for_partition(
    n_qubits: int,
    blocks: list[list[int]],
    rng: np.random.Generator,
    epsilon: float,
) -> np.ndarray:
    factors = []
    for block in blocks:
        k = len(block)
        if k == 1:
            factors.append(random_pure_ket(1, rng))
            continue
        while True:  # entangled in-block state; Haar pure succeeds a.s.
            ket = random_pure_ket(k, rng)
            if _block_is_fully_entangled(ket, k, epsilon):
                factors.append(ket)
                break
    psi = factors[0]
    for f in factors[1:]:
        psi = np.kron(psi, f)
    # psi is laid out block-major; route each factor back to its declared qubit.
    order = [q for block in blocks for q in block]
    axes = [order.index(j) for j in range(n_qubits)]
    t = psi.reshape([2] * n_qubits).transpose(axes)
    return np.ascontiguousarray(t.reshape(-1))


def separable_sample(
    n_qubits: int,
    partition: Sequence[Sequence[int]],
    mixedness: str,
    rng: np.random.Generator,
    epsilon: float = 1e-3,
) -> DensityMatrix:
    """Sample a state separable across `partition`.

    Blocks of size >= 2 receive an entangled in-block pure state so the
    partition is exactly the separability structure.  mixedness "pure"
    returns one product state; "mixed" returns a convex mixture of 2-4
    such products over the same partition, which stays separable.
    """
    blocks = _check_partition(n_qubits, partition)
    if mixedness not in ("pure", "mixed"):
        raise ValueError(f"mixedness must be 'pure' or 'mixed', got {mixedness!r}")
    if mixedness == "pure":
        ket = _product_ket_for_partition(n_qubits, blocks, rng, epsilon)
        return ket_to_dm(ket, n_qubits, PURE_KIND)

    n_terms = int(rng.integers(2, 5))
    weights = rng.uniform(0.2, 1.0, size=n_terms)
    weights /= weights.sum()
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for w in weights:
        ket = _product_ket_for_partition(n_qubits, blocks, rng, epsilon)
        rho += w * np.outer(ket, ket.conj())
    return validate(rho, n_qubits, MIXED_KIND)


def record_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for one record of one sampling stream."""
    return np.random.default_rng([seed, *stream])
