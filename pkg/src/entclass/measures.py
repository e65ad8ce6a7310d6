"""Entanglement quantifiers: concurrences and the tangle hierarchy.

tau1 detects full (genuine) multipartite entanglement, tau2 pairwise
entanglement, tau3 tripartite and tau4 four-partite entanglement.
Pure states get closed-form tangles; mixed states fall back to a
certified lower bound on the squared bipartition concurrence built
from spectral quantities only, so every tangle is invariant under
local unitaries up to floating-point noise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .states import PURITY_PURE_THRESHOLD, DensityMatrix

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Y_PAIR = np.kron(SIGMA_Y, SIGMA_Y)

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class Bipartition:
    """An unordered split of qubits {0..n-1} into two non-empty groups."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left = tuple(sorted(self.left))
        right = tuple(sorted(self.right))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        if not left or not right:
            raise ValueError("both sides of a bipartition must be non-empty")
        if set(left) & set(right):
            raise ValueError(f"bipartition sides overlap: {left} | {right}")

    @property
    def n_qubits(self) -> int:
        return len(self.left) + len(self.right)

    def check_covers(self, n_qubits: int) -> None:
        if sorted(self.left + self.right) != list(range(n_qubits)):
            raise ValueError(
                f"bipartition {self.left}|{self.right} does not cover 0..{n_qubits - 1}"
            )


@lru_cache(maxsize=None)
def all_bipartitions(n_qubits: int) -> tuple[Bipartition, ...]:
    """All 2**(n-1) - 1 bipartitions of n qubits (qubit 0 kept on the left)."""
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits to bipartition")
    qubits = list(range(n_qubits))
    parts = []
    for size in range(1, n_qubits):
        for left in itertools.combinations(qubits, size):
            if 0 not in left:
                continue
            right = tuple(q for q in qubits if q not in left)
            parts.append(Bipartition(left=left, right=right))
    return tuple(parts)


@dataclass(frozen=True)
class TangleVector:
    """The tangle hierarchy of one state at a fixed threshold epsilon.

    tau3 is None for n=2, tau4 is None for n<4.
    """

    n_qubits: int
    epsilon: float
    tau1: float
    tau2: float
    tau3: float | None = None
    tau4: float | None = None

    def as_dict(self) -> dict:
        return {
            "tau1": self.tau1,
            "tau2": self.tau2,
            "tau3": self.tau3,
            "tau4": self.tau4,
        }


def purity(dm: DensityMatrix) -> float:
    return dm.purity()


def _require_pure(dm: DensityMatrix, what: str) -> None:
    p = dm.purity()
    if p <= PURITY_PURE_THRESHOLD:
        raise ValueError(
            f"{what} requires a pure state (purity > {PURITY_PURE_THRESHOLD}); "
            f"got purity {p:.12f}; use the mixed-state lower bound instead"
        )


def _dominant_ket(dm: DensityMatrix) -> np.ndarray:
    """Extract the ket of a (numerically) pure density matrix."""
    w, v = np.linalg.eigh(dm.mat)
    ket = v[:, -1]
    k = int(np.argmax(np.abs(ket)))
    phase = ket[k] / abs(ket[k])
    return ket * phase.conj()


def wootters_concurrence(dm: DensityMatrix) -> float:
    """Two-qubit concurrence max{0, l1 - l2 - l3 - l4}.

    l_i are the descending eigenvalues of the Hermitian matrix
    sqrt(sqrt(rho) rho_tilde sqrt(rho)) with
    rho_tilde = (sy x sy) rho* (sy x sy).
    """
    if dm.n_qubits != 2:
        raise ValueError(f"Wootters concurrence is defined for 2 qubits, got {dm.n_qubits}")
    rho = dm.mat
    rho_tilde = SIGMA_Y_PAIR @ rho.conj() @ SIGMA_Y_PAIR
    s = linalg.psd_sqrt(rho)
    m = s @ rho_tilde @ s
    m = 0.5 * (m + m.conj().T)
    eigs = np.clip(linalg.herm_eigvals(m), 0.0, None)
    lam = np.sqrt(eigs)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def i_concurrence(dm: DensityMatrix, p: Bipartition) -> float:
    """Pure-state bipartite concurrence sqrt(2 - tr rho_L^2 - tr rho_R^2)."""
    p.check_covers(dm.n_qubits)
    _require_pure(dm, "i_concurrence")
    left = linalg.partial_trace(dm.mat, dm.n_qubits, p.left)
    right = linalg.partial_trace(dm.mat, dm.n_qubits, p.right)
    pl = float(np.real(np.vdot(left, left)))
    pr = float(np.real(np.vdot(right, right)))
    return float(np.sqrt(max(0.0, 2.0 - pl - pr)))


def _ordered_for_bipartition(dm: DensityMatrix, p: Bipartition) -> np.ndarray:
    """Matrix with the left-side qubits moved to the leading tensor factors."""
    order = list(p.left) + list(p.right)
    if order == list(range(dm.n_qubits)):
        return dm.mat
    return linalg.permute_qubits(dm.mat, dm.n_qubits, order)


def _pt_trace_norm(rho: np.ndarray, d_left: int, d_right: int) -> float:
    """Trace norm of the partial transpose over the leading factor."""
    t = rho.reshape(d_left, d_right, d_left, d_right)
    m = t.transpose(2, 1, 0, 3).reshape(d_left * d_right, d_left * d_right)
    # partial transpose of a Hermitian matrix stays Hermitian
    return float(np.abs(linalg.herm_eigvals(m)).sum())


def _realignment_trace_norm(rho: np.ndarray, d_left: int, d_right: int) -> float:
    """Nuclear norm of the realigned matrix R[i*dL+k, j*dR+l] = rho[ik, jl]."""
    r = (
        rho.reshape(d_left, d_right, d_left, d_right)
        .transpose(0, 2, 1, 3)
        .reshape(d_left * d_left, d_right * d_right)
    )
    return float(np.linalg.svd(r, compute_uv=False).sum())


def lb_concurrence_sq(dm: DensityMatrix, p: Bipartition) -> float:
    """Lower bound on the squared bipartition concurrence of a mixed state.

    Largest of four certified bounds, each built from spectral data alone
    and therefore invariant under local unitaries:

    * the purity gap 2 * (tr rho^2 - tr rho_side^2) for either side, exact
      on pure states where it equals i_concurrence**2;
    * the scaled trace-norm excesses 2/(m*(m-1)) * max(0, |T(rho)|_1 - 1)^2
      of the partial transpose and of the realignment map, with m the
      smaller side dimension.

    On 2 qubits the Wootters formula is evaluated directly, so the bound
    is tight there.
    """
    p.check_covers(dm.n_qubits)
    if dm.n_qubits == 2:
        c = wootters_concurrence(dm)
        return c * c
    rho = _ordered_for_bipartition(dm, p)
    d_left = 2 ** len(p.left)
    d_right = 2 ** len(p.right)
    tr2 = float(np.real(np.vdot(rho, rho)))
    left = linalg.partial_trace(dm.mat, dm.n_qubits, p.left)
    right = linalg.partial_trace(dm.mat, dm.n_qubits, p.right)
    gap_left = 2.0 * (tr2 - float(np.real(np.vdot(left, left))))
    gap_right = 2.0 * (tr2 - float(np.real(np.vdot(right, right))))
    m = min(d_left, d_right)
    coef = 2.0 / (m * (m - 1))
    pt_excess = max(0.0, _pt_trace_norm(rho, d_left, d_right) - 1.0)
    re_excess = max(0.0, _realignment_trace_norm(rho, d_left, d_right) - 1.0)
    return max(
        0.0,
        gap_left,
        gap_right,
        coef * pt_excess * pt_excess,
        coef * re_excess * re_excess,
    )


def _bipartition_factors(dm: DensityMatrix) -> dict[Bipartition, float]:
    """Squared bipartition concurrence (pure) or its lower bound (mixed)."""
    pure = dm.is_pure()
    factors = {}
    for p in all_bipartitions(dm.n_qubits):
        if pure:
            c = i_concurrence(dm, p)
            factors[p] = c * c
        else:
            factors[p] = lb_concurrence_sq(dm, p)
    return factors


def tau1(dm: DensityMatrix) -> float:
    """Full-entanglement tangle: worst squared concurrence over bipartitions.

    Zero exactly when some bipartition is (detected as) separable, so the
    zero set matches any product aggregation over the same factors.  The
    minimum also reproduces the known anchor ratios of the representative
    families (GHZ -> 1, W3 -> 2*tau2, W4 -> 3*tau2).
    """
    return min(_bipartition_factors(dm).values())


def _pair_reductions(dm: DensityMatrix):
    for i, j in itertools.combinations(range(dm.n_qubits), 2):
        red = linalg.partial_trace(dm.mat, dm.n_qubits, [i, j])
        yield (i, j), DensityMatrix(2, red, "unknown")


def tau2(dm: DensityMatrix) -> float:
    """Mean squared Wootters concurrence over all unordered qubit pairs."""
    if dm.n_qubits == 2:
        c = wootters_concurrence(dm)
        return c * c
    vals = [wootters_concurrence(red) ** 2 for _, red in _pair_reductions(dm)]
    return float(np.mean(vals))


def tau3_pure(dm: DensityMatrix) -> float:
    """Three-qubit residual tangle from squared concurrences.

    For each focus qubit q: C^2(q|rest) - sum of squared pair concurrences
    C^2(q,r).  Averaged over the three focus choices and clamped at zero.
    """
    if dm.n_qubits != 3:
        raise ValueError(f"tau3_pure is defined for 3 qubits, got {dm.n_qubits}")
    _require_pure(dm, "tau3_pure")
    pair_c_sq = {}
    for (i, j), red in _pair_reductions(dm):
        pair_c_sq[(i, j)] = wootters_concurrence(red) ** 2
        pair_c_sq[(j, i)] = pair_c_sq[(i, j)]
    residuals = []
    for q in range(3):
        rest = tuple(r for r in range(3) if r != q)
        c_bip = i_concurrence(dm, Bipartition((q,), rest))
        residuals.append(c_bip**2 - pair_c_sq[(q, rest[0])] - pair_c_sq[(q, rest[1])])
    return float(max(0.0, np.mean(residuals)))


def _amplitudes(dm: DensityMatrix) -> np.ndarray:
    return _dominant_ket(dm)


def tau4_pure(dm: DensityMatrix) -> float:
    """Four-qubit tangle: squared magnitude of the degree-2 amplitude invariant.

    For amplitudes a_x of a pure 4-qubit state, the alternating pairing
    H = sum_x (-1)^popcount(x) a_x a_(15-x) over x < 8 is invariant (up to
    phase) under local unitaries; tau4 = 4*|H|^2 in [0, 1].
    """
    if dm.n_qubits != 4:
        raise ValueError(f"tau4_pure is defined for 4 qubits, got {dm.n_qubits}")
    _require_pure(dm, "tau4_pure")
    a = _amplitudes(dm)
    h = 0.0 + 0.0j
    for x in range(8):
        sign = -1.0 if bin(x).count("1") % 2 else 1.0
        h += sign * a[x] * a[15 - x]
    val = 4.0 * float(abs(h) ** 2)
    return float(min(1.0, max(0.0, val)))


def tau3_of4_pure(dm: DensityMatrix) -> float:
    """Tripartite share of a symmetric 4-qubit pure state's entanglement.

    (tau1 - tau4 - 3*tau2)/3, clamped at zero.
    """
    if dm.n_qubits != 4:
        raise ValueError(f"tau3_of4_pure is defined for 4 qubits, got {dm.n_qubits}")
    _require_pure(dm, "tau3_of4_pure")
    return float(max(0.0, (tau1(dm) - tau4_pure(dm) - 3.0 * tau2(dm)) / 3.0))


def _internal_triple_sum(dm3: DensityMatrix) -> float:
    """Mean lower-bound sum over the three bipartitions of a 3-qubit state."""
    total = 0.0
    for p in all_bipartitions(3):
        total += lb_concurrence_sq(dm3, p)
    return total / 3.0


def tau3_mixed(dm: DensityMatrix) -> float:
    """Tripartite tangle lower bound for mixed states.

    Averages, over all qubit triples, the mean lower-bound concurrence
    squared across the three internal bipartitions of the (reduced)
    3-qubit state.
    """
    if dm.n_qubits not in (3, 4):
        raise ValueError(f"tau3_mixed is defined for 3 or 4 qubits, got {dm.n_qubits}")
    if dm.n_qubits == 3:
        return _internal_triple_sum(dm)
    vals = []
    for triple in itertools.combinations(range(4), 3):
        red = linalg.partial_trace(dm.mat, 4, triple)
        vals.append(_internal_triple_sum(DensityMatrix(3, red, "unknown")))
    return float(np.mean(vals))


def tau4_mixed(dm: DensityMatrix) -> float:
    """Four-partite tangle lower bound: mean lb over all 7 bipartitions."""
    if dm.n_qubits != 4:
        raise ValueError(f"tau4_mixed is defined for 4 qubits, got {dm.n_qubits}")
    factors = [lb_concurrence_sq(dm, p) for p in all_bipartitions(4)]
    return float(np.mean(factors))


def tangle_vector(dm: DensityMatrix, epsilon: float = DEFAULT_EPSILON) -> TangleVector:
    """Compute the full tangle hierarchy, dispatching on purity.

    Purity above 1 - 1e-8 selects the closed-form pure-state tangles;
    anything below uses the mixed-state lower bounds.
    """
    n = dm.n_qubits
    if n not in (2, 3, 4):
        raise ValueError(f"tangle_vector supports 2-4 qubits, got {n}")
    pure = dm.is_pure()
    factors = _bipartition_factors(dm)
    t1 = min(factors.values())
    t2 = tau2(dm)
    t3 = None
    t4 = None
    if n == 3:
        t3 = tau3_pure(dm) if pure else (sum(factors.values()) / 3.0)
    elif n == 4:
        if pure:
            t4 = tau4_pure(dm)
            t3 = float(max(0.0, (t1 - t4 - 3.0 * t2) / 3.0))
        else:
            t4 = float(np.mean(list(factors.values())))
            t3 = tau3_mixed(dm)
    return TangleVector(n_qubits=n, epsilon=epsilon, tau1=t1, tau2=t2, tau3=t3, tau4=t4)
