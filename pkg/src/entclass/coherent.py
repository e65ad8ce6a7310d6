"""Representative entangled states, their coherent-basis versions, and curves.

Each family superposes displaced single-mode coherent states |+a> / |-a>
encoded as qubits via the even/odd cat states.  As alpha grows |+a> and
|-a> become orthogonal and every family converges, up to one fixed
Hadamard rotation per qubit, to its computational-basis counterpart;
all tangles converge to the computational values since the rotation is
local.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import classify, measures
from .states import (
    MIXED_KIND,
    PURE_KIND,
    DensityMatrix,
    ket_to_dm,
    validate,
)

FAMILIES = ("ghz3", "w3", "ghz4", "w4", "x4")
MIXTURE_FAMILIES = ("mix3",)

# Component sign patterns: +1 encodes |alpha>, -1 encodes |-alpha>.
_PATTERNS: dict[str, tuple[tuple[int, ...], ...]] = {
    "ghz3": ((1, 1, 1), (-1, -1, -1)),
    "w3": ((1, 1, -1), (1, -1, 1), (-1, 1, 1)),
    "ghz4": ((1, 1, 1, 1), (-1, -1, -1, -1)),
    "x4": ((1, 1, 1, 1), (-1, -1, -1, 1), (-1, -1, 1, -1), (-1, 1, -1, -1), (1, -1, -1, -1)),
    "w4": ((-1, 1, 1, 1), (1, -1, 1, 1), (1, 1, -1, 1), (1, 1, 1, -1)),
}

# Families whose superposition degenerates to a product state at alpha = 0.
_DEGENERATE_AT_ZERO = ("w3", "w4", "x4")


class DegenerateStateError(ValueError):
    """alpha = 0 collapses the family's superposition (|a> = |-a>)."""


@dataclass(frozen=True)
class CoherentParams:
    family: str
    alpha: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.alpha == 0 and self.family in _DEGENERATE_AT_ZERO:
            raise DegenerateStateError(
                f"alpha = 0 makes |a> = |-a>, collapsing the {self.family} superposition"
            )


def family_qubits(family: str) -> int:
    return len(_PATTERNS[family][0])


def coherent_qubit_vectors(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Qubit encodings of |alpha> and |-alpha> in the cat-state basis.

    |+-alpha> = sqrt(p+)|+> +- sqrt(p-)|->  with  p+- = (1 +- exp(-2 a^2))/2.
    Their overlap is exp(-2 a^2), reproducing <alpha|-alpha>.
    """
    k = np.exp(-2.0 * alpha * alpha)
    plus = np.sqrt((1.0 + k) / 2.0)
    minus = np.sqrt((1.0 - k) / 2.0)
    return (
        np.array([plus, minus], dtype=np.complex128),
        np.array([plus, -minus], dtype=np.complex128),
    )


def normalization_factor(family: str, alpha: float) -> float:
    """Closed-form normalization of the raw coherent superposition."""
    k2 = np.exp(-2.0 * alpha * alpha)  # overlap <a|-a>
    if family == "ghz3":
        return 1.0 / np.sqrt(2.0 * (k2**3 + 1.0))
    if family == "w3":
        return 1.0 / np.sqrt(3.0 * (2.0 * k2**2 + 1.0))
    if family == "ghz4":
        return 1.0 / np.sqrt(2.0 * (k2**4 + 1.0))
    if family == "x4":
        return 1.0 / np.sqrt(5.0 + 8.0 * k2**3 + 12.0 * k2**2)
    if family == "w4":
        return 1.0 / np.sqrt(4.0 * (3.0 * k2**2 + 1.0))
    raise ValueError(f"unknown family {family!r}")


def raw_superposition_ket(family: str, alpha: float) -> np.ndarray:
    """Unnormalized sum of the family's coherent product components."""
    params = CoherentParams(family=family, alpha=alpha)
    pos, neg = coherent_qubit_vectors(params.alpha)
    dim = 2 ** family_qubits(family)
    out = np.zeros(dim, dtype=np.complex128)
    for pattern in _PATTERNS[family]:
        term = np.array([1.0], dtype=np.complex128)
        for sign in pattern:
            term = np.kron(term, pos if sign > 0 else neg)
        out += term
    return out


def representative_ket(family: str, alpha: float) -> np.ndarray:
    raw = raw_superposition_ket(family, alpha)
    return normalization_factor(family, alpha) * raw


def build_representative(params: CoherentParams) -> DensityMatrix:
    """Coherent-basis representative state of a family at a given alpha."""
    ket = representative_ket(params.family, params.alpha)
    return ket_to_dm(ket, family_qubits(params.family), PURE_KIND)


def basis_ket(n_qubits: int, bits: str) -> np.ndarray:
    """Computational-basis ket |bits>, qubit 0 leftmost."""
    if len(bits) != n_qubits or any(b not in "01" for b in bits):
        raise ValueError(f"bits {bits!r} do not describe {n_qubits} qubits")
    v = np.zeros(2**n_qubits, dtype=np.complex128)
    v[int(bits, 2)] = 1.0
    return v


def ket_from_bitstrings(n_qubits: int, terms: dict[str, complex]) -> np.ndarray:
    """Normalized superposition sum_b c_b |b>."""
    v = np.zeros(2**n_qubits, dtype=np.complex128)
    for bits, coeff in terms.items():
        v += coeff * basis_ket(n_qubits, bits)
    return v / np.linalg.norm(v)


def computational_ket(family: str) -> np.ndarray:
    """Computational-basis counterpart of a family.

    The alpha -> infinity limit of the coherent version equals this state
    after one Hadamard per qubit, so both share every tangle.
    """
    if family == "ghz3":
        return ket_from_bitstrings(3, {"000": 1, "111": 1})
    if family == "w3":
        return ket_from_bitstrings(3, {"100": 1, "010": 1, "001": 1})
    if family == "ghz4":
        return ket_from_bitstrings(4, {"0000": 1, "1111": 1})
    if family == "w4":
        return ket_from_bitstrings(4, {"1000": 1, "0100": 1, "0010": 1, "0001": 1})
    if family == "x4":
        return ket_from_bitstrings(
            4, {"0000": 1, "0111": 1, "1011": 1, "1101": 1, "1110": 1}
        )
    raise ValueError(f"unknown family {family!r}")


def _family_dm(family: str, alpha: float | None) -> DensityMatrix:
    if alpha is None:
        n = family_qubits(family)
        return ket_to_dm(computational_ket(family), n, PURE_KIND)
    return build_representative(CoherentParams(family=family, alpha=alpha))


def mix3(b: float, alpha: float | None = None) -> DensityMatrix:
    """rho(b) = b GHZ3 + (1-b) W3, computational or coherent basis."""
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"mixing weight b must lie in [0, 1], got {b}")
    g = _family_dm("ghz3", alpha).mat
    w = _family_dm("w3", alpha).mat
    kind = PURE_KIND if b in (0.0, 1.0) else MIXED_KIND
    return validate(b * g + (1.0 - b) * w, 3, kind)


def mix4(a: float, b: float, c: float, alpha: float | None = None) -> DensityMatrix:
    """a GHZ4 + b W4 + c X mixture; weights must sum to 1 within 1e-12."""
    for name, w in (("a", a), ("b", b), ("c", c)):
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"mixing weight {name} must lie in [0, 1], got {w}")
    if abs(a + b + c - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1 within 1e-12, got {a + b + c!r}")
    g = _family_dm("ghz4", alpha).mat
    w4 = _family_dm("w4", alpha).mat
    x = _family_dm("x4", alpha).mat
    kind = PURE_KIND if max(a, b, c) == 1.0 else MIXED_KIND
    return validate(a * g + b * w4 + c * x, 4, kind)


DEFAULT_ALPHA_GRID = np.linspace(0.1, 3.0, 60)
DEFAULT_MIX_ALPHA = 3.0

CSV_HEADER = ("family", "param", "tau1", "tau2", "tau3", "tau4", "label")


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".9g")


def curve_rows(
    families: list[str],
    grid: np.ndarray,
    epsilon: float = measures.DEFAULT_EPSILON,
    mix_alpha: float = DEFAULT_MIX_ALPHA,
) -> list[tuple]:
    """Tangle curves over a parameter grid.

    Coherent families sweep alpha; "mix3" sweeps the GHZ3 weight b at a
    fixed large alpha (`mix_alpha`).
    """
    rows = []
    for family in families:
        if family not in FAMILIES and family not in MIXTURE_FAMILIES:
            raise ValueError(f"unknown curve family {family!r}")
        for param in np.asarray(grid, dtype=float):
            if family == "mix3":
                dm = mix3(float(param), alpha=mix_alpha)
            else:
                dm = build_representative(CoherentParams(family=family, alpha=float(param)))
            tv = measures.tangle_vector(dm, epsilon)
            lab = classify.label(tv)
            rows.append((family, float(param), tv.tau1, tv.tau2, tv.tau3, tv.tau4, lab.text))
    return rows


def emit_curves(
    families: list[str],
    grid: np.ndarray,
    out_path: str,
    epsilon: float = measures.DEFAULT_EPSILON,
    mix_alpha: float = DEFAULT_MIX_ALPHA,
) -> list[tuple]:
    """Write tangle curves as CSV (9 significant digits, LF endings)."""
    rows = curve_rows(families, grid, epsilon=epsilon, mix_alpha=mix_alpha)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for family, param, t1, t2, t3, t4, lab in rows:
        writer.writerow([family, _fmt(param), _fmt(t1), _fmt(t2), _fmt(t3), _fmt(t4), lab])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return rows
