"""Decision tree mapping a tangle vector to an entanglement class."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .measures import TangleVector

DEFAULT_EPSILON = 1e-3


class Kind(Enum):
    SEPARABLE_OR_KSEP = 0
    CLASS_N2 = 1  # pairwise entanglement dominates: [N]_2
    CLASS_N3 = 2  # tripartite: [N]_3
    CLASS_N4 = 3  # four-partite: [N]_4


@dataclass(frozen=True)
class ClassLabel:
    kind: Kind
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits not in (2, 3, 4):
            raise ValueError(f"unsupported qubit count {self.n_qubits}")
        if self.kind is Kind.CLASS_N3 and self.n_qubits < 3:
            raise ValueError("[N]_3 requires at least 3 qubits")
        if self.kind is Kind.CLASS_N4 and self.n_qubits < 4:
            raise ValueError("[N]_4 requires 4 qubits")

    @property
    def code(self) -> int:
        """Stable numeric code used in dataset files: 0=SEP .. 3=[N]_4."""
        return self.kind.value

    @property
    def text(self) -> str:
        if self.kind is Kind.SEPARABLE_OR_KSEP:
            return "SEP"
        if self.n_qubits == 2:
            return "ENT"
        return f"[{self.n_qubits}]_{self.kind.value + 1}"

    def __str__(self) -> str:
        return self.text


def class_labels(n_qubits: int) -> list[ClassLabel]:
    """The label set of an n-qubit problem, in dataset code order."""
    kinds = [Kind.SEPARABLE_OR_KSEP, Kind.CLASS_N2]
    if n_qubits >= 3:
        kinds.append(Kind.CLASS_N3)
    if n_qubits >= 4:
        kinds.append(Kind.CLASS_N4)
    return [ClassLabel(kind=k, n_qubits=n_qubits) for k in kinds]


def class_names(n_qubits: int) -> list[str]:
    return [lab.text for lab in class_labels(n_qubits)]


def label_from_code(code: int, n_qubits: int) -> ClassLabel:
    labels = class_labels(n_qubits)
    if not 0 <= code < len(labels):
        raise ValueError(f"label code {code} invalid for {n_qubits} qubits")
    return labels[code]


def label(tv: TangleVector, strict_three_tangle: bool = False) -> ClassLabel:
    """Classify a tangle vector.

    Partial-trace robustness ordering: full entanglement is checked first,
    then the surviving pairwise tangle, then the tripartite one.  For n=3
    the default tree assigns [3]_3 without consulting tau3 (the mixed-state
    tau3 lower bound is too loose to gate on); strict_three_tangle=True
    additionally requires tau3 > epsilon.
    """
    n = tv.n_qubits
    eps = tv.epsilon
    if tv.tau1 <= eps:
        return ClassLabel(Kind.SEPARABLE_OR_KSEP, n)
    if tv.tau2 > eps:
        return ClassLabel(Kind.CLASS_N2, n)
    if n == 2:
        # tau1 and tau2 coincide on 2 qubits; being here means a boundary
        # case where tau1 barely cleared epsilon. Call it entangled.
        return ClassLabel(Kind.CLASS_N2, n)
    if n == 3:
        if strict_three_tangle and not (tv.tau3 is not None and tv.tau3 > eps):
            return ClassLabel(Kind.SEPARABLE_OR_KSEP, n)
        return ClassLabel(Kind.CLASS_N3, n)
    if tv.tau3 is not None and tv.tau3 > eps:
        return ClassLabel(Kind.CLASS_N3, n)
    return ClassLabel(Kind.CLASS_N4, n)
