"""Labeled dataset generation, deduplication, splitting, and the .entc binary format.

File layout (little endian):
  header: magic ``ENTC`` (4s), version u32, n_qubits u32, n_records u64,
          epsilon f64, seed u64
  record: label u8, purity u8 (1 = pure), then 2 * 4^n float64 values,
          row-major matrix entries interleaved (re, im)

Fixed-size records allow O(1) seeking; floats are stored raw so round-trips
are bit exact.
"""

import json
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import classify, measures
from .states import (
    DensityMatrix,
    MIXED_KIND,
    PURE_KIND,
    apply_unitary,
    ket_to_dm,
    random_local_unitary,
    random_mixed,
    random_pure,
    record_rng,
    separable_sample,
    state_hash,
    validate,
)

MAGIC = b"ENTC"
VERSION = 1
HEADER = struct.Struct("<4sIIQdQ")

MAX_ATTEMPTS_PER_CLASS = 10_000_000

PURITY_PURE = 1
PURITY_MIXED = 0


class DatasetFormatError(ValueError):
    """A .entc file violates the format contract. Carries the byte offset."""

    def __init__(self, message, offset=0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class MagicMismatchError(DatasetFormatError):
    pass


class VersionMismatchError(DatasetFormatError):
    pass


class TruncationError(DatasetFormatError):
    pass


class GenerationExhaustedError(RuntimeError):
    """A class could not be filled within the attempt budget."""

    def __init__(self, class_name, attempts):
        super().__init__(
            f"class {class_name} unreachable after {attempts} sampling attempts"
        )
        self.class_name = class_name
        self.attempts = attempts


@dataclass
class Dataset:
    n_qubits: int
    epsilon: float
    seed: int
    labels: np.ndarray      # uint8 class codes
    purities: np.ndarray    # uint8, 1 = pure
    states: np.ndarray      # complex128 [m, d, d]

    def __len__(self):
        return int(self.labels.shape[0])

    def record_dm(self, i: int) -> DensityMatrix:
        kind = PURE_KIND if self.purities[i] == PURITY_PURE else MIXED_KIND
        return validate(self.states[i], self.n_qubits, kind)


def record_size(n_qubits: int) -> int:
    return 2 + 16 * 4 ** n_qubits


def write_dataset(path, ds: Dataset) -> None:
    d = 2 ** ds.n_qubits
    m = len(ds)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, ds.n_qubits, m, ds.epsilon, ds.seed))
        for i in range(m):
            fh.write(struct.pack("<BB", int(ds.labels[i]), int(ds.purities[i])))
            flat = np.empty(2 * d * d, dtype="<f8")
            flat[0::2] = ds.states[i].real.reshape(-1)
            flat[1::2] = ds.states[i].imag.reshape(-1)
            fh.write(flat.tobytes())


def read_dataset(path) -> Dataset:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER.size:
        raise TruncationError("file shorter than header", len(raw))
    magic, version, n_qubits, n_records, epsilon, seed = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise MagicMismatchError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}", 4)
    if n_qubits not in (2, 3, 4):
        raise DatasetFormatError(f"n_qubits {n_qubits} out of range", 8)
    d = 2 ** n_qubits
    rsize = record_size(n_qubits)
    expected = HEADER.size + n_records * rsize
    if len(raw) != expected:
        raise TruncationError(
            f"header promises {n_records} records ({expected} bytes), file has {len(raw)}",
            min(len(raw), expected),
        )
    labels = np.empty(n_records, dtype=np.uint8)
    purities = np.empty(n_records, dtype=np.uint8)
    states = np.empty((n_records, d, d), dtype=np.complex128)
    off = HEADER.size
    for i in range(n_records):
        labels[i], purities[i] = struct.unpack_from("<BB", raw, off)
        if labels[i] >= len(classify.class_labels(n_qubits)):
            raise DatasetFormatError(f"label code {labels[i]} invalid for n={n_qubits}", off)
        flat = np.frombuffer(raw, dtype="<f8", count=2 * d * d, offset=off + 2)
        states[i] = (flat[0::2] + 1j * flat[1::2]).reshape(d, d)
        off += rsize
    return Dataset(n_qubits, epsilon, seed, labels, purities, states)


def load_features(ds: Dataset) -> np.ndarray:
    """Flatten states to the model input layout: row-major, (re, im) interleaved.

    Matches the .entc record byte order exactly.
    """
    d = 2 ** ds.n_qubits
    m = len(ds)
    out = np.empty((m, 2 * d * d), dtype=np.float64)
    out[:, 0::2] = ds.states.real.reshape(m, -1)
    out[:, 1::2] = ds.states.imag.reshape(m, -1)
    return out


# --- generation policy -------------------------------------------------------
#
# Measured acceptance rates for Haar/induced random states at epsilon 1e-3
# (fractions of draws landing in each class):
#
#   n=2 pure : ENT 0.999, SEP 0.001
#   n=2 mixed: ENT 0.68,  SEP 0.32
#   n=3 pure : [3]_2 ~1.0, others ~0
#   n=3 mixed: SEP 0.82, [3]_2 1.5e-3, [3]_3 0.18
#   n=4 pure : [4]_2 0.99, [4]_3 1.1e-2, others ~0
#   n=4 mixed: SEP ~1.0, others < 7e-4
#
# Classes below 1e-4 yield use constructive pools (local-unitary orbits of
# representative states, optionally mixed with separable filler). Every
# candidate, constructive or not, is relabeled and kept only if the labeler
# agrees, so the stored labels never depend on the sampling route.

_GHZ3_KET = np.zeros(8)
_GHZ3_KET[0] = _GHZ3_KET[7] = 1 / np.sqrt(2)
_W4_KET = np.zeros(16)
_W4_KET[[1, 2, 4, 8]] = 0.5
_AW4_KET = np.zeros(16)
_AW4_KET[[7, 11, 13, 14]] = 0.5
_X4_KET = np.zeros(16)
_X4_KET[[0, 7, 11, 13, 14]] = 1 / np.sqrt(5)
_V4_KET = np.zeros(16)
_V4_KET[[1, 2, 4, 8, 15]] = 1 / np.sqrt(5)
_CLUSTER_KET = np.zeros(16)
_CLUSTER_KET[[0, 3, 5, 6, 9, 10, 12, 15]] = 1 / np.sqrt(8)


def _partitions(n: int):
    if n == 2:
        return [[[0], [1]]]
    if n == 3:
        return [[[0], [1], [2]], [[0, 1], [2]], [[0, 2], [1]], [[1, 2], [0]]]
    parts = [[[0], [1], [2], [3]]]
    parts += [[[a, b], [c], [d]] for a, b, c, d in
              [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2), (1, 2, 0, 3), (1, 3, 0, 2), (2, 3, 0, 1)]]
    parts += [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]]
    parts += [[[0, 1, 2], [3]], [[0, 1, 3], [2]], [[0, 2, 3], [1]], [[1, 2, 3], [0]]]
    return parts


def _theta_ghz(n: int, rng) -> DensityMatrix:
    th = rng.uniform(0.15, np.pi / 2 - 0.15)
    ph = rng.uniform(0.0, 2 * np.pi)
    ket = np.zeros(2 ** n, dtype=np.complex128)
    ket[0] = np.cos(th)
    ket[-1] = np.sin(th) * np.exp(1j * ph)
    return apply_unitary(ket_to_dm(ket, n), random_local_unitary(n, rng))


def _orbit(ket, n: int, rng) -> DensityMatrix:
    return apply_unitary(ket_to_dm(ket, n), random_local_unitary(n, rng))


def _noisy(base: DensityMatrix, n: int, lam_max: float, rng) -> DensityMatrix:
    lam = rng.uniform(0.02, lam_max)
    if rng.random() < 0.5:
        filler = np.eye(2 ** n) / 2 ** n
    else:
        filler = separable_sample(n, [[q] for q in range(n)], "mixed", rng).mat
    return validate((1 - lam) * base.mat + lam * filler, n, MIXED_KIND)


def _sep_candidate(n: int, purity_kind: str, rng) -> DensityMatrix:
    parts = _partitions(n)
    partition = parts[rng.integers(0, len(parts))]
    return separable_sample(n, partition, purity_kind, rng)


def _candidate(n: int, purity_kind: str, code: int, rng) -> DensityMatrix:
    """One sampling attempt for the class; caller checks the label."""
    pure = purity_kind == "pure"
    if code == 0:
        return _sep_candidate(n, purity_kind, rng)
    if n == 2:
        return random_pure(n, rng) if pure else random_mixed(n, rng)
    if n == 3:
        if code == 1:
            return random_pure(n, rng) if pure else random_mixed(n, rng)
        # [3]_3: rejection yield is ~0 pure / 0.18 mixed; pool keeps both cheap
        if pure:
            return _theta_ghz(3, rng)
        if rng.random() < 0.5:
            return random_mixed(3, rng)
        return _noisy(_theta_ghz(3, rng), 3, 0.30, rng)
    # n == 4
    if pure:
        if code in (1, 2):
            return random_pure(4, rng)
        base = _theta_ghz(4, rng) if rng.random() < 0.7 else _orbit(_CLUSTER_KET, 4, rng)
        return base
    if code == 1:
        ket = _W4_KET if rng.random() < 0.5 else _AW4_KET
        return _noisy(_orbit(ket, 4, rng), 4, 0.20, rng)
    if code == 2:
        ket = _X4_KET if rng.random() < 0.5 else _V4_KET
        return _noisy(_orbit(ket, 4, rng), 4, 0.28, rng)
    base = _theta_ghz(4, rng) if rng.random() < 0.7 else _orbit(_CLUSTER_KET, 4, rng)
    return _noisy(base, 4, 0.25, rng)


def _fill_record(n, purity_kind, code, epsilon, seed, index, max_attempts):
    """Draw from the record's private stream until the labeler agrees.

    Streams are keyed by (seed, n, purity, class, index) so results do not
    depend on worker count or execution order.
    """
    purity_code = PURITY_PURE if purity_kind == "pure" else PURITY_MIXED
    rng = record_rng(seed, n, purity_code, code, index)
    for attempt in range(max_attempts):
        dm = _candidate(n, purity_kind, code, rng)
        tv = measures.tangle_vector(dm, epsilon)
        if classify.label(tv).code == code:
            return dm, attempt + 1
    return None, max_attempts


def generate(n_qubits, per_class, purity_kind, epsilon, seed, out_path, threads=1):
    """Write a class-balanced .entc file; returns the summary dict.

    purity_kind accepts "pure" or "mixed".
    """
    if n_qubits not in (2, 3, 4):
        raise ValueError(f"n_qubits must be 2, 3, or 4, got {n_qubits}")
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    if purity_kind not in ("pure", "mixed"):
        raise ValueError(f"unknown purity kind {purity_kind!r}")
    t0 = time.time()
    codes = [lab.code for lab in classify.class_labels(n_qubits)]
    names = classify.class_names(n_qubits)
    # Budget of 1e7 attempts per class, spread over its records.
    cap = max(1, -(-MAX_ATTEMPTS_PER_CLASS // per_class))
    jobs = [(code, idx) for code in codes for idx in range(per_class)]

    def run(job):
        code, idx = job
        return _fill_record(n_qubits, purity_kind, code, epsilon, seed, idx, cap)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    attempts_per_class = {name: 0 for name in names}
    for (code, idx), (dm, used) in zip(jobs, results):
        attempts_per_class[names[code]] += used
        if dm is None:
            raise GenerationExhaustedError(names[code], attempts_per_class[names[code]])

    # Dedup in index order so the outcome is worker-count independent.
    seen = set()
    final = []
    for (code, idx), (dm, used) in zip(jobs, results):
        h = state_hash(dm)
        purity_code = PURITY_PURE if purity_kind == "pure" else PURITY_MIXED
        rng = record_rng(seed, n_qubits, purity_code, code, idx, 1)
        attempts = used
        while h in seen:
            if attempts >= cap:
                raise GenerationExhaustedError(names[code], MAX_ATTEMPTS_PER_CLASS)
            dm = _candidate(n_qubits, purity_kind, code, rng)
            attempts += 1
            if classify.label(measures.tangle_vector(dm, epsilon)).code != code:
                continue
            h = state_hash(dm)
        seen.add(h)
        final.append((code, dm))

    m = len(final)
    d = 2 ** n_qubits
    labels = np.array([c for c, _ in final], dtype=np.uint8)
    purity_code = PURITY_PURE if purity_kind == "pure" else PURITY_MIXED
    purities = np.full(m, purity_code, dtype=np.uint8)
    states = np.stack([dm.mat for _, dm in final])
    ds = Dataset(n_qubits, float(epsilon), int(seed), labels, purities, states)
    write_dataset(out_path, ds)
    summary = {
        "out": str(out_path),
        "n_qubits": n_qubits,
        "purity": purity_kind,
        "epsilon": float(epsilon),
        "seed": int(seed),
        "counts": {name: int(per_class) for name in names},
        "attempts": attempts_per_class,
        "wall_time_s": round(time.time() - t0, 3),
    }
    with open(str(out_path) + ".run.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def split(in_path, train_out, test_out, train_fraction=0.8, seed=0):
    """Stratified shuffle split; exact duplicates are dropped before splitting."""
    if not 0.0 <= train_fraction <= 1.0:
        raise ValueError("train_fraction must lie in [0, 1]")
    ds = read_dataset(in_path)
    seen = set()
    keep = []
    for i in range(len(ds)):
        h = state_hash(ds.record_dm(i))
        if h not in seen:
            seen.add(h)
            keep.append(i)
    train_idx, test_idx = [], []
    for code in np.unique(ds.labels):
        rows = [i for i in keep if ds.labels[i] == code]
        rng = np.random.default_rng([seed, int(code)])
        rows = [rows[j] for j in rng.permutation(len(rows))]
        k = int(round(train_fraction * len(rows)))
        train_idx += rows[:k]
        test_idx += rows[k:]
    train_idx.sort()
    test_idx.sort()

    def subset(idx):
        return Dataset(ds.n_qubits, ds.epsilon, ds.seed,
                       ds.labels[idx], ds.purities[idx], ds.states[idx])

    write_dataset(train_out, subset(train_idx))
    write_dataset(test_out, subset(test_idx))
    return len(train_idx), len(test_idx)


def audit_labels(ds: Dataset) -> int:
    """Recompute every label; returns the number of mismatches (0 expected)."""
    bad = 0
    for i in range(len(ds)):
        tv = measures.tangle_vector(ds.record_dm(i), ds.epsilon)
        if classify.label(tv).code != ds.labels[i]:
            bad += 1
    return bad
