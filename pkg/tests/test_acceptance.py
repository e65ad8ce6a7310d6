"""Release gate: every numeric bar the toolkit promises, one test per bar.

Each test prints exactly one `ACCEPTANCE n: PASS/FAIL - detail` line. Test 8
runs six full generate/split/train/eval pipelines and dominates the suite's
runtime (expect ~20-30 minutes); everything else finishes in seconds.
"""

import hashlib
import time

import numpy as np
import pytest

from entclass import classify, coherent, dataset, evaluate, measures, mlp
from entclass.coherent import mix3, mix4
from entclass.evaluate import known_states
from entclass.measures import (
    Bipartition,
    all_bipartitions,
    i_concurrence,
    lb_concurrence_sq,
    tangle_vector,
    tau3_pure,
    tau4_pure,
    wootters_concurrence,
)
from entclass.states import (
    apply_unitary,
    ket_to_dm,
    random_local_unitary,
    random_mixed,
    random_pure,
)


def _line(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num}: {status} - {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def _fam(name, alpha=None):
    if alpha is None:
        n = coherent.family_qubits(name)
        return ket_to_dm(coherent.computational_ket(name), n)
    return coherent.build_representative(
        coherent.CoherentParams(family=name, alpha=alpha)
    )


def _sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_criterion_01_measure_anchors():
    bell = ket_to_dm(np.array([1, 0, 0, 1]) / np.sqrt(2), 2)
    product = ket_to_dm(np.array([1, 0, 0, 0], dtype=float), 2)
    ghz3, w3 = _fam("ghz3"), _fam("w3")
    ghz4, w4 = _fam("ghz4"), _fam("w4")

    t0 = time.perf_counter()
    errs = []
    checks = [
        ("wootters(bell)=1", wootters_concurrence(bell), 1.0, 1e-6),
        ("wootters(product)=0", wootters_concurrence(product), 0.0, 1e-6),
        ("iconc(ghz3,A|BC)=1",
         i_concurrence(ghz3, Bipartition((0,), (1, 2))), 1.0, 1e-6),
        ("tau3(ghz3)=1", tau3_pure(ghz3), 1.0, 1e-6),
        ("tau3(w3)=0", tau3_pure(w3), 0.0, 1e-6),
        ("tau2(w3)=4/9", tangle_vector(w3).tau2, 4 / 9, 1e-6),
        ("tau4(w4)=0", tau4_pure(w4), 0.0, 1e-6),
        ("tau4(ghz4)=tau1(ghz4)",
         tau4_pure(ghz4), tangle_vector(ghz4).tau1, 1e-3),
    ]
    for name, got, want, tol in checks:
        if abs(got - want) > tol:
            errs.append(f"{name}: got {got!r}, want {want!r}")
    dt = time.perf_counter() - t0
    if dt >= 1.0:
        errs.append(f"runtime {dt:.2f}s >= 1s")
    _line(1, not errs, "; ".join(errs) or f"8 anchors exact in {dt * 1e3:.0f}ms")


def test_criterion_02_ratio_relations():
    t0 = time.perf_counter()
    errs = []
    for alpha in (None, 3.0):
        basis = "computational" if alpha is None else f"alpha={alpha}"
        tv3 = tangle_vector(mix3(0.0, alpha))        # pure W3
        tv4 = tangle_vector(mix4(0.0, 1.0, 0.0, alpha))  # pure W4
        if abs(tv3.tau1 - 2 * tv3.tau2) > 0.02 * tv3.tau1:
            errs.append(f"{basis}: tau1(W3)={tv3.tau1:.6f} != 2*tau2={2 * tv3.tau2:.6f}")
        if abs(tv4.tau1 - 3 * tv4.tau2) > 0.02 * tv4.tau1:
            errs.append(f"{basis}: tau1(W4)={tv4.tau1:.6f} != 3*tau2={3 * tv4.tau2:.6f}")
    dt = time.perf_counter() - t0
    if dt >= 5.0:
        errs.append(f"runtime {dt:.2f}s >= 5s")
    _line(2, not errs,
          "; ".join(errs) or f"double/triple ratios hold in both bases in {dt:.2f}s")


# The two rows whose printed labels fail an independent partial-transpose
# certificate (see tests/test_evaluate.py); the printed values are kept here
# so the gate scores against the table as published.
PRINTED_OVERRIDES = {"mu1": "[4]_4", "mu3": "SEP"}


def test_criterion_03_golden_table():
    t0 = time.perf_counter()
    mismatches = []
    total = 0
    for name, dm, expected in known_states():
        printed = PRINTED_OVERRIDES.get(name, expected)
        got = classify.label(tangle_vector(dm)).text
        total += 1
        if got != printed:
            mismatches.append(name)
    dt = time.perf_counter() - t0
    matches = total - len(mismatches)
    ok = matches >= 15 and set(mismatches) == set(PRINTED_OVERRIDES) and dt < 10.0
    _line(3, ok,
          f"{matches}/{total} printed rows reproduced in {dt:.1f}s "
          f"(bar 15; certified dissents: {', '.join(sorted(mismatches)) or 'none'})")


def test_criterion_04_mixture_transitions():
    eps = 1e-6  # exact tau != 0 semantics; the labeler default stays 1e-3
    t0 = time.perf_counter()
    errs = []

    grid = np.round(np.arange(0.0, 0.51, 0.01), 2)
    labels = [
        classify.label(tangle_vector(mix3(float(b), 3.0), eps)).text
        for b in grid
    ]
    if labels[0] != "[3]_2" or labels[-1] != "[3]_3":
        errs.append(f"endpoints wrong: {labels[0]}, {labels[-1]}")
    flips = [i for i in range(1, len(labels)) if labels[i] != labels[i - 1]]
    if len(flips) != 1:
        errs.append(f"expected a single flip, got {len(flips)}")
    else:
        b_star = float(grid[flips[0] - 1])  # last b still labeled [3]_2
        if not 0.25 <= b_star <= 0.35:
            errs.append(f"flip at b*={b_star} outside [0.25, 0.35]")

    anchors = [
        ((1 / 3, 1 / 3, 1 / 3), "[4]_4"),
        ((0.1, 0.8, 0.1), "[4]_2"),
        ((0.1, 0.1, 0.8), "[4]_3"),
    ]
    for (a, b, c), want in anchors:
        got = classify.label(tangle_vector(mix4(a, b, c, 3.0), eps)).text
        if got != want:
            errs.append(f"mix4{(round(a, 3), b, c)} -> {got}, want {want}")

    dt = time.perf_counter() - t0
    if dt >= 60.0:
        errs.append(f"runtime {dt:.1f}s >= 60s")
    detail = "; ".join(errs) if errs else (
        f"flip at b*={grid[flips[0] - 1]:.2f}, all three 4-qubit anchors, {dt:.1f}s"
    )
    _line(4, not errs, detail)


def test_criterion_05_lower_bound_consistency():
    rng = np.random.default_rng(42)
    errs = []
    for n in (3, 4):
        worst = -np.inf
        for _ in range(200):
            dm = random_pure(n, rng)
            for p in all_bipartitions(n):
                gap = lb_concurrence_sq(dm, p) - i_concurrence(dm, p) ** 2
                worst = max(worst, gap)
        if worst > 1e-6:
            errs.append(f"n={n}: lb exceeds iconc^2 by {worst:.2e}")
    worst2 = 0.0
    for _ in range(200):
        dm = random_mixed(2, rng)
        worst2 = max(worst2, abs(
            lb_concurrence_sq(dm, Bipartition((0,), (1,)))
            - wootters_concurrence(dm) ** 2
        ))
    if worst2 > 1e-8:
        errs.append(f"2q mixed: |lb - wootters^2| = {worst2:.2e}")
    _line(5, not errs,
          "; ".join(errs) or
          f"600 pure-state cuts bounded, 200 mixed agree to {worst2:.1e}")


def test_criterion_06_local_unitary_invariance():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in (2, 3, 4):
        for i in range(200):
            dm = random_pure(n, rng) if i % 2 else random_mixed(n, rng)
            u = random_local_unitary(n, rng)
            tv1 = tangle_vector(dm)
            tv2 = tangle_vector(apply_unitary(dm, u))
            for a, b in zip(tv1.as_dict().values(), tv2.as_dict().values()):
                if a is None or b is None:
                    continue
                worst = max(worst, abs(a - b))
    _line(6, worst <= 2e-3,
          f"600 random local rotations, worst tangle drift {worst:.2e} (bar 2e-3)")


def test_criterion_07_gradient_check():
    worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        x = np.vstack([rng.normal(-1, 0.6, (40, 8)), rng.normal(1, 0.6, (40, 8))])
        y = np.array([0] * 40 + [1] * 40)
        model = mlp.train(x, y, 2, hidden=[16, 8], epochs=3, seed=seed)
        err = mlp.gradient_check(model, model.standardize(x), np.eye(2)[y], seed=seed)
        worst = max(worst, err)
    _line(7, worst < 1e-5,
          f"[16,8] net, 5 seeds, worst relative gradient error {worst:.2e}")


def _pipeline(tmpdir, tag, n, per_class, purity, hidden, epochs, batch):
    base = str(tmpdir / tag)
    t0 = time.perf_counter()
    dataset.generate(n, per_class, purity, 1e-3, 7, base + ".entc")
    dataset.split(base + ".entc", base + ".tr", base + ".te", 0.8, 0)
    dtr = dataset.read_dataset(base + ".tr")
    dte = dataset.read_dataset(base + ".te")
    model = mlp.train(dataset.load_features(dtr), dtr.labels, n,
                      hidden=hidden, epochs=epochs, batch=batch, seed=3)
    cm = evaluate.confusion(model, dataset.load_features(dte), dte.labels)
    dt = time.perf_counter() - t0
    return {"acc": evaluate.accuracy(cm), "dt": dt,
            "ntr": len(dtr), "nte": len(dte)}


SMALL = dict(hidden=[256, 128, 64], epochs=100, batch=64)
LARGE = dict(hidden=[512, 256, 128], epochs=150, batch=128)


def test_criterion_08_ml_bands(tmp_path):
    r = {
        "2qp": _pipeline(tmp_path, "2qp", 2, 5000, "pure", **SMALL),
        "2qm": _pipeline(tmp_path, "2qm", 2, 9000, "mixed", **SMALL),
        "3qp": _pipeline(tmp_path, "3qp", 3, 8000, "pure", **LARGE),
        "4qp": _pipeline(tmp_path, "4qp", 4, 8000, "pure", **LARGE),
        "3qm": _pipeline(tmp_path, "3qm", 3, 3000, "mixed", **LARGE),
        "4qm": _pipeline(tmp_path, "4qm", 4, 1000, "mixed", **SMALL),
    }
    errs = []
    if r["2qp"]["ntr"] != 8000 or r["2qp"]["nte"] != 2000:
        errs.append(f"2q pure split {r['2qp']['ntr']}/{r['2qp']['nte']} != 8000/2000")
    bands = [("2qp", 0.97), ("2qm", 0.90), ("3qp", 0.75), ("4qp", 0.75)]
    for tag, bar in bands:
        if r[tag]["acc"] < bar:
            errs.append(f"{tag} accuracy {r[tag]['acc']:.4f} < {bar}")
    orderings = [("3qp", "3qm"), ("4qp", "4qm"), ("3qm", "4qm")]
    for hi, lo in orderings:
        if not r[hi]["acc"] > r[lo]["acc"]:
            errs.append(f"{hi} {r[hi]['acc']:.4f} <= {lo} {r[lo]['acc']:.4f}")
    for tag, v in r.items():
        if v["dt"] >= 1800:
            errs.append(f"{tag} took {v['dt']:.0f}s >= 30min")
    summary = " ".join(f"{t}={v['acc']:.4f}" for t, v in r.items())
    _line(8, not errs, "; ".join(errs) or summary)


def test_criterion_09_determinism(tmp_path):
    a, b = str(tmp_path / "a.entc"), str(tmp_path / "b.entc")
    dataset.generate(3, 40, "pure", 1e-3, 5, a)
    dataset.generate(3, 40, "pure", 1e-3, 5, b)
    gen_ok = _sha(a) == _sha(b)

    ds = dataset.read_dataset(a)
    x = dataset.load_features(ds)
    m1, m2 = str(tmp_path / "m1.json"), str(tmp_path / "m2.json")
    mlp.save_model(mlp.train(x, ds.labels, 3, hidden=[16], epochs=5, seed=2), m1)
    mlp.save_model(mlp.train(x, ds.labels, 3, hidden=[16], epochs=5, seed=2), m2)
    train_ok = _sha(m1) == _sha(m2)
    _line(9, gen_ok and train_ok,
          f"gen byte-identical: {gen_ok}; train byte-identical: {train_ok}")


def test_criterion_10_format_round_trip(tmp_path):
    p1, p2 = str(tmp_path / "probe.entc"), str(tmp_path / "probe2.entc")
    dataset.generate(2, 50, "mixed", 1e-3, 9, p1)
    ds1 = dataset.read_dataset(p1)
    dataset.write_dataset(p2, ds1)
    ds2 = dataset.read_dataset(p2)
    data_ok = _sha(p1) == _sha(p2) and len(ds1) == 100
    x1, x2 = dataset.load_features(ds1), dataset.load_features(ds2)
    feat_ok = np.array_equal(x1, x2)

    model = mlp.train(x1, ds1.labels, 2, hidden=[16], epochs=5, seed=4)
    mpath = str(tmp_path / "m.json")
    mlp.save_model(model, mpath)
    loaded = mlp.load_model(mpath)
    probs1 = mlp.forward(model, model.standardize(x1))
    probs2 = mlp.forward(loaded, loaded.standardize(x2))
    pred_ok = np.array_equal(probs1, probs2)
    _line(10, data_ok and feat_ok and pred_ok,
          f"dataset bytes: {data_ok}; features: {feat_ok}; "
          f"predictions bit-exact on 100-state probe: {pred_ok}")
