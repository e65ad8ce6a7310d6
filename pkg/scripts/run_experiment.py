"""End-to-end experiment: generate, split, train, evaluate, report.

Example:
    python3 scripts/run_experiment.py --qubits 2 --purity pure \
        --per-class 5000 --epochs 100 --workdir runs/2q_pure
"""

import argparse
import json
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from entclass import dataset, evaluate, mlp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, choices=(2, 3, 4), required=True)
    ap.add_argument("--purity", choices=("pure", "mixed"), required=True)
    ap.add_argument("--per-class", type=int, default=1000, dest="per_class")
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--train-fraction", type=float, default=0.8)
    ap.add_argument("--hidden", default="256,128,64")
    ap.add_argument("--epochs", type=int, default=100)
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--workdir", required=True)
    args = ap.parse_args()

    os.makedirs(args.workdir, exist_ok=True)
    data = os.path.join(args.workdir, "data.entc")
    train_f = os.path.join(args.workdir, "train.entc")
    test_f = os.path.join(args.workdir, "test.entc")
    model_f = os.path.join(args.workdir, f"model_{args.qubits}q.json")
    report_f = os.path.join(args.workdir, "report.json")

    t0 = time.time()
    summary = dataset.generate(
        args.qubits, args.per_class, args.purity, args.epsilon, args.seed,
        data, threads=args.threads,
    )
    print(f"generated {sum(summary['counts'].values())} records "
          f"in {summary['wall_time_s']}s -> {data}")

    n_train, n_test = dataset.split(
        data, train_f, test_f, train_fraction=args.train_fraction, seed=args.seed,
    )
    print(f"split {n_train} train / {n_test} test")

    hidden = [int(s) for s in args.hidden.split(",") if s.strip()]
    dtr = dataset.read_dataset(train_f)
    model = mlp.train(
        dataset.load_features(dtr), dtr.labels, args.qubits, hidden=hidden,
        epochs=args.epochs, lr=args.lr, batch=args.batch, seed=args.seed,
    )
    mlp.save_model(model, model_f)
    print(f"trained: final loss {model.train_meta['final_loss']:.6f} -> {model_f}")

    dte = dataset.read_dataset(test_f)
    cm = evaluate.confusion(model, dataset.load_features(dte), dte.labels)
    payload = evaluate.report(cm)
    with open(report_f, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(evaluate.format_table(cm))
    print(f"report -> {report_f}")
    print(f"total wall time {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
