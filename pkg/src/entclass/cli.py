"""Command-line entry point.

Subcommands: gen, label, split, train, eval, curves, verify. Every command
echoes its effective config to stderr (and a .run.json sidecar next to each
output file) so runs are reconstructible, and is deterministic under fixed
flags.

Exit codes: 0 ok, 2 usage, 3 generation exhausted, 4 invalid state,
5 I/O or file-format failure, 6 training divergence.
"""

import argparse
import json
import sys

import numpy as np

from . import classify, coherent, dataset, evaluate, measures, mlp
from .states import MIXED_KIND, StateValidationError, validate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GENERATION = 3
EXIT_INVALID_STATE = 4
EXIT_IO = 5
EXIT_DIVERGENCE = 6


def _echo(command: str, cfg: dict) -> None:
    sys.stderr.write(f"config[{command}]: {json.dumps(cfg, sort_keys=True)}\n")


def _sidecar(out_path: str, command: str, cfg: dict) -> None:
    with open(out_path + ".run.json", "w", encoding="utf-8") as fh:
        json.dump({"command": command, **cfg}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_alpha_grid(text: str) -> np.ndarray:
    # "start:stop:count", e.g. "0.1:3.0:60"
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--alpha expects start:stop:count, got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("--alpha count must be >= 1")
    return np.linspace(start, stop, count)


def _parse_hidden(text: str):
    if not text:
        return None
    try:
        sizes = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--hidden expects comma-separated ints, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("--hidden sizes must be positive")
    return sizes


def _load_state_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateValidationError(f"state file is not valid JSON: {exc}")
    if not isinstance(payload, dict) or "n_qubits" not in payload or "matrix" not in payload:
        raise StateValidationError('state JSON must have "n_qubits" and "matrix" keys')
    n = payload["n_qubits"]
    if not isinstance(n, int) or not 2 <= n <= 4:
        raise StateValidationError("n_qubits must be 2, 3, or 4")
    rows = payload["matrix"]
    dim = 2 ** n
    if not isinstance(rows, list) or len(rows) != dim:
        raise StateValidationError(f"matrix must have {dim} rows")
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise StateValidationError(f"matrix row {i} must have {dim} entries")
        for j, cell in enumerate(row):
            if not isinstance(cell, dict) or "re" not in cell or "im" not in cell:
                raise StateValidationError(
                    f'matrix[{i}][{j}] must be an object with "re" and "im"'
                )
            mat[i, j] = complex(float(cell["re"]), float(cell["im"]))
    return validate(mat, n, MIXED_KIND)


def cmd_gen(args) -> int:
    cfg = {
        "qubits": args.qubits, "per_class": args.per_class, "purity": args.purity,
        "epsilon": args.epsilon, "seed": args.seed, "threads": args.threads,
        "out": args.out,
    }
    _echo("gen", cfg)
    dataset.generate(
        n_qubits=args.qubits, per_class=args.per_class, purity_kind=args.purity,
        epsilon=args.epsilon, seed=args.seed, out_path=args.out,
        threads=args.threads,
    )
    return EXIT_OK


def cmd_label(args) -> int:
    cfg = {"in": args.in_path, "epsilon": args.epsilon}
    _echo("label", cfg)
    dm = _load_state_json(args.in_path)
    tv = measures.tangle_vector(dm, args.epsilon)
    lab = classify.label(tv)
    out = {
        "n_qubits": dm.n_qubits,
        "epsilon": args.epsilon,
        "tangles": {
            "tau1": tv.tau1,
            "tau2": tv.tau2,
            "tau3": tv.tau3,
            "tau4": tv.tau4,
        },
        "label": lab.text,
    }
    print(json.dumps(out))
    return EXIT_OK


def cmd_split(args) -> int:
    if not 0.0 <= args.train_fraction <= 1.0:
        raise ValueError("--train-fraction must be in [0, 1]")
    cfg = {
        "in": args.in_path, "train_out": args.train_out, "test_out": args.test_out,
        "train_fraction": args.train_fraction, "seed": args.seed,
    }
    _echo("split", cfg)
    n_train, n_test = dataset.split(
        args.in_path, args.train_out, args.test_out,
        train_fraction=args.train_fraction, seed=args.seed,
    )
    _sidecar(args.train_out, "split", {**cfg, "n_train": n_train, "n_test": n_test})
    _sidecar(args.test_out, "split", {**cfg, "n_train": n_train, "n_test": n_test})
    sys.stderr.write(f"split: {n_train} train / {n_test} test records\n")
    return EXIT_OK


def cmd_train(args) -> int:
    hidden = _parse_hidden(args.hidden)
    cfg = {
        "data": args.data, "hidden": hidden, "epochs": args.epochs, "lr": args.lr,
        "batch": args.batch, "seed": args.seed, "out": args.out,
    }
    _echo("train", cfg)
    ds = dataset.read_dataset(args.data)
    x = dataset.load_features(ds)
    model = mlp.train(
        x, ds.labels, ds.n_qubits, hidden=hidden, epochs=args.epochs,
        lr=args.lr, batch=args.batch, seed=args.seed,
    )
    mlp.save_model(model, args.out)
    _sidecar(args.out, "train", {**cfg, "final_loss": model.train_meta["final_loss"]})
    sys.stderr.write(f"train: final loss {model.train_meta['final_loss']:.6f}\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = {"data": args.data, "model": args.model, "report": args.report}
    _echo("eval", cfg)
    ds = dataset.read_dataset(args.data)
    model = mlp.load_model(args.model)
    if model.n_qubits != ds.n_qubits:
        raise ValueError(
            f"model is for {model.n_qubits} qubits, dataset for {ds.n_qubits}"
        )
    cm = evaluate.confusion(model, dataset.load_features(ds), ds.labels)
    payload = evaluate.report(cm)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _sidecar(args.report, "eval", cfg)
        print(evaluate.format_table(cm))
    else:
        print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_curves(args) -> int:
    families = [tok.strip() for tok in args.family.split(",") if tok.strip()]
    if not families:
        raise ValueError("--family must name at least one curve family")
    grid = _parse_alpha_grid(args.alpha) if args.alpha else coherent.DEFAULT_ALPHA_GRID
    cfg = {
        "family": families, "alpha": args.alpha or "0.1:3.0:60",
        "epsilon": args.epsilon, "out": args.out,
    }
    _echo("curves", cfg)
    rows = coherent.emit_curves(families, grid, args.out, epsilon=args.epsilon)
    _sidecar(args.out, "curves", {**cfg, "n_rows": len(rows)})
    sys.stderr.write(f"curves: wrote {len(rows)} rows to {args.out}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = {"models": args.models, "epsilon": args.epsilon}
    _echo("verify", cfg)
    models = {}
    if args.models:
        import os

        if not os.path.isdir(args.models):
            raise FileNotFoundError(f"model directory not found: {args.models}")
        for n in (2, 3, 4):
            path = os.path.join(args.models, f"model_{n}q.json")
            if os.path.exists(path):
                models[n] = mlp.load_model(path)
    rows = evaluate.verify_known_states(models, epsilon=args.epsilon)
    print(evaluate.format_verify_rows(rows))
    bad = [r["name"] for r in rows if r["truth"] != r["expected"]]
    if bad:
        sys.stderr.write(f"verify: truth column deviates on {', '.join(bad)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entclass",
        description="Entanglement-class datasets, tangle labeling, and classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled dataset")
    p.add_argument("--qubits", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--per-class", type=int, required=True, dest="per_class")
    p.add_argument("--purity", choices=("pure", "mixed"), required=True)
    p.add_argument("--epsilon", type=float, default=classify.DEFAULT_EPSILON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("label", help="label one density matrix from JSON")
    p.add_argument("--in", required=True, dest="in_path")
    p.add_argument("--epsilon", type=float, default=classify.DEFAULT_EPSILON)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("split", help="stratified train/test split of a dataset")
    p.add_argument("--in", required=True, dest="in_path")
    p.add_argument("--train-out", required=True, dest="train_out")
    p.add_argument("--test-out", required=True, dest="test_out")
    p.add_argument("--train-fraction", type=float, default=0.8, dest="train_fraction")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a classifier on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--hidden", default="", help="comma-separated sizes, e.g. 256,128")
    p.add_argument("--epochs", type=int, default=mlp.DEFAULT_EPOCHS)
    p.add_argument("--lr", type=float, default=mlp.DEFAULT_LR)
    p.add_argument("--batch", type=int, default=mlp.DEFAULT_BATCH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report", default=None, help="write JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curves", help="tangle curves over coherent-state families")
    p.add_argument(
        "--family", default=",".join(coherent.FAMILIES),
        help="comma-separated families (ghz3,w3,ghz4,w4,x4,mix3)",
    )
    p.add_argument("--alpha", default=None, help="grid as start:stop:count")
    p.add_argument("--epsilon", type=float, default=classify.DEFAULT_EPSILON)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("verify", help="check known reference states")
    p.add_argument("--models", default=None, help="directory with model_{n}q.json files")
    p.add_argument("--epsilon", type=float, default=classify.DEFAULT_EPSILON)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except dataset.GenerationExhaustedError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_GENERATION
    except StateValidationError as exc:
        sys.stderr.write(f"error: invalid state: {exc}\n")
        return EXIT_INVALID_STATE
    except (dataset.DatasetFormatError, mlp.ModelFormatError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except mlp.DivergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DIVERGENCE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
