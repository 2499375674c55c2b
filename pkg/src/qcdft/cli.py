"""Command-line entry point: data generation, training, benchmarks, Grover, Shor.

Every subcommand writes its outputs plus a ``manifest.json`` (full config,
seed, tool version, output list) into ``--out``, so any run can be reproduced
from its manifest alone.  CSV outputs are byte-stable across reruns with the
same parameters; the timing subcommand is the one exception.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, benchmark, grover, network, shor
from .engine import BERNARDI


def _write_manifest(out_dir: Path, subcommand: str, params: dict, outputs: list[str]) -> None:
    manifest = {
        "tool_version": __version__,
        "subcommand": subcommand,
        "params": params,
        "seed": params.get("seed"),
        "started_at": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params(args) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def cmd_gen_data(args) -> int:
    out = _out_dir(args)
    samples = network.generate_dataset(args.n, seed=args.seed)
    network.save_dataset(samples, out / "dataset.csv")
    _write_manifest(out, "gen-data", _params(args), ["dataset.csv"])
    print(f"wrote {len(samples)} samples to {out / 'dataset.csv'}")
    return 0


def _write_history_csv(path, history: np.ndarray, mean_fid: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "rms1f", "mean_fidelity"])
        for i, (loss, fid) in enumerate(zip(history, mean_fid)):
            writer.writerow([i, repr(float(loss)), repr(float(fid))])


def cmd_train(args) -> int:
    out = _out_dir(args)
    widths = tuple(int(w) for w in args.widths.split(",")) if args.widths else network.DEFAULT_WIDTHS
    config = network.TrainConfig(
        n_samples=args.samples,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=args.seed,
        batch_size=args.batch_size,
        layer_widths=widths,
    )
    dataset = network.load_dataset(args.dataset) if args.dataset else None
    result = network.train(config, dataset=dataset)
    network.save_model(result.model_c, out / "model_control.json")
    network.save_model(result.model_t, out / "model_target.json")
    _write_history_csv(out / "history.csv", result.history, result.mean_fidelity)
    _write_manifest(
        out, "train", _params(args), ["model_control.json", "model_target.json", "history.csv"]
    )
    if len(result.history):
        print(f"trained {config.epochs} epochs: RMS1F {result.history[0]:.6f} -> {result.history[-1]:.6f}")
    else:
        print("trained 0 epochs: models written untrained, history empty")
    return 0


def _load_functional(args):
    if args.model_control and args.model_target:
        model_c = network.load_model(args.model_control)
        model_t = network.load_model(args.model_target)
        return network.model_theta_functional(model_c, model_t)
    if args.model_control or args.model_target:
        raise ValueError("pass both --model-control and --model-target, or neither")
    # theta = 0 stub: the corrected run degrades to the plain functional.
    from .engine import constant_theta_functional

    return constant_theta_functional(np.zeros((4, 4)), np.zeros((4, 4)))


def cmd_bench(args) -> int:
    out = _out_dir(args)
    functional = _load_functional(args)
    configs = [
        benchmark.RandomCircuitConfig(
            n_qubits=args.qubits, n_steps=args.steps, cnot_weight=args.cnot_weight,
            seed=args.seed + i,
        )
        for i in range(args.circuits)
    ]
    table, records = benchmark.aggregate(configs, functional)
    outputs = ["metrics.csv"]
    benchmark.write_metrics_csv(out / "metrics.csv", table)
    if args.write_raw:
        benchmark.write_metrics_raw_csv(out / "metrics_raw.csv", records)
        outputs.append("metrics_raw.csv")
    _write_manifest(out, "bench", _params(args), outputs)
    print(f"averaged {args.circuits} circuits x {args.steps} steps -> {out / 'metrics.csv'}")
    return 0


def cmd_timing(args) -> int:
    out = _out_dir(args)
    functional = _load_functional(args)
    records = benchmark.timing_bench(
        qubit_counts=args.qubits,
        gates_per_point=args.gates,
        circuits_per_point=args.circuits,
        repeats=args.repeats,
        functional=functional,
        seed=args.seed,
        cnot_weight=args.cnot_weight,
    )
    benchmark.write_timing_csv(out / "timing.csv", records)
    _write_manifest(out, "timing", _params(args), ["timing.csv"])
    for rec in records:
        print(f"{rec.method:>9}  n={rec.n_qubits:<3d}  {rec.seconds_per_gate * 1e6:10.2f} us/gate")
    return 0


def cmd_grover(args) -> int:
    out = _out_dir(args)
    spec = grover.GroverSpec(
        n_qubits=args.n, solutions=tuple(args.solutions), iterations=args.iterations
    )
    table = grover.grover_sqp_table(spec)
    grover.write_grover_csv(out / "grover.csv", table)
    _write_manifest(out, "grover", _params(args), ["grover.csv"])
    row = table[min(args.decode_iteration, spec.iterations)]
    try:
        if len(spec.solutions) == 1:
            decoded = grover.decode_single_solution(row, tie_tolerance=args.tie_tolerance)
            print(f"decoded solution after iteration {args.decode_iteration}: {decoded}")
        else:
            pair = grover.decode_two_solutions(row, tie_tolerance=args.tie_tolerance)
            print(f"decoded solutions after iteration {args.decode_iteration}: {pair[0]} {pair[1]}")
    except (grover.AmbiguousQubitError, grover.DecodeNotApplicableError) as exc:
        print(f"decode failed: {exc}")
    return 0


def cmd_shor_census(args) -> int:
    out = _out_dir(args)
    if args.k > 500:
        print(
            f"note: census of {args.k} semiprimes runs a brute-force order "
            "computation per modulus; expect minutes at k=3000",
            file=sys.stderr,
        )
    records = shor.census(args.kind, args.k)
    shor.write_census_csv(out / "shor_census.csv", records)
    _write_manifest(out, "shor-census", _params(args), ["shor_census.csv"])
    with_as = sum(1 for r in records if r.count_as > 0)
    print(f"{args.kind} census k={args.k}: {with_as} of {len(records)} have at least one a_s")
    return 0


def cmd_shor_factor(args) -> int:
    out = _out_dir(args)
    result = shor.factor_semiprime_sqp(args.n, seed=args.seed, max_attempts=args.max_attempts)
    for line in result.trace:
        print(line)
    doc = {
        "n": result.n, "success": result.success, "p": result.p, "q": result.q,
        "attempts": result.attempts, "method": result.method, "trace": result.trace,
    }
    with open(out / "shor_factor.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    _write_manifest(out, "shor-factor", _params(args), ["shor_factor.json"])
    if result.success:
        print(f"{result.n} = {result.p} x {result.q} ({result.method})")
        return 0
    print(f"failed to factor {result.n} in {result.attempts} attempts")
    return 1


def cmd_run_circuit(args) -> int:
    from . import exact
    from .circuits import parse_circuit
    from .engine import run_qcdft

    out = _out_dir(args)
    with open(args.file, encoding="utf-8") as fh:
        circuit = parse_circuit(fh.read())
    if args.method == "exact":
        trace = exact.run_exact(circuit)
    else:
        functional = BERNARDI if args.method == "bernardi" else _load_functional(args)
        trace = run_qcdft(circuit, functional)
    with open(out / "sqp_trace.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "qubit", "sqp"])
        for step in range(len(trace.sqps)):
            for q in range(circuit.n_qubits):
                writer.writerow([step, q, repr(float(trace.sqps[step, q]))])
    _write_manifest(out, "run-circuit", _params(args), ["sqp_trace.csv"])
    print(f"{args.method} run of {circuit.n_qubits} qubits x {len(circuit.ops)} ops; "
          f"final SQPs: {np.array2string(trace.sqps[-1], precision=6)}")
    return 0


def cmd_shor_sqp(args) -> int:
    out = _out_dir(args)
    spec = shor.ShorRegisterSpec(args.n, args.base)
    sqps = shor.shor_first_register_sqp(spec)
    with open(out / "shor_sqp.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["qubit", "sqp"])
        for q, value in enumerate(sqps):
            writer.writerow([q, repr(float(value))])
    _write_manifest(out, "shor-sqp", _params(args), ["shor_sqp.csv"])
    r = shor.recover_period_from_sqp(sqps)
    print(f"first-register SQPs (qubit 0 first): {np.array2string(sqps, precision=6)}")
    print(f"recovered period r = {r} (classical order: {shor.multiplicative_order(args.base, args.n)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcdft",
        description="RDM-based circuit simulation, functional training, and SQP experiments",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-data", help="generate a training dataset CSV")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs/gen-data")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train the control/target networks")
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--learning-rate", type=float, default=1e-5)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--widths", default=None, help="comma-separated layer widths")
    p.add_argument("--dataset", default=None, help="train on an existing dataset CSV")
    p.add_argument("--out", default="runs/train")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="exact vs plain vs corrected metric curves")
    p.add_argument("--circuits", type=int, default=300)
    p.add_argument("--qubits", type=int, default=10)
    p.add_argument("--steps", type=int, default=150)
    p.add_argument("--cnot-weight", type=float, default=8.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-control", default=None)
    p.add_argument("--model-target", default=None)
    p.add_argument("--write-raw", action="store_true", help="also write per-circuit curves")
    p.add_argument("--out", default="runs/bench")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("timing", help="wall-clock per-gate comparison")
    p.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12, 16])
    p.add_argument("--gates", type=int, default=10)
    p.add_argument("--circuits", type=int, default=40)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--cnot-weight", type=float, default=8.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-control", default=None)
    p.add_argument("--model-target", default=None)
    p.add_argument("--out", default="runs/timing")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("grover", help="Grover SQP table and decoding")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--solutions", nargs="+", required=True, help="bitstrings, MSB first")
    p.add_argument("--iterations", type=int, default=4)
    p.add_argument("--decode-iteration", type=int, default=1)
    p.add_argument("--tie-tolerance", type=float, default=0.05)
    p.add_argument("--out", default="runs/grover")
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("shor-census", help="a_s census over semiprimes")
    p.add_argument("--kind", choices=["squarefree", "square"], default="squarefree")
    p.add_argument("--k", type=int, default=300)
    p.add_argument("--out", default="runs/shor-census")
    p.set_defaults(func=cmd_shor_census)

    p = sub.add_parser("shor-factor", help="factor a semiprime from SQPs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=20)
    p.add_argument("--out", default="runs/shor-factor")
    p.set_defaults(func=cmd_shor_factor)

    p = sub.add_parser("shor-sqp", help="first-register SQP vector for one base")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--out", default="runs/shor-sqp")
    p.set_defaults(func=cmd_shor_sqp)

    p = sub.add_parser("run-circuit", help="run a circuit text file and record SQPs")
    p.add_argument("--file", required=True, help="circuit in the plain-text format")
    p.add_argument("--method", choices=["exact", "bernardi", "corrected"], default="exact")
    p.add_argument("--model-control", default=None)
    p.add_argument("--model-target", default=None)
    p.add_argument("--out", default="runs/run-circuit")
    p.set_defaults(func=cmd_run_circuit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # argparse handles usage errors with exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
