"""Command-line front end: solve, synth, bench, prior."""

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from corrclust.affinity import AffinityError, load_matrix, save_matrix
from corrclust.partition import purity, save_labels
from corrclust.prior import neg_log_prior
from corrclust.solvers import ALGORITHMS, SolveConfig, solve
from corrclust.synthgen import NOISE_MODELS, InfeasibleParams, SynthParams, generate

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2

RECORD_FIELDS = (
    "algorithm",
    "sparsity",
    "seed",
    "repeat",
    "cc_energy",
    "potts_energy",
    "k",
    "purity",
    "wall_time",
    "sweeps",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_synth_flags(p, with_seed=True):
    d = SynthParams()
    p.add_argument("--n", type=int, default=d.n)
    p.add_argument("--k", type=int, default=d.k)
    p.add_argument("--size-ratio", type=float, default=d.size_ratio)
    p.add_argument("--within-frac", type=float, default=d.within_frac)
    p.add_argument("--noise", type=float, default=d.noise)
    p.add_argument("--noise-model", choices=NOISE_MODELS, default=d.noise_model)
    if with_seed:
        p.add_argument("--sparsity", type=float, default=d.sparsity)
        p.add_argument("--seed", type=int, default=d.seed)


def _synth_params(args, **over):
    base = dict(
        n=args.n,
        k=args.k,
        size_ratio=args.size_ratio,
        within_frac=args.within_frac,
        noise=args.noise,
        noise_model=args.noise_model,
    )
    for name in ("sparsity", "seed"):
        if hasattr(args, name):
            base[name] = getattr(args, name)
    base.update(over)
    return SynthParams(**base)


# --- solve -----------------------------------------------------------------


def cmd_solve(args):
    try:
        W = load_matrix(args.input)
    except (OSError, AffinityError) as err:
        return _fail(EXIT_IO, err)
    config = SolveConfig(
        seed=args.seed, max_sweeps=args.max_sweeps, record_trace=args.trace is not None
    )
    t0 = time.perf_counter()
    result = solve(W, args.algo, config)
    elapsed = time.perf_counter() - t0
    try:
        if args.output:
            save_labels(args.output, result.labels)
        if args.trace:
            with open(args.trace, "w", encoding="utf-8", newline="") as fh:
                out = csv.writer(fh, lineterminator="\n")
                out.writerow(["step", "move", "potts_energy"])
                for step, (move, energy) in enumerate(result.trace):
                    out.writerow([step, move, repr(energy)])
    except OSError as err:
        return _fail(EXIT_IO, err)
    print(
        f"k={result.k} cc_energy={result.cc_energy!r} "
        f"potts_energy={result.potts_energy!r} time={elapsed:.6f}"
    )
    return EXIT_OK


# --- synth -----------------------------------------------------------------


def cmd_synth(args):
    params = _synth_params(args)
    try:
        W, truth = generate(params)
    except InfeasibleParams as err:
        return _fail(EXIT_USAGE, err)
    try:
        save_matrix(args.out_matrix, W, comments=[json.dumps(params.to_dict(), sort_keys=True)])
        save_labels(args.out_gt, truth)
    except OSError as err:
        return _fail(EXIT_IO, err)
    print(f"n={W.n} nnz={W.nnz} k={params.k} matrix={args.out_matrix} gt={args.out_gt}")
    return EXIT_OK


# --- bench -----------------------------------------------------------------


@dataclass(frozen=True)
class _Cell:
    algorithm: str
    sparsity: float
    level: int
    repeat: int
    params: SynthParams
    max_sweeps: int
    save_dir: str | None


def _cell_seed(seed, level, repeat):
    return int(np.random.SeedSequence([seed, level, repeat]).generate_state(1)[0])


def _check_monotone(trace, tol):
    energies = [e for _, e in trace]
    for before, after in zip(energies, energies[1:]):
        if after > before + tol:
            raise RuntimeError(f"energy increased along trace: {before!r} -> {after!r}")


def _run_cell(cell):
    W, truth = generate(cell.params)
    config = SolveConfig(seed=cell.params.seed, max_sweeps=cell.max_sweeps, record_trace=True)
    t0 = time.perf_counter()
    result = solve(W, cell.algorithm, config)
    wall = time.perf_counter() - t0
    _check_monotone(result.trace, 1e-9 * (1.0 + W.abs_weight()))
    if cell.save_dir:
        stem = os.path.join(
            cell.save_dir, f"{cell.algorithm}_s{cell.level}_r{cell.repeat}"
        )
        save_matrix(stem + ".mtx", W, comments=[json.dumps(cell.params.to_dict(), sort_keys=True)])
        save_labels(stem + ".labels", result.labels)
        save_labels(stem + ".gt", truth)
    return {
        "algorithm": cell.algorithm,
        "sparsity": cell.sparsity,
        "seed": cell.params.seed,
        "repeat": cell.repeat,
        "cc_energy": result.cc_energy,
        "potts_energy": result.potts_energy,
        "k": result.k,
        "purity": purity(result.labels, truth),
        "wall_time": wall,
        "sweeps": result.sweeps,
    }


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _summarize(rows, out):
    cells = {}
    for row in rows:
        cells.setdefault((row["algorithm"], row["sparsity"]), []).append(row)
    metrics = ("cc_energy", "k", "purity", "wall_time")
    out.write("algorithm  sparsity  " + "  ".join(f"{m:>22}" for m in metrics) + "\n")
    for (algo, sparsity), group in cells.items():
        parts = []
        for m in metrics:
            vals = np.array([r[m] for r in group], dtype=float)
            parts.append(f"{vals.mean():>11.4g} ± {vals.std():<8.3g}")
        out.write(f"{algo:<9}  {sparsity:<8g}  " + "  ".join(parts) + "\n")


def cmd_bench(args):
    for algo in args.algos:
        if algo not in ALGORITHMS:
            return _fail(EXIT_USAGE, f"unknown algorithm {algo!r}")
    cells = []
    for level, sparsity in enumerate(args.sparsities):
        for repeat in range(args.repeats):
            params = _synth_params(
                args, sparsity=sparsity, seed=_cell_seed(args.seed, level, repeat)
            )
            try:
                params.validate()
            except InfeasibleParams as err:
                return _fail(EXIT_USAGE, err)
            for algo in args.algos:
                cells.append(
                    _Cell(algo, sparsity, level, repeat, params, args.max_sweeps, args.save_dir)
                )
    if args.save_dir:
        os.makedirs(args.save_dir, exist_ok=True)
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_run_cell, cells))
        else:
            rows = [_run_cell(c) for c in cells]
    except InfeasibleParams as err:
        return _fail(EXIT_USAGE, err)
    except OSError as err:
        return _fail(EXIT_IO, err)

    # rows arrive in cell order regardless of --jobs, so the file is deterministic
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(RECORD_FIELDS)
    for row in rows:
        out.writerow([_format(row[f]) for f in RECORD_FIELDS])
    try:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as err:
        return _fail(EXIT_IO, err)
    config = {f.name: getattr(args, f.name) for f in fields(SynthParams) if hasattr(args, f.name)}
    config.update(
        algos=args.algos, sparsities=args.sparsities, repeats=args.repeats, seed=args.seed
    )
    print(json.dumps(config, sort_keys=True))
    _summarize(rows, sys.stdout)
    return EXIT_OK


# --- prior -----------------------------------------------------------------


def cmd_prior(args):
    if args.n < 1:
        return _fail(EXIT_USAGE, f"--n must be at least 1, got {args.n}")
    values = neg_log_prior(args.n)
    buf = io.StringIO()
    buf.write("k,neg_log_prob\n")
    for k, v in enumerate(values, start=1):
        buf.write(f"{k},{float(v) + 0.0:.17g}\n")
    text = buf.getvalue()
    if args.csv is None or args.csv == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as err:
        return _fail(EXIT_IO, err)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="corrclust", description="Correlation clustering toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="cluster a matrix file")
    p.add_argument("--input", required=True)
    p.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sweeps", type=_positive_int, default=1000)
    p.add_argument("--output")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("synth", help="generate a planted-partition instance")
    _add_synth_flags(p)
    p.add_argument("--out-matrix", required=True)
    p.add_argument("--out-gt", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run the sparsity benchmark grid")
    p.add_argument("--algos", nargs="+", default=["swap", "expand", "icm"])
    p.add_argument("--sparsities", nargs="+", type=float, default=[0.05, 0.1, 0.2])
    p.add_argument("--repeats", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.add_argument("--max-sweeps", type=_positive_int, default=1000)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--save-dir")
    _add_synth_flags(p, with_seed=False)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("prior", help="tabulate -log Pr(k) under the uniform partition prior")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_prior)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
