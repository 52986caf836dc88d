"""Command-line interface: `superres <subcommand>`.

Exit codes: 0 success, 2 degenerate dual solution, 3 solver non-convergence,
4 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import formats
from .certificate import (
    SeparationError,
    build_certificate,
    build_certificate_2d,
    eval_certificate,
    verify_certificate,
    verify_certificate_2d,
)
from .discrete import BPOptions, ConvergenceError, basis_pursuit, noisy_l1
from .harness import (
    ExperimentConfig,
    benchmark_exact_recovery,
    critical_distance,
    piecewise_recover,
    random_separated_support,
    random_y_study,
)
from .kernel import KernelSpec, kernel_tail_sum
from .model import AtomicMeasure, Geometry, SampleVector, sample_spikes
from .sdp import DegenerateError, SolverError, SolverOptions, tv_superresolve
from .slepian import build_timeband_operator, cluster_count

EXIT_OK = 0
EXIT_DEGENERATE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVALID = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _vector_to_json(x: np.ndarray, fc: int) -> dict:
    nz = np.abs(x) > 1e-8 * max(float(np.max(np.abs(x))), 1e-300)
    return {
        "N": int(x.size),
        "fc": int(fc),
        "re": x.real.tolist(),
        "im": x.imag.tolist(),
        "sparsity": {"nonzeros": int(nz.sum()), "support": np.nonzero(nz)[0].tolist()},
    }


def _vector_from_json(doc: dict) -> tuple[np.ndarray, int]:
    x = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    return x, int(doc["fc"])


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _cmd_simulate(args) -> int:
    rng = np.random.default_rng(args.seed)
    min_sep = args.min_sep if args.min_sep is not None else 2.0 / args.fc
    T = random_separated_support(rng, args.spikes, min_sep)
    a = np.exp(2j * np.pi * rng.random(args.spikes))
    if args.amplitudes == "gaussian":
        a = a * (0.5 + rng.random(args.spikes)) * 2.0
    x = AtomicMeasure(1, T, a)
    formats.dump_json(formats.measure_to_json(x), args.measure_out)
    formats.dump_json(formats.samples_to_json(sample_spikes(x, args.fc)), args.samples_out)
    return EXIT_OK


def _cmd_solve(args) -> int:
    y = formats.samples_from_json(formats.load_json(args.samples))
    truth = None
    if args.truth:
        truth = formats.measure_from_json(formats.load_json(args.truth))
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    result = tv_superresolve(y, opts, truth=truth)
    if args.out:
        formats.dump_json(formats.measure_to_json(result.measure), args.out)
    diag = {
        "spikes": len(result.measure),
        "duality_gap": result.duality_gap,
        "residual": result.residual,
        "iterations": result.dual.iterations,
        "primal_residual": result.dual.primal_residual,
        "dual_residual": result.dual.dual_residual,
        "degenerate": result.dual.degenerate,
    }
    if result.support_errors is not None:
        diag["support_error_mean"] = result.support_errors["mean"]
        diag["support_error_max"] = result.support_errors["max"]
    _emit(diag, args.json_out)
    return EXIT_OK


def _cmd_bp(args) -> int:
    y = formats.samples_from_json(formats.load_json(args.samples))
    geometry = Geometry(args.N, y.fc)
    x, info = basis_pursuit(y, geometry, BPOptions(tol=args.tol, max_iter=args.max_iter))
    doc = _vector_to_json(x, y.fc)
    doc["iterations"] = info["iterations"]
    _emit(doc, args.out or args.json_out)
    return EXIT_OK


def _cmd_denoise(args) -> int:
    s, fc = _vector_from_json(formats.load_json(args.signal))
    geometry = Geometry(s.size, fc)
    x, info = noisy_l1(s, geometry, args.delta, BPOptions(tol=args.tol, max_iter=args.max_iter))
    doc = _vector_to_json(x, fc)
    doc["iterations"] = info["iterations"]
    _emit(doc, args.out or args.json_out)
    return EXIT_OK


def _load_pattern(path, m: int) -> np.ndarray:
    doc = formats.load_json(path)
    if isinstance(doc, dict):
        v = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc.get("im", np.zeros(m)), dtype=float)
    else:
        v = np.asarray(doc, dtype=complex)
    return v


def _cmd_certify(args) -> int:
    support = np.asarray(formats.load_json(args.support), dtype=float)
    spec = KernelSpec(args.fc)
    dim = 2 if support.ndim == 2 else 1
    v = _load_pattern(args.pattern, support.shape[0])
    if dim == 1:
        cert = build_certificate(support, v, spec)
        report = verify_certificate(cert, grid_per_lambda=args.grid)
        if args.emit_curve:
            M = args.grid * spec.fc
            t = np.arange(M) / M
            formats.write_curve_csv(args.emit_curve, t, np.abs(eval_certificate(cert, t, 0)))
    else:
        cert = build_certificate_2d(support, v.real, spec)
        report = verify_certificate_2d(cert, grid_per_lambda=args.grid)
    doc = {
        "feasible": report.feasible,
        "max_offgrid_modulus": report.max_offgrid_modulus,
        "alpha_inf": report.alpha_inf,
        "beta_inf": report.beta_inf,
        "re_alpha1": report.re_alpha1,
        "im_alpha1": report.im_alpha1,
        "margins": {k: (list(v) if isinstance(v, tuple) else v) for k, v in report.margins.items()},
        "grid_per_lambda": report.grid_per_lambda,
        "condition": report.cond,
    }
    _emit(doc, args.json_out)
    return EXIT_OK


def _cmd_kernel_table(args) -> int:
    spec = KernelSpec(args.fc)
    lc = spec.lambda_c
    rows = []
    for tl in _floats(args.t):
        row = {"t_over_lambda": tl}
        for ell in range(4):
            row[f"F{ell}"] = kernel_tail_sum(spec, args.delta * lc, tl * lc, ell)
        rows.append(row)
    out = args.csv_out or "-"
    fh = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(["t/lambda_c", "F0", "F1", "F2", "F3"])
        for row in rows:
            writer.writerow([row["t_over_lambda"]] + [repr(row[f"F{l}"]) for l in range(4)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _cmd_slepian(args) -> int:
    srfs = _floats(args.srf)
    summary = {}
    columns = {}
    for srf in srfs:
        n = int(round(args.N / srf))
        op = build_timeband_operator(args.N, n, args.k)
        columns[srf] = op.eigenvalues
        summary[str(srf)] = {
            "n": n,
            "cluster_count": cluster_count(op.eigenvalues),
            "below_floor": int(np.sum(op.below_floor)),
        }
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index"] + [f"srf_{srf}" for srf in srfs])
            for i in range(args.k):
                writer.writerow([i] + [repr(float(columns[srf][i])) for srf in srfs])
    _emit({"N": args.N, "k": args.k, "srf": summary}, args.json_out)
    return EXIT_OK


def _cmd_phase(args) -> int:
    results = []
    for srf in _ints(args.srf):
        n = args.N // srf
        fc = n // 2
        for k in _ints(args.k):
            config = ExperimentConfig(seed=args.seed, bp=BPOptions(tol=args.tol, max_iter=args.max_iter))
            delta_star, trace = critical_distance(args.N, fc, k, config)
            results.append(
                {
                    "srf": srf,
                    "k": k,
                    "delta_star": delta_star,
                    "trace": [
                        {"delta": p.delta_grid, "success": p.success, "error": p.error}
                        for p in trace
                    ],
                }
            )
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["srf", "k", "delta_star"])
            for row in results:
                writer.writerow([row["srf"], row["k"], row["delta_star"]])
    _emit({"N": args.N, "points": results}, args.json_out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = ExperimentConfig(
        seed=args.seed,
        trials=args.trials,
        threads=args.threads,
        solver=SolverOptions(tol=args.tol, max_iter=args.max_iter),
    )
    rows = benchmark_exact_recovery(_ints(args.fc), config)
    for row in rows:
        row.pop("per_trial")
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fc", "trials", "recovered", "avg_error", "max_error", "max_gap"])
            for row in rows:
                writer.writerow([row["fc"], row["trials"], row["recovered"],
                                 repr(row["avg_error"]), repr(row["max_error"]), repr(row["max_gap"])])
    _emit({"rows": rows}, args.json_out)
    return EXIT_OK


def _cmd_random_y(args) -> int:
    config = ExperimentConfig(
        seed=args.seed,
        trials=args.trials,
        threads=args.threads,
        solver=SolverOptions(tol=args.tol, max_iter=args.max_iter),
    )
    study = random_y_study(args.n, config)
    doc = {
        "n": study["n"],
        "trials": study["trials"],
        "max_cardinality": study["max_cardinality"],
        "max_gap": study["max_gap"],
        "histogram": study["histogram"].tolist(),
    }
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cardinality", "count"])
            for card, cnt in enumerate(study["histogram"]):
                if cnt:
                    writer.writerow([card, int(cnt)])
    _emit(doc, args.json_out)
    return EXIT_OK


def _cmd_piecewise(args) -> int:
    y = formats.samples_from_json(formats.load_json(args.samples))
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    result = piecewise_recover(y, args.smoothness, opts, jumps_only=args.smoothness > 0)
    doc = {
        "smoothness": result.smoothness,
        "breakpoints": result.breakpoints.tolist(),
        "jump_re": result.jumps.real.tolist(),
        "jump_im": result.jumps.imag.tolist(),
        "levels": None
        if result.levels is None
        else {"re": result.levels.real.tolist(), "im": result.levels.imag.tolist()},
        "mean_re": result.mean.real,
        "mean_im": result.mean.imag,
        "gap": result.gap,
    }
    _emit(doc, args.json_out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="superres", description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--json-out", default=None)
    parser.add_argument("--csv-out", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a random well-separated spike train and sample it")
    p.add_argument("--fc", type=int, required=True)
    p.add_argument("--spikes", type=int, required=True)
    p.add_argument("--min-sep", type=float, default=None)
    p.add_argument("--amplitudes", choices=["unit", "gaussian"], default="unit")
    p.add_argument("--measure-out", default="measure.json")
    p.add_argument("--samples-out", default="samples.json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("solve", help="TV-minimization recovery from samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=50_000)
    p.add_argument("--out", default=None)
    p.add_argument("--truth", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bp", help="basis pursuit on a fine grid")
    p.add_argument("--samples", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bp)

    p = sub.add_parser("denoise", help="noise-aware l1 recovery from a low-pass signal")
    p.add_argument("--signal", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("certify", help="build and verify a dual certificate")
    p.add_argument("--support", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--fc", type=int, required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--emit-curve", default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("kernel-table", help="tail-sum bound table for a given separation")
    p.add_argument("--fc", type=int, required=True)
    p.add_argument("--delta", type=float, required=True, help="separation in units of lambda_c")
    p.add_argument("--t", default="0,0.1649,0.4269,0.7559", help="offsets in units of lambda_c")
    p.set_defaults(func=_cmd_kernel_table)

    p = sub.add_parser("slepian", help="time-band-limiting spectra per SRF")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--srf", required=True)
    p.set_defaults(func=_cmd_slepian)

    p = sub.add_parser("phase", help="adversarial phase-transition search")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--srf", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=_cmd_phase)

    p = sub.add_parser("bench-table3", help="exact-recovery benchmark over cutoffs")
    p.add_argument("--fc", required=True, help="comma-separated cutoffs")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("random-y", help="pipeline behavior on random Gaussian data")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=200_000)
    p.set_defaults(func=_cmd_random_y)

    p = sub.add_parser("piecewise", help="piecewise-smooth recovery from samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--smoothness", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=_cmd_piecewise)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        print("hint: re-run with a small random phase perturbation of y as a diagnostic",
              file=sys.stderr)
        return EXIT_DEGENERATE
    except (SolverError, ConvergenceError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ValueError, OSError, KeyError, SeparationError, NotImplementedError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
