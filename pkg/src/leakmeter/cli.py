"""Command-line surface: simulate | learn | capacity | oracle | sweep.

Exit codes are a stable scripting contract: 0 success, 2 usage error,
3 I/O failure, 4 structure-learning failure, 5 solver non-convergence.
Machine-readable outputs (trace CSV, model/channel JSON, sweep CSV, --json)
are bit-reproducible for identical flags and inputs. LEAKMETER_LOG
(error | info | debug) controls diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from dataclasses import dataclass

from .channel import (
    CapacityResult,
    NotRowSymmetricError,
    capacity as solve_capacity,
    load_channel,
    save_channel,
)
from .learn import (
    StructureLearningError,
    estimate_capacity,
    fit_cpts,
    learn_structure,
    load_model,
    model_closure_channel,
    save_model,
)
from .oracle import oracle_capacity, oracle_crowds_channel, oracle_dc_channel
from .simulate import CrowdsConfig, DcConfig, simulate_crowds, simulate_dc
from .traces import read_traces, write_traces

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_LEARN = 4
EXIT_NO_CONVERGENCE = 5

DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class SweepSpec:
    """One grid sweep: protocol, fixed parameters, swept range, seeds."""

    protocol: str
    fixed: dict
    start: float
    stop: float
    step: float
    samples: int
    seeds: tuple
    max_degree: int | None
    struct_tol: float
    ab_tol: float
    max_iter: int
    alpha: float

    def grid(self) -> list:
        if self.step <= 0:
            raise ValueError("sweep step must be positive")
        if self.start > self.stop:
            raise ValueError("sweep start must not exceed stop")
        lo, hi = (0.0, 1.0)
        if not (lo <= self.start <= hi and lo <= self.stop <= hi):
            raise ValueError("sweep endpoints must lie in [0, 1]")
        values = []
        i = 0
        while True:
            value = round(self.start + i * self.step, 10)
            if value > self.stop + self.step * 1e-9:
                break
            values.append(min(value, hi))
            i += 1
        return values


def _configure_logging():
    level_name = os.environ.get("LEAKMETER_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        stream=sys.stderr,
        level=levels.get(level_name, logging.ERROR),
        format="leakmeter %(levelname)s %(name)s: %(message)s",
    )


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _label_str(label) -> str:
    return "".join(label) if isinstance(label, tuple) else str(label)


def _print_capacity(result: CapacityResult, as_json: bool) -> None:
    if as_json:
        payload = {
            "capacity_bits": result.capacity_bits,
            "method": result.method,
            "iterations": result.iterations,
            "converged": result.converged,
            "input_distribution": {
                "labels": [
                    list(l) if isinstance(l, tuple) else l
                    for l in result.input_distribution.alphabet
                ],
                "probs": [float(p) for p in result.input_distribution.probs],
            },
        }
        print(json.dumps(payload))
        return
    print(f"capacity: {_fmt(result.capacity_bits)} bits")
    print(f"method: {result.method}")
    print(f"iterations: {result.iterations}")
    print(f"converged: {str(result.converged).lower()}")
    print("input distribution:")
    for label, p in zip(
        result.input_distribution.alphabet, result.input_distribution.probs
    ):
        print(f"  {_label_str(label)}: {_fmt(float(p))}")


def _cmd_simulate(args) -> int:
    if args.protocol == "dc":
        cfg = DcConfig(k=args.k, bias=args.bias, samples=args.samples, seed=args.seed)
        traces = simulate_dc(cfg)
    else:
        cfg = CrowdsConfig(
            honest=args.honest,
            corrupt=args.corrupt,
            pf=args.pf,
            samples=args.samples,
            seed=args.seed,
        )
        traces = simulate_crowds(cfg)
    write_traces(traces, args.out)
    print(f"wrote {traces.n_records} records to {args.out}")
    return EXIT_OK


def _cmd_learn(args) -> int:
    traces = read_traces(args.traces)
    edges = learn_structure(traces, max_degree=args.max_degree, tol=args.struct_tol)
    model = fit_cpts(traces, edges, alpha=args.alpha)
    if args.out:
        save_model(model, args.out)
    for obs, parents in edges.items():
        print(f"{obs} <- {', '.join(parents)}")
    if args.out:
        print(f"wrote model to {args.out}")
    return EXIT_OK


def _cmd_capacity(args) -> int:
    if args.traces:
        estimation = estimate_capacity(
            read_traces(args.traces),
            max_degree=args.max_degree,
            struct_tol=args.struct_tol,
            ab_tol=args.ab_tol,
            max_iter=args.max_iter,
            alpha=args.alpha,
            method=args.method,
        )
        result = estimation.capacity
    else:
        if args.model:
            chan = model_closure_channel(load_model(args.model))
        else:
            chan = load_channel(args.channel)
        result = solve_capacity(
            chan, method=args.method, tol=args.ab_tol, max_iter=args.max_iter
        )
    _print_capacity(result, args.json)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _oracle_channel_for(args):
    if args.protocol == "dc":
        return oracle_dc_channel(args.k, args.bias)
    return oracle_crowds_channel(args.honest, args.corrupt, args.pf)


def _cmd_oracle(args) -> int:
    chan = _oracle_channel_for(args)
    result = oracle_capacity(chan)
    if args.dump_channel:
        save_channel(chan, args.dump_channel)
    if args.json:
        print(
            json.dumps(
                {
                    "capacity_bits": result.capacity_bits,
                    "method": result.method,
                    "secrets": len(chan.secret_alphabet),
                    "observables": len(chan.observable_alphabet),
                }
            )
        )
    else:
        print(f"capacity: {_fmt(result.capacity_bits)} bits")
        if args.dump_channel:
            print(f"wrote channel to {args.dump_channel}")
    return EXIT_OK


def _sweep_point(job: dict) -> dict:
    """One (grid value, seed) estimation; runs in a worker process."""
    try:
        if job["protocol"] == "dc":
            traces = simulate_dc(
                DcConfig(
                    k=job["fixed"]["k"],
                    bias=job["value"],
                    samples=job["samples"],
                    seed=job["seed"],
                )
            )
        else:
            traces = simulate_crowds(
                CrowdsConfig(
                    honest=job["fixed"]["honest"],
                    corrupt=job["fixed"]["corrupt"],
                    pf=job["value"],
                    samples=job["samples"],
                    seed=job["seed"],
                )
            )
        estimation = estimate_capacity(
            traces,
            max_degree=job["max_degree"],
            struct_tol=job["struct_tol"],
            ab_tol=job["ab_tol"],
            max_iter=job["max_iter"],
            alpha=job["alpha"],
        )
        return {"estimated": estimation.capacity.capacity_bits, "error": ""}
    except Exception as exc:  # recorded per point; the sweep must not abort
        return {"estimated": None, "error": f"{type(exc).__name__}: {exc}"}


def _run_sweep(spec: SweepSpec, jobs: int, out) -> None:
    values = spec.grid()
    exact = {}
    for value in values:
        if spec.protocol == "dc":
            chan = oracle_dc_channel(spec.fixed["k"], value)
        else:
            chan = oracle_crowds_channel(
                spec.fixed["honest"], spec.fixed["corrupt"], value
            )
        exact[value] = oracle_capacity(chan).capacity_bits

    pending = [
        {
            "protocol": spec.protocol,
            "fixed": spec.fixed,
            "value": value,
            "seed": seed,
            "samples": spec.samples,
            "max_degree": spec.max_degree,
            "struct_tol": spec.struct_tol,
            "ab_tol": spec.ab_tol,
            "max_iter": spec.max_iter,
            "alpha": spec.alpha,
        }
        for value in values
        for seed in spec.seeds
    ]
    log.info("sweep: %d grid points x %d seeds", len(values), len(spec.seeds))
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, pending))
    else:
        results = [_sweep_point(job) for job in pending]

    out.write("swept_param,seed,estimated_bits,exact_bits,abs_error,error\n")
    for job, res in zip(pending, results):
        exact_bits = exact[job["value"]]
        if res["estimated"] is None:
            est_s, err_s = "", ""
        else:
            est_s = _fmt(res["estimated"])
            err_s = _fmt(abs(res["estimated"] - exact_bits))
        out.write(
            f"{_fmt(job['value'])},{job['seed']},{est_s},"
            f"{_fmt(exact_bits)},{err_s},{res['error']}\n"
        )


def _cmd_sweep(args) -> int:
    if args.protocol == "dc":
        fixed = {"k": args.k}
        start, stop, step = args.bias_range
    else:
        fixed = {"honest": args.honest, "corrupt": args.corrupt}
        start, stop, step = args.pf_range
    spec = SweepSpec(
        protocol=args.protocol,
        fixed=fixed,
        start=start,
        stop=stop,
        step=step,
        samples=args.samples,
        seeds=tuple(args.seeds),
        max_degree=args.max_degree,
        struct_tol=args.struct_tol,
        ab_tol=args.ab_tol,
        max_iter=args.max_iter,
        alpha=args.alpha,
    )
    spec.grid()  # validate the range before opening the output
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _run_sweep(spec, args.jobs, fh)
        print(f"wrote sweep to {args.out}", file=sys.stderr)
    else:
        _run_sweep(spec, args.jobs, sys.stdout)
    return EXIT_OK


def _range_value(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:step")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("range parts must be numbers") from None


def _seed_list(text: str):
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError("seeds must be comma-separated integers")


def _add_learn_options(parser, with_alpha=True):
    parser.add_argument(
        "--max-degree",
        type=int,
        default=None,
        help="largest parent set searched (default: number of secret variables)",
    )
    parser.add_argument("--struct-tol", type=float, default=0.01)
    if with_alpha:
        parser.add_argument(
            "--alpha", type=float, default=0.0, help="add-alpha CPT smoothing"
        )


def _add_solver_options(parser):
    parser.add_argument("--ab-tol", type=float, default=1e-9)
    parser.add_argument("--max-iter", type=int, default=10000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakmeter",
        description=(
            "Estimate worst-case secrecy leakage (channel capacity, in bits) "
            "of randomized protocols from sampled execution traces, and "
            "compare against exact protocol oracles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a trace CSV")
    sim_sub = p_sim.add_subparsers(dest="protocol", required=True)
    p_dc = sim_sub.add_parser("dc", help="dining cryptographers")
    p_dc.add_argument("--k", type=int, required=True)
    p_dc.add_argument("--bias", type=float, required=True)
    p_cr = sim_sub.add_parser("crowds", help="crowds routing")
    p_cr.add_argument("--honest", type=int, required=True)
    p_cr.add_argument("--corrupt", type=int, required=True)
    p_cr.add_argument("--pf", type=float, required=True)
    for p in (p_dc, p_cr):
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        p.set_defaults(func=_cmd_simulate)

    p_learn = sub.add_parser("learn", help="learn a dependency model from traces")
    p_learn.add_argument("--traces", required=True)
    p_learn.add_argument("--out", help="write the model JSON here")
    _add_learn_options(p_learn)
    p_learn.set_defaults(func=_cmd_learn)

    p_cap = sub.add_parser("capacity", help="capacity of a channel, model or traces")
    src = p_cap.add_mutually_exclusive_group(required=True)
    src.add_argument("--traces")
    src.add_argument("--model")
    src.add_argument("--channel")
    p_cap.add_argument(
        "--method",
        choices=["auto", "symmetric", "arimoto_blahut"],
        default="auto",
    )
    _add_solver_options(p_cap)
    _add_learn_options(p_cap)
    p_cap.add_argument("--json", action="store_true")
    p_cap.set_defaults(func=_cmd_capacity)

    p_oracle = sub.add_parser("oracle", help="exact capacity from the protocol model")
    oracle_sub = p_oracle.add_subparsers(dest="protocol", required=True)
    o_dc = oracle_sub.add_parser("dc")
    o_dc.add_argument("--k", type=int, required=True)
    o_dc.add_argument("--bias", type=float, required=True)
    o_cr = oracle_sub.add_parser("crowds")
    o_cr.add_argument("--honest", type=int, required=True)
    o_cr.add_argument("--corrupt", type=int, required=True)
    o_cr.add_argument("--pf", type=float, required=True)
    for p in (o_dc, o_cr):
        p.add_argument("--json", action="store_true")
        p.add_argument("--dump-channel", help="write the exact channel JSON here")
        p.set_defaults(func=_cmd_oracle)

    p_sweep = sub.add_parser(
        "sweep", help="simulate/learn/estimate over a parameter grid, emit CSV"
    )
    sweep_sub = p_sweep.add_subparsers(dest="protocol", required=True)
    s_dc = sweep_sub.add_parser("dc")
    s_dc.add_argument("--k", type=int, required=True)
    s_dc.add_argument("--bias-range", type=_range_value, required=True)
    s_cr = sweep_sub.add_parser("crowds")
    s_cr.add_argument("--honest", type=int, required=True)
    s_cr.add_argument("--corrupt", type=int, required=True)
    s_cr.add_argument("--pf-range", type=_range_value, required=True)
    for p in (s_dc, s_cr):
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--seeds", type=_seed_list, default=[0])
        _add_learn_options(p)
        _add_solver_options(p)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", default="-", help="sweep CSV path (default stdout)")
        p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StructureLearningError as exc:
        print(f"leakmeter: structure learning failed: {exc}", file=sys.stderr)
        return EXIT_LEARN
    except NotRowSymmetricError as exc:
        print(f"leakmeter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"leakmeter: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"leakmeter: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
