"""Command-line entry point: ``mrfjunta <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .battery import BatterySpecError, default_battery_spec, run_oracle_battery
from .experiment import ExperimentConfig, run_experiment
from .instances import random_bounded_degree_graph, random_potentials
from .junta import label_samples, load_junta, random_junta, save_junta
from .learner import LearnerConfig, ThresholdTooLowError, default_threshold, learn_with_report
from .mrf import (
    ModelValidationError,
    MrfModel,
    apply_smoothing,
    derive_seed,
    load_model,
    model_to_dict,
    rng_for,
)
from .oracle import calibrated_threshold
from .sampling import (
    GibbsConfig,
    enumerate_distribution,
    gibbs_sample,
    read_samples,
    sample_exact,
    write_samples,
)

log = logging.getLogger("mrfjunta")


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen_model(args) -> int:
    rng = rng_for(derive_seed(args.seed, 1))
    graph = random_bounded_degree_graph(args.n, args.d, rng)
    psi_bar = random_potentials(graph, args.lam, rng)
    model = MrfModel(psi_bar, graph, args.lam, nominal_sigma=args.sigma)
    _emit(json.dumps(model_to_dict(model), indent=2) + "\n", args.output)
    if args.junta_output:
        save_junta(random_junta(args.n, args.k, derive_seed(args.seed, 2)), args.junta_output)
    return 0


def cmd_smooth(args) -> int:
    model = load_model(args.model)
    sigma = args.sigma if args.sigma is not None else model.sigma
    if sigma == 0:
        if not args.allow_zero_sigma:
            raise SystemExit("sigma = 0 is outside the smoothing definition; pass --allow-zero-sigma for baseline runs")
        smoothed = model.unsmoothed()
    else:
        smoothed = apply_smoothing(model.psi_bar, model.graph, model.lam, sigma, args.seed)
    _emit(json.dumps(model_to_dict(smoothed), indent=2) + "\n", args.output)
    return 0


def _write_sample_stream(samples, output) -> None:
    if output:
        write_samples(samples, output)
    else:
        for row, y in zip(samples.x, samples.y):
            sys.stdout.write(json.dumps({"x": "".join(map(str, row.tolist())), "y": int(y)}) + "\n")


def cmd_sample(args) -> int:
    model = load_model(args.model)
    if args.sampler == "exact":
        samples = sample_exact(enumerate_distribution(model), args.count, args.seed)
    else:
        default = GibbsConfig.default(model.n, args.chains)
        cfg = GibbsConfig(args.burn_in or default.burn_in, args.thinning or default.thinning, args.chains)
        samples = gibbs_sample(model, args.count, cfg, args.seed)
    if args.junta:
        samples = label_samples(load_junta(args.junta), samples)
    _write_sample_stream(samples, args.output)
    return 0


def cmd_label(args) -> int:
    samples = label_samples(load_junta(args.junta), read_samples(args.samples))
    _write_sample_stream(samples, args.output)
    return 0


def cmd_learn(args) -> int:
    samples = read_samples(args.samples)
    model = load_model(args.model)
    if args.tau is not None:
        tau = args.tau
    elif args.threshold_mode == "calibrated":
        if not args.junta:
            raise SystemExit("calibrated threshold needs --junta")
        tau = calibrated_threshold(enumerate_distribution(model), load_junta(args.junta), model.graph)
    else:
        if model.sigma is None or args.k is None:
            raise SystemExit("theoretical threshold needs --k and a model with sigma")
        tau = default_threshold(args.delta, args.k, model.graph.max_degree, model.sigma, model.lam)
    config = LearnerConfig(float(tau), args.delta, args.k, args.default_label)
    try:
        report = learn_with_report(samples, model.graph, config)
    except ThresholdTooLowError as exc:
        print(json.dumps({"tau": float(tau), "error": str(exc)}), file=sys.stderr)
        return 1
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.output)
    return 0


def cmd_oracle(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text()) if args.spec else default_battery_spec()
        verdicts = []
        lines = []
        for v in run_oracle_battery(spec):
            verdicts.append(v)
            lines.append(json.dumps(v))
            if not args.output:
                print(lines[-1], flush=True)
    except (BatterySpecError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        Path(args.output).write_text("".join(line + "\n" for line in lines))
    return 0 if all(v["pass"] for v in verdicts) else 1


def cmd_experiment(args) -> int:
    if args.config:
        data = json.loads(Path(args.config).read_text())
    else:
        data = {}
    for key in ("n", "k", "d", "sigma", "N", "trials", "threshold_mode", "tau", "sampler", "delta"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.lam is not None:
        data["lambda"] = args.lam
    if args.seed is not None:
        data["seed"] = args.seed
    config = ExperimentConfig.from_dict(data)
    result = run_experiment(config)
    text = result.to_csv(timing=args.timing) if args.format == "csv" else result.to_json() + "\n"
    _emit(text, args.output)
    log.info("recovery rate %.3f over %d trials", result.recovery_rate, config.trials)
    return 0


def _common(seed_default) -> argparse.ArgumentParser:
    # a fresh parent per use: argparse shares Action objects with children
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=seed_default)
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(0)

    parser = argparse.ArgumentParser(prog="mrfjunta", description="Junta learning over smoothed MRFs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-model", parents=[common], help="random bounded-degree, bounded-width model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.3, help="radius recorded for later smoothing")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--junta-output", default=None, help="also write a random k-junta here")
    p.set_defaults(func=cmd_gen_model)

    p = sub.add_parser("smooth", parents=[common], help="perturb the external field of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--allow-zero-sigma", action="store_true", help="baseline/oracle runs only")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("sample", parents=[common], help="draw samples as JSON lines")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--sampler", choices=("exact", "gibbs"), default="exact")
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thinning", type=int, default=None)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--junta", default=None, help="label with this junta")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("label", parents=[common], help="relabel samples with a junta")
    p.add_argument("--samples", required=True)
    p.add_argument("--junta", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("learn", parents=[common], help="find relevant variables and fit the truth table")
    p.add_argument("--samples", required=True)
    p.add_argument("--model", required=True, help="model file supplying the dependency graph")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--threshold-mode", choices=("theoretical", "calibrated"), default="theoretical")
    p.add_argument("--junta", default=None, help="ground truth, for calibrated thresholds")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--default-label", type=int, choices=(0, 1), default=0)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("oracle", parents=[common], help="run oracle checks, one JSON verdict per line")
    p.add_argument("spec", nargs="?", default=None, help="battery spec JSON (default: full battery)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", parents=[_common(None)], help="seeded recovery experiment")
    p.add_argument("--config", default=None, help="JSON document mirroring ExperimentConfig")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--threshold-mode", dest="threshold_mode", choices=("theoretical", "explicit", "calibrated"))
    p.add_argument("--tau", type=float)
    p.add_argument("--sampler", choices=("exact", "gibbs"))
    p.add_argument("--delta", type=float)
    p.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms in the CSV")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ModelValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
