"""Command-line front end.

Subcommands: check, geometry, integrate, converge, tails, perturb, rotate.
All except ``check`` read a JSON experiment config (--config), honor a
--seed override, and write CSV (and, for converge, SVG) to the configured
output path.

Exit codes: 0 success, 1 invalid config, 2 infeasible slice, 3 numerical
failure, 4 I/O error.
"""

import argparse
import json
import os
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import checks, harness
from .errors import (ConfigError, DegenerateFrame, EmptySlice,
                     InvalidFamily, QuadratureNonConvergent, SeparationLost,
                     SliceGaussError)
from .integrands import from_dict as integrand_from_dict
from .slice_geometry import SliceSpec, build_geometry, paper_center, \
    slice_integral_mc
from .vectors import OrthonormalFamily, SequenceVector

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _load_schema():
    text = resources.files("slicegauss").joinpath("config_schema.json").read_text()
    return json.loads(text)


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, _load_schema())
    except jsonschema.ValidationError as exc:
        field = ".".join(str(p) for p in exc.absolute_path) or "config"
        raise ConfigError(field, exc.message) from exc
    if len(raw["p"]) != len(raw["family"]):
        raise ConfigError("p", f"length {len(raw['p'])} does not match "
                               f"family size {len(raw['family'])}")
    return raw


def build_family(descriptors):
    members = []
    for d in descriptors:
        if d["kind"] == "explicit":
            members.append(SequenceVector.explicit(d["coords"]))
        else:
            members.append(SequenceVector.geometric(d.get("prefix", ()),
                                                    d["scale"], d["ratio"]))
    try:
        return OrthonormalFamily(members)
    except InvalidFamily as exc:
        raise ConfigError("family", str(exc)) from exc


def _require(config, *fields):
    for name in fields:
        if name not in config:
            raise ConfigError(name, "required by this subcommand")


def _slice_spec(config, n):
    family = build_family(config["family"])
    return SliceSpec(family=family, p=config["p"], n=n, k=config["k"])


def _write_report(report, output, svg=False):
    if output:
        harness.emit_csv(report, output)
        if svg:
            root, _ = os.path.splitext(output)
            harness.emit_svg(report, root + ".svg")
    else:
        sys.stdout.write(report.to_csv())


def cmd_geometry(config, seed, threads):
    _require(config, "n")
    spec = _slice_spec(config, config["n"])
    geom = build_geometry(spec)
    theta = paper_center(spec) if spec.family.gamma else np.zeros(spec.n)
    payload = {
        "n": geom.n,
        "gamma": geom.gamma,
        "theta_star": geom.center.tolist(),
        "paper_theta": theta.tolist(),
        "q": geom.q.tolist(),
        "radius": geom.radius,
        "r_n": geom.scale_ratio,
        "center_gap": float(np.linalg.norm(theta - geom.center)),
    }
    text = json.dumps(payload, indent=2) + "\n"
    output = config.get("output")
    if output:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_integrate(config, seed, threads):
    _require(config, "n", "integrand", "samples")
    spec = _slice_spec(config, config["n"])
    f = integrand_from_dict(config["integrand"])
    est, se = slice_integral_mc(spec, f, config["samples"], seed,
                                threads=threads)
    ref, method = harness.gaussian_reference(spec.family, spec.k, spec.p,
                                             f, seed)
    report = harness.Report(
        header=harness.CONVERGENCE_HEADER,
        rows=((config["n"], est, se, ref, method, abs(est - ref)),),
        fingerprint=harness.config_fingerprint(config), seed=seed)
    _write_report(report, config.get("output"))


def cmd_converge(config, seed, threads):
    _require(config, "n_schedule", "integrand", "samples")
    family = build_family(config["family"])
    f = integrand_from_dict(config["integrand"])
    report = harness.convergence_sweep(
        family, config["p"], config["k"], f, config["n_schedule"],
        config["samples"], seed, threads=threads,
        bias_budget=config.get("bias_budget", harness.DEFAULT_BIAS_BUDGET),
        config=config)
    _write_report(report, config.get("output"), svg=True)


def cmd_tails(config, seed, threads):
    _require(config, "n", "thresholds", "samples")
    spec = _slice_spec(config, config["n"])
    report = harness.tail_study(spec, config["thresholds"], config["samples"],
                                seed, threads=threads, config=config)
    _write_report(report, config.get("output"))


def cmd_perturb(config, seed, threads):
    _require(config, "n", "epsilons")
    family = build_family(config["family"])
    base = family.truncation_matrix(config["n"])
    report = harness.gs_perturbation_study(base, config["epsilons"], seed,
                                           config=config)
    _write_report(report, config.get("output"))


def cmd_rotate(config, seed, threads):
    _require(config, "n", "epsilons", "integrand", "samples")
    spec = _slice_spec(config, config["n"])
    f = integrand_from_dict(config["integrand"])
    report = harness.rotation_stability_study(spec, f, config["epsilons"],
                                              config["samples"], seed,
                                              threads=threads, config=config)
    _write_report(report, config.get("output"))


_COMMANDS = {
    "geometry": cmd_geometry,
    "integrate": cmd_integrate,
    "converge": cmd_converge,
    "tails": cmd_tails,
    "perturb": cmd_perturb,
    "rotate": cmd_rotate,
}


def _default_threads():
    env = os.environ.get("SLICE_GAUSS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slicegauss",
        description="Sphere-slice integrals and their Gaussian limits")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", help="run the invariant suite (no config needed)")
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--output", default=None,
                       help="override the config output path")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: SLICE_GAUSS_THREADS or "
                            "all cores)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return checks.run_all()
    threads = args.threads if args.threads else _default_threads()
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        if args.output is not None:
            config["output"] = args.output
        _COMMANDS[args.command](config, config["seed"], threads)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (EmptySlice, DegenerateFrame) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (QuadratureNonConvergent, SeparationLost) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SliceGaussError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
