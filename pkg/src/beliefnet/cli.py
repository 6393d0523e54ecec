"""Command line interface.

    beliefnet validate <config>
    beliefnet predict  <config> [--out DIR]
    beliefnet simulate <config> [--out DIR] [--tol T] [--max-steps N]
    beliefnet verify   <config> [--out DIR] [--tol T] [--max-steps N]
    beliefnet run      <config> [--out DIR] [--tol T] [--max-steps N]
    beliefnet generate <spec.json> --seed N [--out FILE]
    beliefnet batch    <dir> [--out DIR]

``<config>`` is a path or the name of a bundled scenario. Exit status is 0
on success (and theory/simulation agreement), 2 when prediction and
simulation disagree, 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ParseError, ScenarioConfig, ValidationError, generate_scenario, load_config
from .dynamics import Ordering, build_system, simulate
from .predictor import predict_all
from .verify import Tolerances, cross_validate

log = logging.getLogger("beliefnet")

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def trajectory_csv(states: np.ndarray, n: int, m: int) -> str:
    """Individual-major trajectory, header ``t, x1_t1, x1_t2, ...`` (1-based)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}_t{p + 1}" for i in range(n) for p in range(m)])
    for t, row in enumerate(states):
        w.writerow([t] + [repr(float(v)) for v in row])
    return buf.getvalue()


def read_trajectory_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1:]


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "tol", None) is not None:
        cfg = replace(cfg, tol=args.tol)
    if getattr(args, "max_steps", None) is not None:
        cfg = replace(cfg, max_steps=args.max_steps)
    return cfg


def _out_dir(cfg: ScenarioConfig, args) -> Path | None:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(cfg.out) if cfg.out else None


def _tolerances(cfg: ScenarioConfig) -> Tolerances:
    return Tolerances(sim_tol=cfg.tol, consensus_tol=cfg.consensus_tol,
                      max_steps=cfg.max_steps, agreement_tol=cfg.agreement_tol)


def run_scenario(cfg: ScenarioConfig, out: Path | None) -> tuple[int, dict]:
    """Predict, simulate and verify one scenario; write its three output files.

    Returns the exit code (0 agreement, 2 mismatch) and the verification dict.
    """
    net, prof, x0 = cfg.resolve()
    report = cross_validate(net, prof, x0, _tolerances(cfg))
    result = report.to_dict()
    result["name"] = cfg.name
    if out is not None:
        _atomic_write(out / "trajectory.csv", trajectory_csv(report.trajectory.states, net.n, prof.m))
        _atomic_write(out / "prediction.json", _dump(report.prediction.to_dict()))
        _atomic_write(out / "verification.json", _dump(result))
    return (EXIT_OK if report.agreement else EXIT_MISMATCH), result


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    net, prof, _ = cfg.resolve()
    print(f"{cfg.name}: valid (n={net.n}, m={prof.m})")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = load_config(args.config)
    net, prof, x0 = cfg.resolve()
    text = _dump(predict_all(net, prof, x0).to_dict())
    out = _out_dir(cfg, args)
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out / "prediction.json", text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    net, prof, x0 = cfg.resolve()
    B = build_system(net, prof, Ordering.INDIVIDUAL)
    traj = simulate(B, x0, max_steps=cfg.max_steps, tol=cfg.tol)
    text = trajectory_csv(traj.states, net.n, prof.m)
    out = _out_dir(cfg, args)
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out / "trajectory.csv", text)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    code, result = run_scenario(cfg, _out_dir(cfg, args))
    if _out_dir(cfg, args) is None:
        sys.stdout.write(_dump(result))
    else:
        print(f"{cfg.name}: agreement={result['agreement']}")
    return code


cmd_run = cmd_verify


def cmd_generate(args) -> int:
    spec_text = Path(args.spec).read_text() if Path(args.spec).exists() else args.spec
    try:
        spec = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"generator spec: line {exc.lineno}: {exc.msg}") from exc
    cfg = generate_scenario(spec, args.seed)
    if args.out:
        _atomic_write(Path(args.out), cfg.dumps())
    else:
        sys.stdout.write(cfg.dumps())
    return EXIT_OK


def cmd_batch(args) -> int:
    paths = sorted(Path(args.dir).glob("*.json"))
    if not paths:
        raise ParseError(f"no *.json scenarios in {args.dir}")
    base = Path(args.out) if args.out else None
    codes = set()
    for path in paths:
        try:
            cfg = _apply_flags(load_config(path), args)
            code, result = run_scenario(cfg, base / path.stem if base else None)
            print(f"{path.name}: agreement={result['agreement']}")
        except (ParseError, ValidationError, OSError) as exc:
            print(f"{path.name}: error: {exc}", file=sys.stderr)
            code = EXIT_ERROR
        codes.add(code)
    # an unreadable scenario outranks a mismatch: the batch is incomplete
    for code in (EXIT_ERROR, EXIT_MISMATCH):
        if code in codes:
            return code
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beliefnet", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sim=True):
        p.add_argument("--out", help="output directory")
        if sim:
            p.add_argument("--tol", type=float, help="convergence tolerance on the step residual")
            p.add_argument("--max-steps", type=int, help="iteration limit")

    p = sub.add_parser("validate", help="check a scenario against the model assumptions")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("predict", help="per-topic consensus prediction")
    p.add_argument("config")
    common(p, sim=False)
    p.set_defaults(func=cmd_predict)

    for name, func, text in (("simulate", cmd_simulate, "iterate the dynamics, write the trajectory"),
                             ("verify", cmd_verify, "compare prediction, fixed points and simulation"),
                             ("run", cmd_run, "verify and write all output files")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("generate", help="sample a random scenario")
    p.add_argument("spec", help="generator spec: JSON file or inline JSON")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="run every scenario in a directory")
    p.add_argument("dir")
    common(p)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except (ParseError, ValidationError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
