"""Scenario configuration files (JSON) and their generation.

A scenario file looks like::

    {
      "name": "scenario_fig3",
      "W": [[0.2, 0.0, ...], ...],
      "logic": {"matrices": [C_a, C_b], "assign": [0, 0, 0, 1, 1, 1]},
      "x0": {"seed": 2019},
      "tol": 1e-12, "consensus_tol": 1e-8, "agreement_tol": 1e-6,
      "max_steps": 1000000,
      "out": "runs/fig3"
    }

``logic`` may also be a plain list with one matrix per individual, and
``x0`` an explicit individual-major vector. ``generator`` records the
parameters (with seed) a scenario was sampled from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .generate import random_opinions, random_scenario
from .model import (
    InfluenceNetwork,
    LogicProfile,
    ModelError,
    validate_influence,
    validate_profile,
)


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


BUNDLED = ("scenario_fig3", "scenario_fig4", "space_example", "space_example_opposed",
           "homogeneous_example", "random_seed_1", "random_seed_2", "random_seed_3",
           "random_seed_4", "random_seed_5")


@dataclass
class ScenarioConfig:
    name: str
    W: list
    logic: list  # one matrix per individual
    x0: list | None = None
    x0_seed: int | None = None
    tol: float = 1e-12
    consensus_tol: float = 1e-8
    agreement_tol: float = 1e-6
    max_steps: int = 10**6
    out: str | None = None
    generator: dict | None = None

    def network(self) -> InfluenceNetwork:
        return validate_influence(np.array(self.W, dtype=float))

    def profile(self) -> LogicProfile:
        return validate_profile([np.array(C, dtype=float) for C in self.logic])

    def initial_state(self) -> np.ndarray:
        n, m = len(self.W), len(self.logic[0])
        if self.x0 is not None:
            return np.array(self.x0, dtype=float)
        seed = 0 if self.x0_seed is None else self.x0_seed
        return random_opinions(n * m, np.random.default_rng(seed))

    def resolve(self):
        """Validated ``(network, profile, x0)``; raises :class:`ValidationError`."""
        try:
            net = self.network()
        except ModelError as exc:
            raise ValidationError(f"field 'W': {exc}") from exc
        try:
            prof = self.profile()
        except ModelError as exc:
            raise ValidationError(f"field 'logic': {exc}") from exc
        if prof.n != net.n:
            raise ValidationError(f"field 'logic': {prof.n} matrices for {net.n} individuals")
        x0 = self.initial_state()
        if x0.shape != (net.n * prof.m,):
            raise ValidationError(f"field 'x0': expected {net.n * prof.m} entries, got {x0.size}")
        if np.any(np.abs(x0) > 1.0):
            raise ValidationError("field 'x0': opinions must lie in [-1, 1]")
        return net, prof, x0

    def to_dict(self) -> dict:
        d = {"name": self.name, "W": self.W, "logic": self.logic}
        if self.x0 is not None:
            d["x0"] = self.x0
        else:
            d["x0"] = {"seed": 0 if self.x0_seed is None else self.x0_seed}
        for key in ("tol", "consensus_tol", "agreement_tol", "max_steps"):
            d[key] = getattr(self, key)
        if self.out is not None:
            d["out"] = self.out
        if self.generator is not None:
            d["generator"] = self.generator
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def _matrix(value, name: str) -> list:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field '{name}': not a numeric matrix ({exc})") from exc
    if arr.ndim != 2:
        raise ParseError(f"field '{name}': expected a 2-d array, got {arr.ndim}-d")
    return arr.tolist()


def from_dict(d: dict, source: str = "<dict>") -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("W", "logic"):
        if key not in d:
            raise ParseError(f"{source}: missing required field '{key}'")
    W = _matrix(d["W"], "W")
    logic = d["logic"]
    if isinstance(logic, dict):
        try:
            mats = [_matrix(C, f"logic.matrices[{k}]") for k, C in enumerate(logic["matrices"])]
            assign = [int(a) for a in logic["assign"]]
            logic = [mats[a] for a in assign]
        except (KeyError, IndexError, TypeError) as exc:
            raise ParseError(f"{source}: field 'logic' needs 'matrices' and a valid 'assign'") from exc
    elif isinstance(logic, list):
        logic = [_matrix(C, f"logic[{k}]") for k, C in enumerate(logic)]
    else:
        raise ParseError(f"{source}: field 'logic' must be a list or an object")
    if not logic:
        raise ParseError(f"{source}: field 'logic' is empty")

    x0, seed = None, None
    raw = d.get("x0", {"seed": 0})
    if isinstance(raw, dict):
        if "seed" not in raw or not isinstance(raw["seed"], int):
            raise ParseError(f"{source}: field 'x0.seed' must be an integer")
        seed = raw["seed"]
    elif isinstance(raw, list):
        x0 = [float(v) for v in raw]
    else:
        raise ParseError(f"{source}: field 'x0' must be a list or {{\"seed\": N}}")

    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(d) - known
    if unknown:
        raise ParseError(f"{source}: unknown fields {sorted(unknown)}")
    opts = {}
    for key, typ in (("tol", float), ("consensus_tol", float), ("agreement_tol", float),
                     ("max_steps", int)):
        if key in d:
            try:
                opts[key] = typ(d[key])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{source}: field '{key}': {exc}") from exc
    return ScenarioConfig(
        name=str(d.get("name", Path(source).stem)),
        W=W, logic=logic, x0=x0, x0_seed=seed,
        out=d.get("out"), generator=d.get("generator"), **opts,
    )


def _read_text(path) -> tuple[str, str]:
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        ref = resources.files("beliefnet") / "scenarios" / f"{path}.json"
        return ref.read_text(), f"{path}.json"
    return p.read_text(), str(p)


def loads(text: str, source: str = "<string>", validate: bool = True) -> ScenarioConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    cfg = from_dict(d, source)
    if validate:
        cfg.resolve()
    return cfg


def load_config(path, validate: bool = True) -> ScenarioConfig:
    """Read a scenario file (or a bundled scenario by name) and validate it."""
    text, source = _read_text(path)
    return loads(text, source, validate)


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(cfg.dumps())


def generate_scenario(spec: dict, seed: int) -> ScenarioConfig:
    """Sample a valid scenario from generator parameters.

    ``spec`` keys: ``n``, ``m``, and optionally ``density``, ``pattern``,
    ``competition``, ``sign_flip_prob``, ``extra_edge_prob``, ``name``.
    Deterministic in ``seed``.
    """
    try:
        n, m = int(spec["n"]), int(spec["m"])
    except KeyError as exc:
        raise ParseError(f"generator spec is missing {exc}") from exc
    rng = np.random.default_rng(seed)
    params = {
        "density": float(spec.get("density", 0.3)),
        "competition": bool(spec.get("competition", False)),
        "sign_flip_prob": float(spec.get("sign_flip_prob", 0.3)),
        "extra_edge_prob": float(spec.get("extra_edge_prob", 0.3)),
    }
    pattern = spec.get("pattern")
    W, mats = random_scenario(n, m, rng, pattern=pattern, **params)
    gen = {"n": n, "m": m, **params, "seed": int(seed)}
    if pattern is not None:
        gen["pattern"] = np.asarray(pattern, dtype=bool).astype(int).tolist()
    return ScenarioConfig(
        name=str(spec.get("name", f"generated_{seed}")),
        W=W.tolist(),
        logic=[C.tolist() for C in mats],
        x0_seed=int(seed),
        generator=gen,
    )
