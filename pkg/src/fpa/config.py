"""Experiment configuration: a flat key = value text format.

Every knob the command-line harness understands lives in one flat dataclass.
The serialized form is one `key = value` line per field in declaration
order, so configs diff cleanly and parse(serialize(c)) == c for every valid
config.  Unknown keys are rejected, not ignored: a typo should fail loudly
rather than silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .engine import VARIANTS, FpaParams
from .rng import LevyParams

SPEC_VERSION = "1.0"

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple[str, ...] = (
        "ackley",
        "rosenbrock",
        "sphere",
        "yang-forest",
        "zakharov",
    )
    dimension: int = 4
    population_size: int = 20
    switch_probability: float = 0.8
    step_scale: float = 0.1
    levy_tail_exponent: float = 1.5
    levy_min_step: float = 0.01
    levy_scale: float = 1.0
    max_iterations: int = 1000
    seed: int = 1
    variant: str = "full"
    accept_on_equal: bool = True
    flip_branch: bool = False
    levy_per_coordinate: bool = True
    epsilon: float = 1e-4
    num_runs: int = 100
    out_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "json")
    levy_samples: int = 1_000_000
    verify_power_steps: int = 1000
    verify_trajectories: int = 100_000
    verify_samples: int = 100_000

    def __post_init__(self):
        if not self.problems:
            raise ValueError("problems must name at least one objective")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not self.formats:
            raise ValueError("formats must not be empty")
        for fmt in self.formats:
            if fmt not in FORMATS:
                raise ValueError(f"unknown output format {fmt!r}; known: {FORMATS}")

    def fpa_params(self) -> FpaParams:
        return FpaParams(
            population_size=self.population_size,
            switch_probability=self.switch_probability,
            step_scale=self.step_scale,
            levy=LevyParams(
                tail_exponent=self.levy_tail_exponent,
                min_step=self.levy_min_step,
                scale=self.levy_scale,
            ),
            max_iterations=self.max_iterations,
            seed=self.seed,
            variant=self.variant,
            accept_on_equal=self.accept_on_equal,
            flip_branch=self.flip_branch,
            levy_per_coordinate=self.levy_per_coordinate,
        )


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(raw: str, default):
    if isinstance(default, bool):
        lowered = raw.lower()
        if lowered not in ("true", "false"):
            raise ValueError(f"expected true or false, got {raw!r}")
        return lowered == "true"
    if isinstance(default, tuple):
        items = tuple(part.strip() for part in raw.split(",") if part.strip())
        return items
    if isinstance(default, int):
        return int(raw, 10)
    if isinstance(default, float):
        return float(raw)
    return raw


def serialize_config(config: ExperimentConfig) -> str:
    lines = [
        f"{f.name} = {_format_value(getattr(config, f.name))}"
        for f in fields(ExperimentConfig)
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    """Parse key = value lines on top of the defaults.

    Blank lines and lines starting with # are skipped.  Unknown keys and
    malformed lines raise ValueError.
    """
    defaults = ExperimentConfig()
    known = {f.name for f in fields(ExperimentConfig)}
    updates = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            updates[key] = _parse_value(raw, getattr(defaults, key))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return replace(defaults, **updates)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def apply_overrides(
    config: ExperimentConfig,
    problem: str | None = None,
    seed: int | None = None,
    out: str | None = None,
    fmt: str | None = None,
) -> ExperimentConfig:
    """Fold command-line flags into a config; flags win over the file."""
    updates = {}
    if problem is not None:
        updates["problems"] = (problem,)
    if seed is not None:
        updates["seed"] = seed
    if out is not None:
        updates["out_dir"] = out
    if fmt is not None:
        updates["formats"] = tuple(
            part.strip() for part in fmt.split(",") if part.strip()
        )
    return replace(config, **updates) if updates else config
