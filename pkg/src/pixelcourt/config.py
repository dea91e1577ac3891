"""Run configuration: flat key=value files, CLI overrides, seeding."""

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path

SEED_ENV_VAR = "PIXELCOURT_SEED"

ABLATIONS = ("none", "no_debate", "no_judge", "no_rl", "no_reliability")


@dataclass
class TrainConfig:
    """Flat configuration for model construction, training and evaluation.

    Precedence: dataclass defaults < config file < explicit overrides.
    The seed falls back to the PIXELCOURT_SEED environment variable when
    neither a file nor an override sets it.
    """

    # data / schedule
    image_size: int = 64          # 64 for tests, 256 for demo runs
    batch_size: int = 8
    learning_rate: float = 1e-3   # desk-scale default; 1e-4 for long runs
    epochs: int = 20
    max_steps: int = 0            # 0 = run every epoch to completion
    seed: int = 0
    # model
    heads: int = 4
    stream_channels: int = 64
    patch_grid: int = 8
    suppression: float = 1.0      # disagreement penalty weight in cross-attention
    suppress_axis: str = "key"    # penalize key columns ("key") or query rows ("query")
    # loss weights
    lambda_c: float = 0.1
    lambda_rl: float = 0.1
    tau_rel: float = 0.6          # reliability gate threshold for the consistency loss
    beta_cal: float = 0.1         # verdict MSE weight inside the calibration loss
    # gumbel temperature schedule (per-epoch multiplicative decay)
    tau_gumbel_start: float = 1.0
    tau_gumbel_decay: float = 0.97
    tau_gumbel_floor: float = 0.3
    # variants
    use_advantage: bool = False   # subtract the critic value from the reward in the policy loss
    ablation: str = "none"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("batch_size and epochs must be > 0")
        if self.lambda_rl < 0:
            raise ValueError("lambda_rl must be >= 0")
        if self.suppress_axis not in ("key", "query"):
            raise ValueError(f"unknown suppress_axis {self.suppress_axis!r}")
        if self.ablation not in ABLATIONS:
            raise ValueError(f"unknown ablation {self.ablation!r}; pick one of {ABLATIONS}")

    def gumbel_temperature(self, epoch: int) -> float:
        return max(self.tau_gumbel_floor, self.tau_gumbel_start * self.tau_gumbel_decay**epoch)

    def replace(self, **kwargs) -> "TrainConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}


def _coerce(name: str, raw: str):
    if name not in _FIELDS:
        raise ValueError(f"unknown config key {name!r}")
    typ = _FIELDS[name].type
    raw = raw.strip()
    if typ == "bool" or typ is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"config key {name!r}: cannot parse {raw!r} as bool")
    if typ == "int" or typ is int:
        return int(raw)
    if typ == "float" or typ is float:
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[key] = _coerce(key, raw)
    return values


def load_config(path=None, overrides=None) -> TrainConfig:
    """Build a TrainConfig from an optional file plus override pairs."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    if overrides:
        for key, raw in overrides.items():
            values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    if "seed" not in values and os.environ.get(SEED_ENV_VAR):
        values["seed"] = int(os.environ[SEED_ENV_VAR])
    return TrainConfig(**values)


def save_config(cfg: TrainConfig, path) -> None:
    lines = [f"{k} = {v}" for k, v in cfg.to_dict().items()]
    Path(path).write_text("\n".join(lines) + "\n")
