"""Run configuration, persisted as flat JSON.

The packaged ``default_config.json`` carries the frozen preparation
calibration and the default noise and counting parameters.  User files only
need the keys they override.  Angles are stored in degrees.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # preparation calibration (see experiment.calibrate_preparation)
    qwp_angles_deg: tuple = (45.0, 45.0, 45.0, 45.0)
    calibration_phase_deg: float = 0.0
    # conventions
    qwp_retardance_deg: float = 90.0
    bob_analyzer_pair: tuple = (1, 1)
    # noise
    noise_mode: str = "per_basis"
    visibility_hv: float = 0.78
    visibility_pm: float = 0.83
    # Monte Carlo
    seed: int = 1800
    exact: bool = False
    replicas: int = 100
    chsh_settings_deg: tuple = (0.0, 45.0, 22.5, 67.5)
    chsh_mean_total: float | None = None
    chsh_target_sigma_e: float = 0.05
    fringe_theta2_deg: tuple = (0.0, 45.0)
    fringe_theta1_deg: tuple = tuple(float(x) for x in range(0, 360, 30))
    fringe_mean_total: float = 2000.0
    # output
    output_dir: str = "out"
    formats: tuple = ("csv", "summary")

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v
                for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def replace(self, **changes) -> "RunConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def validate(self):
        if len(self.qwp_angles_deg) != 4:
            raise ConfigError("qwp_angles_deg needs four entries (T, a, b1, b2)")
        if self.noise_mode not in ("per_basis", "uniform"):
            raise ConfigError(f"noise_mode must be per_basis or uniform, got {self.noise_mode!r}")
        for v in (self.visibility_hv, self.visibility_pm):
            if not 0.0 <= v <= 1.0:
                raise ConfigError("visibilities must lie in [0, 1]")
        if len(self.chsh_settings_deg) != 4:
            raise ConfigError("chsh_settings_deg is (theta1, theta1~, theta2, theta2~)")
        if len(self.bob_analyzer_pair) != 2 or any(x not in (1, -1) for x in self.bob_analyzer_pair):
            raise ConfigError("bob_analyzer_pair entries must be +1 or -1")
        if self.replicas < 1:
            raise ConfigError("replicas must be positive")
        bad = set(self.formats) - {"csv", "summary"}
        if bad:
            raise ConfigError(f"unknown output formats {sorted(bad)}")


def default_config_text() -> str:
    return resources.files("entbell").joinpath("default_config.json").read_text()


def load_config(path: str | Path | None = None) -> RunConfig:
    """Packaged defaults, overridden by the keys in ``path`` if given."""
    data = json.loads(default_config_text())
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        data.update(user)
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path: str | Path):
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
