#     Adpersuasion detects persuasive text and analyses political advertising.
#
#     Copyright (C) 2024  Adpersuasion contributors
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Run configuration: one TOML or JSON file with the sections paths, prep, loss, training,
calibration, analysis and synth, plus command line overrides.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from datetime import date
from pathlib import Path
from typing import Any, Optional
import hashlib
import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from adpersuasion.analytics import Attribution, BucketThresholds
from adpersuasion.errors import ConfigError
from adpersuasion.features import PrepConfig
from adpersuasion.model import DEFAULT_GRID, CalibrationConfig, LossConfig, Target


def _from_section(cls, data: Any, section: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"[{section}] must be a table")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as ex:
        raise ConfigError(f"[{section}]: {ex}") from None


@dataclass(frozen=True)
class PathsConfig:
    """
    Input files and the output directory. Intermediate artifacts live in out_dir.
    """
    out_dir: str = "out"
    schema: Optional[str] = None
    """Label schema JSON, the shipped 23-technique schema when unset."""
    sentences: Optional[str] = None
    ads: Optional[str] = None
    model: Optional[str] = None
    """Model file, out_dir/model.json when unset."""

    def out(self, name: str) -> Path:
        return Path(self.out_dir) / name

    def model_path(self) -> Path:
        return Path(self.model) if self.model else self.out("model.json")


@dataclass(frozen=True)
class LossSection:
    beta: Optional[float] = None
    """None derives a balanced beta from the training labels."""
    eps: float = 1e-7

    def __post_init__(self):
        if self.beta is not None:
            LossConfig(self.beta, self.eps)
        else:
            LossConfig(0.5, self.eps)

    def resolve(self, Y: Any) -> LossConfig:
        if self.beta is None:
            return LossConfig.balanced(Y, self.eps)
        return LossConfig(self.beta, self.eps)


@dataclass(frozen=True)
class TrainingConfig:
    target: str = Target.MULTILABEL.value
    lr: float = 2.0
    epochs: int = 500
    test_fraction: float = 0.25
    dev_fraction: float = 0.1
    """Share of the training side held out for threshold calibration, 0 disables the dev split."""
    min_df: int = 1
    use_bigrams: bool = False
    divergence_factor: float = 2.0

    def __post_init__(self):
        try:
            Target(self.target)
        except ValueError:
            raise ConfigError(f"unknown training target {self.target!r}") from None
        if not self.lr > 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if not 0.0 <= self.dev_fraction < 1.0:
            raise ConfigError(f"dev_fraction must lie in [0, 1), got {self.dev_fraction}")
        if self.min_df < 1:
            raise ConfigError(f"min_df must be at least 1, got {self.min_df}")
        if not self.divergence_factor > 1.0:
            raise ConfigError(f"divergence_factor must exceed 1, got {self.divergence_factor}")


@dataclass(frozen=True)
class CalibrationSection:
    threshold: float = 0.5
    grid: tuple[float, ...] = DEFAULT_GRID
    include_absent: bool = True

    def __post_init__(self):
        object.__setattr__(self, "grid", self.calibration().grid)

    def calibration(self) -> CalibrationConfig:
        return CalibrationConfig(self.threshold, tuple(self.grid))


@dataclass(frozen=True)
class AnalysisConfig:
    high: float = 0.8
    low: float = 0.2
    window: int = 3
    alpha: float = 0.05
    attribution: str = Attribution.ACTIVE.value
    top_k: int = 10
    bigrams_after_stopwords: bool = True
    reference_date: Optional[str] = None
    """ISO day the growth ratios are measured against, skipped when unset."""

    def __post_init__(self):
        BucketThresholds(self.high, self.low)
        if self.window < 1 or self.window % 2 == 0:
            raise ConfigError(f"window must be a positive odd number, got {self.window}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        try:
            Attribution(self.attribution)
        except ValueError:
            raise ConfigError(f"unknown attribution {self.attribution!r}") from None
        if self.top_k < 1:
            raise ConfigError(f"top_k must be at least 1, got {self.top_k}")
        if self.reference_date is not None:
            self.reference()

    def thresholds(self) -> BucketThresholds:
        return BucketThresholds(self.high, self.low)

    def reference(self) -> Optional[date]:
        if self.reference_date is None:
            return None
        try:
            return date.fromisoformat(self.reference_date)
        except ValueError:
            raise ConfigError(f"reference_date must be YYYY-MM-DD, got {self.reference_date!r}") from None


@dataclass(frozen=True)
class SynthConfig:
    n_docs: int = 400
    sentences_per_doc: int = 5
    n_labels: int = 5
    label_prior: float = 0.15
    n_ads: int = 600
    sentences_per_ad: int = 4
    mix: tuple[float, ...] = (0.45, 0.40, 0.15)

    def __post_init__(self):
        object.__setattr__(self, "mix", tuple(float(v) for v in self.mix))
        if min(self.n_docs, self.sentences_per_doc, self.n_labels, self.n_ads) < 1:
            raise ConfigError("synthetic corpus sizes must be at least 1")
        if not 0.0 <= self.label_prior <= 1.0:
            raise ConfigError(f"label_prior must lie in [0, 1], got {self.label_prior}")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    paths: PathsConfig = field(default_factory=PathsConfig)
    prep: PrepConfig = field(default_factory=PrepConfig.for_classifier)
    loss: LossSection = field(default_factory=LossSection)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    calibration: CalibrationSection = field(default_factory=CalibrationSection)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a table")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config section(s): {', '.join(unknown)}")
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        return cls(
            seed=seed,
            paths=_from_section(PathsConfig, data.get("paths"), "paths"),
            prep=PrepConfig.from_dict(data["prep"]) if "prep" in data else PrepConfig.for_classifier(),
            loss=_from_section(LossSection, data.get("loss"), "loss"),
            training=_from_section(TrainingConfig, data.get("training"), "training"),
            calibration=_from_section(CalibrationSection, data.get("calibration"), "calibration"),
            analysis=_from_section(AnalysisConfig, data.get("analysis"), "analysis"),
            synth=_from_section(SynthConfig, data.get("synth"), "synth"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        """
        Reads a .toml or .json config file.
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            if path.suffix == ".toml":
                with path.open("rb") as f:
                    data = tomllib.load(f)
            elif path.suffix == ".json":
                data = json.loads(path.read_text(encoding="utf-8"))
            else:
                raise ConfigError(f"config must be .toml or .json, got {path.name}")
        except (tomllib.TOMLDecodeError, json.JSONDecodeError) as ex:
            raise ConfigError(f"malformed config {path}: {ex}") from ex
        return cls.from_dict(data)

    def with_overrides(self, seed: Optional[int] = None, out_dir: Optional[str] = None,
                       threshold: Optional[float] = None, beta: Optional[float] = None,
                       window: Optional[int] = None, alpha: Optional[float] = None) -> "RunConfig":
        """
        Applies command line flags; None leaves the file value.
        """
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if out_dir is not None:
            cfg = replace(cfg, paths=replace(cfg.paths, out_dir=out_dir))
        if threshold is not None:
            cfg = replace(cfg, calibration=replace(cfg.calibration, threshold=threshold))
        if beta is not None:
            cfg = replace(cfg, loss=replace(cfg.loss, beta=beta))
        if window is not None:
            cfg = replace(cfg, analysis=replace(cfg.analysis, window=window))
        if alpha is not None:
            cfg = replace(cfg, analysis=replace(cfg.analysis, alpha=alpha))
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "paths": asdict(self.paths),
            "prep": self.prep.to_dict(),
            "loss": asdict(self.loss),
            "training": asdict(self.training),
            "calibration": {**asdict(self.calibration), "grid": list(self.calibration.grid)},
            "analysis": asdict(self.analysis),
            "synth": {**asdict(self.synth), "mix": list(self.synth.mix)},
        }

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def write(self, path: str | Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
