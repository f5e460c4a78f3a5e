"""Run configuration: a flat ``key = value`` text file, every key overridable
one-to-one by a CLI flag.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
List values are comma separated.  Grid dimensions use the ``grid.`` prefix,
e.g. ``grid.learning_rate = 0.05, 0.1``.  See README for the full key table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .months import month_from_str

MODEL_FAMILIES = ("ols", "enet", "svr", "rfr", "gbr", "mlp", "dfm")
HORIZONS = ("t", "t+1", "t+2")


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip().strip('"').strip("'")
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _scalar(text: str):
    """int if it looks like one, else float, else the bare string."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _value_list(text: str) -> list:
    return [_scalar(t.strip()) for t in text.split(",") if t.strip()]


def _month_ranges(text: str) -> list[tuple[int, int]]:
    """Comma list of YYYY-MM:YYYY-MM inclusive ranges."""
    ranges = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"bad month range {part!r}: expected YYYY-MM:YYYY-MM")
        a, b = part.split(":", 1)
        ranges.append((month_from_str(a), month_from_str(b)))
    return ranges


@dataclass
class RunConfig:
    target: str = "gdp"
    horizon: str = "t+1"
    model: str = "gbr"
    seed: int | None = None
    vintages: str = "latest"
    output_dir: str = "run_out"
    test_months: int = 24
    dm_h: int = 1

    data_mode: str = "synth"
    series_csv: str | None = None
    ruleset: str = "default"
    payment_series: list[str] = field(default_factory=list)
    crisis_ranges: list[tuple[int, int]] = field(default_factory=list)

    cv_k: int = 5
    cv_n: int = 24
    cv_mode: str = "randomized"
    cv_superset_start: int | None = None
    cv_superset_end: int | None = None

    explain: str = "test"
    explain_method: str = "auto"
    explain_coalitions: int = 1024
    explain_draws: int = 16

    synth_months: int = 240
    synth_start: str = "2003-01"
    synth_regimes: str = "0:normal,60:gfc_like,72:normal,230:covid_like"
    synth_asymmetry: float = 2.0
    synth_revision_sd: float = 0.01

    grid: dict[str, list] = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.seed is None:
            raise ConfigError("config: 'seed' is required (determinism is mandatory)")
        if self.model not in MODEL_FAMILIES:
            raise ConfigError(f"config: unknown model {self.model!r}, expected {MODEL_FAMILIES}")
        if self.horizon not in HORIZONS:
            raise ConfigError(f"config: unknown horizon {self.horizon!r}, expected {HORIZONS}")
        if self.vintages not in ("latest", "realtime"):
            raise ConfigError(f"config: vintages must be latest|realtime, got {self.vintages!r}")
        if self.data_mode not in ("synth", "csv"):
            raise ConfigError(f"config: data_mode must be synth|csv, got {self.data_mode!r}")
        if self.data_mode == "csv" and not self.series_csv:
            raise ConfigError("config: data_mode=csv requires series_csv")
        if self.cv_k < 2:
            raise ConfigError(f"config: cv_k must be >= 2, got {self.cv_k}")
        if self.cv_n < 1:
            raise ConfigError(f"config: cv_n must be >= 1, got {self.cv_n}")
        if self.cv_mode not in ("randomized", "standard-expanding"):
            raise ConfigError(f"config: unknown cv_mode {self.cv_mode!r}")
        if (
            self.cv_superset_start is not None
            and self.cv_superset_end is not None
            and self.cv_superset_start >= self.cv_superset_end
        ):
            raise ConfigError("config: cv_superset_start must precede cv_superset_end")
        if self.test_months < 1:
            raise ConfigError("config: test_months must be >= 1")
        if self.explain not in ("test", "all", "none"):
            raise ConfigError(f"config: explain must be test|all|none, got {self.explain!r}")
        if self.explain_method not in ("auto", "exact", "kernel"):
            raise ConfigError(f"config: bad explain_method {self.explain_method!r}")
        return self

    @staticmethod
    def from_mapping(raw: dict[str, str], overrides: dict[str, str] | None = None) -> "RunConfig":
        merged = dict(raw)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = str(value)
        cfg = RunConfig()
        grid: dict[str, list] = {}
        for key, value in merged.items():
            if key.startswith("grid."):
                grid[key[len("grid."):]] = _value_list(value)
                continue
            if key in ("seed", "test_months", "dm_h", "cv_k", "cv_n", "explain_coalitions",
                       "explain_draws", "synth_months"):
                try:
                    setattr(cfg, key, int(value))
                except ValueError:
                    raise ConfigError(f"config: {key} must be an integer, got {value!r}")
            elif key in ("synth_asymmetry", "synth_revision_sd"):
                try:
                    setattr(cfg, key, float(value))
                except ValueError:
                    raise ConfigError(f"config: {key} must be a number, got {value!r}")
            elif key in ("cv_superset_start", "cv_superset_end"):
                setattr(cfg, key, month_from_str(value))
            elif key == "payment_series":
                cfg.payment_series = [str(v) for v in _value_list(value)]
            elif key == "crisis_ranges":
                cfg.crisis_ranges = _month_ranges(value)
            elif key in ("target", "horizon", "model", "vintages", "output_dir", "data_mode",
                         "series_csv", "ruleset", "cv_mode", "explain", "explain_method",
                         "synth_start", "synth_regimes"):
                setattr(cfg, key, value)
            else:
                raise ConfigError(f"config: unknown key {key!r}")
        cfg.grid = grid
        return cfg.validate()

    @staticmethod
    def load(path, overrides: dict[str, str] | None = None) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        return RunConfig.from_mapping(parse_config_text(text), overrides)

    def echo_lines(self) -> list[str]:
        """Canonical key = value echo for the run manifest."""
        lines = []
        for key in sorted(self.__dataclass_fields__):
            if key == "grid":
                continue
            value = getattr(self, key)
            if isinstance(value, list):
                if value and isinstance(value[0], tuple):
                    from .months import month_to_str

                    value = ",".join(f"{month_to_str(a)}:{month_to_str(b)}" for a, b in value)
                else:
                    value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        for gkey in sorted(self.grid):
            lines.append(f"grid.{gkey} = {','.join(str(v) for v in self.grid[gkey])}")
        return lines
