import configparser
import logging
import os
from dataclasses import dataclass, field
from datetime import date
from typing import Any, Dict, Optional, Tuple

from algorithms.fusion import ModelSpec
from algorithms.training import TrainConfig
from algorithms.tpe import SearchSpace, TpeConfig
from features import DEFAULT_RANGES
from market_data import business_days
from synthetic import SynthConfig

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


# column label -> (architecture, source market)
VARIANTS = {
    "domestic_only": ("single_modal", "domestic"),
    "foreign_only": ("single_modal", "foreign"),
    "late_fusion": ("late_fusion", "domestic"),
    "early_fusion": ("early_fusion", "domestic"),
    "intermediate_fusion": ("intermediate_fusion", "domestic"),
}
SCATTER_TARGETS = ("octc", "dotc")


@dataclass(frozen=True)
class Window:
    window_id: str
    start: date
    end: date

    def __post_init__(self):
        if not self.start < self.end:
            raise ConfigError(f"window {self.window_id}: start {self.start} is not before end {self.end}")


DEFAULT_WINDOWS = (
    Window("expt1", date(2006, 1, 1), date(2017, 12, 31)),
    Window("expt2", date(2010, 1, 1), date(2017, 12, 31)),
    Window("expt3", date(2014, 1, 1), date(2017, 12, 31)),
)


@dataclass(frozen=True)
class ScatterConfig:
    target: str = "octc"
    n_boot: int = 1000
    level: float = 0.95

    def __post_init__(self):
        if self.target not in SCATTER_TARGETS:
            raise ConfigError(f"scatter target must be one of {SCATTER_TARGETS}, got {self.target!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one `run` needs. Real data needs a domestic CSV and at least one foreign CSV; otherwise set `synthetic`."""

    domestic_csv: Optional[str] = None
    domestic_id: str = "KO"
    foreign: Tuple[Tuple[str, str], ...] = ()
    synthetic: Optional[SynthConfig] = None
    windows: Tuple[Window, ...] = DEFAULT_WINDOWS
    scaling_ranges: Tuple[Tuple[float, float], ...] = DEFAULT_RANGES
    variants: Tuple[str, ...] = tuple(VARIANTS)
    tpe: TpeConfig = field(default_factory=TpeConfig)
    patience: int = 10
    max_epochs: int = 100
    space_overrides: Tuple[Tuple[str, Tuple[Any, ...]], ...] = ()
    lam: float = 0.5
    batch_norm: bool = True
    scatter: ScatterConfig = field(default_factory=ScatterConfig)
    seed: int = 0
    jobs: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        if not self.windows:
            raise ConfigError("at least one window is required")
        if not self.scaling_ranges:
            raise ConfigError("at least one scaling range is required")
        for lo, hi in self.scaling_ranges:
            if not hi > lo:
                raise ConfigError(f"invalid scaling range [{lo}, {hi}]")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown or not self.variants:
            raise ConfigError(f"unknown or missing variants {unknown}; choose from {tuple(VARIANTS)}")
        if self.synthetic is None and (not self.domestic_csv or not self.foreign):
            raise ConfigError("set [data] domestic and [data.foreign] paths, or enable [synthetic]")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lam must be in [0, 1], got {self.lam}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for epochs in self.search_space("domestic_only")["epochs"].choices:
            if not self.patience < epochs:
                raise ConfigError(f"patience ({self.patience}) must be below every epoch cap ({epochs})")

    @property
    def foreign_ids(self) -> Tuple[str, ...]:
        if self.synthetic is not None:
            return (self.synthetic.foreign_id,)
        return tuple(market_id for market_id, _ in self.foreign)

    def search_space(self, variant: str) -> SearchSpace:
        """Default hyperparameter domain for `variant`, with the configured dimensions replaced."""
        base = SearchSpace.standard(head_layers=VARIANTS[variant][0] == "intermediate_fusion")
        choices = {d.name: d.choices for d in base.dimensions}
        choices["epochs"] = (self.max_epochs,)
        for name, values in self.space_overrides:
            if name in choices:
                choices[name] = values
        return SearchSpace.from_mapping(choices)

    def model_spec(self, variant: str, params: Dict[str, Any]) -> ModelSpec:
        architecture, source = VARIANTS[variant]
        return ModelSpec(
            variant=architecture,
            source=source,
            hidden_layers=int(params["hidden_layers"]),
            hidden_units=int(params["hidden_units"]),
            activation=params["activation"],
            dropout_rate=float(params["dropout"]),
            batch_norm=self.batch_norm,
            lam=self.lam,
            head_layers=params.get("head_layers"),
        )

    def train_config(self, params: Dict[str, Any], seed: int) -> TrainConfig:
        return TrainConfig(
            batch_size=int(params["batch_size"]),
            max_epochs=int(params["epochs"]),
            patience=self.patience,
            optimizer=params["optimizer"],
            learning_rate=float(params["learning_rate"]),
            seed=seed,
        )


_KNOWN_KEYS = {
    "data": {"domestic", "domestic_id"},
    "data.foreign": None,  # free keys: market id -> CSV path
    "synthetic": {"enabled", "n_days", "coupling", "noise_sd", "domestic_sd", "foreign_sd",
                  "shape_sd", "seed", "start", "domestic_id", "foreign_id"},
    "experiment": {"windows", "scaling_ranges", "variants", "seed", "jobs", "out"},
    "tpe": {"max_trials", "gamma", "n_startup", "n_candidates"} | set(SearchSpace.standard(head_layers=True).names),
    "training": {"patience", "max_epochs"},
    "model": {"lam", "batch_norm"},
    "scatter": {"target", "n_boot", "level"},
}


def _check_keys(parser: configparser.ConfigParser):
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = _KNOWN_KEYS[section]
        if allowed is None:
            continue
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{section}]")


def _scalar(token: str) -> Any:
    token = token.strip()
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    return token


def _list(text: str) -> Tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _windows(text: str) -> Tuple[Window, ...]:
    windows = []
    for item in _list(text):
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"window {item!r} must look like id:YYYY-MM-DD:YYYY-MM-DD")
        try:
            windows.append(Window(parts[0], date.fromisoformat(parts[1]), date.fromisoformat(parts[2])))
        except ValueError as exc:
            raise ConfigError(f"window {item!r}: {exc}") from None
    return tuple(windows)


def _ranges(text: str) -> Tuple[Tuple[float, float], ...]:
    ranges = []
    for item in _list(text):
        lo, sep, hi = item.rpartition(":")
        try:
            ranges.append((float(lo), float(hi)))
        except ValueError:
            raise ConfigError(f"scaling range {item!r} must look like lo:hi") from None
    return tuple(ranges)


def _synthetic(section: configparser.SectionProxy) -> Optional[SynthConfig]:
    if not section.getboolean("enabled", fallback=True):
        return None
    kwargs: Dict[str, Any] = {}
    for key in ("n_days", "seed"):
        if key in section:
            kwargs[key] = section.getint(key)
    for key in ("coupling", "noise_sd", "domestic_sd", "foreign_sd", "shape_sd"):
        if key in section:
            kwargs[key] = section.getfloat(key)
    for key in ("domestic_id", "foreign_id"):
        if key in section:
            kwargs[key] = section[key].strip()
    if "start" in section:
        kwargs["start"] = date.fromisoformat(section["start"].strip())
    return SynthConfig(**kwargs)


def load_config(path: str) -> ExperimentConfig:
    """Read an INI-style experiment file. Unknown sections or keys are errors."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    _check_keys(parser)

    try:
        kwargs: Dict[str, Any] = {}
        base_dir = os.path.dirname(os.path.abspath(path))

        def resolve(p: str) -> str:
            return p if os.path.isabs(p) else os.path.join(base_dir, p)

        if parser.has_section("data"):
            data = parser["data"]
            if "domestic" in data:
                kwargs["domestic_csv"] = resolve(data["domestic"].strip())
            if "domestic_id" in data:
                kwargs["domestic_id"] = data["domestic_id"].strip()
        if parser.has_section("data.foreign"):
            # configparser lower-cases keys; market ids are reported upper-case
            kwargs["foreign"] = tuple((k.upper(), resolve(v.strip())) for k, v in parser["data.foreign"].items())

        if parser.has_section("synthetic"):
            kwargs["synthetic"] = _synthetic(parser["synthetic"])

        if parser.has_section("experiment"):
            exp = parser["experiment"]
            if "windows" in exp:
                kwargs["windows"] = _windows(exp["windows"])
            if "scaling_ranges" in exp:
                kwargs["scaling_ranges"] = _ranges(exp["scaling_ranges"])
            if "variants" in exp:
                kwargs["variants"] = _list(exp["variants"])
            if "seed" in exp:
                kwargs["seed"] = exp.getint("seed")
            if "jobs" in exp:
                kwargs["jobs"] = exp.getint("jobs")
            if "out" in exp:
                kwargs["out_dir"] = resolve(exp["out"].strip())

        if parser.has_section("tpe"):
            tpe = parser["tpe"]
            tpe_kwargs = {}
            for key in ("max_trials", "n_startup", "n_candidates"):
                if key in tpe:
                    tpe_kwargs[key] = tpe.getint(key)
            if "gamma" in tpe:
                tpe_kwargs["gamma"] = tpe.getfloat("gamma")
            kwargs["tpe"] = TpeConfig(**tpe_kwargs)
            overrides = [(k, tuple(_scalar(t) for t in _list(v))) for k, v in tpe.items() if k not in tpe_kwargs and k != "gamma"]
            kwargs["space_overrides"] = tuple(overrides)

        if parser.has_section("training"):
            training = parser["training"]
            for key in ("patience", "max_epochs"):
                if key in training:
                    kwargs[key] = training.getint(key)

        if parser.has_section("model"):
            model = parser["model"]
            if "lam" in model:
                kwargs["lam"] = model.getfloat("lam")
            if "batch_norm" in model:
                kwargs["batch_norm"] = model.getboolean("batch_norm")

        if parser.has_section("scatter"):
            scatter = parser["scatter"]
            kwargs["scatter"] = ScatterConfig(
                target=scatter.get("target", "octc").strip(),
                n_boot=scatter.getint("n_boot", fallback=1000),
                level=scatter.getfloat("level", fallback=0.95),
            )

        synth = kwargs.get("synthetic")
        if synth is not None and "windows" not in kwargs:
            last = business_days(synth.start, synth.n_days)[-1]
            kwargs["windows"] = (Window("full", synth.start, last),)

        cfg = ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    logger.info("Loaded config %s: %d foreign index(es), %d window(s), %d scaling range(s), %d variant(s)",
                path, len(cfg.foreign_ids), len(cfg.windows), len(cfg.scaling_ranges), len(cfg.variants))
    return cfg
