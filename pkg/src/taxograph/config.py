"""One flat, JSON-serializable bag of every pipeline tunable."""

import json
from dataclasses import asdict, dataclass, fields

from .graph import GraphConfig
from .partition import PartitionConfig
from .query import QueryConfig


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    # extraction
    min_count: int = 3
    stopwords: str | None = None
    prepositions: str | None = None
    # graph
    lambda1: float = 1.0
    lambda2: float = 1.0
    # query
    r_max: int = 3
    k_min: int = 10
    s_min: int = 20
    expansion_k: int = 3
    max_vertices: int | None = 200
    # partitioning
    alpha: int = 200
    beta: int = 20
    min_partition_size: int = 5
    balance_epsilon: float = 0.2
    coarsen_stop: int | None = None
    n_init_trials: int = 4
    seed: int = 0

    def __post_init__(self):
        # surface bad values at load time rather than mid-pipeline
        try:
            self.graph()
            self.query()
            self.partition()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")

    def graph(self):
        return GraphConfig(self.lambda1, self.lambda2)

    def query(self):
        return QueryConfig(self.r_max, self.k_min, self.s_min, self.expansion_k, self.max_vertices)

    def partition(self):
        return PartitionConfig(self.alpha, self.beta, self.min_partition_size, self.balance_epsilon,
                               self.coarsen_stop, self.seed, self.n_init_trials)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name: f for f in fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if not _type_ok(known[key].type, value):
                raise ConfigError(f"config key {key!r} has bad value {value!r}")
        return cls(**data)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def override(self, **changes):
        """Copy with the non-None entries of ``changes`` applied."""
        data = self.to_dict()
        data.update({k: v for k, v in changes.items() if v is not None})
        return PipelineConfig.from_dict(data)


def _type_ok(annotation, value):
    ann = str(annotation)
    if value is None:
        return "None" in ann
    if ann.startswith("int"):
        return isinstance(value, int) and not isinstance(value, bool)
    if ann.startswith("float"):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if ann.startswith("str"):
        return isinstance(value, str)
    return True


def load_config(path=None):
    if path is None:
        return PipelineConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return PipelineConfig.from_dict(data)
