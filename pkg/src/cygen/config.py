"""Config file loading: one YAML file drives every CLI command."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError
from .gateway import LlmGateway, OpenAiChatProvider, TokenBucket, TranscriptStore
from .graphdb.session import GraphSession, connect
from .schema import GraphSchema
from .stubllm import StubLlm
from .validators import ValidatorPolicy


@dataclass
class DatabaseConfig:
    uri: str
    user: Optional[str] = None
    password_env: Optional[str] = None
    language_tag: str = "en"


@dataclass
class LlmRoleConfig:
    model: str
    temperature: float


@dataclass
class LlmConfig:
    mode: str = "replay"  # live | replay
    provider: str = "openai"  # openai | stub
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "CYGEN_LLM_API_KEY"
    transcripts: str = "transcripts.jsonl"
    rate_limit_per_s: float = 5.0
    roles: dict[str, LlmRoleConfig] = field(default_factory=lambda: {
        "generator": LlmRoleConfig("gpt-4o", 0.8),
        "validator": LlmRoleConfig("gpt-3.5-turbo", 0.0),
        "judge": LlmRoleConfig("gpt-4o", 0.0),
    })

    def role(self, name: str) -> LlmRoleConfig:
        if name not in self.roles:
            raise ConfigError(f"llm role {name!r} is not configured")
        cfg = self.roles[name]
        if not cfg.model:
            raise ConfigError(f"llm role {name!r} has no model id")
        return cfg


@dataclass
class PipelineConfig:
    k: int = 10
    iterations: int = 5
    target_count: int = 12
    per_label_examples: int = 2
    per_template: int = 10


@dataclass
class PathsConfig:
    templates: Optional[str] = None  # None = builtin registry
    prompts: Optional[str] = None
    few_shots: Optional[str] = None
    output: str = "out"


@dataclass
class ExportConfig:
    quota: int = 750
    scale: str = "1"
    instruction: Optional[str] = None


@dataclass
class ReviewConfig:
    db: str = "review.sqlite"
    show_diagnostics: bool = True
    tokens: dict[str, str] = field(default_factory=dict)  # token -> reviewer id
    seed: Optional[int] = None


@dataclass
class Config:
    root_seed: int = 0
    parallelism: int = 4
    databases: dict[str, DatabaseConfig] = field(default_factory=lambda: {
        "medkg": DatabaseConfig(uri="memory://medkg"),
    })
    llm: LlmConfig = field(default_factory=LlmConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    policy: ValidatorPolicy = field(default_factory=ValidatorPolicy)
    paths: PathsConfig = field(default_factory=PathsConfig)
    export: ExportConfig = field(default_factory=ExportConfig)
    review: ReviewConfig = field(default_factory=ReviewConfig)

    def database(self, name: str) -> DatabaseConfig:
        if name not in self.databases:
            raise ConfigError(f"database {name!r} is not configured")
        return self.databases[name]

    def connect(self, name: str) -> GraphSession:
        db = self.database(name)
        password = os.environ.get(db.password_env) if db.password_env else None
        return connect(db.uri, user=db.user, password=password)

    def build_gateway(
        self,
        session: Optional[GraphSession] = None,
        schema: Optional[GraphSchema] = None,
        transcripts_override: Optional[str] = None,
    ) -> LlmGateway:
        store = TranscriptStore(transcripts_override or self.llm.transcripts)
        if self.llm.mode == "replay":
            return LlmGateway(mode="replay", store=store)
        if self.llm.provider == "stub":
            provider = StubLlm(session=session, schema=schema)
        elif self.llm.provider == "openai":
            provider = OpenAiChatProvider(self.llm.base_url, self.llm.api_key_env)
        else:
            raise ConfigError(f"unknown llm provider {self.llm.provider!r}")
        limiter = TokenBucket(rate_per_s=self.llm.rate_limit_per_s,
                              capacity=max(1, int(self.llm.rate_limit_per_s)))
        return LlmGateway(mode="live", provider=provider, store=store, limiter=limiter)


def _as_dataclass(cls, payload: dict, path: str):
    kwargs = {}
    for key, value in payload.items():
        if key not in cls.__dataclass_fields__:
            raise ConfigError(f"{path}: unknown key {key!r}")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(path: Optional[str | Path]) -> Config:
    """Parse the YAML config; a missing path yields the built-in defaults."""
    if path is None:
        return Config()
    path = Path(path)
    try:
        payload = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config {path} must be a mapping")

    config = Config()
    if "root_seed" in payload:
        config.root_seed = int(payload["root_seed"])
    if "parallelism" in payload:
        config.parallelism = max(1, int(payload["parallelism"]))
    if "databases" in payload:
        config.databases = {
            name: _as_dataclass(DatabaseConfig, db or {}, f"databases.{name}")
            for name, db in payload["databases"].items()
        }
    if "llm" in payload:
        llm = dict(payload["llm"] or {})
        roles_raw = llm.pop("roles", None)
        config.llm = _as_dataclass(LlmConfig, llm, "llm")
        if roles_raw:
            for name, role in roles_raw.items():
                config.llm.roles[name] = LlmRoleConfig(
                    model=str(role.get("model", "")),
                    temperature=float(role.get("temperature", 0.0)),
                )
    if "pipeline" in payload:
        config.pipeline = _as_dataclass(PipelineConfig, payload["pipeline"] or {}, "pipeline")
    if "validators" in payload:
        raw = dict(payload["validators"] or {})
        skip = raw.pop("skip", None)
        config.policy = _as_dataclass(ValidatorPolicy, raw, "validators")
        if skip is not None:
            config.policy.skip_by_pipeline = {
                pipeline: tuple(names or ()) for pipeline, names in skip.items()
            }
    if "paths" in payload:
        config.paths = _as_dataclass(PathsConfig, payload["paths"] or {}, "paths")
    if "export" in payload:
        config.export = _as_dataclass(ExportConfig, payload["export"] or {}, "export")
    if "review" in payload:
        config.review = _as_dataclass(ReviewConfig, payload["review"] or {}, "review")
    return config


def check_paths_exist(config: Config, *attrs: str) -> None:
    """Referenced paths must exist at command start."""
    for attr in attrs:
        value = getattr(config.paths, attr, None)
        if value is not None and not Path(value).exists():
            raise ConfigError(f"configured paths.{attr} does not exist: {value}")
