"""Exception taxonomy shared across the pipeline stages."""

from __future__ import annotations


class CygenError(Exception):
    """Base class for all pipeline errors."""


# --- graph database access ---------------------------------------------------


class GraphConnectionError(CygenError):
    """Target database is unreachable, unauthorized, or the session died."""


class EmptyDatabaseError(CygenError):
    """Schema extraction found zero node labels; the target is misconfigured."""


class UnknownLabelError(CygenError):
    """A requested origin label does not exist in the schema."""


class CypherError(CygenError):
    """Base for errors raised while parsing or executing a Cypher query."""


class CypherSyntaxError(CypherError):
    """The query text does not parse."""


class UnsupportedCypherError(CypherError):
    """The query uses a construct outside the embedded engine's subset."""


class CypherRuntimeError(CypherError):
    """The query parsed but failed during evaluation."""


class QueryTimeout(CypherError):
    """Query execution exceeded its deadline."""


# --- LLM gateway --------------------------------------------------------------


class RateLimited(CygenError):
    """Provider kept rate-limiting after bounded exponential backoff."""


class ReplayMiss(CygenError):
    """Replay mode has no recorded response for this request fingerprint."""

    def __init__(self, fingerprint: str):
        super().__init__(f"no recorded response for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


class ProviderError(CygenError):
    """Non-retryable provider failure (bad request, auth, 5xx after retries)."""


# --- pipeline 1 (LLM prompting) ----------------------------------------------


class AllIterationsFailed(CygenError):
    """No category-proposal iteration produced a parseable set."""


class MergeShortfall(CygenError):
    """Category merge could not reach the target count after a re-prompt."""


class EmptyGeneration(CygenError):
    """A generation call produced zero parseable outputs."""


# --- pipeline 2 (template filling) --------------------------------------------


class TemplateParseError(CygenError):
    """A template file is malformed; carries file and, when known, line info."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = path or "<template>"
        if line is not None:
            loc = f"{loc}:{line}"
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line


class EmptyRegistry(CygenError):
    """The template registry contains no template files."""


class UnsatisfiableSlot(CygenError):
    """No concrete value exists for a slot; the instance is skipped, not fatal."""


# --- validators ---------------------------------------------------------------


class UnparseableVerdict(CygenError):
    """An LLM validator/judge answer contained no recognizable verdict."""


class NerProviderUnavailable(CygenError):
    """No entity-recognition provider is available for a language tag."""


# --- review service -----------------------------------------------------------


class InsufficientReviewers(CygenError):
    """Fewer than three reviewers; tie-breaking would be impossible."""


class AlreadyDecided(CygenError):
    """A decision was already recorded for this task."""


class UnknownTask(CygenError):
    """No task with this identifier exists."""


# --- dataset export -----------------------------------------------------------


class QuotaShortfall(CygenError):
    """A (database, pipeline) combination has fewer pairs than its quota needs."""

    def __init__(self, combination: tuple[str, str], available: int, needed: int):
        super().__init__(
            f"combination {combination[0]}/{combination[1]} has {available} "
            f"pairs, needs {needed}"
        )
        self.combination = combination
        self.available = available
        self.needed = needed


# --- configuration ------------------------------------------------------------


class ConfigError(CygenError):
    """The config file is missing, malformed, or references absent paths."""
