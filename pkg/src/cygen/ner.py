"""Entity recognition providers and lemma-based fuzzy matching.

The default provider extracts quoted spans, which is language-agnostic and
deterministic; a spaCy-backed provider is available when the optional
dependency (and its model) is installed. Matching lemmatizes English text so
surface variations ("Brain tumors" vs "Brain tumor") still count as covered;
other languages match on exact case-folded surface forms.
"""

from __future__ import annotations

import re
from typing import Protocol

from .errors import NerProviderUnavailable

_QUOTED_RE = re.compile(
    r"'([^']+)'|\"([^\"]+)\"|‘([^’]+)’|“([^”]+)”|「([^」]+)」"
)


class NerProvider(Protocol):
    def extract(self, text: str) -> list[str]: ...


class QuotedSpanNer:
    """Entities are the quoted spans of the question; works for any language."""

    def extract(self, text: str) -> list[str]:
        out = []
        for match in _QUOTED_RE.finditer(text):
            span = next(g for g in match.groups() if g is not None).strip()
            if span:
                out.append(span)
        return out


class SpacyNer:
    """Named entities via a spaCy model; needs `pip install cygen[ner]` + model."""

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy  # type: ignore
        except ImportError as exc:
            raise NerProviderUnavailable("spacy is not installed") from exc
        try:
            self._nlp = spacy.load(model)
        except OSError as exc:
            raise NerProviderUnavailable(f"spaCy model {model!r} is not available") from exc

    def extract(self, text: str) -> list[str]:
        doc = self._nlp(text)
        return [ent.text.strip() for ent in doc.ents if ent.text.strip()]


class NerRegistry:
    """Providers keyed by language tag; 'default' catches everything else."""

    def __init__(self, providers: dict[str, NerProvider] | None = None):
        if providers is None:
            providers = {"default": QuotedSpanNer()}
        self._providers: dict[str, NerProvider] = providers

    def register(self, language_tag: str, provider: NerProvider) -> None:
        self._providers[language_tag] = provider

    def get(self, language_tag: str) -> NerProvider:
        provider = self._providers.get(language_tag) or self._providers.get("default")
        if provider is None:
            raise NerProviderUnavailable(f"no NER provider for language {language_tag!r}")
        return provider


def lemma_normalize(text: str, language: str = "en") -> str:
    """Case-folded, naively lemmatized form used for fuzzy entity matching."""
    folded = text.casefold().strip()
    if language != "en":
        return folded  # zh and friends: exact surface forms
    tokens = []
    for token in re.split(r"[\s\-_]+", folded):
        if len(token) > 4 and token.endswith("ies"):
            token = token[:-3] + "y"
        elif len(token) > 3 and token.endswith("es") and not token.endswith("ss"):
            token = token[:-2]
        elif len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
            token = token[:-1]
        tokens.append(token)
    return " ".join(t for t in tokens if t)


def fuzzy_entity_match(entity: str, literal: str, language: str = "en") -> bool:
    """True when the entity and a Cypher literal agree after normalization."""
    a = lemma_normalize(entity, language)
    b = lemma_normalize(literal, language)
    if not a or not b:
        return False
    return a == b or a in b or b in a
