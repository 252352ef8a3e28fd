"""Prompt templates stored as text files with named `{placeholder}` slots.

Files ship as package data and can be overridden by pointing the library at
another directory; `{{`/`}}` escape literal braces, matching the placeholder
convention used throughout the template registry.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .errors import ConfigError

_BUILTIN_DIR = Path(__file__).parent / "prompts"

PROMPT_FILES = {
    "categories_propose": "categories_propose.txt",
    "categories_merge": "categories_merge.txt",
    "pairs_generate": "pairs_generate.txt",
    "semantic_validator": "semantic_validator.txt",
    "semantic_examples_en": "semantic_examples_en.txt",
    "coherence_validator": "coherence_validator.txt",
    "judge_pairwise": "judge_pairwise.txt",
    "eval_scaffold": "eval_scaffold.txt",
    "back_translate": "back_translate.txt",
}


class PromptLibrary:
    def __init__(self, directory: Optional[str | Path] = None):
        self.directory = Path(directory) if directory else _BUILTIN_DIR
        self._cache: dict[str, str] = {}

    def raw(self, name: str) -> str:
        if name not in self._cache:
            filename = PROMPT_FILES.get(name, f"{name}.txt")
            path = self.directory / filename
            if not path.exists() and self.directory != _BUILTIN_DIR:
                path = _BUILTIN_DIR / filename  # overrides fall back to built-ins
            try:
                self._cache[name] = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"prompt template {name!r} not found at {path}") from exc
        return self._cache[name]

    def render(self, name: str, **values: str) -> str:
        template = self.raw(name)
        try:
            return template.format(**values)
        except KeyError as exc:
            raise ConfigError(f"prompt {name!r} needs placeholder {exc.args[0]!r}") from exc
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"prompt {name!r} has a malformed placeholder: {exc}") from exc


def format_few_shots(pairs: list[dict]) -> str:
    """Render few-shot pairs in the inline style the generation prompt expects."""
    blocks = []
    for pair in pairs:
        blocks.append(
            f'"question": "{pair["question"]}",\n"cypher": "{pair["cypher"]}"'
        )
    return "\n\n".join(blocks)
