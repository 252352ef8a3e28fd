"""Tolerant parsers for structured content inside LLM responses."""

from __future__ import annotations

import json
import re
from typing import Any, Iterator, Optional

_FENCE_RE = re.compile(r"```(?:json|cypher)?\s*(.*?)```", re.DOTALL)
_BOOL_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


def strip_code_fences(text: str) -> str:
    fences = _FENCE_RE.findall(text)
    if fences:
        return "\n".join(fences)
    return text


def extract_json_array(text: str) -> Optional[list]:
    """First well-formed JSON array found in the text, else None."""
    text = strip_code_fences(text)
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\[", text):
        try:
            value, _end = decoder.raw_decode(text, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(value, list):
            return value
    return None


def iter_json_objects(text: str) -> Iterator[dict]:
    """Every top-level JSON object in the text, tolerant of surrounding prose."""
    text = strip_code_fences(text)
    decoder = json.JSONDecoder()
    pos = 0
    while True:
        start = text.find("{", pos)
        if start < 0:
            return
        try:
            value, end = decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            pos = start + 1
            continue
        if isinstance(value, dict):
            yield value
            pos = end
        else:
            pos = start + 1


def extract_json_object(text: str) -> Optional[dict]:
    for obj in iter_json_objects(text):
        return obj
    return None


def last_bool_verdict(text: str) -> Optional[bool]:
    """Final True/False token in a step-by-step answer; None when absent."""
    matches = _BOOL_RE.findall(text)
    if not matches:
        return None
    return matches[-1].lower() == "true"


_LIST_LINE_RE = re.compile(
    r"^\s*(?:\d+\s*[\.\):]\s*|[-*•]\s+)(.+)$"
)
_NAME_DESC_RE = re.compile(r"^(.*?)\s*(?::|—|–| - )\s*(.+)$")


def parse_name_description_list(text: str) -> list[tuple[str, str]]:
    """Parse '1. Name: description' style lists (also JSON arrays of objects)."""
    array = extract_json_array(text)
    if array is not None:
        out = []
        for entry in array:
            if not isinstance(entry, dict):
                continue
            name = entry.get("name") or entry.get("category") or entry.get("title")
            desc = entry.get("description") or entry.get("desc") or ""
            if name:
                out.append((_clean_name(str(name)), str(desc).strip()))
        if out:
            return out
    out = []
    for line in text.splitlines():
        match = _LIST_LINE_RE.match(line)
        if not match:
            continue
        body = match.group(1).strip()
        name_desc = _NAME_DESC_RE.match(body)
        if name_desc:
            name, desc = name_desc.group(1), name_desc.group(2)
        else:
            name, desc = body, ""
        name = _clean_name(name)
        if name:
            out.append((name, desc.strip()))
    return out


def _clean_name(name: str) -> str:
    return name.strip().strip("*_`'\"").strip().rstrip(".")


def parse_question_cypher_entries(text: str) -> tuple[list[dict], list[str]]:
    """Extract {question, cypher} entries; returns (entries, diagnostics)."""
    entries: list[dict] = []
    diagnostics: list[str] = []

    def take(obj: Any) -> None:
        if not isinstance(obj, dict):
            diagnostics.append(f"skipped non-object entry: {obj!r:.80}")
            return
        question = obj.get("question")
        cypher = obj.get("cypher") or obj.get("query")
        if isinstance(question, str) and question.strip() and isinstance(cypher, str) and cypher.strip():
            entries.append({"question": question.strip(), "cypher": cypher.strip()})
        else:
            diagnostics.append(f"skipped entry missing question/cypher: {str(obj)[:80]}")

    array = extract_json_array(text)
    if array is not None and any(isinstance(e, dict) for e in array):
        for obj in array:
            take(obj)
        return entries, diagnostics

    found_object = False
    for obj in iter_json_objects(text):
        found_object = True
        take(obj)
    if entries or found_object:
        return entries, diagnostics

    # bare '"question": "...", "cypher": "..."' lines without enclosing braces
    pattern = re.compile(
        r'"question"\s*:\s*"((?:[^"\\]|\\.)*)"\s*,\s*"cypher"\s*:\s*"((?:[^"\\]|\\.)*)"',
        re.DOTALL,
    )
    for match in pattern.finditer(text):
        try:
            question = json.loads(f'"{match.group(1)}"')
            cypher = json.loads(f'"{match.group(2)}"')
        except json.JSONDecodeError:
            diagnostics.append("skipped entry with invalid escapes")
            continue
        take({"question": question, "cypher": cypher})
    return entries, diagnostics
