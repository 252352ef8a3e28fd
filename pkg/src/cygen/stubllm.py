"""Deterministic scripted LLM provider for offline runs and replay fixtures.

Not a model: a pure function from (request text, graph contents) to a
plausible response, seeded by the request fingerprint. It understands the
shapes of the pipeline's own prompts well enough to answer them sensibly, so
`--llm-provider stub` exercises every stage without network access. Live runs
against a real provider behave identically at the interface level.
"""

from __future__ import annotations

import json
import random
import re
from typing import Optional

from .gateway import LlmRequest, ProviderReply, request_fingerprint
from .graphdb.session import GraphSession
from .parsing import iter_json_objects
from .schema import GraphSchema

_CATEGORY_BANK = [
    ("Single-node lookup", "List or fetch nodes of one label by name."),
    ("Property filtering", "Filter nodes by an exact property value."),
    ("Relationship traversal", "Follow one edge type from a named node."),
    ("Reverse traversal", "Find sources pointing at a named node."),
    ("Counting and aggregation", "Count or aggregate connected nodes."),
    ("Top-k ranking", "Order by a count or property and keep the top results."),
    ("Multi-hop paths", "Chain two relationships through an intermediate node."),
    ("Existence checks", "Ask whether a node has a certain connection."),
    ("Numeric comparison", "Filter by numeric thresholds."),
    ("List properties", "Look inside list-valued properties."),
    ("Date filtering", "Filter by date-valued properties."),
    ("Sorted listings", "Return results sorted by a property."),
]


class StubLlm:
    """Callable provider; wire into LlmGateway(provider=StubLlm(...))."""

    def __init__(self, session: Optional[GraphSession] = None,
                 schema: Optional[GraphSchema] = None):
        self.session = session
        self.schema = schema

    def __call__(self, request: LlmRequest) -> ProviderReply:
        prompt = request.messages[-1][1]
        rng = random.Random(int(request_fingerprint(request)[:12], 16))
        if "suggest 12 categories" in prompt:
            text = self._categories()
        elif "merge similar categories" in prompt:
            text = self._categories()
        elif "corresponding Cypher statements" in prompt:
            text = self._generate_pairs(prompt, rng)
        elif "verify whether the cypher is coherent" in prompt:
            text = self._semantic_verdict(prompt)
        elif "medical assistant" in prompt and "Responses by the doctor" in prompt:
            text = self._coherence_verdict(prompt)
        elif "better_cypher" in prompt:
            text = self._judge(prompt)
        elif "Do not write any Cypher queries" in prompt:
            text = self._scaffold_questions(prompt, rng)
        elif "Translate the following Cypher" in prompt:
            text = self._back_translate(prompt)
        else:
            text = "I cannot help with that request."
        return ProviderReply(text=text, prompt_tokens=len(prompt) // 4,
                             completion_tokens=len(text) // 4)

    # --- categories ---

    def _categories(self) -> str:
        lines = [
            f"{i + 1}. {name}: {desc}" for i, (name, desc) in enumerate(_CATEGORY_BANK)
        ]
        return "Here are the categories:\n\n" + "\n".join(lines)

    # --- pair generation ---

    def _generate_pairs(self, prompt: str, rng: random.Random) -> str:
        match = re.search(r"Generate (\d+) questions", prompt)
        k = int(match.group(1)) if match else 5
        category = ""
        cat_match = re.search(r"The questions should cover (.+?) and should be phrased", prompt)
        if cat_match:
            category = cat_match.group(1).strip()
        entries = []
        for idx in range(k):
            entry = self._one_pair(category, idx, rng)
            if entry is not None:
                entries.append(entry)
        return json.dumps(entries, ensure_ascii=False, indent=2)

    def _one_pair(self, category: str, idx: int, rng: random.Random) -> Optional[dict]:
        if self.schema is None or self.session is None:
            return {"question": f"Placeholder question {idx}?",
                    "cypher": "MATCH (n) RETURN n LIMIT 1"}
        triples = list(self.schema.valid_relationships)
        if not triples:
            return None
        triple = triples[rng.randrange(len(triples))]
        value = self._sample_name(triple.source, rng)
        low = category.lower()
        # every 7th entry is deliberately defective, mirroring real model noise
        if idx > 0 and idx % 7 == 0:
            return {
                "question": f"Which {triple.source} nodes relate to '{value}'?",
                "cypher": (
                    f"MATCH (a:{triple.target} {{name: '{value}'}})-[:{triple.name}]->"
                    f"(b:{triple.source}) RETURN b.name"
                ),
            }
        if "count" in low or "aggregat" in low:
            question = f"How many {triple.target} nodes are linked to the {triple.source} named '{value}'?"
            cypher = (
                f"MATCH (a:{triple.source} {{name: '{value}'}})-[:{triple.name}]->(b:{triple.target}) "
                f"RETURN count(b)"
            )
        elif "reverse" in low:
            question = f"Which {triple.source} nodes point to the {triple.target} connected with '{value}'?"
            cypher = (
                f"MATCH (a:{triple.source})-[:{triple.name}]->(b:{triple.target}) "
                f"WHERE a.name = '{value}' RETURN a.name, b.name"
            )
        elif "sort" in low or "top" in low:
            question = f"List {triple.target} nodes reached from '{value}' in alphabetical order."
            cypher = (
                f"MATCH (a:{triple.source} {{name: '{value}'}})-[:{triple.name}]->(b:{triple.target}) "
                f"RETURN b.name ORDER BY b.name LIMIT 10"
            )
        elif "exist" in low:
            question = f"Does the {triple.source} named '{value}' have any {triple.name} relation?"
            cypher = (
                f"MATCH (a:{triple.source} {{name: '{value}'}}) "
                f"RETURN EXISTS {{ (a)-[:{triple.name}]->(:{triple.target}) }} AS present"
            )
        else:
            question = f"What {triple.target} nodes are associated with the {triple.source} '{value}' via {triple.name}?"
            cypher = (
                f"MATCH (a:{triple.source} {{name: '{value}'}})-[:{triple.name}]->(b:{triple.target}) "
                f"RETURN b.name"
            )
        return {"question": question, "cypher": cypher}

    def _sample_name(self, label: str, rng: random.Random) -> str:
        try:
            rows = self.session.run(
                f"MATCH (n:`{label}`) WHERE n.name IS NOT NULL "
                f"RETURN n.name AS v ORDER BY v LIMIT 50"
            ).rows
        except Exception:
            rows = []
        if not rows:
            return label
        return str(rows[rng.randrange(len(rows))]["v"])

    # --- validator verdicts ---

    def _semantic_verdict(self, prompt: str) -> str:
        obj = None
        marker = prompt.rfind("Here is the JSON object you should evaluate:")
        for candidate in iter_json_objects(prompt[marker:] if marker >= 0 else prompt):
            if "question" in candidate and "cypher" in candidate:
                obj = candidate
        if obj is None:
            return "I could not find the JSON object. False"
        question, cypher = obj["question"], obj["cypher"]
        quoted = re.findall(r"'([^']+)'", question)
        missing = [q for q in quoted if q not in cypher]
        if missing:
            return (
                f"The key information {missing[0]!r} from the question does not appear "
                "in the cypher, so the key information is inconsistent. False"
            )
        return (
            "The output of the cypher matches what the question asks, the key "
            "information is consistent, and the logic lines up. True"
        )

    def _coherence_verdict(self, prompt: str) -> str:
        match = re.search(r"Question:(.*)\nResponses by the doctor: (.*)\nYour reply:", prompt, re.DOTALL)
        if not match:
            return "I cannot locate the question. False"
        return (
            "The responses list items of the category the question asks about, "
            "so I think it is relevant, and my answer is True."
        )

    def _judge(self, prompt: str) -> str:
        cyphers = re.findall(r'"cypher": "((?:[^"\\]|\\.)*)"', prompt)
        if len(cyphers) < 2:
            return json.dumps({"better_cypher": "1", "reason": "only one candidate found"})
        first, second = cyphers[0], cyphers[1]
        better = "1" if (len(first), first) <= (len(second), second) else "2"
        return json.dumps({
            "better_cypher": better,
            "reason": "picked the more concise candidate with equivalent semantics",
        })

    # --- misc ---

    def _scaffold_questions(self, prompt: str, rng: random.Random) -> str:
        match = re.search(r"Generate (\d+) new questions", prompt)
        k = int(match.group(1)) if match else 5
        cat_match = re.search(r"The questions should cover (.+?) and should be phrased", prompt)
        category = cat_match.group(1).strip() if cat_match else "the graph"
        labels = sorted(self.schema.node_labels) if self.schema else ["Node"]
        questions = []
        for idx in range(k):
            label = labels[rng.randrange(len(labels))]
            questions.append(
                f"Regarding {category}, what can you tell me about {label} number {idx + 1}?"
            )
        return json.dumps(questions, ensure_ascii=False)

    def _back_translate(self, prompt: str) -> str:
        match = re.search(r"MATCH.*", prompt, re.DOTALL)
        snippet = (match.group(0)[:80] if match else "the data").strip()
        return f"What does the query '{snippet}' return?"

