"""Pure fact extraction, checked exactly against the hand-labeled corpus."""

from cygen.cypher_facts import extract_facts
from cygen.ner import QuotedSpanNer, fuzzy_entity_match, lemma_normalize


def _pattern_tuples(facts):
    return sorted(
        (p.source, p.name, p.target, p.direction) for p in facts.relationship_patterns
    )


def test_extraction_matches_corpus_annotations(corpus):
    for entry in corpus:
        facts = extract_facts(entry["cypher"])
        assert sorted(facts.entity_literals) == sorted(entry["entity_literals"]), entry["id"]
        expected = sorted(
            (tuple(None if x is None else x for x in p)) for p in entry["relationship_patterns"]
        )
        assert _pattern_tuples(facts) == expected, entry["id"]


def test_ner_matches_corpus_annotations(corpus):
    ner = QuotedSpanNer()
    for entry in corpus:
        assert ner.extract(entry["question"]) == entry["entities"], entry["id"]


def test_unlexable_text_yields_no_facts():
    facts = extract_facts("MATCH (n:Disease) WHERE n.name = 'unterminated")
    assert facts.entity_literals == frozenset()
    assert facts.relationship_patterns == frozenset()


def test_untyped_relationship_yields_no_pattern():
    facts = extract_facts("MATCH (a:Disease)-->(b) RETURN a, b")
    assert facts.relationship_patterns == frozenset()


def test_lemma_normalization():
    assert lemma_normalize("Brain tumors") == lemma_normalize("Brain tumor")
    assert lemma_normalize("Symptoms") == lemma_normalize("symptom")
    assert lemma_normalize("Pathologies") == lemma_normalize("pathology")
    # zh falls back to exact surface forms
    assert lemma_normalize("高血压", "zh") == "高血压"


def test_fuzzy_match_containment():
    assert fuzzy_entity_match("Depression", "Severe Depression")
    assert fuzzy_entity_match("severe depression", "Depression")
    assert not fuzzy_entity_match("Psychiatry", "Neurology")
