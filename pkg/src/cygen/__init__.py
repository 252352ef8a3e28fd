"""cygen: synthesize, validate, review, and evaluate Question-Cypher datasets."""

__version__ = "0.1.0"
