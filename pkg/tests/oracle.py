"""Brute-force TF-IDF recomputation straight from raw token lists.

Kept deliberately independent of the package's scoring code so the two
implementations can be checked against each other.
"""
from __future__ import annotations

import math


def tf(term: str, tokens: list[str]) -> float:
    if not tokens:
        return 0.0
    return sum(1 for t in tokens if t == term) / len(tokens)


def df(term: str, docs: list[list[str]]) -> int:
    return sum(1 for d in docs if term in set(d))


def idf(term: str, docs: list[list[str]]) -> float:
    return math.log((len(docs) + 1) / (df(term, docs) + 1)) + 1.0


def tfidf(term: str, tokens: list[str], docs: list[list[str]]) -> float:
    return tf(term, tokens) * idf(term, docs)
