"""Corpus-level BLEU over token sequences, 4-gram, add-one smoothed.

Used for adherence scoring of binned-attribute sequences. Tokenization is
the caller's business (attribute sequences split strictly on commas).

Per n-gram order the corpus-level modified precision is smoothed with
add-one on both counts:

    p_n = (sum clipped matches + 1) / (sum candidate n-grams + 1)

so empty higher orders contribute a neutral factor and identical corpora
score exactly 100. Brevity penalty is exp(1 - r/c) when the candidate
corpus is shorter than the reference corpus.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

MAX_ORDER = 4


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    candidates: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    max_order: int = MAX_ORDER,
) -> float:
    """BLEU in [0, 100]; exactly 100 iff every candidate equals its reference."""
    if len(candidates) != len(references):
        raise ValueError(
            f"candidate/reference count mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise ValueError("empty corpus")
    matches = [0] * max_order
    totals = [0] * max_order
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            cand_ngrams = _ngrams(cand, n)
            if not cand_ngrams:
                continue
            ref_ngrams = _ngrams(ref, n)
            totals[n - 1] += sum(cand_ngrams.values())
            matches[n - 1] += sum((cand_ngrams & ref_ngrams).values())
    log_precision = sum(
        math.log((m + 1.0) / (t + 1.0)) for m, t in zip(matches, totals)
    ) / max_order
    if cand_len == 0:
        return 0.0
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * brevity * math.exp(log_precision)
