"""Synthetic corpora with a verifiable signal, used as end-to-end oracles.

The planted-signal corpus assigns each document's label by construction: one
three-token marker phrase per class, inserted contiguously into filler text.
Two properties are enforced so the full marker is the uniquely best feature:

  * cross-class pollution inserts only proper sub-phrases of other classes'
    markers (two of the three tokens), so sub-phrases and single tokens occur
    in multiple classes and are weak evidence;
  * no document ever contains all three distinct tokens of another class's
    marker, so each marker's scattered-token document frequency equals its
    contiguous document frequency and its weight stays comfortably positive.

Labels are therefore a deterministic function of text, and a sound pipeline
should approach perfect held-out scores.
"""

from __future__ import annotations

import numpy as np

from .corpus import LABELS, LabeledDataset, LabeledDocument
from .preprocess import load_stoplist

PLANTED_PHRASES: dict[str, tuple[str, ...]] = {
    "positive": ("blazing", "fast", "startup"),
    "neutral": ("plain", "config", "noted"),
    "negative": ("crashes", "nightly", "session"),
}


def planted_signal_dataset(
    n_docs: int = 600,
    seed: int = 0,
    pollution: float = 0.3,
    filler_vocab: int = 40,
    doc_len: tuple[int, int] = (6, 12),
) -> LabeledDataset:
    """Generate a corpus whose labels are determined by planted marker phrases.

    Classes are balanced (±1 document). Each document is filler tokens with
    its class marker spliced in whole; with probability ``pollution`` a
    two-token fragment of another class's marker is spliced in as well.
    """
    if n_docs < 3:
        raise ValueError("need at least one document per class")
    rng = np.random.default_rng(seed)
    planted_tokens = {t for phrase in PLANTED_PHRASES.values() for t in phrase}
    stop = load_stoplist().words
    clash = planted_tokens & stop
    if clash:  # markers must survive stop-word removal
        raise AssertionError(f"marker tokens collide with the stop list: {sorted(clash)}")
    fillers = [f"filler{i:02d}" for i in range(filler_vocab)]

    documents = []
    for i in range(n_docs):
        label = LABELS[i % len(LABELS)]
        length = int(rng.integers(doc_len[0], doc_len[1] + 1))
        tokens = [fillers[j] for j in rng.integers(0, len(fillers), length)]
        if rng.random() < pollution:
            other = [c for c in LABELS if c != label]
            marker = PLANTED_PHRASES[other[int(rng.integers(len(other)))]]
            fragment = marker[:2] if rng.random() < 0.5 else marker[1:]
            _splice(tokens, fragment, rng)
        # the class marker goes in last so nothing can split it apart
        _splice(tokens, PLANTED_PHRASES[label], rng)
        documents.append(LabeledDocument(doc_id=i, text=" ".join(tokens), label=label))
    return LabeledDataset(name="planted-signal", documents=tuple(documents))


def _splice(tokens: list, phrase: tuple[str, ...], rng: np.random.Generator) -> None:
    at = int(rng.integers(0, len(tokens) + 1))
    tokens[at:at] = list(phrase)
