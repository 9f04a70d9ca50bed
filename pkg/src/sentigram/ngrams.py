"""N-gram dictionary construction: enumeration, document frequencies, IDF weights.

A dictionary is built from a training corpus only. For each surviving phrase g
over a corpus of N documents it records

    freq       total occurrence count (overlapping occurrences all counted),
    df_phrase  documents containing g contiguously at least once,
    df_terms   documents containing all of g's distinct tokens in any order,
    weight     ln(N * df_phrase / df_terms**2).

For unigrams df_phrase == df_terms and the weight reduces to plain IDF,
ln(N / df). Multi-token phrases whose tokens co-occur mostly as that phrase
get weights above their tokens' IDF; token sets that rarely form the phrase
get low or negative weights, which is what demotes non-dominant overlaps.
Phrases occurring fewer than ``min_freq`` times in the whole corpus are
dropped before weighting (default 2: singletons carry no training signal).
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

MAX_NGRAM_LEN = 10

Phrase = tuple[str, ...]

DICTIONARY_COLUMNS = ("phrase", "n", "freq", "df_phrase", "df_terms", "weight")


def enumerate_ngrams(tokens, max_n: int = MAX_NGRAM_LEN) -> Counter:
    """Count every contiguous 1..max_n-gram of a token sequence.

    Overlapping occurrences all count, e.g. [a, a, a] contains "a a" twice.
    """
    if not 1 <= max_n <= MAX_NGRAM_LEN:
        raise ValueError(f"max_n must be in 1..{MAX_NGRAM_LEN}, got {max_n}")
    tokens = tuple(tokens)
    counts: Counter = Counter()
    size = len(tokens)
    for start in range(size):
        longest = min(max_n, size - start)
        for n in range(1, longest + 1):
            counts[tokens[start : start + n]] += 1
    return counts


def ngram_idf_weight(df_phrase: int, df_terms: int, corpus_size: int) -> float:
    """ln(corpus_size * df_phrase / df_terms**2); natural log throughout."""
    assert 1 <= df_phrase <= df_terms <= corpus_size, (df_phrase, df_terms, corpus_size)
    return math.log(corpus_size * df_phrase / (df_terms * df_terms))


@dataclass(frozen=True)
class NGramEntry:
    phrase: Phrase
    freq: int
    df_phrase: int
    df_terms: int
    weight: float


@dataclass
class NGramDictionary:
    """The learned feature space: one entry per surviving phrase.

    ``feature_order`` (phrases sorted lexicographically) fixes the feature
    index space shared with vectorization; ``fingerprint`` hashes both the
    build settings and the entry content so matrices and models can verify
    they were produced against this exact dictionary.
    """

    corpus_size: int | None  # None for dictionaries re-imported from TSV
    entries: dict[Phrase, NGramEntry]
    max_n: int = MAX_NGRAM_LEN
    min_freq: int = 2

    def __post_init__(self) -> None:
        self.feature_order: tuple[Phrase, ...] = tuple(sorted(self.entries))
        self.feature_index: dict[Phrase, int] = {p: i for i, p in enumerate(self.feature_order)}
        self.fingerprint: str = self._compute_fingerprint()
        self._prefixes: frozenset[Phrase] | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def phrase_prefixes(self) -> frozenset[Phrase]:
        """All non-empty prefixes of dictionary phrases (cached; used to prune matching)."""
        if self._prefixes is None:
            prefixes = set()
            for phrase in self.entries:
                for i in range(1, len(phrase) + 1):
                    prefixes.add(phrase[:i])
            self._prefixes = frozenset(prefixes)
        return self._prefixes

    def _compute_fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(
            f"max_n={self.max_n};min_freq={self.min_freq};N={self.corpus_size}\n".encode()
        )
        for phrase in self.feature_order:
            e = self.entries[phrase]
            digest.update(
                f"{' '.join(phrase)}\t{e.freq}\t{e.df_phrase}\t{e.df_terms}\t{e.weight:.6f}\n".encode()
            )
        return digest.hexdigest()


def build_dictionary(docs, max_n: int = MAX_NGRAM_LEN, min_freq: int = 2) -> NGramDictionary:
    """Aggregate per-document n-gram statistics, prune, and weight the survivors.

    ``docs`` is a sequence of token sequences (training documents only; feeding
    test documents here leaks evaluation data into the feature space).
    """
    docs = [tuple(doc) for doc in docs]
    if not docs:
        raise ValueError("build_dictionary requires at least one document")
    if min_freq < 1:
        raise ValueError(f"min_freq must be >= 1, got {min_freq}")

    corpus_size = len(docs)
    freq: Counter = Counter()
    df_phrase: Counter = Counter()
    postings: dict[str, set[int]] = {}
    for doc_id, tokens in enumerate(docs):
        counts = enumerate_ngrams(tokens, max_n)
        freq.update(counts)
        for phrase in counts:
            df_phrase[phrase] += 1
        for token in set(tokens):
            postings.setdefault(token, set()).add(doc_id)

    entries: dict[Phrase, NGramEntry] = {}
    df_terms_cache: dict[frozenset, int] = {}
    for phrase, total in freq.items():
        if total < min_freq:
            continue
        terms = frozenset(phrase)
        df_terms = df_terms_cache.get(terms)
        if df_terms is None:
            df_terms = _count_docs_containing_terms(terms, postings)
            df_terms_cache[terms] = df_terms
        dfp = df_phrase[phrase]
        entries[phrase] = NGramEntry(
            phrase=phrase,
            freq=total,
            df_phrase=dfp,
            df_terms=df_terms,
            weight=ngram_idf_weight(dfp, df_terms, corpus_size),
        )
    return NGramDictionary(
        corpus_size=corpus_size, entries=entries, max_n=max_n, min_freq=min_freq
    )


def _count_docs_containing_terms(terms: frozenset, postings: dict[str, set[int]]) -> int:
    # Intersect posting sets smallest-first; terms all exist because the phrase occurred.
    sets = sorted((postings[t] for t in terms), key=len)
    if len(sets) == 1:
        return len(sets[0])
    smallest, rest = sets[0], sets[1:]
    return sum(1 for doc_id in smallest if all(doc_id in s for s in rest))


def _export_sort_key(entry: NGramEntry):
    # Sort on the printed 6-decimal weight, not the raw float, so that
    # export -> import -> export is byte-identical.
    return (-float(f"{entry.weight:.6f}"), entry.phrase)


def export_dictionary(dictionary: NGramDictionary, path: str | Path) -> None:
    """Write the dictionary as TSV: descending weight, then lexicographic phrase."""
    lines = ["\t".join(DICTIONARY_COLUMNS)]
    for entry in sorted(dictionary.entries.values(), key=_export_sort_key):
        lines.append(
            f"{' '.join(entry.phrase)}\t{len(entry.phrase)}\t{entry.freq}"
            f"\t{entry.df_phrase}\t{entry.df_terms}\t{entry.weight:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_dictionary(path: str | Path) -> NGramDictionary:
    """Re-load an exported dictionary TSV.

    The TSV schema has no corpus-size column, so the result has
    corpus_size=None and its weights carry the 6-decimal export precision.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != DICTIONARY_COLUMNS:
        raise ValueError(f"{path}: not a dictionary TSV (bad header)")
    entries: dict[Phrase, NGramEntry] = {}
    max_len = 1
    min_freq_seen = None
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(DICTIONARY_COLUMNS):
            raise ValueError(f"{path}: line {lineno}: expected {len(DICTIONARY_COLUMNS)} fields")
        phrase = tuple(fields[0].split(" "))
        n, freq, dfp, dft = (int(v) for v in fields[1:5])
        weight = float(fields[5])
        if len(phrase) != n or not all(phrase):
            raise ValueError(f"{path}: line {lineno}: phrase does not match its length field")
        if not 1 <= dfp <= dft or freq < dfp:
            raise ValueError(f"{path}: line {lineno}: inconsistent frequency columns")
        if phrase in entries:
            raise ValueError(f"{path}: line {lineno}: duplicate phrase {' '.join(phrase)!r}")
        entries[phrase] = NGramEntry(phrase, freq, dfp, dft, weight)
        max_len = max(max_len, n)
        min_freq_seen = freq if min_freq_seen is None else min(min_freq_seen, freq)
    return NGramDictionary(
        corpus_size=None,
        entries=entries,
        max_n=max(max_len, 1),
        min_freq=min_freq_seen if min_freq_seen is not None else 2,
    )
