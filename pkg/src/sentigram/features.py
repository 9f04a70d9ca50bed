"""Document vectorization against a fixed n-gram dictionary, plus SMOTE.

Three feature schemes over the dictionary's phrase space:

    count_x_weight   occurrence count * phrase weight   (default)
    binary_x_weight  presence indicator * phrase weight
    count            raw occurrence count

Matrices are CSR sparse; rows are documents in input order, columns follow
``dictionary.feature_order``. Out-of-dictionary phrases are ignored, so test
documents vectorize into the training feature space without refitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import LABEL_TO_INDEX, LabeledDataset
from .ngrams import NGramDictionary
from .preprocess import StopList, preprocess

SCHEMES = ("count_x_weight", "binary_x_weight", "count")


@dataclass
class FeatureMatrix:
    """A vectorized document set tied to the dictionary that produced it."""

    X: sp.csr_matrix
    y: np.ndarray | None  # label indices aligned with rows, or None for unlabeled text
    fingerprint: str  # of the producing dictionary
    scheme: str

    @property
    def n_documents(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "FeatureMatrix":
        """Row-sliced view sharing scheme and dictionary fingerprint."""
        rows = np.asarray(rows)
        return FeatureMatrix(
            X=self.X[rows],
            y=None if self.y is None else self.y[rows],
            fingerprint=self.fingerprint,
            scheme=self.scheme,
        )


def _dictionary_counts(tokens, dictionary: NGramDictionary) -> dict[int, int]:
    """Count occurrences of dictionary phrases only, pruning via the prefix set.

    A window extension stops as soon as the current slice is no prefix of any
    dictionary phrase, which keeps matching near-linear on real text.
    """
    prefixes = dictionary.phrase_prefixes()
    index = dictionary.feature_index
    tokens = tuple(tokens)
    size = len(tokens)
    max_n = dictionary.max_n
    counts: dict[int, int] = {}
    for start in range(size):
        longest = min(max_n, size - start)
        for n in range(1, longest + 1):
            phrase = tokens[start : start + n]
            if phrase not in prefixes:
                break
            col = index.get(phrase)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
    return counts


def vectorize(
    token_docs, dictionary: NGramDictionary, scheme: str = "count_x_weight"
) -> sp.csr_matrix:
    """Vectorize pre-tokenized documents; rows in input order."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    token_docs = list(token_docs)
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    order = dictionary.feature_order
    entries = dictionary.entries
    for tokens in token_docs:
        counts = _dictionary_counts(tokens, dictionary)
        for col in sorted(counts):
            value = float(counts[col])
            if scheme == "binary_x_weight":
                value = 1.0
            if scheme != "count":
                value *= entries[order[col]].weight
            if value != 0.0:
                indices.append(col)
                data.append(value)
        indptr.append(len(indices))
    X = sp.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(token_docs), len(order)),
    )
    return X


def vectorize_corpus(
    dataset: LabeledDataset,
    dictionary: NGramDictionary,
    scheme: str = "count_x_weight",
    stoplist: StopList | None = None,
) -> FeatureMatrix:
    """Preprocess + vectorize a labeled dataset into a FeatureMatrix."""
    token_docs = [preprocess(doc.text, stoplist) for doc in dataset.documents]
    X = vectorize(token_docs, dictionary, scheme)
    y = np.asarray([LABEL_TO_INDEX[doc.label] for doc in dataset.documents], dtype=np.int64)
    return FeatureMatrix(X=X, y=y, fingerprint=dictionary.fingerprint, scheme=scheme)


def smote_oversample(fm: FeatureMatrix, k: int = 5, seed: int = 0) -> FeatureMatrix:
    """Grow every minority class to the majority size with SMOTE interpolants.

    Each synthetic row is x_i + lam * (x_nn - x_i) for a random same-class
    member x_i, one of its k nearest same-class neighbours x_nn (Euclidean;
    distance ties resolved toward the lower row index; k shrinks to the class
    size minus one when needed), and lam ~ U[0, 1). Original rows are
    preserved verbatim; synthetic rows append after them in generation order.
    Classes absent from y are skipped; a class with a single member cannot be
    interpolated and raises, naming the class index.
    """
    if fm.y is None:
        raise ValueError("smote_oversample requires labels")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    y = fm.y
    class_ids, counts = np.unique(y, return_counts=True)
    majority = int(counts.max())

    blocks = [fm.X]
    new_labels = [y]
    for class_id, count in zip(class_ids, counts):
        need = majority - int(count)
        if need == 0:
            continue
        if count == 1:
            raise ValueError(
                f"class {int(class_id)} has a single member; "
                "SMOTE needs at least 2 to interpolate"
            )
        rows = np.nonzero(y == class_id)[0]
        dense = fm.X[rows].toarray()
        k_eff = min(k, len(rows) - 1)
        neighbours = _knn_indices(dense, k_eff)
        base = rng.integers(0, len(rows), size=need)
        pick = rng.integers(0, k_eff, size=need)
        lam = rng.random(need)
        synthetic = np.empty((need, dense.shape[1]))
        for j in range(need):
            x_i = dense[base[j]]
            x_nn = dense[neighbours[base[j], pick[j]]]
            synthetic[j] = x_i + lam[j] * (x_nn - x_i)
        blocks.append(sp.csr_matrix(synthetic))
        new_labels.append(np.full(need, class_id, dtype=np.int64))

    X = sp.vstack(blocks, format="csr")
    X.eliminate_zeros()  # interpolation can cancel to exact zeros; keep storage canonical
    return FeatureMatrix(
        X=X, y=np.concatenate(new_labels), fingerprint=fm.fingerprint, scheme=fm.scheme
    )


def _knn_indices(dense: np.ndarray, k: int) -> np.ndarray:
    """Row-wise k nearest neighbour indices, self excluded, ties to lower index."""
    sq = np.sum(dense * dense, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (dense @ dense.T)
    np.fill_diagonal(d2, np.inf)
    # stable argsort => equal distances order by row index
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k]
