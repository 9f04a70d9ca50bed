"""The complete evaluation protocol on a synthetic corpus, end to end.

Each round draws a fresh stratified split, rebuilds the phrase dictionary
from the training half only (nothing from the held-out half leaks into
features, oversampling, or models), searches the portfolio, refits a greedy
ensemble, and scores the held-out half. The report aggregates per-class
precision/recall/F1 over rounds and fuses the per-round discriminative
phrase rankings.
"""

import numpy as np

from sentigram.corpus import LABELS, LabeledDataset, LabeledDocument
from sentigram.evaluation import RunConfig, run_experiment

PLANTED = {"positive": "stellar", "neutral": "routine", "negative": "dreadful"}
NOISE = (
    "app", "phone", "screen", "menu", "button", "page", "update",
    "account", "photo", "file", "list", "view", "window", "search",
)


def planted_dataset(counts=(40, 30, 20), seed=23) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    documents = []
    for label, n in zip(LABELS, counts):
        for _ in range(n):
            tokens = list(rng.choice(NOISE, size=5))
            tokens.insert(int(rng.integers(0, 6)), PLANTED[label])
            documents.append(
                LabeledDocument(doc_id=len(documents), text=" ".join(tokens), label=label)
            )
    return LabeledDataset(name="planted-demo", documents=tuple(documents))


def main() -> None:
    ds = planted_dataset()
    cfg = RunConfig(
        rounds=3,
        test_fraction=0.2,
        seed=41,
        use_stopwords=False,
        max_n=2,
        smote=True,
        folds=3,
        max_candidates=6,
        ensemble_size=4,
        top_ngrams=4,
    )
    print(
        f"dataset: {len(ds)} documents, labels decided by one planted token per class "
        f"({', '.join(PLANTED.values())})"
    )
    print("running 3 rounds x 6 candidates ...")
    print()

    report = run_experiment(ds, cfg)
    print(report.render_table())

    fused = report.payload["top_ngrams"]
    recovered = all(fused[label][0] == PLANTED[label] for label in LABELS)
    print(f"planted token ranked #1 for every class: {recovered}")


if __name__ == "__main__":
    main()
