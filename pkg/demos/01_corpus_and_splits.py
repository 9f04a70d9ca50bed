"""Loading labeled text and planning stratified evaluation rounds.

Every experiment starts from a CSV with a ``text,label`` header and the
closed label set {positive, neutral, negative}. This script builds a small
corpus file, loads it, and shows how the multi-round split planner keeps
class proportions intact in every round.
"""

import csv
import tempfile
from collections import Counter
from pathlib import Path

from sentigram.corpus import (
    class_distribution,
    export_split_plan,
    load_dataset,
    stratified_shuffle_splits,
)

ROWS = [
    ("works like a charm, thanks!", "positive"),
    ("love the new dark mode", "positive"),
    ("really solid release", "positive"),
    ("great support, fixed in a day", "positive"),
    ("nice and fast on my phone", "positive"),
    ("best update so far", "positive"),
    ("how do I export my data?", "neutral"),
    ("which version supports python 3.10?", "neutral"),
    ("is there a keyboard shortcut for this", "neutral"),
    ("see the migration guide for details", "neutral"),
    ("crashes every time I open a file", "negative"),
    ("terrible battery drain since the update", "negative"),
    ("login is broken again", "negative"),
    ("lost all my settings, very annoying", "negative"),
]


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp) / "feedback.csv"
        with open(data, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["text", "label"])
            writer.writerows(ROWS)

        ds = load_dataset(data)
        print(f"loaded {len(ds)} documents from {data.name}")
        print(f"class distribution: {class_distribution(ds)}")
        print()

        plan = stratified_shuffle_splits(ds, rounds=4, test_fraction=0.25, seed=7)
        by_id = {doc.doc_id: doc.label for doc in ds.documents}
        print("4 rounds at a 25% held-out share; per-round test class counts:")
        for r, (train_ids, test_ids) in enumerate(plan.rounds):
            counts = Counter(by_id[i] for i in test_ids)
            print(
                f"  round {r}: {len(train_ids)} train / {len(test_ids)} test  "
                f"{dict(sorted(counts.items()))}"
            )
        print()
        print("the same seed always reproduces the same plan:")
        again = stratified_shuffle_splits(ds, rounds=4, test_fraction=0.25, seed=7)
        print(f"  identical plans: {plan.rounds == again.rounds}")

        out = Path(tmp) / "splits.csv"
        export_split_plan(plan, out)
        head = out.read_text(encoding="utf-8").splitlines()[:4]
        print()
        print(f"plans export to CSV for external tooling ({out.name}):")
        for line in head:
            print(f"  {line}")


if __name__ == "__main__":
    main()
