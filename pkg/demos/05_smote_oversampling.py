"""SMOTE oversampling: balancing classes with synthetic interpolants.

Minority classes grow to the majority size by sampling x + lam * (nn - x)
between a minority row and one of its k nearest same-class neighbours
(lam ~ U[0,1)). Originals are kept verbatim; synthetic rows can never leave
the coordinate-wise bounding box of their class.
"""

from collections import Counter

import numpy as np
import scipy.sparse as sp

from sentigram.features import FeatureMatrix, smote_oversample


def main() -> None:
    rng = np.random.default_rng(11)
    counts = {0: 20, 1: 6, 2: 3}
    rows, labels = [], []
    centers = {0: (0.0, 0.0), 1: (6.0, 6.0), 2: (-5.0, 4.0)}
    for label, n in counts.items():
        cx, cy = centers[label]
        rows.append(np.column_stack([rng.normal(cx, 0.8, n), rng.normal(cy, 0.8, n)]))
        labels += [label] * n
    X = np.vstack(rows)
    y = np.asarray(labels)

    fm = FeatureMatrix(
        X=sp.csr_matrix(X), y=y, fingerprint="demo", scheme="count_x_weight"
    )
    print("class counts before:", dict(Counter(y.tolist())))

    out = smote_oversample(fm, k=3, seed=29)
    print("class counts after: ", dict(sorted(Counter(out.y.tolist()).items())))
    print()

    n = len(y)
    dense = out.X.toarray()
    print(f"original rows preserved byte-for-byte: {np.array_equal(dense[:n], X)}")
    print()

    for label in (1, 2):
        box_lo = X[y == label].min(axis=0)
        box_hi = X[y == label].max(axis=0)
        synth = dense[n:][out.y[n:] == label]
        inside = np.all((synth >= box_lo) & (synth <= box_hi))
        print(f"class {label}: {len(synth)} synthetic points, all inside the class")
        print(
            f"  bounding box [{box_lo[0]:+.2f}, {box_hi[0]:+.2f}] x "
            f"[{box_lo[1]:+.2f}, {box_hi[1]:+.2f}]: {inside}"
        )
        for point in synth[:2]:
            print(f"  e.g. ({point[0]:+.3f}, {point[1]:+.3f})")


if __name__ == "__main__":
    main()
