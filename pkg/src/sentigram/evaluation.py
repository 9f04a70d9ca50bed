"""Experiment harness: confusion-matrix metrics, the multi-round pipeline
driver, and per-class discriminative n-gram reports.

Metric conventions (fixed class order positive, neutral, negative):

  * precision = diagonal / column sum, recall = diagonal / row sum; a zero
    denominator yields 0 in computations;
  * a class is rendered as "-" (undefined) only when it has zero support
    AND zero predictions — e.g. a class absent from a corpus;
  * weighted F1 averages per-class F1 weighted by true-instance counts,
    excluding zero-support classes.

Round averaging is the arithmetic mean of per-round values over the rounds
where the value is defined; pooled-over-rounds metrics are also reported but
are secondary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .corpus import LABEL_TO_INDEX, LABELS, LabeledDataset, class_distribution, stratified_shuffle_splits
from .features import FeatureMatrix, smote_oversample, vectorize
from .ngrams import NGramDictionary, build_dictionary
from .preprocess import load_stoplist, preprocess


def _as_label_indices(labels) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.dtype.kind in ("U", "S", "O"):
        return np.asarray([LABEL_TO_INDEX[str(v)] for v in arr], dtype=np.int64)
    return arr.astype(np.int64)


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    """3x3 count matrix indexed (true, predicted) in the fixed label order."""
    t = _as_label_indices(y_true)
    p = _as_label_indices(y_pred)
    if len(t) != len(p):
        raise ValueError(f"length mismatch: {len(t)} true vs {len(p)} predicted")
    k = len(LABELS)
    if len(t) and (t.min() < 0 or t.max() >= k or p.min() < 0 or p.max() >= k):
        raise ValueError("label index outside the fixed class set")
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    predicted: int

    @property
    def defined(self) -> bool:
        """False only for a class with zero support and zero predictions."""
        return not (self.support == 0 and self.predicted == 0)


def per_class_prf(cm: np.ndarray) -> dict[str, ClassMetrics]:
    cm = np.asarray(cm)
    out = {}
    for i, label in enumerate(LABELS):
        tp = float(cm[i, i])
        support = int(cm[i].sum())
        predicted = int(cm[:, i].sum())
        precision = tp / predicted if predicted > 0 else 0.0
        recall = tp / support if support > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        out[label] = ClassMetrics(precision, recall, f1, support, predicted)
    return out


def weighted_f1(metrics: Mapping[str, ClassMetrics]) -> float:
    """Support-weighted mean of per-class F1, zero-support classes excluded."""
    total = sum(m.support for m in metrics.values())
    if total == 0:
        raise ValueError("weighted F1 needs at least one class with support")
    return sum(m.support * m.f1 for m in metrics.values() if m.support > 0) / total


def weighted_f1_values(supports, f1_values) -> float:
    """weighted_f1 from bare (support, F1) pairs, for externally given F1s."""
    supports = np.asarray(supports, dtype=float)
    f1_values = np.asarray(f1_values, dtype=float)
    if supports.sum() == 0:
        raise ValueError("weighted F1 needs at least one class with support")
    keep = supports > 0
    return float(np.sum(supports[keep] * f1_values[keep]) / supports.sum())


def weighted_f1_labels(y_true, y_pred) -> float:
    return weighted_f1(per_class_prf(confusion_matrix(y_true, y_pred)))


# ---------------------------------------------------------------------------
# experiment driver


@dataclass
class RunConfig:
    """Everything a run depends on; echoed verbatim into every report."""

    rounds: int = 10
    test_fraction: float = 0.1
    seed: int = 0
    use_stopwords: bool = True
    stoplist_path: str | None = None
    max_n: int = 10
    min_freq: int = 2
    scheme: str = "count_x_weight"
    smote: bool = True
    smote_k: int = 5
    folds: int = 5
    max_candidates: int | None = None
    budget_seconds: float | None = None
    ensemble_size: int = 10
    top_ngrams: int = 10

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class EvalReport:
    payload: dict = field(repr=False)

    def to_dict(self) -> dict:
        return self.payload

    def to_json(self) -> str:
        return json.dumps(self.payload, sort_keys=True, indent=2) + "\n"

    def render_table(self) -> str:
        return render_report(self.payload)


def _metrics_to_dict(metrics: Mapping[str, ClassMetrics]) -> dict:
    return {
        label: {
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "support": m.support,
            "predicted": m.predicted,
            "defined": m.defined,
        }
        for label, m in metrics.items()
    }


def run_experiment(ds: LabeledDataset, cfg: RunConfig) -> EvalReport:
    """Run the full pipeline over stratified rounds and aggregate a report.

    Per round: split, preprocess, build the phrase dictionary on the training
    half only, vectorize both halves in that feature space, optionally
    oversample the training half, search, select and refit an ensemble, and
    score the held-out half. Nothing derived from test rows ever reaches the
    dictionary, the oversampler, or the models.
    """
    from .automl import ensemble_select, fit_final, search  # deferred: automl imports metrics

    stoplist = load_stoplist(cfg.stoplist_path) if cfg.use_stopwords else None
    plan = stratified_shuffle_splits(
        ds, rounds=cfg.rounds, test_fraction=cfg.test_fraction, seed=cfg.seed
    )
    by_id = {doc.doc_id: doc for doc in ds.documents}
    round_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.rounds)

    rounds_out = []
    pooled_true: list[int] = []
    pooled_pred: list[int] = []
    per_round_tops = []
    for r, (train_ids, test_ids) in enumerate(plan.rounds):
        state = round_seeds[r].generate_state(2)
        smote_seed, search_seed = int(state[0]), int(state[1])

        train_docs = [by_id[i] for i in train_ids]
        test_docs = [by_id[i] for i in test_ids]
        train_tokens = [preprocess(d.text, stoplist) for d in train_docs]
        dictionary = build_dictionary(train_tokens, max_n=cfg.max_n, min_freq=cfg.min_freq)

        y_train = np.asarray([LABEL_TO_INDEX[d.label] for d in train_docs], dtype=np.int64)
        fm_train = FeatureMatrix(
            X=vectorize(train_tokens, dictionary, cfg.scheme),
            y=y_train,
            fingerprint=dictionary.fingerprint,
            scheme=cfg.scheme,
        )
        n_train = fm_train.n_documents
        if cfg.smote:
            fm_train = smote_oversample(fm_train, k=cfg.smote_k, seed=smote_seed)

        lb = search(
            fm_train,
            folds=cfg.folds,
            seed=search_seed,
            max_candidates=cfg.max_candidates,
            budget_seconds=cfg.budget_seconds,
        )
        selection = ensemble_select(lb, size=cfg.ensemble_size)
        ensemble = fit_final(selection, fm_train)

        test_tokens = [preprocess(d.text, stoplist) for d in test_docs]
        fm_test = FeatureMatrix(
            X=vectorize(test_tokens, dictionary, cfg.scheme),
            y=np.asarray([LABEL_TO_INDEX[d.label] for d in test_docs], dtype=np.int64),
            fingerprint=dictionary.fingerprint,
            scheme=cfg.scheme,
        )
        y_pred = ensemble.predict(fm_test)
        cm = confusion_matrix(fm_test.y, y_pred)
        metrics = per_class_prf(cm)
        tops = top_ngrams_per_class(ensemble, dictionary, cfg.top_ngrams)
        per_round_tops.append(tops)
        pooled_true.extend(fm_test.y.tolist())
        pooled_pred.extend(y_pred.tolist())

        rounds_out.append(
            {
                "round": r,
                "n_train": n_train,
                "n_train_oversampled": fm_train.n_documents,
                "n_test": fm_test.n_documents,
                "dictionary_size": len(dictionary),
                "dictionary_fingerprint": dictionary.fingerprint,
                "confusion": cm.tolist(),
                "per_class": _metrics_to_dict(metrics),
                "weighted_f1": weighted_f1(metrics),
                "correct": int(np.trace(cm)),
                "candidates_evaluated": len(lb),
                "best_cv_score": lb.best().score,
                "oof_trajectory": selection.oof_trajectory,
                "ensemble": [
                    {
                        "kind": c.kind,
                        "hp": c.hp,
                        "multiplicity": m,
                        "cv_score": next(
                            e.score for e in lb.entries if e.config is c
                        ),
                    }
                    for c, m in selection.members
                ],
                "top_ngrams": tops,
            }
        )

    averaged = _average_rounds(rounds_out)
    pooled_cm = confusion_matrix(pooled_true, pooled_pred)
    pooled_metrics = per_class_prf(pooled_cm)
    payload = {
        "config": cfg.to_dict(),
        "dataset": {
            "name": ds.name,
            "n_documents": len(ds),
            "class_distribution": class_distribution(ds),
        },
        "rounds": rounds_out,
        "averaged": averaged,
        "pooled": {
            "confusion": pooled_cm.tolist(),
            "per_class": _metrics_to_dict(pooled_metrics),
            "weighted_f1": weighted_f1(pooled_metrics),
        },
        "top_ngrams": fuse_rankings(per_round_tops, cfg.top_ngrams),
    }
    return EvalReport(payload=payload)


def _average_rounds(rounds_out: list[dict]) -> dict:
    per_class = {}
    for label in LABELS:
        entries = [r["per_class"][label] for r in rounds_out]
        defined = [e for e in entries if e["defined"]]
        if defined:
            stats = {
                metric: float(np.mean([e[metric] for e in defined]))
                for metric in ("precision", "recall", "f1")
            }
        else:
            stats = {"precision": None, "recall": None, "f1": None}
        stats["support_mean"] = float(np.mean([e["support"] for e in entries]))
        stats["rounds_defined"] = len(defined)
        per_class[label] = stats
    correct = [r["correct"] for r in rounds_out]
    n_test = [r["n_test"] for r in rounds_out]
    return {
        "per_class": per_class,
        "weighted_f1_mean": float(np.mean([r["weighted_f1"] for r in rounds_out])),
        "correct_total": int(np.sum(correct)),
        "correct_mean": float(np.mean(correct)),
        "n_test_total": int(np.sum(n_test)),
        "dictionary_size_mean": float(np.mean([r["dictionary_size"] for r in rounds_out])),
    }


# ---------------------------------------------------------------------------
# discriminative n-grams


def top_ngrams_per_class(target, dictionary: NGramDictionary, k: int) -> dict[str, list[str]]:
    """Top-k most class-discriminative dictionary phrases per class.

    Scoring by kind: naive Bayes ranks log P(g|c) − max_{c'≠c} log P(g|c');
    linear models rank the weight margin W[c,g] − max_{c'≠c} W[c',g]; forests
    rank permutation importance, each feature attributed to the majority true
    class among its nonzero training rows. Ensembles fuse member rankings by
    multiplicity-weighted Borda points. ``target`` is a trained model or
    ensemble fitted against ``dictionary``.
    """
    F = len(dictionary)
    members = getattr(target, "members", None)
    if members is None:
        weighted = [(target, 1)]
    else:
        weighted = [(m.model, m.multiplicity) for m in members]
    fingerprint = getattr(target, "fingerprint", None)
    if fingerprint and fingerprint != dictionary.fingerprint:
        raise ValueError("model was trained against a different dictionary")

    totals: dict[int, np.ndarray] = {}
    for model, mult in weighted:
        for class_id, points in _rank_points(model, F).items():
            bucket = totals.setdefault(class_id, np.zeros(F))
            bucket += mult * points
    phrases = [" ".join(p) for p in dictionary.feature_order]
    out: dict[str, list[str]] = {}
    for i, label in enumerate(LABELS):
        points = totals.get(i)
        if points is None or k <= 0:
            out[label] = []
            continue
        ranked = sorted(
            (j for j in range(F) if points[j] > 0), key=lambda j: (-points[j], phrases[j])
        )
        out[label] = [phrases[j] for j in ranked[:k]]
    return out


def _rank_points(model, F: int) -> dict[int, np.ndarray]:
    """Borda points per observed class: the top-ranked feature earns F points."""
    if getattr(model, "feature_log_prob_", None) is not None:
        margins = _one_vs_best_rest(model.feature_log_prob_)
    elif getattr(model, "W_", None) is not None:
        margins = _one_vs_best_rest(model.W_)
    elif model.kind == "random_forest" and hasattr(model, "trees_"):
        return _forest_rank_points(model, F)
    else:  # constant model: no discrimination signal
        return {}
    out = {}
    for i, class_id in enumerate(model.classes_):
        order = np.argsort(-margins[i], kind="stable")
        points = np.empty(F)
        points[order] = np.arange(F, 0, -1)
        out[int(class_id)] = points
    return out


def _one_vs_best_rest(M: np.ndarray) -> np.ndarray:
    """Per row i: M[i] − max over other rows (the one-vs-strongest-rival margin)."""
    k = M.shape[0]
    out = np.empty_like(M)
    for i in range(k):
        others = np.delete(np.arange(k), i)
        out[i] = M[i] - M[others].max(axis=0)
    return out


def _forest_rank_points(model, F: int) -> dict[int, np.ndarray]:
    importance = model.permutation_importance(seed=0)
    X, y = model._train_X, model._train_y
    Xc = X.tocsc() if sp.issparse(X) else None
    by_class: dict[int, list[tuple[float, int]]] = {}
    for feat in np.nonzero(importance > 0)[0]:
        if Xc is not None:
            rows = Xc.indices[Xc.indptr[feat] : Xc.indptr[feat + 1]]
        else:
            rows = np.nonzero(X[:, feat])[0]
        if len(rows) == 0:
            continue
        hit_class = int(np.argmax(np.bincount(y[rows])))
        by_class.setdefault(hit_class, []).append((float(importance[feat]), int(feat)))
    out = {}
    for class_id, pairs in by_class.items():
        pairs.sort(key=lambda t: (-t[0], t[1]))
        points = np.zeros(F)
        for pos, (_, feat) in enumerate(pairs):
            points[feat] = F - pos
        out[class_id] = points
    return out


def fuse_rankings(rankings: list[dict[str, list[str]]], k: int) -> dict[str, list[str]]:
    """Borda-fuse several per-class top lists (equal weights, ties by phrase)."""
    out: dict[str, list[str]] = {}
    for label in LABELS:
        points: dict[str, float] = {}
        for ranking in rankings:
            top = ranking.get(label, [])
            for pos, phrase in enumerate(top):
                points[phrase] = points.get(phrase, 0.0) + (len(top) - pos)
        ranked = sorted(points, key=lambda ph: (-points[ph], ph))
        out[label] = ranked[:k] if k >= 0 else ranked
    return out


# ---------------------------------------------------------------------------
# rendering


def _fmt(value, width=9) -> str:
    if value is None:
        return "-".rjust(width)
    return f"{value:.3f}".rjust(width)


def render_report(d: dict) -> str:
    """Human-readable table for a report dict (as produced by run_experiment)."""
    cfg = d["config"]
    ds = d["dataset"]
    avg = d["averaged"]
    dist = ds["class_distribution"]
    lines = []
    lines.append(
        f"dataset: {ds['name']}  ({ds['n_documents']} documents; "
        + " / ".join(f"{label} {dist[label]}" for label in LABELS)
        + ")"
    )
    budget = (
        f"max candidates {cfg['max_candidates']}"
        if cfg.get("max_candidates") is not None
        else f"budget {cfg.get('budget_seconds') or 60.0:g}s"
    )
    lines.append(
        f"rounds: {cfg['rounds']}  test fraction: {cfg['test_fraction']:g}  "
        f"seed: {cfg['seed']}  search: {budget}, {cfg['folds']} folds  "
        f"ensemble: {cfg['ensemble_size']}  smote: {'on' if cfg['smote'] else 'off'}"
    )
    lines.append(f"dictionary: {avg['dictionary_size_mean']:.1f} phrases/round (mean)")
    lines.append("")
    lines.append("per-class metrics, averaged over rounds (- = class absent):")
    header = f"  {'class':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
    lines.append(header)
    for label in LABELS:
        row = avg["per_class"][label]
        lines.append(
            f"  {label:<10}"
            f"{_fmt(row['precision'], 10)}{_fmt(row['recall'], 10)}{_fmt(row['f1'], 10)}"
            f"{row['support_mean']:>10.1f}"
        )
    lines.append("")
    lines.append(f"weighted F1 (mean over rounds): {avg['weighted_f1_mean']:.3f}")
    lines.append(
        f"correct predictions: {avg['correct_total']} of {avg['n_test_total']} "
        f"pooled over rounds ({avg['correct_mean']:.1f}/round)"
    )
    lines.append(f"weighted F1 (pooled, secondary): {d['pooled']['weighted_f1']:.3f}")
    lines.append("")
    lines.append("per round:")
    lines.append(f"  {'round':>5}{'test':>6}{'correct':>9}{'wF1':>8}{'best cv':>9}")
    for r in d["rounds"]:
        lines.append(
            f"  {r['round']:>5}{r['n_test']:>6}{r['correct']:>9}"
            f"{r['weighted_f1']:>8.3f}{r['best_cv_score']:>9.3f}"
        )
    lines.append("")
    lines.append("top discriminative n-grams (fused over rounds):")
    for label in LABELS:
        tops = d["top_ngrams"].get(label, [])
        lines.append(f"  {label}: " + (" | ".join(tops) if tops else "-"))
    return "\n".join(lines) + "\n"
