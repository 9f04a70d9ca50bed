"""Budget-limited random model search plus greedy forward ensemble selection.

The search evaluates a deterministic candidate sequence (given a seed): first
one default-hyperparameter candidate per learner kind, then uniformly sampled
(kind, hyperparameters) draws. Each candidate is scored by stratified k-fold
cross-validation inside the training matrix; the pooled out-of-fold (oof)
weighted F1 is the selection metric, and the per-row oof class scores are
archived so ensembles can be evaluated without retraining.

Budgets come in two forms: ``max_candidates`` caps the candidate count and is
exactly reproducible; ``budget_seconds`` stops after a wall-clock allowance
(the candidate sequence is still deterministic, only the cutoff point moves).
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import LABELS
from .evaluation import weighted_f1_labels
from .features import FeatureMatrix
from .learners import (
    KINDS,
    TrainedModel,
    default_hp,
    model_from_dict,
    model_to_dict,
    sample_hp,
    train,
    validate_hp,
)

_ENSEMBLE_FORMAT = "sentigram-ensemble/1"


@dataclass(frozen=True)
class CandidateConfig:
    kind: str
    hp: dict = field(hash=False)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hp", validate_hp(self.kind, self.hp))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hp": self.hp, "seed": self.seed}


def fold_assignments(y: np.ndarray, folds: int, seed: int = 0) -> np.ndarray:
    """Stratified fold ids: each class's rows are shuffled and dealt round-robin.

    Depends only on the label sequence, fold count, and seed — not on feature
    values — so every candidate in a search shares the same partition.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    rng = np.random.default_rng(seed)
    assign = np.empty(len(y), dtype=np.int64)
    for class_id in np.unique(y):
        rows = np.nonzero(y == class_id)[0]
        rows = rows[rng.permutation(len(rows))]
        assign[rows] = np.arange(len(rows)) % folds
    return assign


def evaluate_candidate(
    config: CandidateConfig, fm: FeatureMatrix, folds: int = 5, fold_seed: int = 0
) -> tuple[float, np.ndarray]:
    """Cross-validate one candidate; returns (pooled oof weighted F1, archive).

    The archive is an (n_rows, 3) array of class scores in the fixed global
    label order; classes a fold's model never observed keep score 0. Each row
    is filled exactly once, by the fold that held it out.
    """
    if fm.y is None:
        raise ValueError("evaluate_candidate requires labels")
    y = fm.y
    if len(np.unique(y)) == 1:
        warnings.warn(
            "training data contains a single class; cross-validation is degenerate",
            RuntimeWarning,
            stacklevel=2,
        )
    assign = fold_assignments(y, folds, fold_seed)
    archive = np.zeros((len(y), len(LABELS)))
    for f in range(folds):
        holdout = np.nonzero(assign == f)[0]
        if len(holdout) == 0:
            continue
        rest = np.nonzero(assign != f)[0]
        model = train(config.kind, config.hp, fm.subset(rest), seed=config.seed)
        scores = model.predict_scores(fm.subset(holdout))
        archive[np.ix_(holdout, model.classes_)] = scores
    y_hat = np.argmax(archive, axis=1)
    return weighted_f1_labels(y, y_hat), archive


@dataclass
class LeaderboardEntry:
    config: CandidateConfig
    score: float
    oof: np.ndarray  # (n_rows, 3) archive from evaluate_candidate
    index: int  # position in the candidate sequence (tie-break key)


@dataclass
class Leaderboard:
    """Candidates sorted by descending oof score (ties: earlier candidate)."""

    entries: list[LeaderboardEntry]
    y: np.ndarray
    fingerprint: str
    folds: int

    def __len__(self) -> int:
        return len(self.entries)

    def best(self) -> LeaderboardEntry:
        return self.entries[0]


def search(
    fm: FeatureMatrix,
    folds: int = 5,
    seed: int = 0,
    max_candidates: int | None = None,
    budget_seconds: float | None = None,
) -> Leaderboard:
    """Random search over the portfolio's configuration space.

    Exactly one budget applies: a candidate-count cap (reproducible to the
    byte) or a wall-clock allowance (default 60 s when neither is given).
    The first four candidates are the per-kind defaults; at least one
    candidate always runs, and finishing with fewer than the four defaults
    emits a warning.
    """
    if max_candidates is not None and budget_seconds is not None:
        raise ValueError("set max_candidates or budget_seconds, not both")
    if max_candidates is None and budget_seconds is None:
        budget_seconds = 60.0
    if max_candidates is not None and max_candidates < 1:
        raise ValueError("max_candidates must be >= 1")
    if budget_seconds is not None and budget_seconds <= 0:
        raise ValueError("budget_seconds must be positive")

    rng = np.random.default_rng(seed)
    started = time.monotonic()
    entries: list[LeaderboardEntry] = []
    index = 0
    while True:
        if max_candidates is not None and index >= max_candidates:
            break
        if (
            budget_seconds is not None
            and index > 0
            and time.monotonic() - started >= budget_seconds
        ):
            break
        if index < len(KINDS):
            kind = KINDS[index]
            hp = default_hp(kind)
        else:
            kind = KINDS[int(rng.integers(len(KINDS)))]
            hp = sample_hp(kind, rng)
        config = CandidateConfig(kind=kind, hp=hp, seed=int(rng.integers(2**31 - 1)))
        score, oof = evaluate_candidate(config, fm, folds=folds, fold_seed=seed)
        entries.append(LeaderboardEntry(config=config, score=score, oof=oof, index=index))
        index += 1
    if len(entries) < len(KINDS):
        warnings.warn(
            f"budget allowed only {len(entries)} of the {len(KINDS)} default candidates; "
            "leaderboard is partial",
            RuntimeWarning,
            stacklevel=2,
        )
    entries.sort(key=lambda e: (-e.score, e.index))
    return Leaderboard(entries=entries, y=fm.y, fingerprint=fm.fingerprint, folds=folds)


def export_leaderboard(lb: Leaderboard, path) -> None:
    lines = ["rank\tkind\thp\tscore"]
    for rank, e in enumerate(lb.entries, start=1):
        hp_json = json.dumps(e.config.hp, sort_keys=True)
        lines.append(f"{rank}\t{e.config.kind}\t{hp_json}\t{e.score:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class EnsembleSelection:
    """Outcome of greedy selection: configs with multiplicities, pre-refit."""

    members: list[tuple[CandidateConfig, int]]
    oof_trajectory: list[float]
    fingerprint: str

    @property
    def oof_score(self) -> float:
        return self.oof_trajectory[-1]


def ensemble_select(lb: Leaderboard, size: int = 10) -> EnsembleSelection:
    """Greedy forward selection with replacement over the leaderboard.

    Each of ``size`` steps adds the entry whose inclusion maximizes the
    weighted F1 of the multiplicity-weighted mean of oof score archives
    (ties go to the earlier leaderboard rank). The same entry may be added
    repeatedly; multiplicities count the additions.
    """
    if not lb.entries:
        raise ValueError("leaderboard is empty")
    if size < 1:
        raise ValueError("ensemble size must be >= 1")
    running = np.zeros_like(lb.entries[0].oof)
    multiplicity = [0] * len(lb.entries)
    trajectory: list[float] = []
    for _ in range(size):
        best_pos, best_score = None, -1.0
        for pos, entry in enumerate(lb.entries):
            candidate = running + entry.oof
            score = weighted_f1_labels(lb.y, np.argmax(candidate, axis=1))
            if score > best_score:
                best_pos, best_score = pos, score
        running += lb.entries[best_pos].oof
        multiplicity[best_pos] += 1
        trajectory.append(best_score)
    members = [
        (lb.entries[pos].config, mult) for pos, mult in enumerate(multiplicity) if mult > 0
    ]
    return EnsembleSelection(
        members=members, oof_trajectory=trajectory, fingerprint=lb.fingerprint
    )


@dataclass
class EnsembleMember:
    config: CandidateConfig
    model: TrainedModel
    multiplicity: int


@dataclass
class TrainedEnsemble:
    """Refit ensemble: argmax of the multiplicity-weighted mean of class scores."""

    members: list[EnsembleMember]
    fingerprint: str
    oof_trajectory: list[float] | None = None
    training_matrix: FeatureMatrix | None = None  # kept for importance reports

    def predict_scores(self, rows) -> np.ndarray:
        n = rows.n_documents if isinstance(rows, FeatureMatrix) else rows.shape[0]
        total = np.zeros((n, len(LABELS)))
        weight = 0
        for member in self.members:
            scores = member.model.predict_scores(rows)
            total[:, member.model.classes_] += member.multiplicity * scores
            weight += member.multiplicity
        return total / weight

    def predict(self, rows) -> np.ndarray:
        return np.argmax(self.predict_scores(rows), axis=1)

    def observed_classes(self) -> np.ndarray:
        observed = sorted(set().union(*(set(m.model.classes_.tolist()) for m in self.members)))
        return np.asarray(observed, dtype=np.int64)


def fit_final(selection: EnsembleSelection, fm: FeatureMatrix) -> TrainedEnsemble:
    """Retrain each selected config on the full training matrix."""
    if fm.fingerprint != selection.fingerprint:
        raise ValueError("refit matrix does not match the matrix the ensemble was selected on")
    members = [
        EnsembleMember(config=c, model=train(c.kind, c.hp, fm, seed=c.seed), multiplicity=m)
        for c, m in selection.members
    ]
    return TrainedEnsemble(
        members=members,
        fingerprint=fm.fingerprint,
        oof_trajectory=list(selection.oof_trajectory),
        training_matrix=fm,
    )


def ensemble_to_dict(ensemble: TrainedEnsemble) -> dict:
    return {
        "format": _ENSEMBLE_FORMAT,
        "fingerprint": ensemble.fingerprint,
        "oof_trajectory": ensemble.oof_trajectory,
        "members": [
            {"multiplicity": m.multiplicity, "model": model_to_dict(m.model)}
            for m in ensemble.members
        ],
    }


def save_ensemble(ensemble: TrainedEnsemble, path) -> None:
    Path(path).write_text(
        json.dumps(ensemble_to_dict(ensemble), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_ensemble(path) -> TrainedEnsemble:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _ENSEMBLE_FORMAT:
        raise ValueError(f"not an ensemble container (format={payload.get('format')!r})")
    members = []
    for spec in payload["members"]:
        model = model_from_dict(spec["model"])
        members.append(
            EnsembleMember(
                config=CandidateConfig(kind=model.kind, hp=model.hp, seed=model.seed),
                model=model,
                multiplicity=spec["multiplicity"],
            )
        )
    return TrainedEnsemble(
        members=members,
        fingerprint=payload["fingerprint"],
        oof_trajectory=payload.get("oof_trajectory"),
    )
