"""End-to-end training experiment on a feature dataset.

Order of operations is fixed: select rows for the task, split train/test,
fit the z-score scaler on the training rows only, oversample the training
rows with SMOTE, grid-search each model with k-fold CV (SMOTE applied
inside every training fold), refit the best point on the full training
part and evaluate on the held-out rows.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .balance import SmoteConfig, smote
from .evaluation import classification_report, mse, r_squared
from .features import Dataset
from .models import (
    CLASSIFIERS,
    DEFAULT_GRIDS,
    FAMILIES,
    REGRESSORS,
    ModelSpec,
    SplitSpec,
    grid_search,
    kfold,
    make_model,
    stratified_kfold,
    train_test_indices,
    zscore_apply,
    zscore_fit,
)
from .models.tree import DecisionTree, RandomForest
from .sentiment import Polarity

logger = logging.getLogger(__name__)

TASKS = ("binary", "three-class", "regression")


class ExperimentError(ValueError):
    """The data cannot support the requested experiment."""


def derive_seed(master: int, *keys: int) -> int:
    return int(np.random.SeedSequence([master, *keys]).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    case_id: int = 4
    variant: str = "A"
    task: str = "binary"
    models: list[str] = field(default_factory=lambda: ["random_forest"])
    grids: dict[str, dict[str, list]] = field(default_factory=dict)
    model_params: dict[str, dict] = field(default_factory=dict)
    train_fraction: float = 0.8
    cv_folds: int = 10
    smote: bool = True
    k_neighbors: int = 5
    seed: int = 0
    features_path: str | None = None
    corpus_path: str | None = None
    lexicon_path: str | None = None
    output_dir: str | None = None

    def validate(self) -> None:
        if self.case_id not in (1, 2, 3, 4):
            raise ValueError("case_id must be 1..4")
        if self.variant not in ("A", "B"):
            raise ValueError("variant must be A or B")
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {', '.join(TASKS)}")
        if not self.models:
            raise ValueError("at least one model is required")
        allowed = REGRESSORS if self.task == "regression" else CLASSIFIERS
        for m in self.models:
            if m not in FAMILIES:
                raise ValueError(f"unknown model {m!r}")
            if m not in allowed:
                raise ValueError(f"model {m!r} does not fit the {self.task} task")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        SplitSpec(self.train_fraction)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class TrainedModel:
    family: str
    model: object
    params: dict


@dataclass
class ExperimentResult:
    report: dict
    models: list[TrainedModel]
    scaler: object
    feature_names: tuple[str, ...]


def select_task_rows(dataset: Dataset, task: str):
    """Rows and targets used by ``task``; binary drops Neutral articles."""
    labels = np.array([Polarity(label).value for label in dataset.labels], dtype=object)
    if task == "regression":
        return dataset.X, dataset.target_scores.astype(float), np.arange(len(dataset))
    keep = np.arange(len(dataset))
    if task == "binary":
        keep = np.flatnonzero(labels != Polarity.NEUTRAL.value)
    return dataset.X[keep], labels[keep].astype(str), keep


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def run_experiment(dataset: Dataset, config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    config.validate()
    classify = config.task != "regression"
    X, y, _ = select_task_rows(dataset, config.task)
    if len(y) < 2:
        raise ExperimentError(f"{len(y)} usable rows for the {config.task} task")
    if classify:
        classes = np.unique(y)
        if len(classes) < 2:
            raise ExperimentError(f"only one class ({classes[0]}) present; stratified training is impossible")

    split = SplitSpec(config.train_fraction, derive_seed(config.seed, 1), stratified=classify)
    try:
        tr, te = train_test_indices(y, split)
    except ValueError as exc:
        raise ExperimentError(str(exc)) from None
    scaler = zscore_fit(X[tr])
    X_tr, X_te = zscore_apply(X[tr], scaler), zscore_apply(X[te], scaler)
    y_tr, y_te = y[tr], y[te]

    smote_seed = derive_seed(config.seed, 2)
    use_smote = classify and config.smote
    if use_smote:
        X_fit, y_fit = smote(X_tr, y_tr, SmoteConfig(config.k_neighbors, smote_seed))
    else:
        X_fit, y_fit = X_tr, y_tr

    if config.cv_folds > len(y_tr):
        raise ExperimentError(f"{config.cv_folds}-fold CV needs at least {config.cv_folds} training rows")
    cv_seed = derive_seed(config.seed, 3)
    folds = stratified_kfold(y_tr, config.cv_folds, cv_seed) if classify else kfold(len(y_tr), config.cv_folds, cv_seed)

    def resample(Xf, yf, fold):
        return smote(Xf, yf, SmoteConfig(config.k_neighbors, derive_seed(smote_seed, fold + 1)))

    report_models = {}
    trained = []
    for family in config.models:
        base = dict(config.model_params.get(family, {}))
        if family in ("random_forest", "random_forest_regressor"):
            base.setdefault("seed", derive_seed(config.seed, 10 + FAMILIES.index(family)))
        grid = config.grids.get(family, DEFAULT_GRIDS[family])

        def build(params, _family=family, _base=base):
            return make_model(ModelSpec(_family, {**_base, **params}))

        entry: dict = {}
        if grid:
            result = grid_search(
                build, grid, X_tr, y_tr, folds,
                scoring="accuracy" if classify else "r2",
                resample=resample if use_smote else None,
                workers=workers,
            )
            best = result.best_params
            entry["cv_best_mean_score"] = result.best_score
            entry["cv_table"] = result.table
        else:
            best = {}
        params = {**base, **best}
        model = make_model(ModelSpec(family, params), n_jobs=workers).fit(X_fit, y_fit)
        pred = model.predict(X_te)
        entry["params"] = params
        if classify:
            entry["test"] = classification_report(y_te, pred, list(classes)).to_dict()
        else:
            entry["test"] = {"mse": mse(y_te, pred), "r_squared": r_squared(y_te, pred)}
        if isinstance(model, (DecisionTree, RandomForest)):
            entry["feature_importances"] = dict(zip(dataset.feature_names, model.feature_importances_.tolist()))
        report_models[family] = entry
        trained.append(TrainedModel(family, model, params))
        logger.info("%s: %s", family, entry["test"])

    distribution = None
    if classify:
        values, counts = np.unique(y, return_counts=True)
        distribution = dict(zip(values.tolist(), counts.tolist()))
    report = {
        "config": config.to_dict(),
        "feature_names": list(dataset.feature_names),
        "n_rows": int(len(y)),
        "n_train": int(len(tr)),
        "n_train_resampled": int(len(y_fit)),
        "n_test": int(len(te)),
        "class_distribution": distribution,
        "scaler": scaler.to_dict(),
        "models": report_models,
    }
    return ExperimentResult(_jsonable(report), trained, scaler, tuple(dataset.feature_names))
