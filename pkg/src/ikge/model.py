"""Gaussian embeddings of knowledge-graph entities and relations.

Every entity and relation is a diagonal Gaussian: the mean carries the
semantics, the covariance diagonal the uncertainty. Two triple scores are
provided, both "higher is better":

* expected likelihood:  f = -sum(mu^2 / c) - sum(ln c)  with
  mu = mu_h - mu_r - mu_t and c = c_h + c_r + c_t elementwise. This is
  twice the log Gaussian-product integral plus the constant d*ln(2*pi).
* negative KL divergence between the entity-pair Gaussian
  N(mu_h - mu_t, c_h + c_t) and the relation Gaussian N(mu_r, c_r).

Gradients are analytic; constraints keep mean norms at most 1 and clamp
covariance diagonals into [c_min, c_max].
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .rdf import Term, Vocab, term_from_text, term_to_text

EXPECTED_LIKELIHOOD = "expected_likelihood"
KL_DIVERGENCE = "kl_divergence"
SCORE_KINDS = (EXPECTED_LIKELIHOOD, KL_DIVERGENCE)

DEFAULT_DIM = 50
DEFAULT_C_MIN = 0.05
DEFAULT_C_MAX = 5.0

MODEL_FORMAT_VERSION = 1

# Norm slack: rescaling is skipped below it so that re-applying the
# constraint is an exact no-op despite float rounding.
_NORM_TOL = 1e-9

TripleScore = float


@dataclass
class GaussianParams:
    """Mean and covariance diagonal of one embedded element."""

    mean: np.ndarray
    cov_diag: np.ndarray


@dataclass
class ScoreGradients:
    """Analytic partials of a triple score w.r.t. all six parameter blocks."""

    mean_h: np.ndarray
    mean_r: np.ndarray
    mean_t: np.ndarray
    cov_h: np.ndarray
    cov_r: np.ndarray
    cov_t: np.ndarray


class Kg2eModel:
    """Embedding table pair plus scoring configuration.

    Parameter arrays are float64 with shape (count, dim). ``thresholds``
    is an optional per-relation score threshold table filled in by the
    evaluation layer; ``train_config`` keeps the training configuration
    document for reproducible downstream splits.
    """

    def __init__(
        self,
        vocab: Vocab,
        dim: int,
        entity_means: np.ndarray,
        entity_covs: np.ndarray,
        relation_means: np.ndarray,
        relation_covs: np.ndarray,
        c_min: float = DEFAULT_C_MIN,
        c_max: float = DEFAULT_C_MAX,
        score_kind: str = KL_DIVERGENCE,
        thresholds=None,
        train_config: dict | None = None,
    ):
        if score_kind not in SCORE_KINDS:
            raise ValueError(f"unknown score kind {score_kind!r}")
        if not 0 < c_min < c_max:
            raise ValueError("covariance bounds must satisfy 0 < c_min < c_max")
        self.vocab = vocab
        self.dim = int(dim)
        self.entity_means = np.asarray(entity_means, dtype=np.float64)
        self.entity_covs = np.asarray(entity_covs, dtype=np.float64)
        self.relation_means = np.asarray(relation_means, dtype=np.float64)
        self.relation_covs = np.asarray(relation_covs, dtype=np.float64)
        self.c_min = float(c_min)
        self.c_max = float(c_max)
        self.score_kind = score_kind
        self.thresholds = thresholds
        self.train_config = train_config
        expected = {
            "entity_means": (vocab.n_entities, dim),
            "entity_covs": (vocab.n_entities, dim),
            "relation_means": (vocab.n_relations, dim),
            "relation_covs": (vocab.n_relations, dim),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")

    def entity_params(self, index: int) -> GaussianParams:
        self._check_entity(index)
        return GaussianParams(self.entity_means[index], self.entity_covs[index])

    def relation_params(self, index: int) -> GaussianParams:
        self._check_relation(index)
        return GaussianParams(self.relation_means[index], self.relation_covs[index])

    def _check_entity(self, index: int) -> None:
        if not 0 <= index < self.vocab.n_entities:
            raise IndexError(f"entity index {index} out of range")

    def _check_relation(self, index: int) -> None:
        if not 0 <= index < self.vocab.n_relations:
            raise IndexError(f"relation index {index} out of range")

    def copy(self) -> "Kg2eModel":
        return Kg2eModel(
            self.vocab,
            self.dim,
            self.entity_means.copy(),
            self.entity_covs.copy(),
            self.relation_means.copy(),
            self.relation_covs.copy(),
            c_min=self.c_min,
            c_max=self.c_max,
            score_kind=self.score_kind,
            thresholds=self.thresholds,
            train_config=self.train_config,
        )


def init_model(
    vocab: Vocab,
    dim: int = DEFAULT_DIM,
    seed: int = 0,
    c_min: float = DEFAULT_C_MIN,
    c_max: float = DEFAULT_C_MAX,
    score_kind: str = KL_DIVERGENCE,
) -> Kg2eModel:
    """Seeded initialization: means uniform in +-6/sqrt(dim), covariances 1.

    Entity rows are drawn before relation rows, so a fixed seed yields
    bitwise-identical parameter arrays.
    """
    if vocab.n_entities == 0 or vocab.n_relations == 0:
        raise ValueError("vocabulary must contain at least one entity and one relation")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = np.random.default_rng(seed)
    bound = 6.0 / np.sqrt(dim)
    model = Kg2eModel(
        vocab,
        dim,
        rng.uniform(-bound, bound, (vocab.n_entities, dim)),
        np.ones((vocab.n_entities, dim)),
        rng.uniform(-bound, bound, (vocab.n_relations, dim)),
        np.ones((vocab.n_relations, dim)),
        c_min=c_min,
        c_max=c_max,
        score_kind=score_kind,
    )
    apply_constraints(model)
    return model


def _el_scores(mh, ch, mr, cr, mt, ct) -> np.ndarray:
    mu = mh - mr - mt
    c = ch + cr + ct
    return -(mu * mu / c).sum(axis=-1) - np.log(c).sum(axis=-1)


def _kl_scores(mh, ch, mr, cr, mt, ct) -> np.ndarray:
    d = np.shape(mh)[-1]
    me = mh - mt
    ce = ch + ct
    delta = mr - me
    energy = 0.5 * (
        (ce / cr).sum(axis=-1)
        + (delta * delta / cr).sum(axis=-1)
        - np.log(ce / cr).sum(axis=-1)
        - d
    )
    return -energy


_SCORE_FNS = {EXPECTED_LIKELIHOOD: _el_scores, KL_DIVERGENCE: _kl_scores}


def _el_grads(mh, ch, mr, cr, mt, ct):
    mu = mh - mr - mt
    c = ch + cr + ct
    gmu = 2.0 * mu / c
    dc = mu * mu / (c * c) - 1.0 / c
    return -gmu, gmu, gmu, dc, dc, dc


def _kl_grads(mh, ch, mr, cr, mt, ct):
    me = mh - mt
    ce = ch + ct
    delta = mr - me
    a = delta / cr
    dce = 0.5 * (1.0 / ce - 1.0 / cr)
    dcr = 0.5 * (ce + delta * delta) / (cr * cr) - 0.5 / cr
    return a, -a, -a, dce, dcr, dce


_GRAD_FNS = {EXPECTED_LIKELIHOOD: _el_grads, KL_DIVERGENCE: _kl_grads}


def score_el_params(h: GaussianParams, r: GaussianParams, t: GaussianParams) -> float:
    return float(_el_scores(h.mean, h.cov_diag, r.mean, r.cov_diag, t.mean, t.cov_diag))


def score_kl_params(h: GaussianParams, r: GaussianParams, t: GaussianParams) -> float:
    return float(_kl_scores(h.mean, h.cov_diag, r.mean, r.cov_diag, t.mean, t.cov_diag))


def score_grad_params(
    h: GaussianParams, r: GaussianParams, t: GaussianParams, score_kind: str
) -> ScoreGradients:
    grads = _GRAD_FNS[score_kind](h.mean, h.cov_diag, r.mean, r.cov_diag, t.mean, t.cov_diag)
    return ScoreGradients(*(g.copy() for g in grads))


def score_el(model: Kg2eModel, h: int, r: int, t: int) -> float:
    return score_el_params(model.entity_params(h), model.relation_params(r), model.entity_params(t))


def score_kl(model: Kg2eModel, h: int, r: int, t: int) -> float:
    return score_kl_params(model.entity_params(h), model.relation_params(r), model.entity_params(t))


def score(model: Kg2eModel, h: int, r: int, t: int, score_kind: str | None = None) -> float:
    kind = score_kind or model.score_kind
    if kind == EXPECTED_LIKELIHOOD:
        return score_el(model, h, r, t)
    if kind == KL_DIVERGENCE:
        return score_kl(model, h, r, t)
    raise ValueError(f"unknown score kind {kind!r}")


def score_grad(
    model: Kg2eModel, h: int, r: int, t: int, score_kind: str | None = None
) -> ScoreGradients:
    kind = score_kind or model.score_kind
    if kind not in SCORE_KINDS:
        raise ValueError(f"unknown score kind {kind!r}")
    return score_grad_params(
        model.entity_params(h), model.relation_params(r), model.entity_params(t), kind
    )


def score_candidates(model: Kg2eModel, h: int, r: int, t: int, position: str) -> np.ndarray:
    """Scores of all entities substituted at ``position`` ('head' or 'tail').

    The fixed side keeps the given indices; the returned vector is indexed
    by entity id. Summation order matches the scalar path, so an entry is
    bit-identical to the corresponding single-triple score.
    """
    fn = _SCORE_FNS[model.score_kind]
    model._check_relation(r)
    em, ec = model.entity_means, model.entity_covs
    rm, rc = model.relation_means[r], model.relation_covs[r]
    if position == "tail":
        model._check_entity(h)
        return fn(em[h], ec[h], rm, rc, em, ec)
    if position == "head":
        model._check_entity(t)
        return fn(em, ec, rm, rc, em[t], ec[t])
    raise ValueError(f"position must be 'head' or 'tail', got {position!r}")


def apply_constraints(model: Kg2eModel) -> Kg2eModel:
    """Rescale over-norm means to the unit ball and clamp covariances.

    Idempotent: a second application leaves every array bit-identical.
    """
    for means in (model.entity_means, model.relation_means):
        norms = np.linalg.norm(means, axis=1, keepdims=True)
        over = norms > 1.0 + _NORM_TOL
        if over.any():
            np.divide(means, norms, out=means, where=over)
    np.clip(model.entity_covs, model.c_min, model.c_max, out=model.entity_covs)
    np.clip(model.relation_covs, model.c_min, model.c_max, out=model.relation_covs)
    return model


def constraint_violations(model: Kg2eModel, tol: float = 1e-9) -> int:
    """Count rows violating the norm bound or covariance box."""
    count = 0
    for means in (model.entity_means, model.relation_means):
        count += int((np.linalg.norm(means, axis=1) > 1.0 + tol).sum())
    for covs in (model.entity_covs, model.relation_covs):
        bad = (covs < model.c_min - tol) | (covs > model.c_max + tol)
        count += int(bad.any(axis=1).sum())
    return count


def model_to_document(model: Kg2eModel) -> dict:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "dim": model.dim,
        "score_kind": model.score_kind,
        "c_min": model.c_min,
        "c_max": model.c_max,
        "entities": [term_to_text(t) for t in model.vocab.entities],
        "relations": [term_to_text(t) for t in model.vocab.relations],
        "entity_means": model.entity_means.tolist(),
        "entity_covs": model.entity_covs.tolist(),
        "relation_means": model.relation_means.tolist(),
        "relation_covs": model.relation_covs.tolist(),
        "thresholds": None if model.thresholds is None else model.thresholds.to_document(),
        "train_config": model.train_config,
    }
    return doc


def model_from_document(doc: dict) -> Kg2eModel:
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    vocab = Vocab(
        [_vocab_term(s) for s in doc["entities"]],
        [_vocab_term(s) for s in doc["relations"]],
    )
    thresholds = None
    if doc.get("thresholds") is not None:
        from .evaluation import ThresholdTable

        thresholds = ThresholdTable.from_document(doc["thresholds"])
    return Kg2eModel(
        vocab,
        doc["dim"],
        np.array(doc["entity_means"], dtype=np.float64),
        np.array(doc["entity_covs"], dtype=np.float64),
        np.array(doc["relation_means"], dtype=np.float64),
        np.array(doc["relation_covs"], dtype=np.float64),
        c_min=doc["c_min"],
        c_max=doc["c_max"],
        score_kind=doc["score_kind"],
        thresholds=thresholds,
        train_config=doc.get("train_config"),
    )


def _vocab_term(text: str) -> Term:
    term = term_from_text(text)
    if term.is_placeholder:
        raise ValueError("placeholder term in stored vocabulary")
    return term


def save_model(model: Kg2eModel, path) -> None:
    """Write the model as JSON; floats keep their shortest round-trip form."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model_to_document(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> Kg2eModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_document(json.load(fh))
