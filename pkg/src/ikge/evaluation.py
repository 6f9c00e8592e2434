"""Link-prediction ranking and triple classification.

Ranking scores every entity as a replacement for the missing side of a
test triple and reports the rank of the true entity, averaging positions
over exact score ties. The filtered protocol drops candidates that form
other known-true triples (never the true entity itself). Classification
applies per-relation score thresholds chosen on validation data by
maximizing accuracy over midpoints of adjacent scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model as kg2e
from .rdf import Graph, Triple, VocabError

RIGHT = "right"  # (h, r, ?): predict the tail
LEFT = "left"  # (?, r, t): predict the head


@dataclass
class RankMetrics:
    mean_rank: float
    hits: dict[int, float]
    side: str
    filtered: bool
    n_ranks: int

    def to_document(self) -> dict:
        return {
            "mean_rank": self.mean_rank,
            "hits": {str(p): v for p, v in sorted(self.hits.items())},
            "side": self.side,
            "filtered": self.filtered,
            "n_ranks": self.n_ranks,
        }


@dataclass
class ClassificationMetrics:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float | None
    f1: float | None
    tpr: float | None
    tnr: float | None
    fpr: float | None
    fnr: float | None

    @classmethod
    def from_counts(cls, tp: int, tn: int, fp: int, fn: int) -> "ClassificationMetrics":
        def ratio(num: int, den: int) -> float | None:
            return num / den if den else None

        total = tp + tn + fp + fn
        precision = ratio(tp, tp + fp)
        recall = ratio(tp, tp + fn)
        if precision is None or recall is None or precision + recall == 0:
            f1 = None
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        return cls(
            tp=tp,
            tn=tn,
            fp=fp,
            fn=fn,
            accuracy=ratio(tp + tn, total),
            f1=f1,
            tpr=recall,
            tnr=ratio(tn, tn + fp),
            fpr=ratio(fp, fp + tn),
            fnr=ratio(fn, fn + tp),
        )

    def to_document(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "tpr": self.tpr,
            "tnr": self.tnr,
            "fpr": self.fpr,
            "fnr": self.fnr,
        }


@dataclass
class ThresholdTable:
    """Per-relation decision thresholds with a pooled fallback."""

    per_relation: dict[int, float] = field(default_factory=dict)
    fallback: float = 0.0

    def lookup(self, relation_id: int) -> float:
        return self.per_relation.get(relation_id, self.fallback)

    def to_document(self) -> dict:
        return {
            "per_relation": {str(r): v for r, v in sorted(self.per_relation.items())},
            "fallback": self.fallback,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "ThresholdTable":
        return cls(
            per_relation={int(r): float(v) for r, v in doc["per_relation"].items()},
            fallback=float(doc["fallback"]),
        )


def rank_from_scores(scores: np.ndarray, true_index: int, keep: np.ndarray | None = None) -> float:
    """Rank of the true candidate with mean-tie policy.

    ``keep`` masks candidates out of consideration (filtered protocol);
    the true candidate always stays in. With b strictly better scores and
    m tied scores (the true one included) the rank is b + (m + 1) / 2.
    """
    true_score = scores[true_index]
    if keep is not None:
        keep = keep.copy()
        keep[true_index] = True
        scores = scores[keep]
    better = int((scores > true_score).sum())
    tied = int((scores == true_score).sum())
    return better + (tied + 1) / 2.0


def _known_mask(model, known: Graph, h: int, r: int, t: int, side: str) -> np.ndarray:
    """True where a candidate does NOT complete another known triple."""
    vocab = model.vocab
    keep = np.ones(vocab.n_entities, dtype=bool)
    for triple in known.triples:
        try:
            kh = vocab.entity_id(triple.head)
            kr = vocab.relation_id(triple.relation)
            kt = vocab.entity_id(triple.tail)
        except VocabError:
            continue
        if kr != r:
            continue
        if side == RIGHT and kh == h:
            keep[kt] = False
        elif side == LEFT and kt == t:
            keep[kh] = False
    return keep


def rank_triple(
    model: kg2e.Kg2eModel,
    triple: Triple,
    side: str,
    known: Graph,
    filtered: bool = False,
) -> float:
    """Rank of the true completion among all entities for one side."""
    if side not in (RIGHT, LEFT):
        raise ValueError(f"side must be '{RIGHT}' or '{LEFT}', got {side!r}")
    vocab = model.vocab
    h = vocab.entity_id(triple.head)
    r = vocab.relation_id(triple.relation)
    t = vocab.entity_id(triple.tail)
    if side == RIGHT:
        scores = kg2e.score_candidates(model, h, r, t, position="tail")
        true_index = t
    else:
        scores = kg2e.score_candidates(model, h, r, t, position="head")
        true_index = h
    keep = _known_mask(model, known, h, r, t, side) if filtered else None
    return rank_from_scores(scores, true_index, keep)


def evaluate_ranks(
    model: kg2e.Kg2eModel,
    test: Graph,
    known: Graph,
    filtered: bool = False,
    hits_at: tuple[int, ...] = (1, 3, 10),
) -> RankMetrics:
    """Aggregate right-side and left-side ranks over a test graph."""
    if len(test) == 0:
        raise ValueError("test graph is empty")
    ranks = []
    for triple in test.triples:
        ranks.append(rank_triple(model, triple, RIGHT, known, filtered))
        ranks.append(rank_triple(model, triple, LEFT, known, filtered))
    arr = np.array(ranks)
    return RankMetrics(
        mean_rank=float(arr.mean()),
        hits={p: float((arr <= p).mean()) for p in hits_at},
        side="both",
        filtered=filtered,
        n_ranks=len(ranks),
    )


def best_threshold(pos_scores, neg_scores) -> float:
    """Accuracy-maximizing threshold for 'valid iff score >= threshold'.

    Candidates are the midpoints of adjacent distinct scores plus one
    sentinel below the minimum and one above the maximum; ties on accuracy
    resolve to the lowest candidate.
    """
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    values = np.unique(np.concatenate([pos, neg]))
    if len(values) == 0:
        raise ValueError("no scores to threshold")
    candidates = [values[0] - 1.0]
    candidates.extend((values[:-1] + values[1:]) / 2.0)
    candidates.append(values[-1] + 1.0)
    best_t = None
    best_acc = -1.0
    total = len(pos) + len(neg)
    for theta in candidates:
        acc = (int((pos >= theta).sum()) + int((neg < theta).sum())) / total
        if acc > best_acc:
            best_acc = acc
            best_t = float(theta)
    return best_t


def select_thresholds(
    model: kg2e.Kg2eModel, valid_pos: Graph, valid_neg: list[Triple]
) -> ThresholdTable:
    """Per-relation thresholds from validation positives and negatives.

    Every relation seen in the validation data gets an entry; the fallback
    pools all scores and covers relations missing from validation.
    """
    if len(valid_pos) == 0:
        raise ValueError("validation positives are empty")
    vocab = model.vocab
    pos_by_rel: dict[int, list[float]] = {}
    neg_by_rel: dict[int, list[float]] = {}

    def scored(triple: Triple) -> tuple[int, float]:
        h = vocab.entity_id(triple.head)
        r = vocab.relation_id(triple.relation)
        t = vocab.entity_id(triple.tail)
        return r, kg2e.score(model, h, r, t)

    for triple in valid_pos.triples:
        r, s = scored(triple)
        pos_by_rel.setdefault(r, []).append(s)
    for triple in valid_neg:
        r, s = scored(triple)
        neg_by_rel.setdefault(r, []).append(s)

    table = ThresholdTable()
    for r in sorted(set(pos_by_rel) | set(neg_by_rel)):
        table.per_relation[r] = best_threshold(pos_by_rel.get(r, []), neg_by_rel.get(r, []))
    all_pos = [s for scores in pos_by_rel.values() for s in scores]
    all_neg = [s for scores in neg_by_rel.values() for s in scores]
    table.fallback = best_threshold(all_pos, all_neg)
    return table


def classify(model: kg2e.Kg2eModel, triple: Triple, thresholds: ThresholdTable) -> bool:
    """Valid iff the triple's score reaches its relation's threshold."""
    if triple.placeholder_count:
        raise ValueError("cannot classify a triple containing a placeholder")
    vocab = model.vocab
    h = vocab.entity_id(triple.head)
    r = vocab.relation_id(triple.relation)
    t = vocab.entity_id(triple.tail)
    return kg2e.score(model, h, r, t) >= thresholds.lookup(r)


def evaluate_classification(
    model: kg2e.Kg2eModel,
    test_pos,
    test_neg,
    thresholds: ThresholdTable,
) -> ClassificationMetrics:
    """Confusion counts and rates over positive and negative test triples."""
    pos_triples = list(test_pos.triples if isinstance(test_pos, Graph) else test_pos)
    neg_triples = list(test_neg.triples if isinstance(test_neg, Graph) else test_neg)
    tp = fn = tn = fp = 0
    for triple in pos_triples:
        if classify(model, triple, thresholds):
            tp += 1
        else:
            fn += 1
    for triple in neg_triples:
        if classify(model, triple, thresholds):
            fp += 1
        else:
            tn += 1
    return ClassificationMetrics.from_counts(tp=tp, tn=tn, fp=fp, fn=fn)
