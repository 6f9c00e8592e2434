"""Natural-language intent to verified network-intent translation.

The pipeline runs six steps: keyword extraction over a gazetteer corpus
(A), template construction from a blueprint with ``???`` slots (B),
locating the incomplete triples (C), top-k link prediction per slot (D),
slot completion under ontology admissibility and keyword hints (E) and
verification of every formerly slotted triple through the classifier (F).

Slots are typed by the relation of their triple: ``icm:hasTarget`` fills a
service, ``icm:targetResource`` a resource and ``icm:valueBy`` a literal
value. A later slotted triple may reference an earlier slot through the
role's anchor class (for example ``icm:Target`` in head position), which
is substituted with the entity chosen for that slot before prediction.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

import numpy as np

from . import evaluation
from . import model as kg2e
from .rdf import (
    Graph,
    ParseError,
    Term,
    Triple,
    VocabError,
    build_vocab,
    term_from_text,
    term_to_text,
)

log = logging.getLogger(__name__)

ROLE_SERVICE = "service"
ROLE_RESOURCE = "resource"
ROLE_KPI = "kpi"
ROLE_VALUE = "value"
CORPUS_ROLES = (ROLE_SERVICE, ROLE_RESOURCE, ROLE_KPI, ROLE_VALUE)

# Slot typing by relation and the ontology class anchoring each role.
ROLE_BY_RELATION = {
    "icm:hasTarget": ROLE_SERVICE,
    "icm:targetResource": ROLE_RESOURCE,
    "icm:valueBy": ROLE_VALUE,
}
ROLE_ANCHORS = {
    ROLE_SERVICE: Term.iri("icm:Target"),
    ROLE_RESOURCE: Term.iri("service:NetworkResource"),
}

RDF_TYPE = Term.iri("rdf:type")
RDFS_SUBCLASS = Term.iri("rdfs:subclass")


class PipelineError(Exception):
    """Base class for pipeline failures; ``step`` names the stage A-F."""

    step = "?"


class BlueprintError(PipelineError):
    step = "B"


class UnresolvedSlotError(PipelineError):
    step = "E"

    def __init__(self, slot_id: int, role: str, k: int):
        super().__init__(
            f"slot {slot_id} ({role}): no admissible candidate within top-{k} predictions"
        )
        self.slot_id = slot_id
        self.role = role


class VerificationFailedError(PipelineError):
    step = "F"

    def __init__(self, intent: "NetworkIntent", failing: list[Triple]):
        names = "; ".join(str(t) for t in failing)
        super().__init__(f"intent {intent.intent_id!r} failed verification: {names}")
        self.intent = intent
        self.failing = failing


@dataclass(frozen=True)
class CorpusHint:
    role: str
    term: Term


@dataclass
class KeywordCorpus:
    """Gazetteer mapping lower-case keywords to role-tagged graph terms."""

    entries: dict[str, list[CorpusHint]]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class KeywordMatch:
    keyword: str
    hints: tuple[CorpusHint, ...]


@dataclass(frozen=True)
class Slot:
    triple: Triple
    slot_id: int
    role: str
    position: str  # "head" or "tail"


@dataclass
class IntentTemplate:
    intent_id: str
    complete: list[Triple]
    slotted: list[Slot]
    prefixes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Prediction:
    candidate: Term
    score: float
    rank: int


@dataclass
class SlotResolution:
    slot_id: int
    role: str
    triple: Triple
    term: Term
    rank: int
    score: float
    classified: bool | None = None
    note: str | None = None

    def to_document(self) -> dict:
        return {
            "slot_id": self.slot_id,
            "role": self.role,
            "triple": str(self.triple),
            "term": term_to_text(self.term),
            "rank": self.rank,
            "score": self.score,
            "classified": self.classified,
            "note": self.note,
        }


@dataclass
class NetworkIntent:
    intent_id: str
    triples: list[Triple]
    resolutions: list[SlotResolution]
    verified: bool | None = None
    prefixes: dict[str, str] = field(default_factory=dict)

    def to_graph(self) -> Graph:
        return Graph(self.triples, self.prefixes)

    def report_document(self) -> dict:
        return {
            "intent_id": self.intent_id,
            "verified": self.verified,
            "n_triples": len(self.triples),
            "slots": [r.to_document() for r in self.resolutions],
        }


def load_corpus(text: str, ikg: Graph) -> KeywordCorpus:
    """Parse tab-separated ``keyword<TAB>role<TAB>term`` corpus lines.

    Keywords are lower-cased; every term must resolve against the IKG
    vocabulary so hints can never point outside the graph.
    """
    vocab = build_vocab(ikg)
    entries: dict[str, list[CorpusHint]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ParseError("expected 3 tab-separated fields", lineno, 1)
        keyword = parts[0].strip().lower()
        role = parts[1].strip()
        if not keyword:
            raise ParseError("empty keyword", lineno, 1)
        if role not in CORPUS_ROLES:
            raise ParseError(f"unknown role {role!r}", lineno, 1)
        try:
            term = term_from_text(parts[2].strip())
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1) from None
        if term not in vocab:
            raise ParseError(f"hint term {parts[2].strip()} not in the IKG vocabulary", lineno, 1)
        entries.setdefault(keyword, []).append(CorpusHint(role, term))
    return KeywordCorpus(entries)


def extract_keywords(text: str, corpus: KeywordCorpus) -> list[KeywordMatch]:
    """Case-insensitive longest-match scan; duplicates keep first position."""
    tokens = re.findall(r"[a-z0-9]+", text.lower())
    keyed = {tuple(k.split()): k for k in corpus.entries}
    max_len = max((len(k) for k in keyed), default=0)
    matches: list[str] = []
    seen: set[str] = set()
    i = 0
    while i < len(tokens):
        for length in range(min(max_len, len(tokens) - i), 0, -1):
            phrase = tuple(tokens[i : i + length])
            if phrase in keyed:
                keyword = keyed[phrase]
                if keyword not in seen:
                    seen.add(keyword)
                    matches.append(keyword)
                i += length
                break
        else:
            i += 1
    return [KeywordMatch(k, tuple(corpus.entries[k])) for k in matches]


def merge_hints(matches) -> dict[str, list[Term]]:
    """Role-keyed hint terms in match order, first occurrence kept."""
    hints: dict[str, list[Term]] = {}
    for match in matches:
        for hint in match.hints:
            bucket = hints.setdefault(hint.role, [])
            if hint.term not in bucket:
                bucket.append(hint.term)
    return hints


def build_template(matches, ikg: Graph, blueprint: Graph) -> IntentTemplate:
    """Split a blueprint into complete triples and typed slots.

    Each slotted triple must contain exactly one placeholder and use a
    relation with a known role mapping.
    """
    complete: list[Triple] = []
    slots: list[Slot] = []
    for triple in blueprint.triples:
        count = triple.placeholder_count
        if count == 0:
            complete.append(triple)
            continue
        if count > 1:
            raise BlueprintError(f"multiple placeholders in one triple: {triple}")
        role = ROLE_BY_RELATION.get(triple.relation.text)
        if role is None:
            raise BlueprintError(
                f"no role mapping for slotted relation {term_to_text(triple.relation)}"
            )
        position = "head" if triple.head.is_placeholder else "tail"
        slot_id = triple.head.slot if position == "head" else triple.tail.slot
        slots.append(Slot(triple, slot_id, role, position))
    slots.sort(key=lambda s: s.slot_id)
    keywords = [m.keyword for m in matches]
    intent_id = "intent-" + "-".join(k.replace(" ", "_") for k in keywords) if keywords else "intent"
    prefixes = dict(ikg.prefix_map)
    prefixes.update(blueprint.prefix_map)
    return IntentTemplate(intent_id, complete, slots, prefixes)


def find_incomplete(template: IntentTemplate) -> list[Slot]:
    """Slots in ascending slot-id order."""
    return sorted(template.slotted, key=lambda s: s.slot_id)


class OntologyIndex:
    """Subclass closure, type assertions and literal pools of one IKG."""

    def __init__(self, ikg: Graph):
        self.children: dict[Term, list[Term]] = {}
        self.types: dict[Term, set[Term]] = {}
        self.literal_tails: dict[str, list[Term]] = {}
        for t in ikg.triples:
            if t.relation == RDFS_SUBCLASS:
                self.children.setdefault(t.head, []).append(t.tail)
            elif t.relation == RDF_TYPE:
                self.types.setdefault(t.head, set()).add(t.tail)
            if t.tail.is_literal:
                bucket = self.literal_tails.setdefault(t.relation.text, [])
                if t.tail not in bucket:
                    bucket.append(t.tail)
        self._closures: dict[Term, frozenset[Term]] = {}

    def closure(self, root: Term) -> frozenset[Term]:
        """``root`` plus everything reachable along subclass edges."""
        cached = self._closures.get(root)
        if cached is not None:
            return cached
        out = {root}
        frontier = [root]
        while frontier:
            node = frontier.pop()
            for child in self.children.get(node, ()):
                if child not in out:
                    out.add(child)
                    frontier.append(child)
        result = frozenset(out)
        self._closures[root] = result
        return result

    def admissible(self, candidate: Term, role: str, relation: Term) -> bool:
        """Ontology admissibility of a candidate for a slot role.

        Service and resource candidates must sit strictly below the role's
        anchor class in the subclass hierarchy or be typed (rdf:type) with
        a class from that closure. Value candidates must be literals
        observed as objects of the slot's relation.
        """
        if role == ROLE_VALUE:
            return candidate.is_literal and candidate in self.literal_tails.get(
                relation.text, ()
            )
        anchor = ROLE_ANCHORS.get(role)
        if anchor is None:
            return not candidate.is_literal
        closure = self.closure(anchor)
        if candidate in closure and candidate != anchor:
            return True
        return bool(self.types.get(candidate, set()) & closure)

    def hint_consistent(self, candidate: Term, hint_terms) -> bool:
        return any(candidate in self.closure(h) for h in hint_terms)


def predict_candidates(
    model: kg2e.Kg2eModel,
    slot: Slot,
    k: int,
    ikg: Graph,
    index: OntologyIndex | None = None,
) -> list[Prediction]:
    """Top-k completions for one slot, scores non-increasing, ranks 1..k.

    Value-role slots draw candidates only from the literals observed for
    the slot's relation in the IKG; other roles draw from all non-literal
    entities. Ties order by entity id.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    index = index or OntologyIndex(ikg)
    vocab = model.vocab
    triple = slot.triple
    r = vocab.relation_id(triple.relation)
    if slot.position == "tail":
        h = vocab.entity_id(triple.head)
        scores = kg2e.score_candidates(model, h, r, 0, position="tail")
    else:
        t = vocab.entity_id(triple.tail)
        scores = kg2e.score_candidates(model, 0, r, t, position="head")

    if slot.role == ROLE_VALUE:
        pool = [
            vocab.entity_id(lit)
            for lit in index.literal_tails.get(triple.relation.text, ())
            if lit in vocab
        ]
        pool = np.array(sorted(pool), dtype=np.int64)
    else:
        pool = np.array(
            [i for i, term in enumerate(vocab.entities) if not term.is_literal],
            dtype=np.int64,
        )
    if len(pool) == 0:
        return []
    pool_scores = scores[pool]
    order = np.lexsort((pool, -pool_scores))
    top = order[:k]
    return [
        Prediction(candidate=vocab.entities[pool[i]], score=float(pool_scores[i]), rank=rank)
        for rank, i in enumerate(top, start=1)
    ]


def _fill(slot: Slot, term: Term) -> Triple:
    if slot.position == "head":
        return Triple(term, slot.triple.relation, slot.triple.tail)
    return Triple(slot.triple.head, slot.triple.relation, term)


def complete_template(
    template: IntentTemplate,
    model: kg2e.Kg2eModel,
    ikg: Graph,
    hints: dict[str, list[Term]] | None = None,
    k: int = 10,
    thresholds: evaluation.ThresholdTable | None = None,
) -> NetworkIntent:
    """Resolve every slot with the best admissible prediction.

    Selection precedence: ontology admissibility, then hint consistency,
    then prediction rank. When hints exclude every admissible candidate
    the hint constraint is dropped and the conflict is logged. Passing
    ``thresholds`` pre-fills each resolution's classified flag; selection
    never depends on it.
    """
    hints = hints or {}
    index = OntologyIndex(ikg)
    anchor_substitutions: dict[Term, Term] = {}
    resolutions: list[SlotResolution] = []
    filled: list[Triple] = []

    for slot in find_incomplete(template):
        triple = slot.triple
        if anchor_substitutions:
            head = anchor_substitutions.get(triple.head, triple.head)
            tail = anchor_substitutions.get(triple.tail, triple.tail)
            if head is not triple.head or tail is not triple.tail:
                triple = Triple(head, triple.relation, tail)
                slot = Slot(triple, slot.slot_id, slot.role, slot.position)

        predictions = predict_candidates(model, slot, k, ikg, index=index)
        admissible = [
            p for p in predictions if index.admissible(p.candidate, slot.role, triple.relation)
        ]
        hint_terms = hints.get(slot.role)
        note = None
        chosen = None
        if hint_terms:
            for p in admissible:
                if index.hint_consistent(p.candidate, hint_terms):
                    chosen = p
                    break
            if chosen is None and admissible:
                chosen = admissible[0]
                note = "hint conflict: no hint-consistent admissible candidate; admissibility wins"
                log.warning("slot %d (%s): %s", slot.slot_id, slot.role, note)
        elif admissible:
            chosen = admissible[0]
        if chosen is None:
            raise UnresolvedSlotError(slot.slot_id, slot.role, k)

        new_triple = _fill(slot, chosen.candidate)
        filled.append(new_triple)
        resolution = SlotResolution(
            slot_id=slot.slot_id,
            role=slot.role,
            triple=new_triple,
            term=chosen.candidate,
            rank=chosen.rank,
            score=chosen.score,
            note=note,
        )
        if thresholds is not None:
            resolution.classified = evaluation.classify(model, new_triple, thresholds)
        resolutions.append(resolution)
        anchor = ROLE_ANCHORS.get(slot.role)
        if anchor is not None:
            anchor_substitutions[anchor] = chosen.candidate

    return NetworkIntent(
        intent_id=template.intent_id,
        triples=list(template.complete) + filled,
        resolutions=resolutions,
        verified=None,
        prefixes=dict(template.prefixes),
    )


def verify_intent(
    intent: NetworkIntent, model: kg2e.Kg2eModel, thresholds: evaluation.ThresholdTable
) -> NetworkIntent:
    """Classify every formerly slotted triple; verified iff all pass."""
    for triple in intent.triples:
        if triple.placeholder_count:
            raise ValueError(f"intent still contains a placeholder: {triple}")
    for resolution in intent.resolutions:
        resolution.classified = evaluation.classify(model, resolution.triple, thresholds)
    intent.verified = all(r.classified for r in intent.resolutions)
    return intent


def translate(
    text: str,
    model: kg2e.Kg2eModel,
    ikg: Graph,
    corpus: KeywordCorpus,
    blueprint: Graph,
    k: int = 10,
    thresholds: evaluation.ThresholdTable | None = None,
) -> NetworkIntent:
    """End-to-end pipeline from free text to a verified NetworkIntent.

    Raises UnresolvedSlotError when a slot has no admissible candidate and
    VerificationFailedError (carrying the candidate intent) when any
    completed triple fails classification.
    """
    thresholds = thresholds if thresholds is not None else model.thresholds
    if thresholds is None:
        raise ValueError("no thresholds available; train or calibrate the model first")
    matches = extract_keywords(text, corpus)
    template = build_template(matches, ikg, blueprint)
    if template.slotted:
        intent = complete_template(template, model, ikg, hints=merge_hints(matches), k=k)
    else:
        intent = NetworkIntent(
            intent_id=template.intent_id,
            triples=list(template.complete),
            resolutions=[],
            verified=None,
            prefixes=dict(template.prefixes),
        )
    verify_intent(intent, model, thresholds)
    if not intent.verified:
        failing = [r.triple for r in intent.resolutions if not r.classified]
        raise VerificationFailedError(intent, failing)
    return intent
