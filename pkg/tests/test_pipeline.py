"""Text-to-intent pipeline: gazetteer, templates, slot filling, verification."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from ikge.evaluation import ThresholdTable
from ikge.model import init_model, score
from ikge.pipeline import (
    BlueprintError,
    CorpusHint,
    KeywordMatch,
    NetworkIntent,
    OntologyIndex,
    ROLE_RESOURCE,
    ROLE_SERVICE,
    ROLE_VALUE,
    Slot,
    UnresolvedSlotError,
    VerificationFailedError,
    build_template,
    complete_template,
    extract_keywords,
    find_incomplete,
    load_corpus,
    merge_hints,
    predict_candidates,
    translate,
    verify_intent,
)
from ikge.rdf import Graph, ParseError, Term, Triple, build_vocab, parse, serialize

PREFIX_BLOCK = (
    "@prefix icm: <http://intent.example/icm#> .\n"
    "@prefix kpi: <http://intent.example/kpi#> .\n"
    "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix service: <http://intent.example/service#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
)

TOY_IKG_TEXT = PREFIX_BLOCK + (
    "icm:Intent icm:hasExpectation icm:Expectation .\n"
    "icm:Target rdfs:subclass service:VideoService .\n"
    "service:VideoService rdfs:subclass service:StreamVideo .\n"
    "service:VideoService rdfs:subclass service:ConvVideo .\n"
    "service:LegacyVideo rdf:type icm:Target .\n"
    "service:NetworkResource rdfs:subclass service:GBR .\n"
    "service:NetworkResource rdfs:subclass service:NonGBR .\n"
    "service:GBR rdfs:subclass service:Gbr01 .\n"
    "service:GBR rdfs:subclass service:Gbr02 .\n"
    "service:NonGBR rdfs:subclass service:NonGbr01 .\n"
    "service:StreamVideo icm:targetResource service:Gbr01 .\n"
    "service:ConvVideo icm:targetResource service:NonGbr01 .\n"
    "icm:Expectation icm:hasParameter kpi:latency .\n"
    "service:StreamVideo icm:hasParameter kpi:latency .\n"
    'kpi:latency icm:valueBy "150ms"^^xsd:string .\n'
    'kpi:latency icm:valueBy "20ms"^^xsd:string .\n'
    'kpi:throughput icm:valueBy "10mbps"^^xsd:string .\n'
    "icm:PropertyExpectation icm:hasTarget service:StreamVideo .\n"
    "icm:PropertyExpectation icm:hasTarget service:ConvVideo .\n"
)

TOY_CORPUS_TEXT = (
    "# keyword corpus\n"
    "Video\tservice\tservice:VideoService\n"
    "stream video\tservice\tservice:StreamVideo\n"
    "\n"
    "reliable\tresource\tservice:GBR\n"
    "latency\tkpi\tkpi:latency\n"
    'fast\tvalue\t"150ms"^^xsd:string\n'
)

TOY_BLUEPRINT_TEXT = PREFIX_BLOCK + (
    "icm:ServiceIntent icm:hasExpectation icm:ServiceExpectation .\n"
    "icm:PropertyExpectation icm:hasTarget ??? .\n"
    "icm:Target icm:targetResource ??? .\n"
    "kpi:latency icm:valueBy ??? .\n"
)


@pytest.fixture(scope="module")
def toy_ikg():
    return parse(TOY_IKG_TEXT)


@pytest.fixture(scope="module")
def toy_model(toy_ikg):
    return init_model(build_vocab(toy_ikg), dim=8, seed=5)


@pytest.fixture(scope="module")
def toy_index(toy_ikg):
    return OntologyIndex(toy_ikg)


@pytest.fixture(scope="module")
def toy_corpus(toy_ikg):
    return load_corpus(TOY_CORPUS_TEXT, toy_ikg)


def iri(text: str) -> Term:
    return Term.iri(text)


# ---------------------------------------------------------------------------
# corpus loading


def test_load_corpus_entries(toy_corpus):
    assert len(toy_corpus) == 5
    assert [h.term.text for h in toy_corpus.entries["video"]] == ["service:VideoService"]
    assert toy_corpus.entries["fast"][0].term == Term.literal("150ms", "xsd:string")
    assert "stream video" in toy_corpus.entries


def test_load_corpus_rejects_wrong_field_count(toy_ikg):
    with pytest.raises(ParseError) as info:
        load_corpus("video\tservice\n", toy_ikg)
    assert info.value.line == 1


def test_load_corpus_rejects_unknown_role(toy_ikg):
    with pytest.raises(ParseError, match="unknown role"):
        load_corpus("video\tflavor\tservice:VideoService\n", toy_ikg)


def test_load_corpus_rejects_term_outside_vocab(toy_ikg):
    with pytest.raises(ParseError, match="not in the IKG vocabulary") as info:
        load_corpus(
            "# header\nvideo\tservice\tservice:VideoService\nghost\tservice\tservice:Ghost\n",
            toy_ikg,
        )
    assert info.value.line == 3


def test_load_corpus_rejects_placeholder_term(toy_ikg):
    with pytest.raises(ParseError):
        load_corpus("video\tservice\t???\n", toy_ikg)


# ---------------------------------------------------------------------------
# keyword extraction


def test_extract_keywords_in_text_order(toy_corpus):
    matches = extract_keywords("I need a reliable video feed", toy_corpus)
    assert [m.keyword for m in matches] == ["reliable", "video"]
    assert matches[1].hints[0].term == iri("service:VideoService")


def test_extract_keywords_prefers_longest_match(toy_corpus):
    matches = extract_keywords("give me Stream Video now", toy_corpus)
    assert [m.keyword for m in matches] == ["stream video"]


def test_extract_keywords_longest_then_rescan(toy_corpus):
    matches = extract_keywords("video stream video", toy_corpus)
    assert [m.keyword for m in matches] == ["video", "stream video"]


def test_extract_keywords_dedupes_case_insensitively(toy_corpus):
    matches = extract_keywords("VIDEO video Video", toy_corpus)
    assert [m.keyword for m in matches] == ["video"]


def test_extract_keywords_no_matches(toy_corpus):
    assert extract_keywords("", toy_corpus) == []
    assert extract_keywords("hello world", toy_corpus) == []


def test_merge_hints_dedupes_in_order():
    a = KeywordMatch("x", (CorpusHint(ROLE_SERVICE, iri("service:A")),))
    b = KeywordMatch(
        "y",
        (
            CorpusHint(ROLE_SERVICE, iri("service:A")),
            CorpusHint(ROLE_SERVICE, iri("service:B")),
            CorpusHint(ROLE_RESOURCE, iri("service:R")),
        ),
    )
    hints = merge_hints([a, b])
    assert hints == {
        ROLE_SERVICE: [iri("service:A"), iri("service:B")],
        ROLE_RESOURCE: [iri("service:R")],
    }


# ---------------------------------------------------------------------------
# templates


def test_build_template_splits_blueprint(toy_ikg):
    template = build_template([], toy_ikg, parse(TOY_BLUEPRINT_TEXT))
    assert template.intent_id == "intent"
    assert len(template.complete) == 1
    assert [s.slot_id for s in template.slotted] == [0, 1, 2]
    assert [s.role for s in template.slotted] == ["service", "resource", "value"]
    assert all(s.position == "tail" for s in template.slotted)
    assert template.prefixes["icm"] == "http://intent.example/icm#"


def test_build_template_intent_id_from_keywords(toy_ikg, toy_corpus):
    matches = extract_keywords("reliable stream video", toy_corpus)
    template = build_template(matches, toy_ikg, parse(TOY_BLUEPRINT_TEXT))
    assert template.intent_id == "intent-reliable-stream_video"


def test_build_template_rejects_double_placeholder(toy_ikg):
    blueprint = parse(PREFIX_BLOCK + "??? icm:hasTarget ??? .\n")
    with pytest.raises(BlueprintError, match="multiple placeholders"):
        build_template([], toy_ikg, blueprint)


def test_build_template_rejects_unmapped_relation(toy_ikg):
    blueprint = parse(PREFIX_BLOCK + "icm:Expectation icm:hasExpectation ??? .\n")
    with pytest.raises(BlueprintError, match="no role mapping"):
        build_template([], toy_ikg, blueprint)


def test_find_incomplete_sorted():
    t = Triple(iri("icm:PropertyExpectation"), iri("icm:hasTarget"), Term.placeholder(5))
    s5 = Slot(t, 5, ROLE_SERVICE, "tail")
    t2 = Triple(iri("icm:Target"), iri("icm:targetResource"), Term.placeholder(1))
    s1 = Slot(t2, 1, ROLE_RESOURCE, "tail")
    from ikge.pipeline import IntentTemplate

    template = IntentTemplate("intent", [], [s5, s1])
    assert [s.slot_id for s in find_incomplete(template)] == [1, 5]


# ---------------------------------------------------------------------------
# ontology index


def test_closure_contents_and_caching(toy_index):
    target = toy_index.closure(iri("icm:Target"))
    assert target == frozenset(
        {
            iri("icm:Target"),
            iri("service:VideoService"),
            iri("service:StreamVideo"),
            iri("service:ConvVideo"),
        }
    )
    assert toy_index.closure(iri("icm:Target")) is target  # cached object
    assert toy_index.closure(iri("service:Gbr01")) == frozenset({iri("service:Gbr01")})


def test_admissible_service_role(toy_index):
    rel = iri("icm:hasTarget")
    assert toy_index.admissible(iri("service:StreamVideo"), ROLE_SERVICE, rel)
    assert toy_index.admissible(iri("service:VideoService"), ROLE_SERVICE, rel)
    # typed but not a subclass
    assert toy_index.admissible(iri("service:LegacyVideo"), ROLE_SERVICE, rel)
    # the anchor class itself is not a valid completion
    assert not toy_index.admissible(iri("icm:Target"), ROLE_SERVICE, rel)
    assert not toy_index.admissible(iri("icm:Intent"), ROLE_SERVICE, rel)
    assert not toy_index.admissible(iri("service:Gbr01"), ROLE_SERVICE, rel)
    assert not toy_index.admissible(Term.literal("150ms", "xsd:string"), ROLE_SERVICE, rel)


def test_admissible_resource_role(toy_index):
    rel = iri("icm:targetResource")
    for name in ("service:GBR", "service:Gbr01", "service:Gbr02", "service:NonGbr01"):
        assert toy_index.admissible(iri(name), ROLE_RESOURCE, rel)
    assert not toy_index.admissible(iri("service:NetworkResource"), ROLE_RESOURCE, rel)
    assert not toy_index.admissible(iri("service:StreamVideo"), ROLE_RESOURCE, rel)


def test_admissible_value_role(toy_index):
    rel = iri("icm:valueBy")
    assert toy_index.admissible(Term.literal("150ms", "xsd:string"), ROLE_VALUE, rel)
    assert toy_index.admissible(Term.literal("10mbps", "xsd:string"), ROLE_VALUE, rel)
    # same lexical form but no datatype is a different term
    assert not toy_index.admissible(Term.literal("150ms"), ROLE_VALUE, rel)
    assert not toy_index.admissible(Term.literal("999h", "xsd:string"), ROLE_VALUE, rel)
    assert not toy_index.admissible(iri("kpi:latency"), ROLE_VALUE, rel)
    # unobserved relation has no literal pool
    assert not toy_index.admissible(
        Term.literal("150ms", "xsd:string"), ROLE_VALUE, iri("icm:hasTarget")
    )


def test_admissible_role_without_anchor(toy_index):
    rel = iri("icm:hasParameter")
    assert toy_index.admissible(iri("kpi:latency"), "kpi", rel)
    assert not toy_index.admissible(Term.literal("150ms", "xsd:string"), "kpi", rel)


def test_hint_consistency(toy_index):
    hints = [iri("service:VideoService")]
    assert toy_index.hint_consistent(iri("service:StreamVideo"), hints)
    assert toy_index.hint_consistent(iri("service:VideoService"), hints)
    assert not toy_index.hint_consistent(iri("service:Gbr01"), hints)
    # any hint may justify the candidate
    assert toy_index.hint_consistent(
        iri("service:Gbr01"), [iri("service:VideoService"), iri("service:GBR")]
    )


# ---------------------------------------------------------------------------
# candidate prediction


def slot_for(text: str, toy_ikg: Graph) -> Slot:
    template = build_template([], toy_ikg, parse(PREFIX_BLOCK + text))
    return template.slotted[0]


def test_predict_candidates_rejects_bad_k(toy_model, toy_ikg):
    slot = slot_for("icm:PropertyExpectation icm:hasTarget ??? .\n", toy_ikg)
    with pytest.raises(ValueError):
        predict_candidates(toy_model, slot, 0, toy_ikg)


def test_predict_candidates_shape(toy_model, toy_ikg):
    slot = slot_for("icm:PropertyExpectation icm:hasTarget ??? .\n", toy_ikg)
    preds = predict_candidates(toy_model, slot, 5, toy_ikg)
    assert [p.rank for p in preds] == [1, 2, 3, 4, 5]
    scores = [p.score for p in preds]
    assert scores == sorted(scores, reverse=True)
    assert all(p.candidate.is_iri for p in preds)


def brute_force_top(model, slot, k, pool_ids):
    vocab = model.vocab
    scored = []
    for e in pool_ids:
        if slot.position == "tail":
            h = vocab.entity_id(slot.triple.head)
            r = vocab.relation_id(slot.triple.relation)
            s = score(model, h, r, e)
        else:
            t = vocab.entity_id(slot.triple.tail)
            r = vocab.relation_id(slot.triple.relation)
            s = score(model, e, r, t)
        scored.append((-s, e))
    scored.sort()
    return [(vocab.entities[e], -neg) for neg, e in scored[:k]]


def test_predict_candidates_matches_brute_force_tail(toy_model, toy_ikg):
    slot = slot_for("icm:PropertyExpectation icm:hasTarget ??? .\n", toy_ikg)
    pool = [i for i, t in enumerate(toy_model.vocab.entities) if not t.is_literal]
    expected = brute_force_top(toy_model, slot, 6, pool)
    preds = predict_candidates(toy_model, slot, 6, toy_ikg)
    assert [(p.candidate, p.score) for p in preds] == expected


def test_predict_candidates_matches_brute_force_head(toy_model, toy_ikg):
    slot = slot_for("??? icm:targetResource service:Gbr01 .\n", toy_ikg)
    assert slot.position == "head"
    pool = [i for i, t in enumerate(toy_model.vocab.entities) if not t.is_literal]
    expected = brute_force_top(toy_model, slot, 6, pool)
    preds = predict_candidates(toy_model, slot, 6, toy_ikg)
    assert [(p.candidate, p.score) for p in preds] == expected


def test_predict_candidates_value_pool(toy_model, toy_ikg):
    slot = slot_for("kpi:latency icm:valueBy ??? .\n", toy_ikg)
    preds = predict_candidates(toy_model, slot, 10, toy_ikg)
    assert len(preds) == 3  # only observed literals for icm:valueBy
    observed = {
        Term.literal("150ms", "xsd:string"),
        Term.literal("20ms", "xsd:string"),
        Term.literal("10mbps", "xsd:string"),
    }
    assert {p.candidate for p in preds} == observed


def test_predict_candidates_breaks_ties_by_entity_id(toy_ikg):
    model = init_model(build_vocab(toy_ikg), dim=4, seed=7)
    vocab = model.vocab
    a = vocab.entity_id(iri("service:StreamVideo"))
    b = vocab.entity_id(iri("service:ConvVideo"))
    model.entity_means[b] = model.entity_means[a]
    model.entity_covs[b] = model.entity_covs[a]
    slot = slot_for("icm:PropertyExpectation icm:hasTarget ??? .\n", toy_ikg)
    preds = predict_candidates(model, slot, vocab.n_entities, toy_ikg)
    ranks = {p.candidate: p.rank for p in preds}
    assert abs(ranks[iri("service:StreamVideo")] - ranks[iri("service:ConvVideo")]) == 1
    first = min((a, b)), max((a, b))
    assert ranks[vocab.entities[first[0]]] < ranks[vocab.entities[first[1]]]


# ---------------------------------------------------------------------------
# slot resolution


def toy_template(toy_ikg, matches=()):
    return build_template(list(matches), toy_ikg, parse(TOY_BLUEPRINT_TEXT))


def test_complete_template_takes_first_admissible(toy_model, toy_ikg, toy_index):
    k = toy_model.vocab.n_entities
    template = toy_template(toy_ikg)
    intent = complete_template(template, toy_model, toy_ikg, k=k)
    preds = predict_candidates(toy_model, template.slotted[0], k, toy_ikg)
    admissible = [
        p
        for p in preds
        if toy_index.admissible(p.candidate, ROLE_SERVICE, template.slotted[0].triple.relation)
    ]
    res = intent.resolutions[0]
    assert res.term == admissible[0].candidate
    assert res.rank == admissible[0].rank
    assert res.score == admissible[0].score
    assert res.note is None
    assert res.classified is None


def test_complete_template_substitutes_anchor(toy_model, toy_ikg):
    k = toy_model.vocab.n_entities
    template = toy_template(toy_ikg)
    intent = complete_template(template, toy_model, toy_ikg, k=k)
    service_term = intent.resolutions[0].term
    resource_resolution = intent.resolutions[1]
    assert resource_resolution.triple.head == service_term
    # the template itself is untouched
    assert template.slotted[1].triple.head == iri("icm:Target")


def test_complete_template_hint_preference(toy_model, toy_ikg, toy_index):
    k = toy_model.vocab.n_entities
    template = toy_template(toy_ikg)
    preds = predict_candidates(toy_model, template.slotted[0], k, toy_ikg)
    admissible = [
        p
        for p in preds
        if toy_index.admissible(p.candidate, ROLE_SERVICE, template.slotted[0].triple.relation)
    ]
    # aim the hint at an admissible candidate that is not ranked first
    target = next(p for p in admissible[1:] if p.candidate != iri("service:LegacyVideo"))
    hints = {ROLE_SERVICE: [target.candidate]}
    intent = complete_template(template, toy_model, toy_ikg, hints=hints, k=k)
    res = intent.resolutions[0]
    assert toy_index.hint_consistent(res.term, hints[ROLE_SERVICE])
    assert res.note is None
    first_consistent = next(
        p for p in admissible if toy_index.hint_consistent(p.candidate, hints[ROLE_SERVICE])
    )
    assert res.term == first_consistent.candidate


def test_complete_template_hint_conflict_logs_and_falls_back(
    toy_model, toy_ikg, toy_index, caplog
):
    k = toy_model.vocab.n_entities
    template = toy_template(toy_ikg)
    preds = predict_candidates(toy_model, template.slotted[0], k, toy_ikg)
    admissible = [
        p
        for p in preds
        if toy_index.admissible(p.candidate, ROLE_SERVICE, template.slotted[0].triple.relation)
    ]
    hints = {ROLE_SERVICE: [iri("service:GBR")]}  # excludes every service candidate
    with caplog.at_level(logging.WARNING, logger="ikge.pipeline"):
        intent = complete_template(template, toy_model, toy_ikg, hints=hints, k=k)
    res = intent.resolutions[0]
    assert res.term == admissible[0].candidate  # admissibility wins
    assert res.note is not None and "hint conflict" in res.note
    assert any("hint conflict" in r.message for r in caplog.records)
    assert intent.resolutions[1].note is None


def test_complete_template_prefills_classified(toy_model, toy_ikg):
    k = toy_model.vocab.n_entities
    table = ThresholdTable({}, fallback=-math.inf)
    intent = complete_template(
        toy_template(toy_ikg), toy_model, toy_ikg, k=k, thresholds=table
    )
    assert all(r.classified is True for r in intent.resolutions)


def fallback_fixture():
    """d=1 model whose top prediction is inadmissible for the slot role."""
    text = PREFIX_BLOCK + (
        "@prefix nonmcptt: <http://intent.example/nonmcptt#> .\n"
        "service:NetworkResource rdfs:subclass service:GBR .\n"
        "service:GBR rdfs:subclass service:ResA .\n"
        "nonmcptt:Svc icm:targetResource service:ResA .\n"
        "nonmcptt:Svc icm:hasParameter kpi:lat .\n"
    )
    ikg = parse(text)
    v = build_vocab(ikg)
    model = init_model(v, dim=1, seed=0)
    means = {
        "service:NetworkResource": -0.9,
        "service:GBR": -0.5,
        "service:ResA": 0.3,
        "nonmcptt:Svc": 0.9,
        "kpi:lat": 0.4,
    }
    for name, mu in means.items():
        model.entity_means[v.entity_id(iri(name)), 0] = mu
    model.entity_covs[:] = 1.0
    model.relation_means[:] = 0.0
    model.relation_means[v.relation_id(iri("icm:targetResource")), 0] = 0.5
    model.relation_covs[:] = 1.0
    blueprint = parse(
        "@prefix icm: <http://intent.example/icm#> .\n"
        "@prefix nonmcptt: <http://intent.example/nonmcptt#> .\n"
        "nonmcptt:Svc icm:targetResource ??? .\n"
    )
    template = build_template([], ikg, blueprint)
    return model, ikg, template


def test_complete_template_skips_inadmissible_leader():
    model, ikg, template = fallback_fixture()
    slot = template.slotted[0]
    preds = predict_candidates(model, slot, 2, ikg)
    assert preds[0].candidate == iri("kpi:lat")  # best score, wrong kind
    assert preds[1].candidate == iri("service:ResA")
    intent = complete_template(template, model, ikg, k=2)
    res = intent.resolutions[0]
    assert res.term == iri("service:ResA")
    assert res.rank == 2


def test_complete_template_unresolved_slot():
    model, ikg, template = fallback_fixture()
    with pytest.raises(UnresolvedSlotError) as info:
        complete_template(template, model, ikg, k=1)
    assert info.value.slot_id == 0
    assert info.value.role == ROLE_RESOURCE
    assert "top-1" in str(info.value)


def test_selection_stable_as_k_grows():
    model, ikg, template = fallback_fixture()
    a = complete_template(template, model, ikg, k=2)
    b = complete_template(template, model, ikg, k=5)
    assert a.resolutions[0].term == b.resolutions[0].term
    assert a.resolutions[0].rank == b.resolutions[0].rank


# ---------------------------------------------------------------------------
# verification


def test_verify_intent_sets_flags(toy_model, toy_ikg):
    k = toy_model.vocab.n_entities
    intent = complete_template(toy_template(toy_ikg), toy_model, toy_ikg, k=k)
    verify_intent(intent, toy_model, ThresholdTable({}, fallback=-math.inf))
    assert intent.verified is True
    assert all(r.classified is True for r in intent.resolutions)
    verify_intent(intent, toy_model, ThresholdTable({}, fallback=math.inf))
    assert intent.verified is False
    assert all(r.classified is False for r in intent.resolutions)


def test_verify_intent_rejects_placeholder(toy_model):
    bad = NetworkIntent(
        "intent",
        [Triple(iri("icm:Intent"), iri("icm:hasTarget"), Term.placeholder(0))],
        [],
    )
    with pytest.raises(ValueError):
        verify_intent(bad, toy_model, ThresholdTable({}, fallback=0.0))


# ---------------------------------------------------------------------------
# end-to-end translation on the desk artifacts


def test_translate_reliable_video(desk_model, desk_ikg, shipped_corpus, shipped_blueprint):
    intent = translate(
        "reliable video", desk_model, desk_ikg, shipped_corpus, shipped_blueprint
    )
    assert intent.verified is True
    assert intent.intent_id == "intent-reliable-video"
    assert len(intent.resolutions) == 3
    svc, res, val = intent.resolutions
    assert svc.role == ROLE_SERVICE and res.role == ROLE_RESOURCE and val.role == ROLE_VALUE
    assert svc.term == iri("nonmcptt:StreamVideo") and svc.rank == 1
    assert res.term == iri("service:GbrResource08") and res.rank == 3
    assert val.term == Term.literal("150ms", "xsd:string") and val.rank == 1
    assert res.triple.head == svc.term  # anchor substitution visible in output
    assert all(r.classified is True for r in intent.resolutions)
    # serialization is deterministic and round-trips
    text = serialize(intent.to_graph())
    assert serialize(intent.to_graph()) == text
    assert parse(text) == intent.to_graph()
    doc = intent.report_document()
    assert doc["verified"] is True
    assert doc["n_triples"] == len(shipped_blueprint) - 3 + 3
    assert [s["slot_id"] for s in doc["slots"]] == [0, 1, 2]


def test_translate_without_keywords_still_verifies(
    desk_model, desk_ikg, shipped_corpus, shipped_blueprint
):
    intent = translate(
        "please help", desk_model, desk_ikg, shipped_corpus, shipped_blueprint
    )
    assert intent.verified is True
    assert intent.intent_id == "intent"
    svc, res, val = intent.resolutions
    assert svc.term == iri("nonmcptt:StreamVideo") and svc.rank == 1
    assert res.term == iri("service:NonGbrResource07") and res.rank == 1
    assert val.term == Term.literal("150ms", "xsd:string") and val.rank == 1


def test_translate_no_slots_blueprint(desk_model, desk_ikg, shipped_corpus):
    blueprint = parse(
        "@prefix icm: <http://intent.example/icm#> .\n"
        "icm:ServiceIntent icm:hasExpectation icm:ServiceExpectation .\n"
    )
    intent = translate("anything", desk_model, desk_ikg, shipped_corpus, blueprint)
    assert intent.verified is True
    assert intent.resolutions == []
    assert len(intent.triples) == 1


def test_translate_requires_thresholds(desk_ikg, desk_split, shipped_corpus, shipped_blueprint):
    bare = init_model(desk_split.vocab, dim=4, seed=0)  # no thresholds attached
    with pytest.raises(ValueError, match="thresholds"):
        translate("reliable video", bare, desk_ikg, shipped_corpus, shipped_blueprint)


def test_translate_verification_failure_carries_intent(
    desk_model, desk_ikg, shipped_corpus, shipped_blueprint
):
    strict = ThresholdTable({}, fallback=1e9)
    with pytest.raises(VerificationFailedError) as info:
        translate(
            "reliable video",
            desk_model,
            desk_ikg,
            shipped_corpus,
            shipped_blueprint,
            thresholds=strict,
        )
    err = info.value
    assert err.intent.verified is False
    assert len(err.failing) == 3
    assert all(r.classified is False for r in err.intent.resolutions)
