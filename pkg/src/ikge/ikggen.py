"""Deterministic generator for a desk-scale intent knowledge graph.

The graph couples an intent/expectation skeleton with a service-class
hierarchy (video, voice and data leaves), network resource classes split
into guaranteed and non-guaranteed bit-rate families, KPI parameters and
string-literal KPI values. Link triples (``icm:targetResource``,
``icm:hasParameter``, ``icm:valueBy``) are drawn with a seeded generator
until the requested triple count is met exactly, so a fixed spec always
produces a byte-identical graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rdf import Graph, Term, Triple

PREFIXES = {
    "icm": "http://intent.example/icm#",
    "service": "http://intent.example/service#",
    "nonmcptt": "http://intent.example/service/nonmcptt#",
    "kpi": "http://intent.example/kpi#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}

COUNT_TOLERANCE = 0.02

_NAMED_SERVICES = (
    ("nonmcptt:ConvVideo", "video"),
    ("nonmcptt:StreamVideo", "video"),
    ("nonmcptt:ConvVoice", "voice"),
    ("nonmcptt:PttVoice", "voice"),
    ("nonmcptt:WebData", "data"),
    ("nonmcptt:BulkData", "data"),
)
_FAMILY_CLASSES = {
    "video": "service:VideoService",
    "voice": "service:VoiceService",
    "data": "service:DataService",
}
_NAMED_RESOURCES = (
    ("service:NonMcpttGBRService", "gbr"),
    ("service:McpttGBRService", "gbr"),
    ("service:NonGBRService", "nongbr"),
    ("service:BestEffortService", "nongbr"),
)
_RESOURCE_PARENTS = {"gbr": "service:GBR", "nongbr": "service:NonGBR"}
_NAMED_KPIS = (
    "kpi:latency",
    "kpi:throughput",
    "kpi:jitter",
    "kpi:packetLoss",
    "kpi:availability",
    "kpi:reliability",
    "kpi:bandwidth",
    "kpi:coverage",
)
_VALUES_PER_KPI = 12
_THEMED_VALUES = {
    "kpi:latency": (
        "150ms", "50ms", "100ms", "200ms", "250ms", "300ms",
        "10ms", "20ms", "30ms", "75ms", "125ms", "175ms",
    ),
    "kpi:throughput": (
        "10mbps", "50mbps", "100mbps", "1gbps", "5mbps", "25mbps",
        "250mbps", "500mbps", "2gbps", "75mbps", "150mbps", "20mbps",
    ),
    "kpi:jitter": (
        "1ms", "2ms", "3ms", "4ms", "5ms", "6ms",
        "7ms", "8ms", "9ms", "0.5ms", "1.5ms", "2.5ms",
    ),
}


class InfeasibleSpecError(Exception):
    """The requested triple count cannot be met within tolerance."""


@dataclass
class IkgGenSpec:
    seed: int = 42
    n_services: int = 60
    n_resources: int = 15
    n_kpis: int = 12
    target_triples: int = 1575

    def __post_init__(self):
        if self.n_services < 1:
            raise ValueError("n_services must be at least 1")
        if self.n_resources < 1:
            raise ValueError("n_resources must be at least 1")
        if self.n_kpis < 0:
            raise ValueError("n_kpis must be non-negative")
        if self.target_triples < 1:
            raise ValueError("target_triples must be positive")


def _iri(text: str) -> Term:
    return Term.iri(text, prefixed=True)


_RDF_TYPE = _iri("rdf:type")
_RDFS_SUBCLASS = _iri("rdfs:subclass")
_HAS_EXPECTATION = _iri("icm:hasExpectation")
_HAS_TARGET = _iri("icm:hasTarget")
_HAS_PARAMETER = _iri("icm:hasParameter")
_TARGET_RESOURCE = _iri("icm:targetResource")
_VALUE_BY = _iri("icm:valueBy")


def _service_names(n: int) -> list[tuple[str, str]]:
    names = list(_NAMED_SERVICES[:n])
    families = ("video", "voice", "data")
    i = 0
    while len(names) < n:
        family = families[i % 3]
        names.append((f"nonmcptt:{family.capitalize()}Svc{i:02d}", family))
        i += 1
    return names


def _resource_names(n: int) -> list[tuple[str, str]]:
    names = list(_NAMED_RESOURCES[:n])
    i = 0
    while len(names) < n:
        kind = "gbr" if i % 2 == 0 else "nongbr"
        label = "GbrResource" if kind == "gbr" else "NonGbrResource"
        names.append((f"service:{label}{i:02d}", kind))
        i += 1
    return names


def _kpi_names(n: int) -> list[str]:
    names = list(_NAMED_KPIS[:n])
    i = 0
    while len(names) < n:
        names.append(f"kpi:metric{i:02d}")
        i += 1
    return names


def _value_pool(kpi: str) -> list[Term]:
    themed = _THEMED_VALUES.get(kpi)
    if themed is None:
        local = kpi.partition(":")[2]
        themed = tuple(f"{local}-level{j:02d}" for j in range(_VALUES_PER_KPI))
    return [Term.literal(v, "xsd:string") for v in themed]


def gen_ikg(spec: IkgGenSpec) -> Graph:
    """Build the desk IKG; triple count hits the target exactly when feasible."""
    rng = np.random.default_rng(spec.seed)
    triples: list[Triple] = []
    present: set[Triple] = set()

    def add(head: Term, relation: Term, tail: Term) -> bool:
        t = Triple(head, relation, tail)
        if t in present:
            return False
        present.add(t)
        triples.append(t)
        return True

    intent = _iri("icm:Intent")
    expectation = _iri("icm:Expectation")
    prop_expectation = _iri("icm:PropertyExpectation")
    target = _iri("icm:Target")
    prop_parameter = _iri("icm:PropertyParameter")
    network_resource = _iri("service:NetworkResource")

    add(intent, _HAS_EXPECTATION, expectation)
    add(expectation, _RDFS_SUBCLASS, prop_expectation)
    add(expectation, _HAS_TARGET, target)
    add(prop_expectation, _HAS_PARAMETER, prop_parameter)
    for family_class in _FAMILY_CLASSES.values():
        add(target, _RDFS_SUBCLASS, _iri(family_class))
    for parent in _RESOURCE_PARENTS.values():
        add(network_resource, _RDFS_SUBCLASS, _iri(parent))

    services = [(_iri(name), family) for name, family in _service_names(spec.n_services)]
    for i, (leaf, family) in enumerate(services):
        add(_iri(_FAMILY_CLASSES[family]), _RDFS_SUBCLASS, leaf)
        add(leaf, _RDF_TYPE, target)
        add(prop_expectation, _HAS_TARGET, leaf)
        # Named anchor leaves also hang off the generic expectation node,
        # mirroring their fuller context in the source ontology.
        if i < len(_NAMED_SERVICES):
            add(expectation, _HAS_TARGET, leaf)

    resources = [(_iri(name), kind) for name, kind in _resource_names(spec.n_resources)]
    for leaf, kind in resources:
        add(_iri(_RESOURCE_PARENTS[kind]), _RDFS_SUBCLASS, leaf)
        add(leaf, _RDF_TYPE, network_resource)

    kpis = [_iri(name) for name in _kpi_names(spec.n_kpis)]
    pools = {k.text: _value_pool(k.text) for k in kpis}
    for k in kpis:
        add(prop_parameter, _RDFS_SUBCLASS, k)
        add(k, _RDF_TYPE, prop_parameter)

    service_terms = [s for s, _ in services]
    resource_terms = [r for r, _ in resources]

    # Fixed anchor links come first so they survive any spec size.
    conv_video = service_terms[0]
    add(conv_video, _TARGET_RESOURCE, resource_terms[0])
    if len(resource_terms) > 1:
        add(conv_video, _TARGET_RESOURCE, resource_terms[1])
    if kpis:
        add(conv_video, _HAS_PARAMETER, kpis[0])
        add(kpis[0], _VALUE_BY, pools[kpis[0].text][0])

    linked_resources = {conv_video}
    for leaf in service_terms:
        if leaf not in linked_resources:
            add(leaf, _TARGET_RESOURCE, resource_terms[rng.integers(len(resource_terms))])
    if kpis:
        for leaf in service_terms[1:]:
            add(leaf, _HAS_PARAMETER, kpis[rng.integers(len(kpis))])
        for k in kpis:
            for value in pools[k.text][:2]:
                add(k, _VALUE_BY, value)

    extras: list[Triple] = []
    for s in service_terms:
        for r in resource_terms:
            t = Triple(s, _TARGET_RESOURCE, r)
            if t not in present:
                extras.append(t)
        for k in kpis:
            t = Triple(s, _HAS_PARAMETER, k)
            if t not in present:
                extras.append(t)
    for k in kpis:
        for value in pools[k.text]:
            t = Triple(k, _VALUE_BY, value)
            if t not in present:
                extras.append(t)

    lower = int(np.floor(spec.target_triples * (1.0 - COUNT_TOLERANCE)))
    upper = int(np.ceil(spec.target_triples * (1.0 + COUNT_TOLERANCE)))
    if len(triples) > upper:
        raise InfeasibleSpecError(
            f"mandatory structure needs {len(triples)} triples, above the "
            f"+{COUNT_TOLERANCE:.0%} bound of target {spec.target_triples}"
        )
    if len(triples) + len(extras) < lower:
        raise InfeasibleSpecError(
            f"spec can produce at most {len(triples) + len(extras)} triples, below the "
            f"-{COUNT_TOLERANCE:.0%} bound of target {spec.target_triples}"
        )
    remaining = min(spec.target_triples - len(triples), len(extras))
    if remaining > 0:
        order = rng.permutation(len(extras))
        for i in order[:remaining]:
            t = extras[i]
            present.add(t)
            triples.append(t)

    return Graph(triples, PREFIXES)


def build_report(spec: IkgGenSpec, graph: Graph) -> dict:
    return {
        "seed": spec.seed,
        "n_services": spec.n_services,
        "n_resources": spec.n_resources,
        "n_kpis": spec.n_kpis,
        "target_triples": spec.target_triples,
        "n_triples": len(graph),
        "n_prefixes": len(graph.prefix_map),
        "note": (
            "the triple count covers asserted (positive) facts only; "
            "training negatives are sampled on the fly, never stored"
        ),
    }
