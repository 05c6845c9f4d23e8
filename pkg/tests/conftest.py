"""Shared fixtures: parsed fixture model, resolved languages, pipeline runs."""

from __future__ import annotations

from pathlib import Path

import pytest

from bpmnrisk.bpmn import parse_bpmn
from bpmnrisk.mal import (
    MalSource,
    load_bundled_language,
    merge_sources,
    parse_mal,
    resolve_language,
)
from bpmnrisk.mapping import map_process
from bpmnrisk.vuln import ComponentCatalog, load_nvd, resolve_catalog

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
DATA = Path(__file__).resolve().parent / "data"

PHISHING_MAL = DATA / "phishing_app.mal"
INVOICING_BPMN = FIXTURES / "italy_invoicing.bpmn"
CATALOG_YAML = FIXTURES / "catalog.yaml"
NVD_DIR = FIXTURES / "nvd"

# one-line parent so the phishing language's dangling `extends Data` resolves
DATA_SUPPLEMENT = "category System { asset Data { } }"


@pytest.fixture(scope="session")
def phishing_source() -> MalSource:
    return MalSource(PHISHING_MAL.read_text(encoding="utf-8"), str(PHISHING_MAL))


@pytest.fixture(scope="session")
def phishing_unresolved(phishing_source):
    return parse_mal(phishing_source)


@pytest.fixture(scope="session")
def phishing_language(phishing_unresolved):
    supplement = parse_mal(MalSource(DATA_SUPPLEMENT, "<supplement>"))
    return resolve_language(merge_sources(phishing_unresolved, supplement))


@pytest.fixture(scope="session")
def corelang():
    return load_bundled_language()


@pytest.fixture(scope="session")
def invoicing_bytes() -> bytes:
    return INVOICING_BPMN.read_bytes()


@pytest.fixture(scope="session")
def invoicing_model(invoicing_bytes):
    return parse_bpmn(invoicing_bytes)


@pytest.fixture(scope="session")
def invoicing_instance(invoicing_model, corelang):
    model, trace = map_process(invoicing_model, corelang)
    return model, trace


@pytest.fixture(scope="session")
def vuln_db():
    return load_nvd(sorted(NVD_DIR.glob("*.json")))


@pytest.fixture(scope="session")
def fixture_catalog(invoicing_instance):
    model, _ = invoicing_instance
    return resolve_catalog(ComponentCatalog.load(CATALOG_YAML), model)


# --- end-to-end fixture runs shared by report and acceptance tests ---------

GOAL = ("data:msg-sdi-prod", "write")
ENTRY = ("conn:mf-request", "mitm")


@pytest.fixture(scope="session")
def fixture_pipeline(invoicing_instance, fixture_catalog, vuln_db, corelang):
    """Per-variant compiled graphs for the invoicing fixture."""
    from bpmnrisk.graph import compile_graph
    from bpmnrisk.vuln import Pruning, enrich, generate_variants

    model, _ = invoicing_instance
    variants = generate_variants(fixture_catalog, Pruning.parse("one-per-participant"))
    graphs = {
        v.id: compile_graph(enrich(model, v, vuln_db), corelang) for v in variants
    }
    weights = {v.id: v.weight for v in variants}
    target = next(
        v.id
        for v in variants
        if "lodash" in " ".join(v.products()) and "tomcat" in " ".join(v.products())
    )
    return model, variants, graphs, weights, target


def run_fixture_variants(model, graphs, weights, samples, seed, defense=None):
    from bpmnrisk.graph import SimConfig, simulate
    from bpmnrisk.report import aggregate

    cfg = SimConfig(
        samples=samples,
        horizon_days=100.0,
        seed=seed,
        attacker_entry=(ENTRY,),
        goals=(GOAL,),
    )
    results = {}
    for vid, graph in graphs.items():
        if defense is not None:
            graph = graph.toggle_defense(defense, True)
        results[vid] = simulate(graph, cfg)
    report = aggregate(results, weights, instance_model=model)
    return results, report


@pytest.fixture(scope="session")
def fixture_big_run(fixture_pipeline):
    """One 10^5-sample run per variant at seeds 42 and 43."""
    model, _, graphs, weights, _ = fixture_pipeline
    return {
        seed: run_fixture_variants(model, graphs, weights, samples=100_000, seed=seed)
        for seed in (42, 43)
    }
