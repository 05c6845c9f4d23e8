"""Surface classification: table-driven, total over the kind enumeration."""

import pytest

from bpmnrisk.bpmn import (
    ELEMENT_SURFACE,
    FLOW_SURFACE,
    ElementKind,
    FlowKind,
    SurfaceTag,
    classify_surface,
)

C = SurfaceTag.CONDITION
E = SurfaceTag.EXPRESSION
SC = SurfaceTag.SERVICE_CALL
S = SurfaceTag.SCRIPT
CO = SurfaceTag.COLLABORATION
D = SurfaceTag.DATA_FLOW

# expected surface tags, one row per kind
ELEMENT_ROWS = {
    ElementKind.DATA_OBJECT: {D},
    ElementKind.DATA_STORE: {D},
    ElementKind.MESSAGE: {D},
    ElementKind.PARTICIPANT: {CO},
    ElementKind.PROCESS: {CO},
    ElementKind.LANE: set(),
    ElementKind.SUB_PROCESS: {CO},
    ElementKind.EVENT_SUB_PROCESS: {CO},
    ElementKind.NONE_START: set(),
    ElementKind.MESSAGE_START: {D},
    ElementKind.START_TIMER: {E},
    ElementKind.START_ERROR: set(),
    ElementKind.START_COMPENSATION: set(),
    ElementKind.START_PARALLEL: set(),
    ElementKind.START_ESCALATION: set(),
    ElementKind.START_CONDITION: {C},
    ElementKind.START_SIGNAL: set(),
    ElementKind.START_MULTIPLE: set(),
    ElementKind.NONE_END: set(),
    ElementKind.MESSAGE_END: {C, D},
    ElementKind.END_ERROR: set(),
    ElementKind.CANCEL_END: set(),
    ElementKind.END_COMPENSATION: set(),
    ElementKind.END_SIGNAL: set(),
    ElementKind.END_MULTIPLE: set(),
    ElementKind.TERMINATE_END: set(),
    ElementKind.TASK: set(),
    ElementKind.USER_TASK: {SC},
    ElementKind.SCRIPT_TASK: {S},
    ElementKind.SERVICE_TASK: {SC},
    ElementKind.SEND_TASK: {SC},
    ElementKind.RECEIVE_TASK: {SC},
    ElementKind.MANUAL_TASK: {SC},
    ElementKind.BUSINESS_RULE_TASK: {E},
    ElementKind.CALL_ACTIVITY: {SC},
    ElementKind.EXCLUSIVE_GATEWAY: set(),
    ElementKind.EVENT_BASED_GATEWAY: set(),
    ElementKind.INCLUSIVE_GATEWAY: set(),
    ElementKind.PARALLEL_GATEWAY: set(),
    ElementKind.COMPLEX_GATEWAY: {C},
    ElementKind.UNSUPPORTED: set(),
}

FLOW_ROWS = {
    FlowKind.SEQUENCE: set(),
    FlowKind.DEFAULT: set(),
    FlowKind.CONDITIONAL_SEQUENCE: {C},
    FlowKind.MESSAGE: {E, D},
    FlowKind.DATA_ASSOCIATION: set(),
}


@pytest.mark.parametrize("kind", list(ElementKind), ids=lambda k: k.value)
def test_element_row(kind):
    assert ELEMENT_SURFACE[kind] == frozenset(ELEMENT_ROWS[kind])


@pytest.mark.parametrize("kind", list(FlowKind), ids=lambda k: k.value)
def test_flow_row(kind):
    assert FLOW_SURFACE[kind] == frozenset(FLOW_ROWS[kind])


def test_totality_every_kind_has_a_row():
    assert set(ELEMENT_SURFACE) == set(ElementKind)
    assert set(FLOW_SURFACE) == set(FlowKind)
    assert set(ELEMENT_ROWS) == set(ElementKind)
    assert set(FLOW_ROWS) == set(FlowKind)


def test_fixture_relevant_set(invoicing_model):
    report = classify_surface(invoicing_model)
    tasks = {
        e.id
        for e in invoicing_model.elements.values()
        if e.kind.value.endswith("Task")
    }
    assert tasks <= report.relevant
    assert {"proc-integration", "part-erp", "start-invoice", "end-response"} <= report.relevant
    assert {"flow-mode-test", "flow-mode-prod"} <= report.relevant
    assert {"mf-request", "mf-response", "mf-sdi-test", "mf-sdi-prod"} <= report.relevant
    # plain flow/gateway/end elements expose nothing
    assert "flow-sign" not in report.relevant
    assert "flow-mode-discard" not in report.relevant
    assert "gw-mode" not in report.relevant
    assert "end-discard" not in report.relevant


def test_parallel_gateway_not_relevant():
    from bpmnrisk.bpmn import parse_bpmn

    xml = (
        '<?xml version="1.0"?>'
        '<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">'
        '<process id="p"><parallelGateway id="g"/></process></definitions>'
    ).encode()
    report = classify_surface(parse_bpmn(xml))
    assert report.tags("g") == frozenset()
    assert "g" not in report.relevant


def test_script_task_tagged_script(invoicing_model):
    report = classify_surface(invoicing_model)
    assert report.tags("task-sign") == frozenset({S})
    assert report.tags("task-store-invoice") == frozenset({SC})
    assert report.tags("end-response") == frozenset({C, D})
