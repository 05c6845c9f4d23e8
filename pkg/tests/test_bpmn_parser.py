"""BPMN ingestion tests."""

import hashlib

import pytest

from bpmnrisk.bpmn import ElementKind, FlowKind, parse_bpmn
from bpmnrisk.errors import BpmnParseError

NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"


def wrap(body: str, ns: str = NS) -> bytes:
    return f'<?xml version="1.0"?><definitions xmlns="{ns}" id="d">{body}</definitions>'.encode()


def test_fixture_kinds(invoicing_model):
    kinds = {e.id: e.kind for e in invoicing_model.elements.values()}
    assert kinds["proc-integration"] is ElementKind.PROCESS
    assert kinds["part-erp"] is ElementKind.PARTICIPANT
    assert kinds["start-invoice"] is ElementKind.MESSAGE_START
    assert kinds["end-response"] is ElementKind.MESSAGE_END
    assert kinds["end-discard"] is ElementKind.NONE_END
    assert kinds["task-sign"] is ElementKind.SCRIPT_TASK
    assert kinds["task-store-invoice"] is ElementKind.SERVICE_TASK
    assert kinds["gw-mode"] is ElementKind.EXCLUSIVE_GATEWAY
    assert kinds["msg-sdi-prod"] is ElementKind.MESSAGE
    script_tasks = [k for k, v in kinds.items() if v is ElementKind.SCRIPT_TASK]
    service_tasks = [k for k, v in kinds.items() if v is ElementKind.SERVICE_TASK]
    assert len(script_tasks) == 4 and len(service_tasks) == 4


def test_fixture_flows(invoicing_model):
    by_id = {f.id: f for f in invoicing_model.flows}
    assert by_id["flow-mode-test"].kind is FlowKind.CONDITIONAL_SEQUENCE
    assert by_id["flow-mode-test"].condition_expr == "${mode == 'test'}"
    assert by_id["flow-mode-discard"].kind is FlowKind.DEFAULT
    assert by_id["flow-sign"].kind is FlowKind.SEQUENCE
    assert by_id["mf-request"].kind is FlowKind.MESSAGE
    assert by_id["mf-sdi-prod"].message_ref == "msg-sdi-prod"


def test_fixture_digest(invoicing_bytes, invoicing_model):
    assert invoicing_model.source_digest == hashlib.sha256(invoicing_bytes).hexdigest()


def test_parse_determinism(invoicing_bytes):
    assert parse_bpmn(invoicing_bytes) == parse_bpmn(invoicing_bytes)


def test_empty_definitions():
    model = parse_bpmn(wrap(""))
    assert model.elements == {}
    assert model.flows == ()


def test_minimal_service_task_and_conditional_flow():
    body = (
        '<process id="p">'
        '<serviceTask id="t" name="call"/>'
        '<startEvent id="s"/>'
        '<sequenceFlow id="f" sourceRef="s" targetRef="t">'
        "<conditionExpression>x &gt; 1</conditionExpression>"
        "</sequenceFlow>"
        "</process>"
    )
    model = parse_bpmn(wrap(body))
    kinds = [e.kind for e in model.elements.values()]
    assert kinds.count(ElementKind.SERVICE_TASK) == 1
    conditional = [f for f in model.flows if f.kind is FlowKind.CONDITIONAL_SEQUENCE]
    assert len(conditional) == 1
    assert conditional[0].condition_expr == "x > 1"


def test_malformed_xml_rejected():
    with pytest.raises(BpmnParseError, match="malformed"):
        parse_bpmn(b"<definitions><unclosed>")


def test_wrong_namespace_rejected():
    with pytest.raises(BpmnParseError, match="namespace"):
        parse_bpmn(wrap('<process id="p"/>', ns="http://example.com/not-bpmn"))


def test_duplicate_id_rejected():
    body = '<process id="p"><userTask id="t"/><userTask id="t"/></process>'
    with pytest.raises(BpmnParseError, match="duplicate"):
        parse_bpmn(wrap(body))


def test_dangling_flow_endpoint_rejected():
    body = (
        '<process id="p"><userTask id="t"/>'
        '<sequenceFlow id="f" sourceRef="t" targetRef="ghost"/></process>'
    )
    with pytest.raises(BpmnParseError, match="unknown element"):
        parse_bpmn(wrap(body))


def test_unknown_tag_recorded_not_dropped():
    body = '<process id="p"><adHocSubProcess id="weird"/></process>'
    model = parse_bpmn(wrap(body))
    assert model.element("weird").kind is ElementKind.UNSUPPORTED


def test_event_variants():
    body = (
        '<process id="p">'
        '<startEvent id="s1"><timerEventDefinition><timeCycle>R/PT1H</timeCycle></timerEventDefinition></startEvent>'
        '<startEvent id="s2"><conditionalEventDefinition><condition>ready</condition></conditionalEventDefinition></startEvent>'
        '<startEvent id="s3"><errorEventDefinition/></startEvent>'
        '<startEvent id="s4" parallelMultiple="true"><messageEventDefinition/><signalEventDefinition/></startEvent>'
        '<startEvent id="s5"><messageEventDefinition/><signalEventDefinition/></startEvent>'
        '<endEvent id="e1"><terminateEventDefinition/></endEvent>'
        '<endEvent id="e2"><cancelEventDefinition/></endEvent>'
        "</process>"
    )
    model = parse_bpmn(wrap(body))
    assert model.element("s1").kind is ElementKind.START_TIMER
    assert model.element("s1").attrs["timer.timeCycle"] == "R/PT1H"
    assert model.element("s2").kind is ElementKind.START_CONDITION
    assert model.element("s3").kind is ElementKind.START_ERROR
    assert model.element("s4").kind is ElementKind.START_PARALLEL
    assert model.element("s5").kind is ElementKind.START_MULTIPLE
    assert model.element("e1").kind is ElementKind.TERMINATE_END
    assert model.element("e2").kind is ElementKind.CANCEL_END


def test_subprocess_nesting_and_scope():
    body = (
        '<process id="p">'
        '<subProcess id="sub"><scriptTask id="inner" scriptFormat="js"><script>x</script></scriptTask></subProcess>'
        '<subProcess id="esub" triggeredByEvent="true"/>'
        "</process>"
    )
    model = parse_bpmn(wrap(body))
    assert model.element("sub").kind is ElementKind.SUB_PROCESS
    assert model.element("esub").kind is ElementKind.EVENT_SUB_PROCESS
    assert model.element("inner").parent_id == "sub"


def test_vendor_extensions_preserved(invoicing_model):
    attrs = invoicing_model.element("task-send-prod").attrs
    key = "{http://example.com/schema/integration}endpoint@url"
    assert attrs[key] == "https://sdi.example.it/invoice"


def test_participant_containment(invoicing_model):
    participant = invoicing_model.participant_of("task-sign")
    assert participant is not None and participant.id == "part-integration"
    assert invoicing_model.participant_of("part-erp").id == "part-erp"
    # conditional flows are contained too (used for grouping)
    assert "flow-mode-test" in invoicing_model.participants[1].contained_element_ids
