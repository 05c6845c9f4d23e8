"""BPMN 2.0 XML ingestion.

Reads a ``.bpmn`` document into an immutable :class:`ProcessModel` without
touching the input; a content hash witnesses non-invasiveness.  Unknown
flow-node tags are kept as ``Unsupported`` elements rather than dropped.
"""

from __future__ import annotations

import hashlib
import xml.etree.ElementTree as ET

from ..errors import BpmnParseError
from .model import BpmnElement, ElementKind, FlowEdge, FlowKind, Participant, ProcessModel

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"

_START_EVENT_DEFS = {
    "messageEventDefinition": ElementKind.MESSAGE_START,
    "timerEventDefinition": ElementKind.START_TIMER,
    "conditionalEventDefinition": ElementKind.START_CONDITION,
    "errorEventDefinition": ElementKind.START_ERROR,
    "compensateEventDefinition": ElementKind.START_COMPENSATION,
    "escalationEventDefinition": ElementKind.START_ESCALATION,
    "signalEventDefinition": ElementKind.START_SIGNAL,
}

_END_EVENT_DEFS = {
    "messageEventDefinition": ElementKind.MESSAGE_END,
    "errorEventDefinition": ElementKind.END_ERROR,
    "cancelEventDefinition": ElementKind.CANCEL_END,
    "compensateEventDefinition": ElementKind.END_COMPENSATION,
    "signalEventDefinition": ElementKind.END_SIGNAL,
    "terminateEventDefinition": ElementKind.TERMINATE_END,
}

_TASK_TAGS = {
    "task": ElementKind.TASK,
    "userTask": ElementKind.USER_TASK,
    "scriptTask": ElementKind.SCRIPT_TASK,
    "serviceTask": ElementKind.SERVICE_TASK,
    "sendTask": ElementKind.SEND_TASK,
    "receiveTask": ElementKind.RECEIVE_TASK,
    "manualTask": ElementKind.MANUAL_TASK,
    "businessRuleTask": ElementKind.BUSINESS_RULE_TASK,
    "callActivity": ElementKind.CALL_ACTIVITY,
}

_GATEWAY_TAGS = {
    "exclusiveGateway": ElementKind.EXCLUSIVE_GATEWAY,
    "eventBasedGateway": ElementKind.EVENT_BASED_GATEWAY,
    "inclusiveGateway": ElementKind.INCLUSIVE_GATEWAY,
    "parallelGateway": ElementKind.PARALLEL_GATEWAY,
    "complexGateway": ElementKind.COMPLEX_GATEWAY,
}

# flow-node containers we do not interpret further
_IGNORED_TAGS = {
    "laneSet",
    "documentation",
    "extensionElements",
    "ioSpecification",
    "dataObjectReference",  # handled via its dataObject
    "intermediateCatchEvent",
    "intermediateThrowEvent",
    "boundaryEvent",
    "association",
    "textAnnotation",
    "group",
}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _ns(tag: str) -> str | None:
    if tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return None


class _Builder:
    def __init__(self) -> None:
        self.elements: dict[str, BpmnElement] = {}
        self.flows: list[FlowEdge] = []
        self.participants: list[Participant] = []
        self.default_flow_ids: set[str] = set()
        self.process_contents: dict[str, list[str]] = {}

    def add_element(self, element: BpmnElement) -> None:
        if element.id in self.elements:
            raise BpmnParseError(f"duplicate element id {element.id!r}")
        self.elements[element.id] = element

    def add_flow(self, flow: FlowEdge) -> None:
        self.flows.append(flow)


def _collect_attrs(node: ET.Element) -> dict[str, str]:
    """Scenario configuration: scripts, expressions, vendor extensions."""
    attrs: dict[str, str] = {}
    for key, value in node.attrib.items():
        local = _local(key)
        if local in ("id", "name"):
            continue
        ns = _ns(key)
        attrs[f"{{{ns}}}{local}" if ns else local] = value
    for child in node:
        tag = _local(child.tag)
        if tag == "script" and child.text is not None:
            attrs["script"] = child.text
        elif tag == "conditionExpression" and child.text is not None:
            attrs["conditionExpression"] = child.text
        elif tag == "extensionElements":
            for ext in child.iter():
                if ext is child:
                    continue
                text = (ext.text or "").strip()
                if text:
                    attrs[ext.tag] = text
                for k, v in ext.attrib.items():
                    attrs[f"{ext.tag}@{_local(k)}"] = v
        elif tag == "timerEventDefinition":
            for timer in child:
                if timer.text and timer.text.strip():
                    attrs[f"timer.{_local(timer.tag)}"] = timer.text.strip()
        elif tag == "conditionalEventDefinition":
            for cond in child:
                if _local(cond.tag) == "condition" and cond.text:
                    attrs["condition"] = cond.text.strip()
    return attrs


def _event_kind(node: ET.Element, table: dict[str, ElementKind], plain: ElementKind) -> ElementKind:
    kinds = [table[_local(c.tag)] for c in node if _local(c.tag) in table]
    defs = [c for c in node if _local(c.tag).endswith("EventDefinition")]
    if len(defs) > 1:
        if plain is ElementKind.NONE_START:
            return (
                ElementKind.START_PARALLEL
                if node.get("parallelMultiple") == "true"
                else ElementKind.START_MULTIPLE
            )
        return ElementKind.END_MULTIPLE
    return kinds[0] if kinds else plain


def _parse_flow_node(builder: _Builder, node: ET.Element, scope_id: str) -> None:
    tag = _local(node.tag)
    node_id = node.get("id")
    name = node.get("name", "")

    if tag == "sequenceFlow":
        condition = None
        for child in node:
            if _local(child.tag) == "conditionExpression" and child.text is not None:
                condition = child.text
        if node_id is None:
            raise BpmnParseError("sequenceFlow without id")
        kind = FlowKind.CONDITIONAL_SEQUENCE if condition is not None else FlowKind.SEQUENCE
        builder.add_flow(
            FlowEdge(
                id=node_id,
                kind=kind,
                source=node.get("sourceRef", ""),
                target=node.get("targetRef", ""),
                condition_expr=condition,
                name=name,
            )
        )
        builder.process_contents.setdefault(scope_id, []).append(node_id)
        return

    if tag in ("dataInputAssociation", "dataOutputAssociation"):
        return  # handled where needed; geometry-free pass-through

    if node_id is None:
        raise BpmnParseError(f"element <{tag}> without id")

    kind: ElementKind
    if tag in _TASK_TAGS:
        kind = _TASK_TAGS[tag]
    elif tag in _GATEWAY_TAGS:
        kind = _GATEWAY_TAGS[tag]
    elif tag == "startEvent":
        kind = _event_kind(node, _START_EVENT_DEFS, ElementKind.NONE_START)
    elif tag == "endEvent":
        kind = _event_kind(node, _END_EVENT_DEFS, ElementKind.NONE_END)
    elif tag == "subProcess":
        kind = (
            ElementKind.EVENT_SUB_PROCESS
            if node.get("triggeredByEvent") == "true"
            else ElementKind.SUB_PROCESS
        )
    elif tag == "dataObject":
        kind = ElementKind.DATA_OBJECT
    elif tag == "dataStoreReference" or tag == "dataStore":
        kind = ElementKind.DATA_STORE
    elif tag in _IGNORED_TAGS:
        if tag == "laneSet":
            for lane in node:
                if _local(lane.tag) == "lane" and lane.get("id"):
                    lane_el = BpmnElement(
                        id=lane.get("id", ""),
                        kind=ElementKind.LANE,
                        name=lane.get("name", ""),
                        attrs=_collect_attrs(lane),
                        parent_id=scope_id,
                    )
                    builder.add_element(lane_el)
                    builder.process_contents.setdefault(scope_id, []).append(lane_el.id)
        return
    else:
        kind = ElementKind.UNSUPPORTED

    element = BpmnElement(
        id=node_id,
        kind=kind,
        name=name,
        attrs=_collect_attrs(node),
        parent_id=scope_id,
    )
    builder.add_element(element)
    builder.process_contents.setdefault(scope_id, []).append(node_id)

    if kind in (ElementKind.SUB_PROCESS, ElementKind.EVENT_SUB_PROCESS):
        for child in node:
            _parse_flow_node(builder, child, node_id)


def parse_bpmn(xml_bytes: bytes) -> ProcessModel:
    """Parse BPMN 2.0 XML bytes into a :class:`ProcessModel`.

    Raises :class:`BpmnParseError` on malformed XML, a missing BPMN model
    namespace, duplicate ids, or dangling flow endpoints.
    """
    digest = hashlib.sha256(xml_bytes).hexdigest()
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise BpmnParseError(f"malformed XML: {exc}") from exc

    if _ns(root.tag) != BPMN_NS or _local(root.tag) != "definitions":
        raise BpmnParseError(
            f"expected <definitions> in namespace {BPMN_NS}, got {root.tag!r}"
        )

    builder = _Builder()

    for node in root:
        tag = _local(node.tag)
        if tag == "process":
            process_id = node.get("id")
            if process_id is None:
                raise BpmnParseError("process without id")
            builder.add_element(
                BpmnElement(
                    id=process_id,
                    kind=ElementKind.PROCESS,
                    name=node.get("name", ""),
                    attrs=_collect_attrs(node),
                )
            )
            for child in node:
                _parse_flow_node(builder, child, process_id)
        elif tag == "message":
            message_id = node.get("id")
            if message_id is None:
                raise BpmnParseError("message without id")
            builder.add_element(
                BpmnElement(
                    id=message_id,
                    kind=ElementKind.MESSAGE,
                    name=node.get("name", ""),
                    attrs=_collect_attrs(node),
                )
            )
        elif tag == "collaboration":
            for child in node:
                ctag = _local(child.tag)
                if ctag == "participant":
                    pid = child.get("id")
                    if pid is None:
                        raise BpmnParseError("participant without id")
                    builder.add_element(
                        BpmnElement(
                            id=pid,
                            kind=ElementKind.PARTICIPANT,
                            name=child.get("name", ""),
                            attrs=_collect_attrs(child),
                        )
                    )
                    builder.participants.append(
                        Participant(
                            id=pid,
                            name=child.get("name", ""),
                            process_ref=child.get("processRef"),
                            contained_element_ids=(),
                        )
                    )
                elif ctag == "messageFlow":
                    fid = child.get("id")
                    if fid is None:
                        raise BpmnParseError("messageFlow without id")
                    builder.add_flow(
                        FlowEdge(
                            id=fid,
                            kind=FlowKind.MESSAGE,
                            source=child.get("sourceRef", ""),
                            target=child.get("targetRef", ""),
                            name=child.get("name", ""),
                            message_ref=child.get("messageRef"),
                        )
                    )

    # default sequence flows: referenced by a gateway/activity 'default' attr
    defaults = {
        node.get("default")
        for node in root.iter()
        if node.get("default") is not None
    }
    flows: list[FlowEdge] = []
    for flow in builder.flows:
        if flow.id in defaults and flow.kind is FlowKind.SEQUENCE:
            flow = FlowEdge(
                id=flow.id,
                kind=FlowKind.DEFAULT,
                source=flow.source,
                target=flow.target,
                condition_expr=flow.condition_expr,
                name=flow.name,
                message_ref=flow.message_ref,
            )
        flows.append(flow)

    # attach containment to participants (direct process contents, subprocesses included)
    participants: list[Participant] = []
    for participant in builder.participants:
        contained: tuple[str, ...] = ()
        if participant.process_ref is not None:
            if participant.process_ref not in builder.elements:
                raise BpmnParseError(
                    f"participant {participant.id!r} references unknown process "
                    f"{participant.process_ref!r}"
                )
            contained = tuple(_contained_ids(builder, participant.process_ref))
        participants.append(
            Participant(
                id=participant.id,
                name=participant.name,
                process_ref=participant.process_ref,
                contained_element_ids=contained,
            )
        )

    known_ids = set(builder.elements)
    for flow in flows:
        for endpoint in (flow.source, flow.target):
            if endpoint not in known_ids:
                raise BpmnParseError(
                    f"flow {flow.id!r} references unknown element {endpoint!r}"
                )

    return ProcessModel(
        elements=builder.elements,
        flows=tuple(flows),
        participants=tuple(participants),
        source_digest=digest,
    )


def _contained_ids(builder: _Builder, scope_id: str) -> list[str]:
    result: list[str] = [scope_id]
    queue = [scope_id]
    while queue:
        current = queue.pop()
        for child_id in builder.process_contents.get(current, []):
            result.append(child_id)
            element = builder.elements.get(child_id)
            if element is not None and element.kind in (
                ElementKind.SUB_PROCESS,
                ElementKind.EVENT_SUB_PROCESS,
            ):
                queue.append(child_id)
    return result


def parse_bpmn_file(path) -> ProcessModel:
    from pathlib import Path

    return parse_bpmn(Path(path).read_bytes())
