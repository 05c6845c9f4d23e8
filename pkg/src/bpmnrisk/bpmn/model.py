"""Process-model data types produced by the BPMN parser."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class ElementKind(Enum):
    PROCESS = "Process"
    SUB_PROCESS = "SubProcess"
    EVENT_SUB_PROCESS = "EventSubProcess"
    PARTICIPANT = "Participant"
    LANE = "Lane"

    NONE_START = "StartEvent"
    MESSAGE_START = "MessageStart"
    START_TIMER = "StartTimer"
    START_CONDITION = "StartCondition"
    START_ERROR = "StartError"
    START_COMPENSATION = "StartCompensation"
    START_PARALLEL = "StartParallel"
    START_ESCALATION = "StartEscalation"
    START_SIGNAL = "StartSignal"
    START_MULTIPLE = "StartMultiple"

    NONE_END = "EndEvent"
    MESSAGE_END = "MessageEnd"
    END_ERROR = "EndError"
    CANCEL_END = "CancelEnd"
    END_COMPENSATION = "EndCompensation"
    END_SIGNAL = "EndSignal"
    END_MULTIPLE = "EndMultiple"
    TERMINATE_END = "TerminateEnd"

    TASK = "Task"
    USER_TASK = "UserTask"
    SCRIPT_TASK = "ScriptTask"
    SERVICE_TASK = "ServiceTask"
    SEND_TASK = "SendTask"
    RECEIVE_TASK = "ReceiveTask"
    MANUAL_TASK = "ManualTask"
    BUSINESS_RULE_TASK = "BusinessRuleTask"
    CALL_ACTIVITY = "CallActivity"

    EXCLUSIVE_GATEWAY = "ExclusiveGateway"
    EVENT_BASED_GATEWAY = "EventBasedGateway"
    INCLUSIVE_GATEWAY = "InclusiveGateway"
    PARALLEL_GATEWAY = "ParallelGateway"
    COMPLEX_GATEWAY = "ComplexGateway"

    DATA_OBJECT = "DataObject"
    DATA_STORE = "DataStore"
    MESSAGE = "Message"

    UNSUPPORTED = "Unsupported"


class FlowKind(Enum):
    SEQUENCE = "Sequence"
    CONDITIONAL_SEQUENCE = "ConditionalSequence"
    DEFAULT = "Default"
    MESSAGE = "Message"
    DATA_ASSOCIATION = "DataAssociation"


TASK_KINDS = frozenset(
    {
        ElementKind.TASK,
        ElementKind.USER_TASK,
        ElementKind.SCRIPT_TASK,
        ElementKind.SERVICE_TASK,
        ElementKind.SEND_TASK,
        ElementKind.RECEIVE_TASK,
        ElementKind.MANUAL_TASK,
        ElementKind.BUSINESS_RULE_TASK,
        ElementKind.CALL_ACTIVITY,
    }
)

SCOPE_KINDS = frozenset(
    {
        ElementKind.PROCESS,
        ElementKind.SUB_PROCESS,
        ElementKind.EVENT_SUB_PROCESS,
        ElementKind.PARTICIPANT,
    }
)


@dataclass(frozen=True)
class BpmnElement:
    id: str
    kind: ElementKind
    name: str = ""
    # scenario-specific configuration: script body/format, condition and
    # timer expressions, implementation hints, vendor extensions
    attrs: dict[str, str] = field(default_factory=dict)
    # id of the enclosing process/sub-process scope, if any
    parent_id: str | None = None

    @property
    def display_name(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class FlowEdge:
    id: str
    kind: FlowKind
    source: str
    target: str
    condition_expr: str | None = None
    name: str = ""
    # referenced message element, for message flows
    message_ref: str | None = None


@dataclass(frozen=True)
class Participant:
    id: str
    name: str
    process_ref: str | None
    contained_element_ids: tuple[str, ...]


@dataclass(frozen=True)
class ProcessModel:
    elements: dict[str, BpmnElement]
    flows: tuple[FlowEdge, ...]
    participants: tuple[Participant, ...]
    source_digest: str

    def element(self, element_id: str) -> BpmnElement:
        return self.elements[element_id]

    def flows_by_kind(self, kind: FlowKind) -> list[FlowEdge]:
        return [f for f in self.flows if f.kind is kind]

    def elements_of_kind(self, *kinds: ElementKind) -> list[BpmnElement]:
        wanted = set(kinds)
        return [e for e in self.elements.values() if e.kind in wanted]

    def participant_of(self, element_id: str) -> Participant | None:
        for participant in self.participants:
            if element_id == participant.id or element_id in participant.contained_element_ids:
                return participant
        return None
