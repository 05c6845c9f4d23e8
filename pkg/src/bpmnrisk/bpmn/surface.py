"""Attack-surface classification of process elements.

Each BPMN kind maps to a fixed set of surface tags: user-defined conditions,
interpreted expressions, calls to outside services, scripts, collaboration
machinery, and data flow.  Control-flow-only elements (plain events, plain
gateways, plain sequence flows) expose no surface of their own because the
process engine manages them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import ElementKind, FlowKind, ProcessModel


class SurfaceTag(Enum):
    CONDITION = "Condition"
    EXPRESSION = "Expression"
    SERVICE_CALL = "ServiceCall"
    SCRIPT = "Script"
    COLLABORATION = "Collaboration"
    DATA_FLOW = "DataFlow"


_C = SurfaceTag.CONDITION
_E = SurfaceTag.EXPRESSION
_SC = SurfaceTag.SERVICE_CALL
_S = SurfaceTag.SCRIPT
_CO = SurfaceTag.COLLABORATION
_D = SurfaceTag.DATA_FLOW

# one row per element kind; empty set = exposes no surface of its own
ELEMENT_SURFACE: dict[ElementKind, frozenset[SurfaceTag]] = {
    ElementKind.DATA_OBJECT: frozenset({_D}),
    ElementKind.DATA_STORE: frozenset({_D}),
    ElementKind.MESSAGE: frozenset({_D}),
    ElementKind.PARTICIPANT: frozenset({_CO}),
    ElementKind.PROCESS: frozenset({_CO}),
    ElementKind.LANE: frozenset(),  # grouped under its participant
    ElementKind.SUB_PROCESS: frozenset({_CO}),
    ElementKind.EVENT_SUB_PROCESS: frozenset({_CO}),
    ElementKind.NONE_START: frozenset(),
    ElementKind.MESSAGE_START: frozenset({_D}),
    ElementKind.START_TIMER: frozenset({_E}),
    ElementKind.START_ERROR: frozenset(),
    ElementKind.START_COMPENSATION: frozenset(),
    ElementKind.START_PARALLEL: frozenset(),
    ElementKind.START_ESCALATION: frozenset(),
    ElementKind.START_CONDITION: frozenset({_C}),
    ElementKind.START_SIGNAL: frozenset(),
    ElementKind.START_MULTIPLE: frozenset(),
    ElementKind.NONE_END: frozenset(),
    ElementKind.MESSAGE_END: frozenset({_C, _D}),
    ElementKind.END_ERROR: frozenset(),
    ElementKind.CANCEL_END: frozenset(),
    ElementKind.END_COMPENSATION: frozenset(),
    ElementKind.END_SIGNAL: frozenset(),
    ElementKind.END_MULTIPLE: frozenset(),
    ElementKind.TERMINATE_END: frozenset(),
    ElementKind.TASK: frozenset(),
    ElementKind.USER_TASK: frozenset({_SC}),
    ElementKind.SCRIPT_TASK: frozenset({_S}),
    ElementKind.SERVICE_TASK: frozenset({_SC}),
    ElementKind.SEND_TASK: frozenset({_SC}),
    ElementKind.RECEIVE_TASK: frozenset({_SC}),
    ElementKind.MANUAL_TASK: frozenset({_SC}),
    ElementKind.BUSINESS_RULE_TASK: frozenset({_E}),
    ElementKind.CALL_ACTIVITY: frozenset({_SC}),
    ElementKind.EXCLUSIVE_GATEWAY: frozenset(),
    ElementKind.EVENT_BASED_GATEWAY: frozenset(),
    ElementKind.INCLUSIVE_GATEWAY: frozenset(),
    ElementKind.PARALLEL_GATEWAY: frozenset(),
    ElementKind.COMPLEX_GATEWAY: frozenset({_C}),
    ElementKind.UNSUPPORTED: frozenset(),
}

FLOW_SURFACE: dict[FlowKind, frozenset[SurfaceTag]] = {
    FlowKind.SEQUENCE: frozenset(),
    FlowKind.DEFAULT: frozenset(),
    FlowKind.CONDITIONAL_SEQUENCE: frozenset({_C}),
    FlowKind.MESSAGE: frozenset({_E, _D}),
    FlowKind.DATA_ASSOCIATION: frozenset(),
}


@dataclass(frozen=True)
class SurfaceReport:
    """Per-id surface tags; ``relevant`` collects ids with at least one tag."""

    per_element: dict[str, frozenset[SurfaceTag]]
    relevant: frozenset[str]

    def tags(self, element_id: str) -> frozenset[SurfaceTag]:
        return self.per_element.get(element_id, frozenset())


def classify_surface(model: ProcessModel) -> SurfaceReport:
    """Assign surface tags to every element and flow of a process model."""
    per_element: dict[str, frozenset[SurfaceTag]] = {}
    for element in model.elements.values():
        per_element[element.id] = ELEMENT_SURFACE[element.kind]
    for flow in model.flows:
        per_element[flow.id] = FLOW_SURFACE[flow.kind]
    relevant = frozenset(eid for eid, tags in per_element.items() if tags)
    return SurfaceReport(per_element=per_element, relevant=relevant)
