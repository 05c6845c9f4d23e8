"""BPMN 2.0 ingestion and attack-surface classification."""

from .model import (
    SCOPE_KINDS,
    TASK_KINDS,
    BpmnElement,
    ElementKind,
    FlowEdge,
    FlowKind,
    Participant,
    ProcessModel,
)
from .parser import BPMN_NS, parse_bpmn, parse_bpmn_file
from .surface import ELEMENT_SURFACE, FLOW_SURFACE, SurfaceReport, SurfaceTag, classify_surface

__all__ = [
    "BPMN_NS",
    "BpmnElement",
    "ELEMENT_SURFACE",
    "ElementKind",
    "FLOW_SURFACE",
    "FlowEdge",
    "FlowKind",
    "Participant",
    "ProcessModel",
    "SCOPE_KINDS",
    "SurfaceReport",
    "SurfaceTag",
    "TASK_KINDS",
    "classify_surface",
    "parse_bpmn",
    "parse_bpmn_file",
]
