"""Project risk back onto the original process as a sidecar document.

The source BPMN file is never rewritten; the annotation is a separate
JSON document keyed by element id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..bpmn.model import ProcessModel
from ..errors import ReportError
from .build import Report


@dataclass(frozen=True)
class ElementAnnotation:
    element_id: str
    name: str
    kind: str
    risk: float
    asset_ids: tuple[str, ...]


@dataclass(frozen=True)
class AnnotatedModel:
    source_digest: str
    horizon_days: float
    elements: dict[str, ElementAnnotation]

    def risk(self, element_id: str) -> float:
        return self.elements[element_id].risk

    def ranked(self) -> list[ElementAnnotation]:
        return sorted(
            self.elements.values(), key=lambda e: (-e.risk, e.element_id)
        )

    def to_dict(self) -> dict:
        return {
            "schema": "risk-annotation/1",
            "source_digest": self.source_digest,
            "horizon_days": self.horizon_days,
            "elements": {
                eid: {
                    "name": a.name,
                    "kind": a.kind,
                    "risk": a.risk,
                    "assets": list(a.asset_ids),
                }
                for eid, a in sorted(self.elements.items())
            },
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True).encode()


def annotate(model: ProcessModel, report: Report) -> AnnotatedModel:
    """Attach a risk score in [0,1] to every element and flow of the model.

    Elements that produced no assets score zero.  Raises
    :class:`ReportError` when report provenance references an element the
    model does not contain.
    """
    known = set(model.elements) | {f.id for f in model.flows}
    traced: dict[str, list[str]] = {}
    for asset_id, info in report.assets.items():
        for element_id in info.provenance:
            if element_id not in known:
                raise ReportError(
                    f"asset {asset_id!r} references unknown element {element_id!r}"
                )
            traced.setdefault(element_id, []).append(asset_id)

    elements: dict[str, ElementAnnotation] = {}
    for element in model.elements.values():
        elements[element.id] = ElementAnnotation(
            element_id=element.id,
            name=element.display_name,
            kind=element.kind.value,
            risk=report.per_bpmn_element.get(element.id, 0.0),
            asset_ids=tuple(sorted(traced.get(element.id, ()))),
        )
    for flow in model.flows:
        elements[flow.id] = ElementAnnotation(
            element_id=flow.id,
            name=flow.name or flow.id,
            kind=flow.kind.value,
            risk=report.per_bpmn_element.get(flow.id, 0.0),
            asset_ids=tuple(sorted(traced.get(flow.id, ()))),
        )
    return AnnotatedModel(
        source_digest=model.source_digest,
        horizon_days=report.horizon_days,
        elements=elements,
    )
