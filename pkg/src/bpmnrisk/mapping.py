"""Translate a process model into typed asset instances with provenance.

Mapping rules:
  1. data-related elements (data objects, messages, message events) become
     ``Data`` instances;
  2. elements requiring human interaction (user/manual tasks) become
     ``User`` + ``Identity`` + ``Credentials``;
  3. elements the process designer configures or programs (tasks, data
     stores, triggered starts, conditional/message flows, scopes) become
     ``Application`` + ``Connection``.

Every created asset records the BPMN element ids it came from; plain
sequence flows, plain gateways, and untriggered events create nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from .bpmn.model import (
    BpmnElement,
    ElementKind,
    FlowEdge,
    FlowKind,
    ProcessModel,
)
from .bpmn.surface import classify_surface
from .errors import MappingError
from .mal.ast import Multiplicity
from .mal.resolver import MalLanguage


@dataclass(frozen=True)
class AssetInstance:
    id: str
    type_name: str
    display_name: str
    provenance: tuple[str, ...] = ()
    defenses: dict[str, bool] = field(default_factory=dict)
    # auxiliary facts used by merging and catalog resolution
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Link:
    association: str
    left: str
    right: str


@dataclass(frozen=True)
class InstanceModel:
    assets: tuple[AssetInstance, ...]
    links: tuple[Link, ...]

    def asset(self, asset_id: str) -> AssetInstance:
        for a in self.assets:
            if a.id == asset_id:
                return a
        raise KeyError(asset_id)

    def asset_ids(self) -> set[str]:
        return {a.id for a in self.assets}

    def assets_of_type(self, type_name: str) -> list[AssetInstance]:
        return [a for a in self.assets if a.type_name == type_name]

    def by_provenance(self) -> dict[str, list[AssetInstance]]:
        out: dict[str, list[AssetInstance]] = {}
        for a in self.assets:
            for element_id in a.provenance:
                out.setdefault(element_id, []).append(a)
        return out

    def to_dict(self) -> dict:
        return {
            "schema": "instance-model/1",
            "assets": [
                {
                    "id": a.id,
                    "type": a.type_name,
                    "name": a.display_name,
                    "provenance": list(a.provenance),
                    "defenses": dict(sorted(a.defenses.items())),
                    "meta": dict(sorted(a.meta.items())),
                }
                for a in self.assets
            ],
            "links": [
                {"association": l.association, "left": l.left, "right": l.right}
                for l in self.links
            ],
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True).encode()

    @staticmethod
    def from_dict(d: dict) -> "InstanceModel":
        assets = tuple(
            AssetInstance(
                id=a["id"],
                type_name=a["type"],
                display_name=a["name"],
                provenance=tuple(a.get("provenance", ())),
                defenses=dict(a.get("defenses", {})),
                meta=dict(a.get("meta", {})),
            )
            for a in d["assets"]
        )
        links = tuple(
            Link(l["association"], l["left"], l["right"]) for l in d["links"]
        )
        return InstanceModel(assets=assets, links=links)

    @staticmethod
    def from_json(raw: bytes) -> "InstanceModel":
        return InstanceModel.from_dict(json.loads(raw.decode()))


@dataclass(frozen=True)
class MappingTrace:
    per_bpmn_element: dict[str, tuple[str, ...]]
    per_rule: dict[str, int]


class MergePolicy(Enum):
    PER_TASK = "per-task"
    PER_TECHNOLOGY = "per-technology"


RULE_DATA = "data-to-Data"
RULE_USER = "interaction-to-User"
RULE_APP = "configurable-to-Application"


class _ModelBuilder:
    def __init__(self, lang: MalLanguage):
        self.lang = lang
        self.assets: dict[str, AssetInstance] = {}
        self.links: set[Link] = set()
        self.trace: dict[str, list[str]] = {}
        self.rule_counts: dict[str, int] = {RULE_DATA: 0, RULE_USER: 0, RULE_APP: 0}

    def add_asset(
        self,
        asset_id: str,
        type_name: str,
        display_name: str,
        provenance: tuple[str, ...],
        rule: str,
        meta: dict[str, str] | None = None,
    ) -> str:
        if type_name not in self.lang.assets:
            raise MappingError(
                f"mapping produces asset type {type_name!r} unknown to the language"
            )
        if asset_id in self.assets:
            raise MappingError(f"duplicate asset id {asset_id!r}")
        self.assets[asset_id] = AssetInstance(
            id=asset_id,
            type_name=type_name,
            display_name=display_name,
            provenance=provenance,
            meta=meta or {},
        )
        for element_id in provenance:
            trace = self.trace.setdefault(element_id, [])
            if asset_id not in trace:
                trace.append(asset_id)
        self.rule_counts[rule] += 1
        return asset_id

    def link(self, association: str, left: str, right: str) -> None:
        self.links.add(Link(association, left, right))

    def finish(self) -> tuple[InstanceModel, MappingTrace]:
        model = InstanceModel(
            assets=tuple(sorted(self.assets.values(), key=lambda a: a.id)),
            links=tuple(sorted(self.links, key=lambda l: (l.association, l.left, l.right))),
        )
        trace = MappingTrace(
            per_bpmn_element={k: tuple(v) for k, v in sorted(self.trace.items())},
            per_rule=dict(self.rule_counts),
        )
        return model, trace


_TASK_APP_KINDS = {
    ElementKind.SCRIPT_TASK,
    ElementKind.SERVICE_TASK,
    ElementKind.SEND_TASK,
    ElementKind.RECEIVE_TASK,
    ElementKind.BUSINESS_RULE_TASK,
    ElementKind.CALL_ACTIVITY,
}

_USER_KINDS = {ElementKind.USER_TASK, ElementKind.MANUAL_TASK}

_TRIGGERED_START_KINDS = {ElementKind.START_TIMER, ElementKind.START_CONDITION}

_MESSAGE_DATA_KINDS = {ElementKind.MESSAGE_START, ElementKind.MESSAGE_END}


def map_process(model: ProcessModel, lang: MalLanguage) -> tuple[InstanceModel, MappingTrace]:
    """Apply the mapping table to a parsed process model.

    Requires the language to provide the bundled vocabulary's asset names.
    Raises :class:`MappingError` when an element carries surface tags but has
    no mapping rule, or when a produced link violates the language.
    """
    for required in ("Application", "Connection", "Data", "User", "Identity", "Credentials"):
        if required not in lang.assets:
            raise MappingError(f"language is missing required asset type {required!r}")

    surface = classify_surface(model)
    b = _ModelBuilder(lang)

    # --- scopes: one engine application per participant/standalone process
    scope_app: dict[str, str] = {}
    referenced_processes = {
        p.process_ref for p in model.participants if p.process_ref is not None
    }
    participant_of: dict[str, str] = {}
    for participant in model.participants:
        for contained in participant.contained_element_ids:
            participant_of[contained] = participant.id
        participant_of[participant.id] = participant.id

    for participant in sorted(model.participants, key=lambda p: p.id):
        app_id = f"app:{participant.id}"
        provenance = [participant.id]
        if participant.process_ref is not None:
            provenance.append(participant.process_ref)
        b.add_asset(
            app_id,
            "Application",
            participant.name or participant.id,
            tuple(provenance),
            RULE_APP,
            meta={"bpmn_kind": ElementKind.PARTICIPANT.value, "participant": participant.id},
        )
        scope_app[participant.id] = app_id
        if participant.process_ref is not None:
            scope_app[participant.process_ref] = app_id

    for element in sorted(model.elements.values(), key=lambda e: e.id):
        if element.kind is ElementKind.PROCESS and element.id not in referenced_processes:
            app_id = b.add_asset(
                f"app:{element.id}",
                "Application",
                element.display_name,
                (element.id,),
                RULE_APP,
                meta={"bpmn_kind": element.kind.value},
            )
            scope_app[element.id] = app_id

    def scope_of(element: BpmnElement) -> str:
        """Nearest enclosing scope application for a process element."""
        current = element.parent_id
        while current is not None:
            if current in scope_app:
                return scope_app[current]
            parent = model.elements.get(current)
            current = parent.parent_id if parent is not None else None
        raise MappingError(f"element {element.id!r} has no enclosing scope application")

    # --- nested scopes (sub-processes) get their own app plus a connection up
    for element in sorted(model.elements.values(), key=lambda e: e.id):
        if element.kind in (ElementKind.SUB_PROCESS, ElementKind.EVENT_SUB_PROCESS):
            app_id = b.add_asset(
                f"app:{element.id}",
                "Application",
                element.display_name,
                (element.id,),
                RULE_APP,
                meta={
                    "bpmn_kind": element.kind.value,
                    "participant": participant_of.get(element.id, ""),
                },
            )
            conn_id = b.add_asset(
                f"conn:{element.id}",
                "Connection",
                f"{element.display_name} scope link",
                (element.id,),
                RULE_APP,
            )
            scope_app[element.id] = app_id
            b.link("Networking", conn_id, app_id)
            b.link("Networking", conn_id, scope_of(element))

    # --- per-element rules
    for element in sorted(model.elements.values(), key=lambda e: e.id):
        kind = element.kind
        if kind in _TASK_APP_KINDS or kind is ElementKind.DATA_STORE or kind in _TRIGGERED_START_KINDS:
            engine = scope_of(element)
            meta = {
                "bpmn_kind": kind.value,
                "participant": participant_of.get(element.id, ""),
            }
            if "scriptFormat" in element.attrs:
                meta["script_format"] = element.attrs["scriptFormat"]
            app_id = b.add_asset(
                f"app:{element.id}", "Application", element.display_name, (element.id,), RULE_APP, meta
            )
            conn_id = b.add_asset(
                f"conn:{element.id}",
                "Connection",
                f"{element.display_name} link",
                (element.id,),
                RULE_APP,
            )
            b.link("Networking", conn_id, app_id)
            b.link("Networking", conn_id, engine)
        elif kind in _USER_KINDS:
            engine = scope_of(element)
            user_id = b.add_asset(
                f"user:{element.id}", "User", f"{element.display_name} user", (element.id,), RULE_USER
            )
            identity_id = b.add_asset(
                f"identity:{element.id}",
                "Identity",
                f"{element.display_name} identity",
                (element.id,),
                RULE_USER,
            )
            creds_id = b.add_asset(
                f"creds:{element.id}",
                "Credentials",
                f"{element.display_name} credentials",
                (element.id,),
                RULE_USER,
            )
            b.link("Ownership", creds_id, user_id)
            b.link("Protection", creds_id, identity_id)
            b.link("AccessRight", identity_id, engine)
        elif kind is ElementKind.DATA_OBJECT:
            engine = scope_of(element)
            data_id = b.add_asset(
                f"data:{element.id}", "Data", element.display_name, (element.id,), RULE_DATA
            )
            b.link("Storage", data_id, engine)
        elif kind in _MESSAGE_DATA_KINDS or kind is ElementKind.MESSAGE:
            b.add_asset(
                f"data:{element.id}", "Data", element.display_name, (element.id,), RULE_DATA
            )
            # wiring to connections and endpoint applications happens with flows
        elif surface.tags(element.id) and kind not in (
            ElementKind.PARTICIPANT,
            ElementKind.PROCESS,
            ElementKind.SUB_PROCESS,
            ElementKind.EVENT_SUB_PROCESS,
        ):
            raise MappingError(
                f"element {element.id!r} of kind {kind.value} carries surface tags "
                f"but has no mapping rule"
            )

    def endpoint_app(element_id: str) -> str:
        """Application standing for a message-flow endpoint."""
        app = scope_app.get(element_id)
        if app is not None:
            return app
        if f"app:{element_id}" in b.assets:
            return f"app:{element_id}"
        element = model.elements.get(element_id)
        if element is None:
            raise MappingError(f"message flow references unknown element {element_id!r}")
        return scope_of(element)

    # --- connecting elements
    for flow in sorted(model.flows, key=lambda f: f.id):
        if flow.kind is FlowKind.CONDITIONAL_SEQUENCE:
            source = model.elements[flow.source]
            engine = scope_of(source)
            app_id = b.add_asset(
                f"app:{flow.id}",
                "Application",
                flow.name or flow.id,
                (flow.id,),
                RULE_APP,
                meta={
                    "bpmn_kind": "ConditionalSequenceFlow",
                    "participant": participant_of.get(flow.source, ""),
                },
            )
            conn_id = b.add_asset(
                f"conn:{flow.id}", "Connection", f"{flow.name or flow.id} link", (flow.id,), RULE_APP
            )
            b.link("Networking", conn_id, app_id)
            b.link("Networking", conn_id, engine)
        elif flow.kind is FlowKind.MESSAGE:
            app_id = b.add_asset(
                f"app:{flow.id}",
                "Application",
                flow.name or flow.id,
                (flow.id,),
                RULE_APP,
                meta={"bpmn_kind": "MessageFlow"},
            )
            conn_id = b.add_asset(
                f"conn:{flow.id}",
                "Connection",
                f"{flow.name or flow.id} channel",
                (flow.id,),
                RULE_APP,
            )
            source_app = endpoint_app(flow.source)
            target_app = endpoint_app(flow.target)
            b.link("Networking", conn_id, app_id)
            b.link("Networking", conn_id, source_app)
            b.link("Networking", conn_id, target_app)

            # payload data: referenced message or a message event at either end
            payload_ids: list[str] = []
            if flow.message_ref is not None:
                payload_ids.append(f"data:{flow.message_ref}")
            for endpoint in (flow.source, flow.target):
                element = model.elements.get(endpoint)
                if element is not None and element.kind in _MESSAGE_DATA_KINDS:
                    payload_ids.append(f"data:{endpoint}")
            for payload in payload_ids:
                if payload not in b.assets:
                    raise MappingError(f"message flow {flow.id!r} references missing payload")
                b.link("Transport", payload, conn_id)
                b.link("Storage", payload, source_app)
                b.link("Storage", payload, target_app)

    # message-event data without any attached message flow is still managed
    # by its process engine
    linked_data = {l.left for l in b.links if l.association in ("Storage", "Transport")}
    for element in sorted(model.elements.values(), key=lambda e: e.id):
        if element.kind in _MESSAGE_DATA_KINDS:
            data_id = f"data:{element.id}"
            if data_id not in linked_data:
                b.link("Storage", data_id, scope_of(element))

    instance_model, trace = b.finish()
    validate_instance_model(instance_model, lang)
    return instance_model, trace


def validate_instance_model(model: InstanceModel, lang: MalLanguage) -> None:
    """Check types, association compatibility, and multiplicity bounds."""
    types: dict[str, str] = {}
    for asset in model.assets:
        if asset.type_name not in lang.assets:
            raise MappingError(f"asset {asset.id!r} has unknown type {asset.type_name!r}")
        types[asset.id] = asset.type_name

    # at most one link partner on ends declared with multiplicity 1
    partners: dict[tuple[str, str, str], set[str]] = {}

    for link in model.links:
        if link.left not in types or link.right not in types:
            raise MappingError(f"link {link} references unknown asset")
        candidates = [
            a
            for a in lang.associations
            if a.name == link.association
            and lang.is_subtype(types[link.left], a.left_asset)
            and lang.is_subtype(types[link.right], a.right_asset)
        ]
        if not candidates:
            raise MappingError(
                f"link {link.association!r} between {types[link.left]!r} and "
                f"{types[link.right]!r} matches no declared association"
            )
        if len(candidates) > 1:
            raise MappingError(
                f"link {link.association!r} between {link.left!r} and {link.right!r} "
                f"is ambiguous"
            )
        assoc = candidates[0]
        # assoc.left_mult bounds how many left partners a right instance has
        if assoc.left_mult is Multiplicity.ONE:
            partners.setdefault((assoc.name, "right", link.right), set()).add(link.left)
        if assoc.right_mult is Multiplicity.ONE:
            partners.setdefault((assoc.name, "left", link.left), set()).add(link.right)

    for (name, _side, anchor), others in partners.items():
        if len(others) > 1:
            raise MappingError(
                f"asset {anchor!r} has {len(others)} partners via {name!r}, multiplicity allows 1"
            )


def merge_strategy(model: InstanceModel, policy: MergePolicy) -> InstanceModel:
    """Optionally merge script-engine applications by technology.

    ``PER_TASK`` keeps one application per scripted task (the default).
    ``PER_TECHNOLOGY`` folds script-task applications that share a script
    language within the same participant into a single application.
    """
    if policy is MergePolicy.PER_TASK:
        return model

    groups: dict[tuple[str, str], list[AssetInstance]] = {}
    for asset in model.assets:
        if (
            asset.type_name == "Application"
            and asset.meta.get("bpmn_kind") == ElementKind.SCRIPT_TASK.value
        ):
            key = (asset.meta.get("participant", ""), asset.meta.get("script_format", ""))
            groups.setdefault(key, []).append(asset)

    remap: dict[str, str] = {}
    merged: dict[str, AssetInstance] = {}
    for (participant, language), members in sorted(groups.items()):
        if len(members) < 2:
            continue
        members = sorted(members, key=lambda a: a.id)
        survivor = members[0]
        provenance: list[str] = []
        for member in members:
            provenance.extend(member.provenance)
            remap[member.id] = survivor.id
        merged[survivor.id] = replace(
            survivor,
            display_name=f"{language or 'script'} engine ({participant})",
            provenance=tuple(provenance),
        )

    if not remap:
        return model

    assets: list[AssetInstance] = []
    for asset in model.assets:
        if asset.id in merged:
            assets.append(merged[asset.id])
        elif asset.id in remap:
            continue
        else:
            assets.append(asset)

    links = {
        Link(l.association, remap.get(l.left, l.left), remap.get(l.right, l.right))
        for l in model.links
    }
    return InstanceModel(
        assets=tuple(sorted(assets, key=lambda a: a.id)),
        links=tuple(sorted(links, key=lambda l: (l.association, l.left, l.right))),
    )
