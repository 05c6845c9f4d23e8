"""Command-line pipeline: BPMN file in, risk report out.

``analyze`` runs the whole chain (language, ingest, mapping, enrichment,
compilation, simulation, reporting); ``validate`` checks a configuration
without simulating.  Each stage failure maps to its own exit code.
"""

from __future__ import annotations

import logging
import os
import sys
import time
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path

import click
import yaml

from . import __version__
from .bpmn import ElementKind, FlowKind, SurfaceTag, classify_surface, parse_bpmn
from .errors import (
    BpmnParseError,
    BpmnRiskError,
    CatalogError,
    ConfigError,
    EnrichmentError,
    FeedError,
    GraphError,
    MalParseError,
    MalResolutionError,
    MappingError,
    ReportError,
)
from .graph import (
    AttackGraph,
    NodeRef,
    SimConfig,
    compile_graph,
    graph_to_dot,
    path_containment_fractions,
    simulate,
)
from .mal import MalSource, bundled_language_source, parse_mal, resolve_language
from .mapping import InstanceModel, MergePolicy, map_process, merge_strategy
from .report import ReportFormat, aggregate, annotate, emit, render_figures
from .vuln import (
    ComponentCatalog,
    Pruning,
    SkillLevel,
    TtcParams,
    enrich,
    generate_variants,
    load_nvd,
    resolve_catalog,
)

log = logging.getLogger("bpmnrisk")


class StageExit(IntEnum):
    OK = 0
    CONFIG = 2
    LANGUAGE = 3
    INGEST = 4
    MAPPING = 5
    ENRICH = 6
    SIMULATE = 7
    REPORT = 8


_STAGE_OF_ERROR = {
    ConfigError: StageExit.CONFIG,
    MalParseError: StageExit.LANGUAGE,
    MalResolutionError: StageExit.LANGUAGE,
    BpmnParseError: StageExit.INGEST,
    MappingError: StageExit.MAPPING,
    CatalogError: StageExit.ENRICH,
    FeedError: StageExit.ENRICH,
    EnrichmentError: StageExit.ENRICH,
    GraphError: StageExit.SIMULATE,
    ReportError: StageExit.REPORT,
}


@dataclass(frozen=True)
class RunConfig:
    bpmn_path: str
    catalog_path: str
    nvd_dir: str
    lang_path: str | None = None  # None = bundled vocabulary
    samples: int = 10_000
    horizon_days: float = 100.0
    seed: int = 42
    pruning: str = "one-per-participant"
    merge: str = "per-task"
    skill: str = "intermediate"
    entries: tuple[str, ...] = ("auto",)
    goals: tuple[str, ...] = ()
    defenses: tuple[str, ...] = ()
    out_json: str = "report.json"
    out_csv: str | None = None
    out_dot: str | None = None
    out_figures: str | None = None
    out_annotations: str | None = None

    @staticmethod
    def from_file(path) -> "RunConfig":
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        def listy(value):
            if value is None:
                return ()
            if isinstance(value, str):
                return (value,)
            return tuple(str(v) for v in value)
        try:
            return RunConfig(
                bpmn_path=doc["bpmn"],
                catalog_path=doc["catalog"],
                nvd_dir=doc["nvd"],
                lang_path=doc.get("lang"),
                samples=int(doc.get("samples", 10_000)),
                horizon_days=float(doc.get("horizon", 100.0)),
                seed=int(doc.get("seed", 42)),
                pruning=str(doc.get("pruning", "one-per-participant")),
                merge=str(doc.get("merge", "per-task")),
                skill=str(doc.get("skill", "intermediate")),
                entries=listy(doc.get("entry")) or ("auto",),
                goals=listy(doc.get("goal")),
                defenses=listy(doc.get("defense")),
                out_json=str(doc.get("out", "report.json")),
                out_csv=doc.get("csv"),
                out_dot=doc.get("dot"),
                out_figures=doc.get("figures"),
                out_annotations=doc.get("annotations"),
            )
        except KeyError as exc:
            raise ConfigError(f"config file misses required key {exc}") from exc

    def check(self) -> None:
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        for label, path in (("bpmn", self.bpmn_path), ("catalog", self.catalog_path)):
            if not Path(path).exists():
                raise ConfigError(f"{label} file not found: {path}")
        if not Path(self.nvd_dir).exists():
            raise ConfigError(f"nvd path not found: {self.nvd_dir}")
        if self.lang_path is not None and not Path(self.lang_path).exists():
            raise ConfigError(f"language file not found: {self.lang_path}")
        if not self.goals:
            raise ConfigError("at least one goal is required")
        try:
            Pruning.parse(self.pruning)
        except CatalogError as exc:
            raise ConfigError(str(exc)) from exc
        if self.merge not in (p.value for p in MergePolicy):
            raise ConfigError(f"unknown merge policy {self.merge!r}")
        if self.skill not in (s.value for s in SkillLevel):
            raise ConfigError(f"unknown attacker skill {self.skill!r}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    stage: str
    message: str

    def __str__(self) -> str:
        return f"[{self.severity}] {self.stage}: {self.message}"


def _nvd_files(nvd_path: str) -> list[Path]:
    path = Path(nvd_path)
    if path.is_file():
        return [path]
    files = sorted(p for p in path.glob("*.json") if p.is_file())
    if not files:
        raise FeedError(f"no .json feed files under {path}")
    return files


def _parse_spec(spec: str) -> tuple[str, str]:
    ident, _, step = spec.rpartition(".")
    if not ident or not step:
        raise ConfigError(f"bad node spec {spec!r}, expected <id>.<step>")
    return ident, step


class _NodeResolver:
    """Maps entry/goal specs to graph nodes.

    A spec names an asset id, a BPMN element id, or a unique asset display
    name, followed by an attack step.
    """

    def __init__(self, model: InstanceModel, graph: AttackGraph):
        self.refs = {n.ref for n in graph.nodes}
        self.by_asset: dict[str, list[str]] = {}
        self.by_element: dict[str, list[str]] = {}
        self.by_name: dict[str, list[str]] = {}
        for asset in model.assets:
            self.by_asset.setdefault(asset.id, []).append(asset.id)
            self.by_name.setdefault(asset.display_name, []).append(asset.id)
            for element_id in asset.provenance:
                self.by_element.setdefault(element_id, []).append(asset.id)

    def resolve(self, spec: str) -> NodeRef:
        ident, step = _parse_spec(spec)
        candidates = (
            self.by_asset.get(ident)
            or self.by_element.get(ident)
            or self.by_name.get(ident)
            or []
        )
        with_step = [a for a in candidates if (a, step) in self.refs]
        if not with_step:
            raise ConfigError(
                f"cannot resolve {spec!r}: no asset for {ident!r} has step {step!r}"
            )
        if len(with_step) > 1:
            raise ConfigError(
                f"{spec!r} is ambiguous; candidates: {sorted(with_step)}"
            )
        return (with_step[0], step)


def _auto_entries(model: InstanceModel, process_model, graph: AttackGraph) -> list[NodeRef]:
    """Attacker footholds on boundary channels: message-flow connections."""
    message_flow_ids = {
        f.id for f in process_model.flows if f.kind is FlowKind.MESSAGE
    }
    refs = {n.ref for n in graph.nodes}
    out = []
    for asset in model.assets:
        if asset.type_name != "Connection":
            continue
        if not set(asset.provenance) & message_flow_ids:
            continue
        ref = (asset.id, "mitm")
        if ref in refs:
            out.append(ref)
    if not out:
        raise ConfigError("auto entry placement found no boundary connections")
    return sorted(out)


def _all_entries(model: InstanceModel, graph: AttackGraph) -> list[NodeRef]:
    """Attacker placed on every plausible foothold step."""
    steps_by_type = {
        "Connection": "mitm",
        "Application": "connect",
        "User": "attemptPhishing",
    }
    refs = {n.ref for n in graph.nodes}
    out = []
    for asset in model.assets:
        step = steps_by_type.get(asset.type_name)
        if step and (asset.id, step) in refs:
            out.append((asset.id, step))
    return sorted(out)


@dataclass
class PipelineResult:
    report_paths: list[Path] = field(default_factory=list)


def _load_language(cfg: RunConfig):
    if cfg.lang_path is None:
        source = bundled_language_source()
    else:
        source = MalSource(
            Path(cfg.lang_path).read_text(encoding="utf-8"), str(cfg.lang_path)
        )
    return resolve_language(parse_mal(source))


def _timed(stage: str, fn):
    start = time.perf_counter()
    result = fn()
    log.info("stage %-10s %8.1f ms", stage, (time.perf_counter() - start) * 1e3)
    return result


def run(cfg: RunConfig) -> int:
    """Execute the full pipeline; returns a process exit status."""
    try:
        cfg.check()
    except BpmnRiskError as exc:
        return _fail("config", exc)

    try:
        lang = _timed("language", lambda: _load_language(cfg))
    except BpmnRiskError as exc:
        return _fail("language", exc)

    try:
        bpmn_bytes = Path(cfg.bpmn_path).read_bytes()
        process_model = _timed("ingest", lambda: parse_bpmn(bpmn_bytes))
        classify_surface(process_model)
    except OSError as exc:
        return _fail("ingest", BpmnParseError(str(exc)))
    except BpmnRiskError as exc:
        return _fail("ingest", exc)

    try:
        instance_model, _trace = _timed(
            "mapping", lambda: map_process(process_model, lang)
        )
        instance_model = merge_strategy(instance_model, MergePolicy(cfg.merge))
    except BpmnRiskError as exc:
        return _fail("mapping", exc)

    try:
        catalog = ComponentCatalog.load(cfg.catalog_path)
        resolved = resolve_catalog(catalog, instance_model)
        db = load_nvd(_nvd_files(cfg.nvd_dir))
        variants = generate_variants(resolved, Pruning.parse(cfg.pruning))
        skill = SkillLevel(cfg.skill)
        params = TtcParams.default()
        enriched = _timed(
            "enrich",
            lambda: {v.id: enrich(instance_model, v, db, skill, params) for v in variants},
        )
    except BpmnRiskError as exc:
        return _fail("enrich", exc)

    try:
        graphs: dict[str, AttackGraph] = {}
        for vid, em in enriched.items():
            graph = compile_graph(em, lang)
            for spec in cfg.defenses:
                asset_id, defense = _parse_spec(spec)
                graph = graph.toggle_defense((asset_id, defense), True)
            graphs[vid] = graph

        first_graph = next(iter(graphs.values()))
        resolver = _NodeResolver(instance_model, first_graph)
        if list(cfg.entries) == ["auto"]:
            entries = _auto_entries(instance_model, process_model, first_graph)
        elif list(cfg.entries) == ["all"]:
            entries = _all_entries(instance_model, first_graph)
        else:
            entries = [resolver.resolve(s) for s in cfg.entries]
        goals = [resolver.resolve(s) for s in cfg.goals]

        sim_cfg = SimConfig(
            samples=cfg.samples,
            horizon_days=cfg.horizon_days,
            seed=cfg.seed,
            attacker_entry=tuple(entries),
            goals=tuple(goals),
        )
        results = _timed(
            "simulate",
            lambda: {vid: simulate(g, sim_cfg) for vid, g in graphs.items()},
        )

        # second pass: containment frequency of every extracted path
        candidate_paths: dict[NodeRef, list[tuple[NodeRef, ...]]] = {}
        for res in results.values():
            for goal, goal_result in res.per_goal.items():
                if goal_result.critical_path:
                    paths = candidate_paths.setdefault(goal, [])
                    if goal_result.critical_path not in paths:
                        paths.append(goal_result.critical_path)
        path_fractions = {
            vid: path_containment_fractions(g, sim_cfg, candidate_paths)
            for vid, g in graphs.items()
        }
    except BpmnRiskError as exc:
        return _fail("simulate", exc)

    try:
        weights = {v.id: v.weight for v in variants}
        products = {v.id: tuple(sorted(v.products())) for v in variants}
        report = _timed(
            "report",
            lambda: aggregate(
                results,
                weights,
                instance_model=instance_model,
                variant_products=products,
                path_fractions=path_fractions,
            ),
        )
        annotated = annotate(process_model, report)

        out_json = Path(cfg.out_json)
        out_json.parent.mkdir(parents=True, exist_ok=True)
        out_json.write_bytes(emit(report, ReportFormat.JSON))
        written = [out_json]

        annotations_path = (
            Path(cfg.out_annotations)
            if cfg.out_annotations
            else out_json.with_name(out_json.stem + ".annotations.json")
        )
        annotations_path.write_bytes(annotated.to_json())
        written.append(annotations_path)

        if cfg.out_csv:
            Path(cfg.out_csv).parent.mkdir(parents=True, exist_ok=True)
            Path(cfg.out_csv).write_bytes(emit(report, ReportFormat.CSV))
            written.append(Path(cfg.out_csv))
        if cfg.out_dot:
            Path(cfg.out_dot).parent.mkdir(parents=True, exist_ok=True)
            Path(cfg.out_dot).write_bytes(emit(report, ReportFormat.DOT))
            written.append(Path(cfg.out_dot))
        if cfg.out_figures:
            render_figures(report, cfg.out_figures, results)

        for path in written:
            log.info("wrote %s", path)
    except BpmnRiskError as exc:
        return _fail("report", exc)

    # non-invasiveness witness: the input bytes were never touched
    if Path(cfg.bpmn_path).read_bytes() != bpmn_bytes:
        return _fail("report", ReportError("input BPMN changed during the run"))
    return int(StageExit.OK)


def _fail(stage: str, exc: BaseException) -> int:
    log.error("%s stage failed: %s", stage, exc)
    click.echo(f"error in {stage} stage: {exc}", err=True)
    by_stage = {
        "config": StageExit.CONFIG,
        "language": StageExit.LANGUAGE,
        "ingest": StageExit.INGEST,
        "mapping": StageExit.MAPPING,
        "enrich": StageExit.ENRICH,
        "simulate": StageExit.SIMULATE,
        "report": StageExit.REPORT,
    }
    if stage in by_stage:
        return int(by_stage[stage])
    for err_type, code in _STAGE_OF_ERROR.items():
        if isinstance(exc, err_type):
            return int(code)
    return 1


def validate(cfg: RunConfig) -> list[Diagnostic]:
    """Dry-run checks covering every stage before simulation."""
    diags: list[Diagnostic] = []

    try:
        cfg.check()
    except BpmnRiskError as exc:
        return [Diagnostic("error", "config", str(exc))]

    try:
        lang = _load_language(cfg)
    except BpmnRiskError as exc:
        return diags + [Diagnostic("error", "language", str(exc))]

    try:
        process_model = parse_bpmn(Path(cfg.bpmn_path).read_bytes())
    except (OSError, BpmnRiskError) as exc:
        return diags + [Diagnostic("error", "ingest", str(exc))]

    try:
        instance_model, _ = map_process(process_model, lang)
        instance_model = merge_strategy(instance_model, MergePolicy(cfg.merge))
    except BpmnRiskError as exc:
        return diags + [Diagnostic("error", "mapping", str(exc))]

    variants = []
    db = None
    try:
        catalog = ComponentCatalog.load(cfg.catalog_path)
        resolved = resolve_catalog(catalog, instance_model)
        surface = classify_surface(process_model)
        covered = set(resolved.asset_ids())
        uncovered = sorted(
            asset.id
            for asset in instance_model.assets
            if asset.type_name == "Application"
            and asset.id not in covered
            and any(
                surface.tags(element_id) & {SurfaceTag.SERVICE_CALL, SurfaceTag.SCRIPT}
                for element_id in asset.provenance
            )
        )
        if uncovered:
            diags.append(
                Diagnostic(
                    "warning",
                    "enrich",
                    f"catalog covers no candidates for: {', '.join(uncovered)}",
                )
            )
        db = load_nvd(_nvd_files(cfg.nvd_dir))
        variants = generate_variants(resolved, Pruning.parse(cfg.pruning))
    except BpmnRiskError as exc:
        diags.append(Diagnostic("error", "enrich", str(exc)))

    try:
        if variants and db is not None:
            enriched = enrich(
                instance_model, variants[0], db, SkillLevel(cfg.skill), TtcParams.default()
            )
            graph = compile_graph(enriched, lang)
        else:
            graph = compile_graph(instance_model, lang)
        resolver = _NodeResolver(instance_model, graph)
        if list(cfg.entries) == ["auto"]:
            _auto_entries(instance_model, process_model, graph)
        elif list(cfg.entries) == ["all"]:
            _all_entries(instance_model, graph)
        else:
            for spec in cfg.entries:
                resolver.resolve(spec)
        for spec in cfg.goals:
            resolver.resolve(spec)
        for spec in cfg.defenses:
            asset_id, defense = _parse_spec(spec)
            graph.node((asset_id, defense))
    except BpmnRiskError as exc:
        diags.append(Diagnostic("error", "simulate", str(exc)))

    return diags


# --- command line -------------------------------------------------------


def _setup_logging() -> None:
    level = os.environ.get("BPMNRISK_LOG", "info").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _build_config(config, bpmn, lang, catalog, nvd, samples, horizon, seed, pruning,
                  merge, skill, entry, goal, defense, out, csv_path, dot, figures,
                  annotations) -> RunConfig:
    if config:
        cfg = RunConfig.from_file(config)
    else:
        if not (bpmn and catalog and nvd):
            raise ConfigError("--bpmn, --catalog and --nvd are required (or use --config)")
        cfg = RunConfig(bpmn_path=bpmn, catalog_path=catalog, nvd_dir=nvd)
    overrides = {}
    if bpmn:
        overrides["bpmn_path"] = bpmn
    if lang:
        overrides["lang_path"] = lang
    if catalog:
        overrides["catalog_path"] = catalog
    if nvd:
        overrides["nvd_dir"] = nvd
    if samples is not None:
        overrides["samples"] = samples
    if horizon is not None:
        overrides["horizon_days"] = horizon
    if seed is not None:
        overrides["seed"] = seed
    if pruning:
        overrides["pruning"] = pruning
    if merge:
        overrides["merge"] = merge
    if skill:
        overrides["skill"] = skill
    if entry:
        overrides["entries"] = tuple(entry)
    if goal:
        overrides["goals"] = tuple(goal)
    if defense:
        overrides["defenses"] = tuple(defense)
    if out:
        overrides["out_json"] = out
    if csv_path:
        overrides["out_csv"] = csv_path
    if dot:
        overrides["out_dot"] = dot
    if figures:
        overrides["out_figures"] = figures
    if annotations:
        overrides["out_annotations"] = annotations
    return replace(cfg, **overrides)


_shared_options = [
    click.option("--config", type=click.Path(), default=None, help="run configuration YAML"),
    click.option("--bpmn", type=click.Path(), default=None, help="BPMN 2.0 process file"),
    click.option("--lang", type=click.Path(), default=None, help="threat language file (default: bundled)"),
    click.option("--catalog", type=click.Path(), default=None, help="component catalog YAML"),
    click.option("--nvd", type=click.Path(), default=None, help="directory of NVD JSON feeds (or one file)"),
    click.option("--samples", type=int, default=None, help="Monte Carlo samples (default 10000)"),
    click.option("--horizon", type=float, default=None, help="evaluation horizon in days (default 100)"),
    click.option("--seed", type=int, default=None, help="simulation seed (default 42)"),
    click.option("--pruning", default=None, help="exhaustive | one-per-participant | usage-share-floor:F"),
    click.option("--merge", default=None, help="per-task | per-technology"),
    click.option("--skill", default=None, help="novice | intermediate | expert"),
    click.option("--entry", multiple=True, help="attacker entry <id>.<step>, or auto/all"),
    click.option("--goal", multiple=True, help="goal <id>.<step>"),
    click.option("--defense", multiple=True, help="enable defense <assetId>.<defense>"),
    click.option("--out", type=click.Path(), default=None, help="report JSON path"),
    click.option("--csv", "csv_path", type=click.Path(), default=None, help="report CSV path"),
    click.option("--dot", type=click.Path(), default=None, help="attack path DOT file"),
    click.option("--figures", type=click.Path(), default=None, help="directory for PNG figures"),
    click.option("--annotations", type=click.Path(), default=None, help="risk sidecar JSON path"),
]


def _apply_options(fn):
    for option in reversed(_shared_options):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="bpmnrisk")
def main() -> None:
    """Attack-graph risk analysis for BPMN process models."""
    _setup_logging()


@main.command()
@_apply_options
def analyze(config, bpmn, lang, catalog, nvd, samples, horizon, seed, pruning, merge,
            skill, entry, goal, defense, out, csv_path, dot, figures, annotations):
    """Run the full analysis pipeline and write the report files."""
    try:
        cfg = _build_config(config, bpmn, lang, catalog, nvd, samples, horizon, seed,
                            pruning, merge, skill, entry, goal, defense, out, csv_path,
                            dot, figures, annotations)
    except BpmnRiskError as exc:
        click.echo(f"error in config stage: {exc}", err=True)
        sys.exit(int(StageExit.CONFIG))
    sys.exit(run(cfg))


@main.command(name="validate")
@_apply_options
def validate_cmd(config, bpmn, lang, catalog, nvd, samples, horizon, seed, pruning,
                 merge, skill, entry, goal, defense, out, csv_path, dot, figures,
                 annotations):
    """Check a configuration end to end without simulating."""
    try:
        cfg = _build_config(config, bpmn, lang, catalog, nvd, samples, horizon, seed,
                            pruning, merge, skill, entry, goal, defense, out, csv_path,
                            dot, figures, annotations)
    except BpmnRiskError as exc:
        click.echo(f"error in config stage: {exc}", err=True)
        sys.exit(int(StageExit.CONFIG))
    diags = validate(cfg)
    for diag in diags:
        click.echo(str(diag), err=diag.severity == "error")
    if any(d.severity == "error" for d in diags):
        sys.exit(int(StageExit.CONFIG))
    click.echo(f"configuration ok ({len(diags)} warnings)" if diags else "configuration ok")
    sys.exit(0)


if __name__ == "__main__":
    main()
