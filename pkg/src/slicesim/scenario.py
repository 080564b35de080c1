"""YAML scenario files: schema, validation with line numbers, and conversion to configs."""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .engine import ScenarioConfig, UeSpec
from .errors import ConfigError, CyclicGraph, UnstableScenario
from .oracle import StaticInstance
from .pool import slice_ranges
from .taskgraph import TaskGraph


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class TaskEntry(_Strict):
    id: int
    name: str = ""
    work: int | None = Field(default=None, ge=1)


class EdgeEntry(_Strict):
    src: int = Field(alias="from")
    dst: int = Field(alias="to")


class DagSection(_Strict):
    tasks: list[TaskEntry] = Field(min_length=1)
    edges: list[EdgeEntry] = []


class UeEntry(_Strict):
    lam: float = Field(alias="lambda", gt=0)
    initial_task: int | None = None
    packet_bits: float = Field(default=0.0, ge=0)


class PairEntry(_Strict):
    ue: int = Field(ge=1)
    upf: int = Field(ge=1)
    bits: float = Field(ge=0)
    rate: float = Field(gt=0)


class TransmissionSection(_Strict):
    link_rate: float | list[float] = 1e8
    pairs: list[PairEntry] = []


class Weights(_Strict):
    w1: float = Field(default=1.0, ge=0)
    w2: float = Field(default=1.0, ge=0)


class ScenarioFile(_Strict):
    name: str = "scenario"
    seed: int = 0
    duration: float = 1500.0
    warmup: float = 300.0
    sample_period: float = 10.0
    poll_period: float = 1.0
    mu: float = Field(gt=0)
    alpha: int = Field(default=1, ge=1)
    tau: float = Field(default=0.8, gt=0, le=1)
    weights: Weights = Weights()
    variance: Literal["per_term", "printed"] = "per_term"
    subtask_work: int = Field(default=10, ge=1)
    dag: DagSection
    ues: list[UeEntry] = Field(min_length=1)
    transmission: TransmissionSection = TransmissionSection()


def _line_of(node, path) -> int | None:
    """1-based line of the YAML node at ``path`` (or its deepest existing parent)."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == str(key)), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
        line = node.start_mark.line + 1
    return line


def _path_parts(path: str) -> list:
    parts = []
    for piece in path.replace("]", "").split("."):
        name, *idx = piece.split("[")
        if name:
            parts.append(name)
        parts.extend(int(i) for i in idx)
    return parts


def _dotted(loc) -> str:
    out = ""
    for key in loc:
        out += f"[{key}]" if isinstance(key, int) else (f".{key}" if out else str(key))
    return out


def parse_scenario(text: str, source: str = "<scenario>") -> tuple[ScenarioFile, yaml.Node]:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"{source}: invalid YAML: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping", line=1)
    try:
        return ScenarioFile.model_validate(data), node
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = list(err["loc"])
        raise ConfigError(f"{source}: {err['msg']}", _dotted(loc), _line_of(node, loc)) from None


def _graph(doc: ScenarioFile) -> TaskGraph:
    tasks = tuple((t.id, t.name or f"task{t.id}") for t in doc.dag.tasks)
    edges = tuple((e.src, e.dst) for e in doc.dag.edges)
    return TaskGraph(tasks, edges)


def to_config(doc: ScenarioFile, node=None, source="<scenario>") -> ScenarioConfig:
    try:
        graph = _graph(doc)
        return ScenarioConfig(
            graph=graph,
            ues=[UeSpec(u.lam, u.initial_task, u.packet_bits) for u in doc.ues],
            mu=doc.mu, alpha=doc.alpha, tau=doc.tau, w1=doc.weights.w1, w2=doc.weights.w2,
            link_rate=doc.transmission.link_rate,
            pairs={(p.ue, p.upf): (p.bits, p.rate) for p in doc.transmission.pairs},
            subtask_work=doc.subtask_work,
            task_work={t.id: t.work for t in doc.dag.tasks if t.work is not None},
            duration=doc.duration, warmup=doc.warmup, sample_period=doc.sample_period,
            poll_period=doc.poll_period, seed=doc.seed, variance=doc.variance, name=doc.name,
        )
    except CyclicGraph as exc:
        raise ConfigError(f"{source}: {exc}", "dag.edges", _line_of(node, ["dag", "edges"])) from None
    except ConfigError as exc:
        path = exc.path or "dag"
        msg = str(exc).split(": ", 1)[-1] if exc.path else str(exc)
        raise ConfigError(f"{source}: {msg}", path, _line_of(node, _path_parts(path))) from None
    except UnstableScenario as exc:
        raise UnstableScenario(f"{source}: {exc}") from None


def load_scenario_text(text: str, source: str = "<scenario>") -> ScenarioConfig:
    doc, node = parse_scenario(text, source)
    cfg = to_config(doc, node, source)
    for (i, j) in cfg.pairs:
        if i > cfg.n or j > cfg.r:
            raise ConfigError(f"{source}: pair ({i}, {j}) outside {cfg.n} UEs x {cfg.r} UPFs",
                              "transmission.pairs", _line_of(node, ["transmission", "pairs"]))
    return cfg


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file, or a bundled scenario by name (e.g. ``paper_replica``)."""
    p = Path(path)
    if not p.exists() and bundled_path(str(path)) is not None:
        p = bundled_path(str(path))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}") from None
    return load_scenario_text(text, str(path))


def bundled_path(name: str) -> Path | None:
    p = Path(str(resources.files("slicesim") / "scenarios" / f"{name}.yaml"))
    return p if p.exists() else None


def bundled_text(name: str) -> str:
    p = bundled_path(name)
    if p is None:
        raise ConfigError(f"no bundled scenario named {name!r}")
    return p.read_text()


def static_instance(cfg: ScenarioConfig) -> StaticInstance:
    """Snapshot of a scenario for the oracle: each UE sits in the slice of its initial task."""
    ue_slice = [cfg.slice_of(u.initial_task or cfg.workflow[0]) for u in cfg.ues]
    ranges = slice_ranges([tp for _, tp in cfg.priorities], cfg.alpha)
    return StaticInstance(cfg.queue_params(), ue_slice, ranges, cfg.variance)
