"""Scenario documents: schema, geometry validation and loading."""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from shapely.geometry import LineString, Point, Polygon, box

from ..config.settings import PHYSICAL_SOURCE_NAMES, AgentConfig, Tunables
from ..exceptions import ScenarioError, SourceError
from ..geometry.environment import Environment, Exit, Intersection, Route, Sign, SpawnRegion
from ..geometry.primitives import Point2
from ..sources.distributions import SourceLevels

logger = logging.getLogger(__name__)

XY = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RouteSpec(_Strict):
    id: int = Field(ge=0)
    portal: Tuple[XY, XY]

    # Far end of the corridor, default end of crowd paths
    exit: Optional[XY] = None


class IntersectionSpec(_Strict):
    center: XY
    routes: List[RouteSpec] = Field(min_length=2)


class SignSpec(_Strict):
    id: Optional[int] = None
    pos: XY
    facing_deg: float
    target_route: int = Field(ge=0)

    # Falls back to tunables.d_vis
    d_vis: Optional[float] = Field(None, gt=0.0)


class SpawnRegionSpec(_Strict):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @model_validator(mode="after")
    def _check_extent(self) -> "SpawnRegionSpec":
        if self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise ValueError("spawn region must have xmin < xmax and ymin < ymax")
        return self


class ExitSpec(_Strict):
    label: str
    pos: XY


class EnvironmentSpec(_Strict):
    # walls[0] is the outer boundary, the rest are obstacles; empty means open plane
    walls: List[List[XY]] = Field(default_factory=list)
    intersection: IntersectionSpec
    signs: List[SignSpec] = Field(default_factory=list)
    exits: List[ExitSpec] = Field(default_factory=list)
    spawn_region: Optional[SpawnRegionSpec] = None


class AgentsSpec(_Strict):
    count: int = Field(100, ge=0)

    # AgentConfig field overrides (fov_deg accepted)
    config: Dict[str, Any] = Field(default_factory=dict)


class FlowSpec(_Strict):
    route: int = Field(ge=0)

    # Agents per tick, fractional rates accumulate
    rate: float = Field(ge=0.0)

    # Meters per tick
    speed: float = Field(0.5, gt=0.0)
    path: Optional[List[XY]] = None

    # Width of the lateral band walkers are spread over
    spread: float = Field(1.0, ge=0.0)

    @field_validator("path")
    @classmethod
    def _check_path(cls, value: Optional[List[XY]]) -> Optional[List[XY]]:
        if value is not None and len(value) < 2:
            raise ValueError("a crowd path needs at least two points")
        return value


class ScheduleEntry(_Strict):
    tick: int = Field(ge=0)
    route: int = Field(ge=0)
    rate: float = Field(ge=0.0)


class CrowdSpec(_Strict):
    flows: List[FlowSpec] = Field(default_factory=list)
    schedule: List[ScheduleEntry] = Field(default_factory=list)

    # Crowd ticks simulated before focal agents appear
    warmup: int = Field(0, ge=0)


class SyntheticSpec(_Strict):
    levels: Dict[str, List[str]]


class ScenarioDocument(_Strict):
    name: str = "scenario"
    environment: EnvironmentSpec
    agents: AgentsSpec = Field(default_factory=AgentsSpec)
    crowd: CrowdSpec = Field(default_factory=CrowdSpec)
    mode: Literal["geometric", "synthetic"] = "geometric"
    synthetic: Optional[SyntheticSpec] = None
    tunables: Tunables = Field(default_factory=Tunables)
    disabled_sources: List[str] = Field(default_factory=list)
    seed: int = Field(0, ge=0)

    @field_validator("disabled_sources")
    @classmethod
    def _check_disabled(cls, value: List[str]) -> List[str]:
        unknown = sorted(set(value) - set(PHYSICAL_SOURCE_NAMES))
        if unknown:
            raise ValueError(f"unknown sources {unknown}; expected a subset of {list(PHYSICAL_SOURCE_NAMES)}")
        return sorted(set(value), key=PHYSICAL_SOURCE_NAMES.index)


@dataclass(frozen=True)
class Scenario:
    """A validated, ready-to-run scenario."""

    document: ScenarioDocument
    environment: Environment
    agent_config: AgentConfig
    levels: Optional[SourceLevels] = None

    # Command-line overrides applied on top of the document
    overrides: Tuple[Tuple[str, Any], ...] = ()

    @property
    def name(self) -> str:
        return self.document.name

    @property
    def mode(self) -> str:
        return self.document.mode

    @property
    def seed(self) -> int:
        return self.document.seed

    @property
    def tunables(self) -> Tunables:
        return self.document.tunables

    @property
    def agents(self) -> AgentsSpec:
        return self.document.agents

    @property
    def crowd(self) -> CrowdSpec:
        return self.document.crowd

    @property
    def disabled_sources(self) -> Tuple[str, ...]:
        return tuple(self.document.disabled_sources)

    @property
    def route_count(self) -> int:
        return self.environment.intersection.route_count

    @property
    def source_count(self) -> int:
        """Active information sources (physical ones not disabled, plus memory)."""
        return len(PHYSICAL_SOURCE_NAMES) - len(self.disabled_sources) + 1

    def with_overrides(self, **overrides: Any) -> "Scenario":
        """Return a copy with top-level or tunable values replaced.

        Recognised keys: ``seed``, ``agents`` (count), ``mode`` and any
        tunable field name (``theta``, ``memory_window``...). ``None`` values
        are ignored.
        """
        applied = {k: v for k, v in overrides.items() if v is not None}
        if not applied:
            return self
        data = self.document.model_dump(by_alias=True)
        for key, value in applied.items():
            if key == "seed":
                data["seed"] = value
            elif key == "agents":
                data["agents"]["count"] = value
            elif key == "mode":
                data["mode"] = value
            elif key in Tunables.model_fields:
                alias = Tunables.model_fields[key].alias or key
                data["tunables"][alias] = value
            else:
                raise ScenarioError(f"unknown override {key!r}", field="overrides")
        scenario = build_scenario(data)
        merged = dict(self.overrides)
        merged.update(applied)
        return Scenario(scenario.document, scenario.environment, scenario.agent_config, scenario.levels,
                        tuple(sorted(merged.items())))

    def config_echo(self) -> Dict[str, Any]:
        """Everything needed to reproduce a run from the scenario file."""
        return {
            "scenario": self.name,
            "mode": self.mode,
            "tunables": self.tunables.model_dump(by_alias=True),
            "agent": self.agent_config.model_dump(),
            "disabled_sources": list(self.disabled_sources),
            "overrides": dict(self.overrides),
        }


def load_scenario(text: str, fmt: str = "json", defaults: Optional[Tunables] = None) -> Scenario:
    """Parse and validate a scenario document.

    Args:
        text: Document contents
        fmt: ``json`` or ``yaml``
        defaults: Tunables the document's own ``tunables`` block is merged over

    Returns:
        Validated Scenario

    Raises:
        ScenarioError: On malformed text, schema violations or invalid geometry
    """
    try:
        data = yaml.safe_load(text) if fmt == "yaml" else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ScenarioError(f"malformed {fmt} document: {e}") from e
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be an object")

    if defaults is not None:
        data = dict(data)
        data["tunables"] = _merge_tunables(defaults, data.get("tunables") or {})
    return build_scenario(data)


def load_scenario_file(path, defaults: Optional[Tunables] = None) -> Scenario:
    """Load a scenario from a ``.json`` or ``.yaml``/``.yml`` file."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario not found: {path}")
    fmt = "yaml" if path.suffix.lower() in (".yaml", ".yml") else "json"
    logger.debug(f"Loading {fmt} scenario from {path}")
    return load_scenario(path.read_text(encoding="utf-8"), fmt=fmt, defaults=defaults)


def build_scenario(data: Dict[str, Any]) -> Scenario:
    """Validate a parsed document and build the runtime objects."""
    try:
        doc = ScenarioDocument.model_validate(data)
    except ValidationError as e:
        raise _as_scenario_error(e) from e

    env = _build_environment(doc)
    _check_crowd(doc, env)
    levels = _build_levels(doc, env)

    try:
        agent_config = AgentConfig.from_tunables(
            doc.tunables, {**doc.agents.config, "disabled_sources": tuple(doc.disabled_sources)}
        )
    except (ValidationError, TypeError) as e:
        raise ScenarioError(str(e).splitlines()[0], field="agents.config") from e

    return Scenario(document=doc, environment=env, agent_config=agent_config, levels=levels)


def _merge_tunables(defaults: Tunables, raw: Dict[str, Any]) -> Dict[str, Any]:
    try:
        user = Tunables.model_validate(raw)
    except ValidationError as e:
        raise _as_scenario_error(e, prefix="tunables") from e
    merged = defaults.model_copy(update={name: getattr(user, name) for name in user.model_fields_set})
    return merged.model_dump(by_alias=True)


def _as_scenario_error(error: ValidationError, prefix: Optional[str] = None) -> ScenarioError:
    first = error.errors()[0]
    loc = [str(part) for part in first.get("loc", ()) if not isinstance(part, int)]
    if prefix:
        loc.insert(0, prefix)
    return ScenarioError(first.get("msg", "invalid value"), field=".".join(loc) or None)


def _build_environment(doc: ScenarioDocument) -> Environment:
    spec = doc.environment
    walls = tuple(tuple(Point2.of(xy) for xy in ring) for ring in spec.walls)
    for k, ring in enumerate(walls):
        if len(ring) < 3:
            raise ScenarioError(f"wall polygon {k} needs at least three vertices", field="environment.walls")
        if not Polygon([p.as_tuple() for p in ring]).is_valid:
            raise ScenarioError(f"wall polygon {k} is not simple", field="environment.walls")

    routes = sorted(spec.intersection.routes, key=lambda r: r.id)
    ids = [r.id for r in routes]
    if ids != list(range(len(routes))):
        raise ScenarioError(f"route ids must be 0..M-1, got {ids}", field="environment.intersection.routes.id")

    intersection = Intersection(
        center=Point2.of(spec.intersection.center),
        routes=tuple(
            Route(id=r.id, portal=(Point2.of(r.portal[0]), Point2.of(r.portal[1])),
                  exit=Point2.of(r.exit) if r.exit is not None else None)
            for r in routes
        ),
    )
    m = intersection.route_count

    signs = []
    for k, s in enumerate(spec.signs):
        if s.target_route >= m:
            raise ScenarioError(f"sign {k} targets route {s.target_route}, but there are only {m} routes",
                                field="environment.signs.target_route")
        signs.append(Sign(
            id=s.id if s.id is not None else k,
            position=Point2.of(s.pos),
            facing=math.radians(s.facing_deg),
            target_route=s.target_route,
            d_vis=s.d_vis if s.d_vis is not None else doc.tunables.d_vis,
        ))
    if len({s.id for s in signs}) != len(signs):
        raise ScenarioError("sign ids must be unique", field="environment.signs.id")

    regions = ()
    if spec.spawn_region is not None:
        r = spec.spawn_region
        regions = (SpawnRegion(r.xmin, r.ymin, r.xmax, r.ymax),)
    elif doc.agents.count > 0:
        raise ScenarioError("a spawn region is required to place agents", field="environment.spawn_region")

    env = Environment(
        walls=walls,
        intersections=(intersection,),
        signs=tuple(signs),
        exits=tuple(Exit(e.label, Point2.of(e.pos)) for e in spec.exits),
        spawn_regions=regions,
    )
    _check_geometry(env)
    return env


def _check_geometry(env: Environment) -> None:
    free = env.free_space
    if free is not None and (not free.is_valid or free.area <= 0.0):
        raise ScenarioError("obstacles must lie inside the outer boundary without overlapping",
                            field="environment.walls")

    inter = env.intersection
    if not env.is_free(inter.center):
        raise ScenarioError("intersection center is not in free space", field="environment.intersection.center")

    portals = [LineString([a.as_tuple() for a in route.portal]) for route in inter.routes]
    for route, portal in zip(inter.routes, portals):
        if portal.length <= 0.0:
            raise ScenarioError(f"route {route.id} portal has zero length",
                                field="environment.intersection.routes.portal")
        if free is not None and not free.covers(portal):
            raise ScenarioError(f"route {route.id} portal leaves free space",
                                field="environment.intersection.routes.portal")
    for i in range(len(portals)):
        for j in range(i + 1, len(portals)):
            if portals[i].intersects(portals[j]):
                raise ScenarioError(
                    f"portals of routes {inter.routes[i].id} and {inter.routes[j].id} overlap",
                    field="environment.intersection.routes.portal",
                )

    for sign in env.signs:
        if free is not None and not free.covers(Point(sign.position.as_tuple())):
            raise ScenarioError(f"sign {sign.id} is not in free space", field="environment.signs.pos")

    for region in env.spawn_regions:
        rect = box(region.xmin, region.ymin, region.xmax, region.ymax)
        if free is not None and not free.intersects(rect):
            raise ScenarioError("spawn region does not overlap free space", field="environment.spawn_region")


def _check_crowd(doc: ScenarioDocument, env: Environment) -> None:
    m = env.intersection.route_count
    routes_with_flow = set()
    for flow in doc.crowd.flows:
        if flow.route >= m:
            raise ScenarioError(f"flow on unknown route {flow.route}", field="crowd.flows.route")
        if flow.path is None and env.intersection.routes[flow.route].exit is None:
            raise ScenarioError(f"flow on route {flow.route} needs a path or a route exit", field="crowd.flows.path")
        routes_with_flow.add(flow.route)
    for entry in doc.crowd.schedule:
        if entry.route not in routes_with_flow:
            raise ScenarioError(f"schedule entry for route {entry.route} has no flow to change",
                                field="crowd.schedule.route")


def _build_levels(doc: ScenarioDocument, env: Environment) -> Optional[SourceLevels]:
    if doc.mode != "synthetic":
        return None
    if doc.synthetic is None:
        raise ScenarioError("synthetic mode requires synthetic.levels", field="synthetic")
    missing = [name for name in PHYSICAL_SOURCE_NAMES if name not in doc.synthetic.levels]
    if missing:
        raise ScenarioError(f"missing levels for {missing}", field="synthetic.levels")
    try:
        levels = SourceLevels.from_mapping(doc.synthetic.levels)
    except SourceError as e:
        raise ScenarioError(str(e), field="synthetic.levels") from e
    if levels.route_count != env.intersection.route_count:
        raise ScenarioError(
            f"levels list {levels.route_count} routes but the intersection has {env.intersection.route_count}",
            field="synthetic.levels",
        )
    return levels
