"""Project network data model, input parsing, and structural validation.

Networks are activity-on-node DAGs.  A zero-duration virtual source and
sink are always synthesized around the real activities so that every
schedule computation sees exactly one entry and one exit node; the virtual
pair never appears in metrics or reports.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, replace
from functools import cached_property

from .distributions import PARAM_NAMES, DurationDistribution
from .errors import CycleError, ParseError, UnknownActivityError

SOURCE_ID = "__source__"
SINK_ID = "__sink__"
_RESERVED = (SOURCE_ID, SINK_ID)


@dataclass(frozen=True)
class Activity:
    id: str
    distribution: DurationDistribution
    predecessors: tuple[str, ...] = ()
    name: str | None = None
    # sampled duration = offset + scale * draw(distribution); the identity
    # transform everywhere except in execution-state networks, where it
    # encodes elapsed time plus the rescaled remainder
    duration_offset: float = 0.0
    duration_scale: float = 1.0
    virtual: bool = False

    def duration_mean(self) -> float:
        return self.duration_offset + self.duration_scale * self.distribution.mean()

    def duration_variance(self) -> float:
        return self.duration_scale**2 * self.distribution.variance()

    def duration_sd(self) -> float:
        return self.duration_scale * self.distribution.sd()

    def central_duration(self, which: str = "mean") -> float:
        return self.duration_offset + self.duration_scale * self.distribution.central(which)


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    activity_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.ok:
            return "network is valid"
        return "\n".join(f"[{i.code}] {i.message}" for i in self.issues)


@dataclass(frozen=True)
class ProjectNetwork:
    """Immutable activity-on-node network (real activities in file order)."""

    name: str
    time_unit: str
    activities: tuple[Activity, ...]

    def __post_init__(self):
        seen = set()
        for act in self.activities:
            if not act.id:
                raise ParseError("activity id must be a non-empty string")
            if act.id in _RESERVED:
                raise ParseError(f"activity id '{act.id}' is reserved")
            if act.id in seen:
                raise ParseError(f"duplicate activity id '{act.id}'")
            seen.add(act.id)

    @cached_property
    def virtual_source(self) -> Activity:
        return Activity(SOURCE_ID, DurationDistribution.deterministic(0.0), (), virtual=True)

    @cached_property
    def virtual_sink(self) -> Activity:
        return Activity(SINK_ID, DurationDistribution.deterministic(0.0), (), virtual=True)

    @cached_property
    def all_activities(self) -> tuple[Activity, ...]:
        return (self.virtual_source,) + self.activities + (self.virtual_sink,)

    @cached_property
    def by_id(self) -> dict[str, Activity]:
        return {a.id: a for a in self.all_activities}

    @cached_property
    def real_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.activities)

    @cached_property
    def slot(self) -> dict[str, int]:
        """Stable random-stream slot per real activity (file position)."""
        return {a.id: i for i, a in enumerate(self.activities)}

    @cached_property
    def predecessors_of(self) -> dict[str, tuple[str, ...]]:
        """Resolved predecessor map including virtual source/sink edges."""
        known = set(self.by_id)
        preds: dict[str, tuple[str, ...]] = {SOURCE_ID: ()}
        for act in self.activities:
            resolved = tuple(p for p in act.predecessors if p in known)
            preds[act.id] = resolved if resolved else (SOURCE_ID,)
        has_successor = {p for ps in preds.values() for p in ps}
        tail = tuple(a.id for a in self.activities if a.id not in has_successor)
        preds[SINK_ID] = tail if tail else (SOURCE_ID,)
        return preds

    @cached_property
    def successors_of(self) -> dict[str, tuple[str, ...]]:
        succ: dict[str, list[str]] = {a.id: [] for a in self.all_activities}
        for aid, preds in self.predecessors_of.items():
            for p in preds:
                succ[p].append(aid)
        return {k: tuple(v) for k, v in succ.items()}

    def activity(self, activity_id: str) -> Activity:
        try:
            return self.by_id[activity_id]
        except KeyError:
            raise UnknownActivityError(f"unknown activity id '{activity_id}'") from None

    def with_distributions(self, overrides: dict[str, DurationDistribution]) -> "ProjectNetwork":
        """Copy of the network with some activities' distributions replaced."""
        for aid in overrides:
            if aid not in self.slot:
                raise UnknownActivityError(f"override references unknown activity '{aid}'")
        acts = tuple(
            replace(a, distribution=overrides[a.id]) if a.id in overrides else a
            for a in self.activities
        )
        return ProjectNetwork(self.name, self.time_unit, acts)


# -- parsing / serialization ------------------------------------------------


def _require(condition: bool, message: str):
    if not condition:
        raise ParseError(message)


def parse_project(text: str) -> ProjectNetwork:
    """Parse a project file (JSON) into a validated, normalized network."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None

    _require(isinstance(doc, dict), "top level must be an object")
    name = doc.get("name", "")
    time_unit = doc.get("time_unit", "units")
    _require(isinstance(name, str), "'name' must be a string")
    _require(isinstance(time_unit, str), "'time_unit' must be a string")
    raw_acts = doc.get("activities")
    _require(isinstance(raw_acts, list), "'activities' must be an array")

    activities: list[Activity] = []
    ids: set[str] = set()
    for i, entry in enumerate(raw_acts):
        where = f"activities[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object")
        aid = entry.get("id")
        _require(isinstance(aid, str) and aid != "", f"{where}: 'id' must be a non-empty string")
        _require(aid not in _RESERVED, f"{where}: id '{aid}' is reserved")
        _require(aid not in ids, f"{where}: duplicate activity id '{aid}'")
        ids.add(aid)

        dist_obj = entry.get("distribution")
        _require(isinstance(dist_obj, dict), f"{where}: 'distribution' must be an object")
        kind = dist_obj.get("type")
        _require(isinstance(kind, str), f"{where}: distribution 'type' must be a string")
        if kind not in PARAM_NAMES:
            raise ParseError(f"{where}: unknown distribution kind '{kind}'")
        expected = set(PARAM_NAMES[kind])
        given = {k: v for k, v in dist_obj.items() if k != "type"}
        missing = expected - set(given)
        extra = set(given) - expected
        _require(not missing, f"{where}: {kind} distribution missing parameter(s): {', '.join(sorted(missing))}")
        _require(not extra, f"{where}: {kind} distribution has unknown parameter(s): {', '.join(sorted(extra))}")
        for pname, pval in given.items():
            _require(isinstance(pval, (int, float)) and not isinstance(pval, bool),
                     f"{where}: parameter '{pname}' must be a number")
        dist = DurationDistribution(kind, {k: float(given[k]) for k in PARAM_NAMES[kind]})

        preds_raw = entry.get("predecessors", [])
        _require(isinstance(preds_raw, list), f"{where}: 'predecessors' must be an array")
        preds: list[str] = []
        for p in preds_raw:
            _require(isinstance(p, str), f"{where}: predecessor ids must be strings")
            if p not in preds:
                preds.append(p)

        act_name = entry.get("name")
        _require(act_name is None or isinstance(act_name, str), f"{where}: 'name' must be a string")
        activities.append(Activity(aid, dist, tuple(preds), name=act_name))

    for act in activities:
        for p in act.predecessors:
            if p not in ids:
                raise ParseError(f"activity '{act.id}' lists unresolved predecessor '{p}'")

    return ProjectNetwork(name, time_unit, tuple(activities))


def serialize_project(network: ProjectNetwork) -> str:
    """Canonical JSON for the real activities (virtuals are never serialized)."""
    acts = []
    for a in network.activities:
        entry: dict = {"id": a.id}
        if a.name is not None:
            entry["name"] = a.name
        entry["distribution"] = {"type": a.distribution.kind, **a.distribution.params}
        entry["predecessors"] = list(a.predecessors)
        acts.append(entry)
    doc = {"name": network.name, "time_unit": network.time_unit, "activities": acts}
    return json.dumps(doc, indent=2) + "\n"


def load_project(path) -> ProjectNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_project(fh.read())


# -- structural checks -------------------------------------------------------


def _cycle_members(network: ProjectNetwork) -> list[tuple[str, ...]]:
    """Strongly connected components with more than one node, plus self-loops."""
    ids = [a.id for a in network.activities]
    known = set(ids)
    edges = {
        a.id: tuple(p for p in a.predecessors if p in known)
        for a in network.activities
    }
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    components: list[tuple[str, ...]] = []

    def strongconnect(v: str):
        # iterative Tarjan to avoid recursion limits on long chains
        work = [(v, iter(edges[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                if len(comp) > 1 or node in edges[node]:
                    components.append(tuple(sorted(comp)))

    for v in ids:
        if v not in index:
            strongconnect(v)
    return components


def validate(network: ProjectNetwork) -> ValidationReport:
    """Structural and parameter checks; violations are data, not exceptions."""
    issues: list[ValidationIssue] = []

    for act in network.activities:
        for problem in act.distribution.check():
            issues.append(ValidationIssue("distribution", f"activity '{act.id}': {problem}", (act.id,)))
        for p in act.predecessors:
            if p == act.id:
                issues.append(ValidationIssue("self-loop", f"activity '{act.id}' lists itself as predecessor", (act.id,)))
            elif p not in network.by_id or p in _RESERVED:
                issues.append(ValidationIssue(
                    "unresolved-predecessor",
                    f"activity '{act.id}' lists unresolved predecessor '{p}'",
                    (act.id, p),
                ))

    for comp in _cycle_members(network):
        if len(comp) > 1:
            issues.append(ValidationIssue("cycle", f"precedence cycle: {{{', '.join(comp)}}}", comp))

    if not any(i.code == "cycle" or i.code == "self-loop" for i in issues):
        reached = {SOURCE_ID}
        frontier = [SOURCE_ID]
        while frontier:
            node = frontier.pop()
            for s in network.successors_of.get(node, ()):
                if s not in reached:
                    reached.add(s)
                    frontier.append(s)
        unreachable = tuple(a.id for a in network.activities if a.id not in reached)
        if unreachable:
            issues.append(ValidationIssue(
                "unreachable", f"activities unreachable from project start: {{{', '.join(unreachable)}}}", unreachable
            ))

    return ValidationReport(tuple(issues))


def topological_order(network: ProjectNetwork) -> list[str]:
    """All activity ids (virtuals included), predecessors first, ties by file order."""
    position = {a.id: i for i, a in enumerate(network.all_activities)}
    indegree = {aid: len(preds) for aid, preds in network.predecessors_of.items()}
    ready = [(position[aid], aid) for aid, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        _, aid = heapq.heappop(ready)
        order.append(aid)
        for s in network.successors_of[aid]:
            indegree[s] -= 1
            if indegree[s] == 0:
                heapq.heappush(ready, (position[s], s))
    if len(order) != len(network.all_activities):
        stuck = sorted(set(network.by_id) - set(order))
        raise CycleError(f"precedence graph contains a cycle involving: {{{', '.join(stuck)}}}")
    return order


def immediate_successor_count(network: ProjectNetwork, activity_id: str) -> int:
    """Direct real successors of a real activity."""
    act = network.activity(activity_id)
    if act.virtual:
        raise UnknownActivityError(f"'{activity_id}' is a virtual activity")
    return sum(1 for s in network.successors_of[activity_id] if s not in _RESERVED)


def transitive_successor_count(network: ProjectNetwork, activity_id: str) -> int:
    """Distinct real activities reachable through precedence edges."""
    act = network.activity(activity_id)
    if act.virtual:
        raise UnknownActivityError(f"'{activity_id}' is a virtual activity")
    seen: set[str] = set()
    frontier = [activity_id]
    while frontier:
        node = frontier.pop()
        for s in network.successors_of[node]:
            if s not in seen and s not in _RESERVED:
                seen.add(s)
                frontier.append(s)
    return len(seen)
