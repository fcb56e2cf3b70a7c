"""Causal graphs over named variables: interventions, equilibration,
d-separation, and the backdoor criterion.

Graphs carry structure only, no mechanism functions. Nodes are either
exogenous (unmodelled causes, no parents) or endogenous. A node may carry a
*dynamic self-dependence* marker meaning its mechanism involves its own time
derivative; such a marker is a self-cycle, so the graph only becomes acyclic
once it is equilibrated (the dynamic mechanism replaced by its steady-state
map, which leaves the parent sets unchanged).

Two canonical five-node graphs describe a controlled plant at steady state:

* :func:`feedforward_graph` -- the controller reads (y_r, w), giving edges
  ``y_r -> u``, ``w -> u``, ``u -> x``, ``w -> x``, ``x -> y``. Acyclic.
* :func:`feedback_graph` -- the controller reads (y_r, y), giving the cycle
  ``u -> x -> y -> u`` alongside ``w -> x``.

d-separation uses the standard reachability ("Bayes-ball") procedure;
:func:`backdoor_admissible` additionally enumerates the offending paths so
a report can show *why* a candidate adjustment set fails.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    ConfigParse,
    CyclicGraph,
    ExogenousIntervention,
    NotUniquelySolvable,
    OverlappingSets,
    ShapeMismatch,
)


def _as_frozenset(names: Iterable[str]) -> frozenset[str]:
    return frozenset(str(n) for n in names)


@dataclass(frozen=True)
class CausalGraph:
    """Immutable directed graph with exogenous/endogenous node marking.

    ``self_dynamic`` marks nodes whose mechanism depends on their own
    derivative; ``uniquely_solvable`` flags which of those have a unique
    steady state for every parent assignment (the precondition for
    equilibration). All mutating operations return new graphs.
    """

    exogenous: frozenset[str]
    endogenous: frozenset[str]
    edges: frozenset[tuple[str, str]]
    self_dynamic: frozenset[str] = field(default_factory=frozenset)
    uniquely_solvable: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        exo = _as_frozenset(self.exogenous)
        endo = _as_frozenset(self.endogenous)
        dyn = _as_frozenset(self.self_dynamic)
        solv = _as_frozenset(self.uniquely_solvable)
        edge_list = [(str(p), str(c)) for p, c in self.edges]
        edges = frozenset(edge_list)
        if len(edge_list) != len(edges):
            raise ValueError("duplicate edges are not allowed")
        object.__setattr__(self, "exogenous", exo)
        object.__setattr__(self, "endogenous", endo)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "self_dynamic", dyn)
        object.__setattr__(self, "uniquely_solvable", solv)

        if exo & endo:
            raise ValueError(f"nodes marked both exogenous and endogenous: {exo & endo}")
        nodes = exo | endo
        for p, c in edges:
            if p not in nodes or c not in nodes:
                raise ValueError(f"edge ({p}, {c}) references unknown node")
            if p == c:
                raise ValueError(
                    f"explicit self-edge ({p}, {c}); use self_dynamic markers"
                )
            if c in exo:
                raise ValueError(f"exogenous node {c} cannot have parents")
        if not dyn <= endo:
            raise ValueError("self_dynamic must be a subset of endogenous nodes")
        if not solv <= dyn:
            raise ValueError("uniquely_solvable flags only apply to dynamic nodes")

    # -- structure queries -------------------------------------------------

    @property
    def nodes(self) -> frozenset[str]:
        return self.exogenous | self.endogenous

    def parents(self, node: str) -> frozenset[str]:
        self._require(node)
        return frozenset(p for p, c in self.edges if c == node)

    def children(self, node: str) -> frozenset[str]:
        self._require(node)
        return frozenset(c for p, c in self.edges if p == node)

    def descendants(self, node: str) -> frozenset[str]:
        """All nodes reachable from ``node`` by directed edges (excluding it)."""
        return self._reach(node, forward=True)

    def ancestors(self, node: str) -> frozenset[str]:
        return self._reach(node, forward=False)

    def _require(self, node: str) -> None:
        if node not in self.nodes:
            raise ValueError(f"unknown node {node!r}")

    def _adjacency(self) -> tuple[dict[str, set[str]], dict[str, set[str]]]:
        parents: dict[str, set[str]] = {n: set() for n in self.nodes}
        children: dict[str, set[str]] = {n: set() for n in self.nodes}
        for p, c in self.edges:
            parents[c].add(p)
            children[p].add(c)
        return parents, children

    def _reach(self, node: str, forward: bool) -> frozenset[str]:
        self._require(node)
        parents, children = self._adjacency()
        step = children if forward else parents
        seen: set[str] = set()
        queue = deque(step[node])
        while queue:
            v = queue.popleft()
            if v in seen:
                continue
            seen.add(v)
            queue.extend(step[v])
        return frozenset(seen)


@dataclass(frozen=True)
class AdjustmentReport:
    """Outcome of a backdoor-criterion check.

    ``violating_paths`` lists unblocked backdoor paths as node sequences;
    ``descendant_violations`` lists adjustment nodes that are descendants of
    the treatment. The set is admissible exactly when both lists are empty.
    """

    admissible: bool
    violating_paths: tuple[tuple[str, ...], ...]
    descendant_violations: tuple[str, ...]

    def __post_init__(self):
        expected = not self.violating_paths and not self.descendant_violations
        if self.admissible != expected:
            raise ValueError("admissible flag inconsistent with violation lists")


# -- canonical control-loop graphs ----------------------------------------


def feedforward_graph() -> CausalGraph:
    """Steady-state graph of a plant under feedforward control.

    The controller sets u from the reference and a disturbance measurement,
    so the disturbance is a common cause (confounder) of u and x.
    """
    return CausalGraph(
        exogenous={"y_r", "w"},
        endogenous={"u", "x", "y"},
        edges={("y_r", "u"), ("w", "u"), ("u", "x"), ("w", "x"), ("x", "y")},
    )


def feedback_graph() -> CausalGraph:
    """Steady-state graph of a plant under output feedback control.

    The controller reads the output, closing the directed cycle
    u -> x -> y -> u. Cyclic, so separation queries refuse it as-is.
    """
    return CausalGraph(
        exogenous={"y_r", "w"},
        endogenous={"u", "x", "y"},
        edges={("y_r", "u"), ("y", "u"), ("u", "x"), ("w", "x"), ("x", "y")},
    )


def feedforward_sdcm() -> CausalGraph:
    """Dynamic variant of the feedforward graph.

    Identical parent sets, but the state keeps its derivative
    self-dependence; equilibration removes it and yields
    :func:`feedforward_graph` exactly.
    """
    g = feedforward_graph()
    return CausalGraph(
        exogenous=g.exogenous,
        endogenous=g.endogenous,
        edges=g.edges,
        self_dynamic={"x"},
        uniquely_solvable={"x"},
    )


# -- graph operations ------------------------------------------------------


def is_acyclic(g: CausalGraph) -> bool:
    """True iff the graph has no directed cycle.

    A dynamic self-dependence marker counts as a self-cycle; equilibrate
    first if the graph models a dynamical system.
    """
    if g.self_dynamic:
        return False
    parents, children = g._adjacency()
    indeg = {n: len(parents[n]) for n in g.nodes}
    queue = deque(n for n, d in indeg.items() if d == 0)
    removed = 0
    while queue:
        v = queue.popleft()
        removed += 1
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return removed == len(g.nodes)


def _require_dag(g: CausalGraph) -> None:
    if not is_acyclic(g):
        raise CyclicGraph("operation requires an acyclic graph")


def d_separated(
    g: CausalGraph,
    a: Iterable[str],
    b: Iterable[str],
    z: Iterable[str],
) -> bool:
    """Whether node sets ``a`` and ``b`` are d-separated given ``z``.

    Implements the linear-time reachability procedure: a path is active
    when every chain or fork on it has its middle node outside ``z`` and
    every collider has the collider or one of its descendants inside ``z``.
    Returns True iff no active path connects ``a`` to ``b``.
    """
    _require_dag(g)
    a, b, z = _as_frozenset(a), _as_frozenset(b), _as_frozenset(z)
    if (a & b) or (a & z) or (b & z):
        raise OverlappingSets("query sets must be pairwise disjoint")
    for n in a | b | z:
        g._require(n)

    parents, children = g._adjacency()
    # ancestors of z (inclusive): colliders open only when they can reach z
    anc_z: set[str] = set(z)
    queue = deque(z)
    while queue:
        v = queue.popleft()
        for p in parents[v]:
            if p not in anc_z:
                anc_z.add(p)
                queue.append(p)

    UP, DOWN = 0, 1  # arrived from a child / from a parent
    visited: set[tuple[str, int]] = set()
    agenda = deque((s, UP) for s in a)
    while agenda:
        v, direction = agenda.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v not in z and v in b:
            return False
        if direction == UP and v not in z:
            agenda.extend((p, UP) for p in parents[v])
            agenda.extend((c, DOWN) for c in children[v])
        elif direction == DOWN:
            if v not in z:
                agenda.extend((c, DOWN) for c in children[v])
            if v in anc_z:
                agenda.extend((p, UP) for p in parents[v])
    return True


def _simple_paths(g: CausalGraph, src: str, dst: str) -> Iterator[tuple[str, ...]]:
    """All simple paths src..dst in the skeleton, edge directions ignored."""
    parents, children = g._adjacency()
    neighbors = {n: parents[n] | children[n] for n in g.nodes}
    path = [src]
    on_path = {src}

    def walk(v: str) -> Iterator[tuple[str, ...]]:
        for nxt in sorted(neighbors[v]):
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            if nxt == dst:
                yield tuple(path)
            else:
                yield from walk(nxt)
            on_path.discard(nxt)
            path.pop()

    yield from walk(src)


def _path_blocked(g: CausalGraph, path: tuple[str, ...], z: frozenset[str]) -> bool:
    """d-blocking status of one skeleton path given ``z``.

    Collider descendants are taken in the full graph, not the path.
    """
    for i in range(1, len(path) - 1):
        left, mid, right = path[i - 1], path[i], path[i + 1]
        collider = (left, mid) in g.edges and (right, mid) in g.edges
        if collider:
            if mid not in z and z.isdisjoint(g.descendants(mid)):
                return True
        elif mid in z:
            return True
    return False


def backdoor_admissible(
    g: CausalGraph,
    treatment: str,
    outcome: str,
    z: Iterable[str],
) -> AdjustmentReport:
    """Check whether ``z`` satisfies the backdoor criterion.

    ``z`` is admissible for estimating the effect of ``treatment`` on
    ``outcome`` when (1) no member of ``z`` is a descendant of the
    treatment and (2) ``z`` blocks every path between treatment and outcome
    whose first edge points into the treatment. The report enumerates any
    unblocked backdoor paths and descendant violations.
    """
    _require_dag(g)
    z = _as_frozenset(z)
    g._require(treatment)
    g._require(outcome)
    if treatment == outcome:
        raise ValueError("treatment and outcome must differ")
    if treatment in z or outcome in z:
        raise ValueError("adjustment set must exclude treatment and outcome")
    for n in z:
        g._require(n)

    desc_t = g.descendants(treatment)
    descendant_violations = tuple(sorted(z & desc_t))

    violating = tuple(
        path
        for path in _simple_paths(g, treatment, outcome)
        if (path[1], treatment) in g.edges and not _path_blocked(g, path, z)
    )
    return AdjustmentReport(
        admissible=not violating and not descendant_violations,
        violating_paths=violating,
        descendant_violations=descendant_violations,
    )


def intervene(g: CausalGraph, targets: Iterable[str]) -> CausalGraph:
    """Perfect intervention: pin each target to a constant.

    Removes all edges into the targets and clears their dynamic markers;
    the targets stay endogenous (now parentless). Idempotent.
    """
    targets = _as_frozenset(targets)
    exo_hit = targets & g.exogenous
    if exo_hit:
        raise ExogenousIntervention(
            f"cannot intervene on exogenous nodes {sorted(exo_hit)}"
        )
    for n in targets:
        g._require(n)
    return CausalGraph(
        exogenous=g.exogenous,
        endogenous=g.endogenous,
        edges=frozenset(e for e in g.edges if e[1] not in targets),
        self_dynamic=g.self_dynamic - targets,
        uniquely_solvable=g.uniquely_solvable - targets,
    )


def equilibrate(g: CausalGraph) -> CausalGraph:
    """Replace every dynamic mechanism by its steady-state map.

    Structurally this just clears the self-cycles: the steady-state map has
    the same parents as the dynamic mechanism it replaces. Each dynamic node
    must be flagged uniquely solvable, otherwise the steady state is not
    well defined and :class:`NotUniquelySolvable` is raised.
    """
    unsolvable = g.self_dynamic - g.uniquely_solvable
    if unsolvable:
        raise NotUniquelySolvable(
            f"dynamic nodes without unique-solvability flag: {sorted(unsolvable)}"
        )
    return CausalGraph(
        exogenous=g.exogenous,
        endogenous=g.endogenous,
        edges=g.edges,
        self_dynamic=frozenset(),
        uniquely_solvable=frozenset(),
    )


def feedback_to_feedforward_rewrite(g: CausalGraph) -> CausalGraph:
    """Rewrite a feedback loop as the feedforward controller it equals at
    steady state.

    A feedback controller that settles the loop must, at steady state, pick
    the same input some reference/disturbance feedforward law would pick, so
    the edges into ``u`` are replaced by ``y_r -> u`` and ``w -> u``. The
    input graph must actually contain a directed cycle through ``u`` and
    expose exogenous ``y_r`` and ``w``; anything else raises
    :class:`ShapeMismatch`.
    """
    if "u" not in g.endogenous:
        raise ShapeMismatch("graph has no endogenous node named 'u'")
    if not {"y_r", "w"} <= g.exogenous:
        raise ShapeMismatch("graph must have exogenous nodes 'y_r' and 'w'")
    cycle_parents = g.parents("u") & g.descendants("u")
    if not cycle_parents:
        raise ShapeMismatch("no directed cycle through 'u'; nothing to rewrite")
    edges = set(e for e in g.edges if e[1] != "u")
    edges |= {("y_r", "u"), ("w", "u")}
    return CausalGraph(
        exogenous=g.exogenous,
        endogenous=g.endogenous,
        edges=edges,
        self_dynamic=g.self_dynamic,
        uniquely_solvable=g.uniquely_solvable,
    )


# -- text serialization ----------------------------------------------------


def graph_to_text(g: CausalGraph) -> str:
    """Edge-list text form: header lines for node flags, one edge per line."""
    lines = [
        "exo: " + ", ".join(sorted(g.exogenous)),
        "endo: " + ", ".join(sorted(g.endogenous)),
        "dyn: " + ", ".join(sorted(g.self_dynamic)),
    ]
    lines.extend(f"{p} -> {c}" for p, c in sorted(g.edges))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> CausalGraph:
    """Parse the edge-list text form.

    Dynamic nodes read from text are assumed uniquely solvable, since the
    format has no way to say otherwise.
    """
    exo: list[str] = []
    endo: list[str] = []
    dyn: list[str] = []
    edges: list[tuple[str, str]] = []
    headers = {"exo": exo, "endo": endo, "dyn": dyn}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if sep and key.strip() in headers:
            names = [n.strip() for n in rest.split(",") if n.strip()]
            headers[key.strip()].extend(names)
            continue
        if "->" in line:
            p, _, c = line.partition("->")
            p, c = p.strip(), c.strip()
            if not p or not c:
                raise ConfigParse(f"line {lineno}: malformed edge {raw!r}")
            edges.append((p, c))
            continue
        raise ConfigParse(f"line {lineno}: unrecognized graph line {raw!r}")
    try:
        return CausalGraph(
            exogenous=exo,
            endogenous=endo,
            edges=edges,
            self_dynamic=dyn,
            uniquely_solvable=dyn,
        )
    except ValueError as exc:
        raise ConfigParse(str(exc)) from exc
