"""Graphical analyses on causal DAGs.

d-separation is decided by a reachability sweep (the "Bayes ball"
formulation).  Paths are enumerated only to produce witnesses and blocking
explanations, and as the reference semantics in the tests.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class GraphError(ValueError):
    pass


class TripleKind(enum.Enum):
    CHAIN = "chain"
    FORK = "fork"
    COLLIDER = "collider"


@dataclass(frozen=True)
class Path:
    """A simple path; ``directions[i]`` orients the step nodes[i] -- nodes[i+1]."""

    nodes: Tuple[str, ...]
    directions: Tuple[str, ...]   # "->" or "<-"

    def __str__(self) -> str:
        out = [self.nodes[0]]
        for d, n in zip(self.directions, self.nodes[1:]):
            out += [d, n]
        return " ".join(out)

    def __len__(self) -> int:
        return len(self.nodes)

    def kinds(self) -> Tuple[TripleKind, ...]:
        """Triple kind of every interior node."""
        out = []
        for a, b in zip(self.directions, self.directions[1:]):
            if a == "->" and b == "<-":
                out.append(TripleKind.COLLIDER)
            elif a == "<-" and b == "->":
                out.append(TripleKind.FORK)
            else:
                out.append(TripleKind.CHAIN)
        return tuple(out)

    @property
    def into_start(self) -> bool:
        return bool(self.directions) and self.directions[0] == "<-"

    @property
    def directed(self) -> bool:
        return all(d == "->" for d in self.directions)

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "directions": list(self.directions),
                "text": str(self)}


def _order_key(p: Path):
    return (len(p.nodes), p.nodes)


class CausalGraph:
    """Immutable DAG.  ``latent`` nodes are never proposed as adjustment sets."""

    def __init__(self, edges: Iterable[Tuple[str, str]], nodes: Iterable[str] = (),
                 latent: Iterable[str] = ()):
        edge_set = set(edges)
        node_set = set(nodes)
        for a, b in edge_set:
            node_set.update((a, b))
            if a == b:
                raise GraphError(f"self loop on {a}")
        self.nodes: Tuple[str, ...] = tuple(sorted(node_set))
        self.edges: Tuple[Tuple[str, str], ...] = tuple(sorted(edge_set))
        self.latent: FrozenSet[str] = frozenset(latent) & node_set
        self._parents: Dict[str, Tuple[str, ...]] = {n: () for n in self.nodes}
        self._children: Dict[str, Tuple[str, ...]] = {n: () for n in self.nodes}
        for a, b in self.edges:
            self._parents[b] += (a,)
            self._children[a] += (b,)
        self._check_acyclic()

    @classmethod
    def from_model(cls, model) -> "CausalGraph":
        """Graph of a causal model; exogenous variables are latent nodes."""
        return cls(model.edges, [v.name for v in model.variables], model.exogenous)

    def _check_acyclic(self) -> None:
        indeg = {n: len(self._parents[n]) for n in self.nodes}
        queue = deque(n for n in self.nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for c in self._children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != len(self.nodes):
            raise GraphError("graph has a directed cycle among "
                             + ", ".join(n for n in self.nodes if indeg[n] > 0))

    def __contains__(self, node) -> bool:
        return node in self._parents

    def _require(self, *nodes: str) -> None:
        for n in nodes:
            if n not in self._parents:
                raise GraphError(f"unknown node {n!r}")

    def parents(self, n: str) -> Tuple[str, ...]:
        return self._parents[n]

    def children(self, n: str) -> Tuple[str, ...]:
        return self._children[n]

    def neighbors(self, n: str) -> List[Tuple[str, str]]:
        """(neighbor, direction) pairs, sorted by neighbor name."""
        out = [(c, "->") for c in self._children[n]] + [(p, "<-") for p in self._parents[n]]
        return sorted(out)

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._children.get(a, ())

    @cached_property
    def _descendants(self) -> Dict[str, FrozenSet[str]]:
        out: Dict[str, FrozenSet[str]] = {}

        def visit(n):
            if n not in out:
                acc = set()
                for c in self._children[n]:
                    acc.add(c)
                    acc |= visit(c)
                out[n] = frozenset(acc)
            return out[n]

        for n in self.nodes:
            visit(n)
        return out

    def descendants(self, n: str) -> FrozenSet[str]:
        """Nodes reachable from ``n`` by a directed path (``n`` excluded)."""
        return self._descendants[n]

    def ancestors(self, n: str) -> FrozenSet[str]:
        return frozenset(m for m in self.nodes if n in self._descendants[m])

    def without_edges_out_of(self, nodes: Iterable[str]) -> "CausalGraph":
        drop = set(nodes)
        return CausalGraph([e for e in self.edges if e[0] not in drop], self.nodes, self.latent)

    def without_edges_into(self, nodes: Iterable[str]) -> "CausalGraph":
        drop = set(nodes)
        return CausalGraph([e for e in self.edges if e[1] not in drop], self.nodes, self.latent)


def _as_graph(graph) -> CausalGraph:
    if isinstance(graph, CausalGraph):
        return graph
    return CausalGraph.from_model(graph)


def _as_set(nodes) -> FrozenSet[str]:
    if nodes is None:
        return frozenset()
    if isinstance(nodes, str):
        return frozenset((nodes,))
    return frozenset(nodes)


# -- paths ---------------------------------------------------------------------

def _walk(graph: CausalGraph, x: str, y: str, admit=None) -> List[Path]:
    """Simple paths x .. y.  ``admit(nodes, dirs)`` may prune partial paths."""
    found = []
    nodes, dirs = [x], []
    on_path = {x}

    def dfs(n):
        for m, d in graph.neighbors(n):
            if m in on_path:
                continue
            nodes.append(m)
            dirs.append(d)
            if admit is None or admit(nodes, dirs):
                if m == y:
                    found.append(Path(tuple(nodes), tuple(dirs)))
                else:
                    on_path.add(m)
                    dfs(m)
                    on_path.discard(m)
            nodes.pop()
            dirs.pop()

    if x == y:
        return []
    dfs(x)
    return sorted(found, key=_order_key)


def enumerate_paths(graph, x: str, y: str) -> List[Path]:
    """All simple undirected paths between ``x`` and ``y``, shortest first."""
    graph = _as_graph(graph)
    graph._require(x, y)
    if x == y:
        raise GraphError("path endpoints must differ")
    return _walk(graph, x, y)


def blocking_node(graph: CausalGraph, path: Path, z: FrozenSet[str]):
    """First interior node that blocks ``path`` given ``z``, with the reason, or None."""
    for node, kind in zip(path.nodes[1:-1], path.kinds()):
        if kind is TripleKind.COLLIDER:
            if node not in z and not (graph.descendants(node) & z):
                return node, kind
        elif node in z:
            return node, kind
    return None


def _open_prefix(graph: CausalGraph, z: FrozenSet[str]):
    """Pruning predicate: the newest interior node of the partial path is open."""
    def admit(nodes, dirs):
        if len(nodes) < 3:
            return True
        node = nodes[-2]
        a, b = dirs[-2], dirs[-1]
        if a == "->" and b == "<-":
            return node in z or bool(graph.descendants(node) & z)
        return node not in z
    return admit


def _open_paths(graph: CausalGraph, x: str, y: str, z: FrozenSet[str],
                first: Optional[str] = None) -> List[Path]:
    base = _open_prefix(graph, z)

    def admit(nodes, dirs):
        if first is not None and len(dirs) == 1 and dirs[0] != first:
            return False
        return base(nodes, dirs)
    return _walk(graph, x, y, admit)


# -- d-separation -----------------------------------------------------------------

@dataclass(frozen=True)
class BlockedPath:
    path: Path
    node: str
    kind: TripleKind

    def to_dict(self) -> dict:
        return {"path": str(self.path), "node": self.node, "kind": self.kind.value}


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    witness: Optional[Path] = None
    blocked: Tuple[BlockedPath, ...] = ()

    def __bool__(self) -> bool:
        return self.separated

    def to_dict(self) -> dict:
        return {"separated": self.separated,
                "witness": None if self.witness is None else self.witness.to_dict(),
                "blocked": [b.to_dict() for b in self.blocked]}


def _reachable(graph: CausalGraph, xs: FrozenSet[str], z: FrozenSet[str]) -> set:
    """Nodes connected to ``xs`` by an active trail given ``z``."""
    anc_z = set(z)
    for n in z:
        anc_z |= graph.ancestors(n)
    seen = set()
    reached = set()
    queue = deque((x, "up") for x in sorted(xs))
    while queue:
        n, direction = queue.popleft()
        if (n, direction) in seen:
            continue
        seen.add((n, direction))
        if n not in z:
            reached.add(n)
        if direction == "up" and n not in z:
            queue.extend((p, "up") for p in graph.parents(n))
            queue.extend((c, "down") for c in graph.children(n))
        elif direction == "down":
            if n not in z:
                queue.extend((c, "down") for c in graph.children(n))
            if n in anc_z:
                queue.extend((p, "up") for p in graph.parents(n))
    return reached


def is_d_separated(graph, xs, ys, zs=()) -> bool:
    graph = _as_graph(graph)
    xs, ys, zs = _as_set(xs), _as_set(ys), _as_set(zs)
    _check_disjoint(graph, xs, ys, zs)
    return not (_reachable(graph, xs, zs) & ys)


def _check_disjoint(graph, xs, ys, zs):
    graph._require(*xs, *ys, *zs)
    if xs & ys or xs & zs or ys & zs:
        raise GraphError("X, Y and Z must be pairwise disjoint")


def d_separated(graph, xs, ys, zs=(), explain: bool = True) -> SeparationVerdict:
    """Whether ``zs`` d-separates every node of ``xs`` from every node of ``ys``.

    When not separated the witness is the shortest open path (ties broken by
    node names).  When separated and ``explain`` is set, every path between
    the two sets is listed with the node that blocks it.
    """
    graph = _as_graph(graph)
    xs, ys, zs = _as_set(xs), _as_set(ys), _as_set(zs)
    _check_disjoint(graph, xs, ys, zs)
    if _reachable(graph, xs, zs) & ys:
        candidates = []
        for x in sorted(xs):
            for y in sorted(ys):
                candidates.extend(_open_paths(graph, x, y, zs))
        return SeparationVerdict(False, min(candidates, key=_order_key))
    blocked = []
    if explain:
        for x in sorted(xs):
            for y in sorted(ys):
                for p in _walk(graph, x, y):
                    node, kind = blocking_node(graph, p, zs)
                    blocked.append(BlockedPath(p, node, kind))
    return SeparationVerdict(True, None, tuple(blocked))


# -- adjustment criteria ------------------------------------------------------------

@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of a back-door or front-door check.

    ``violated`` names the first failing condition; ``witness`` is a path or
    a variable name demonstrating it.
    """

    criterion: str
    satisfied: bool
    violated: Optional[str] = None
    witness: object = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.satisfied

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, Path):
            w = w.to_dict()
        return {"criterion": self.criterion, "satisfied": self.satisfied,
                "violated": self.violated, "witness": w, "message": self.message}


def _pre(graph: CausalGraph, x: str, y: str, z: FrozenSet[str]) -> None:
    graph._require(x, y, *z)
    if x == y:
        raise GraphError("X and Y must differ")
    if x in z or y in z:
        raise GraphError("Z must not contain X or Y")


def check_backdoor(graph, x: str, y: str, zs=()) -> CriterionVerdict:
    graph = _as_graph(graph)
    z = _as_set(zs)
    _pre(graph, x, y, z)
    desc = graph.descendants(x)
    for n in sorted(z):
        if n in desc:
            return CriterionVerdict("backdoor", False, "descendant", n,
                                    f"{n} is a descendant of {x}")
    cut = graph.without_edges_out_of([x])
    if not (_reachable(cut, frozenset((x,)), z) & {y}):
        return CriterionVerdict("backdoor", True, message=(
            f"{_fmt_set(z)} blocks every back-door path from {x} to {y}"))
    witness = _open_paths(graph, x, y, z, first="<-")[0]
    return CriterionVerdict("backdoor", False, "unblocked-backdoor-path", witness,
                            f"back-door path {witness} is open given {_fmt_set(z)}")


def backdoor_sets(graph, x: str, y: str, max_size: Optional[int] = None,
                  candidates: Optional[Iterable[str]] = None) -> List[FrozenSet[str]]:
    """All inclusion-minimal sets satisfying the back-door criterion.

    Sets are drawn from ``candidates`` (default: every non-latent node other
    than ``x`` and ``y``) and reported by size, then lexicographically.
    """
    graph = _as_graph(graph)
    _pre(graph, x, y, frozenset())
    if candidates is None:
        pool = [n for n in graph.nodes if n not in graph.latent]
    else:
        pool = sorted(set(candidates))
        graph._require(*pool)
    desc = graph.descendants(x)
    pool = [n for n in pool if n not in (x, y) and n not in desc]
    if max_size is None:
        max_size = max(0, len(graph.nodes) - 2)
    found: List[FrozenSet[str]] = []
    for size in range(0, min(max_size, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if check_backdoor(graph, x, y, s):
                found.append(s)
    return found


def _directed_paths(graph: CausalGraph, x: str, y: str, avoid: FrozenSet[str]) -> List[Path]:
    def admit(nodes, dirs):
        return dirs[-1] == "->" and (nodes[-1] == y or nodes[-1] not in avoid)
    return _walk(graph, x, y, admit)


def check_frontdoor(graph, x: str, y: str, zs) -> CriterionVerdict:
    """Front-door check; conditions are tried in order and the first failure reported.

    1. every directed path x -> ... -> y passes through ``zs``;
    2. no back-door path from x to any z is open given the empty set;
    3. every back-door path from each z to y is blocked by {x}.
    """
    graph = _as_graph(graph)
    z = _as_set(zs)
    _pre(graph, x, y, z)
    unintercepted = _directed_paths(graph, x, y, z)
    if unintercepted:
        w = unintercepted[0]
        return CriterionVerdict("frontdoor", False, "1", w,
                                f"directed path {w} avoids {_fmt_set(z)}")
    for n in sorted(z):
        paths = _open_paths(graph, x, n, frozenset(), first="<-")
        if paths:
            return CriterionVerdict("frontdoor", False, "2", paths[0],
                                    f"path {paths[0]} from {x} to {n} is unblocked")
    for n in sorted(z):
        paths = _open_paths(graph, n, y, frozenset((x,)), first="<-")
        if paths:
            return CriterionVerdict("frontdoor", False, "3", paths[0],
                                    f"back-door path {paths[0]} is not blocked by {x}")
    return CriterionVerdict("frontdoor", True, message=(
        f"{_fmt_set(z)} satisfies the front-door criterion for ({x}, {y})"))


def _fmt_set(z) -> str:
    return "{" + ", ".join(sorted(z)) + "}"
