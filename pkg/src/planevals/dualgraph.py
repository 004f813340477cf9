"""Dual graphs of modifications of the plane, stored as blowup sequences.

A graph is the list of its vertices in creation order; each vertex records
the vertices through whose exceptional components its center passed (its
parents): none for the first blowup, one for a free point, two for a
satellite point.  Adjacency, self-intersections and the partial order are
derived by replaying the sequence.  Decorations are an ordered list of
marked divisors (divisorial valuations) and arrows (curve branches).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Tuple

__all__ = [
    "GraphError",
    "DualGraph",
    "blowup",
    "multiplicity_matrix",
    "euler_smooth",
    "downward_closure",
    "minimize_curve_resolution",
    "canonical_code",
    "equivalent",
    "random_instance",
    "graph_to_json",
    "graph_from_json",
    "bareiss_det",
]


class GraphError(ValueError):
    """Raised for malformed graphs or illegal graph operations."""


@dataclass(frozen=True)
class DualGraph:
    """Blowup sequence with decorations.

    parents[k] lists the parents of vertex k+1 (ids are 1-based, parents
    strictly smaller).  marked_divisors is an ordered tuple of distinct
    vertex ids; arrows is a tuple of (vertex, branch) pairs whose branch
    indices are exactly 1..b.
    """

    parents: Tuple[Tuple[int, ...], ...] = ()
    marked_divisors: Tuple[int, ...] = ()
    arrows: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        parents = tuple(tuple(sorted(int(p) for p in ps))
                        for ps in self.parents)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "marked_divisors",
                           tuple(int(v) for v in self.marked_divisors))
        object.__setattr__(self, "arrows",
                           tuple(sorted((int(v), int(b))
                                        for v, b in self.arrows)))
        self._replay()
        self._check_decorations()

    # -- replay of the blowup sequence -----------------------------------

    def _replay(self) -> None:
        n = len(self.parents)
        adj = {v: set() for v in range(1, n + 1)}
        selfint = {}
        down = {}
        for v in range(1, n + 1):
            ps = self.parents[v - 1]
            if v == 1:
                if ps:
                    raise GraphError("vertex 1 cannot have parents")
                down[v] = frozenset({1})
            elif len(ps) == 1:
                (s,) = ps
                if not 1 <= s < v:
                    raise GraphError(f"vertex {v}: bad parent {s}")
                adj[s].add(v)
                adj[v].add(s)
                down[v] = down[s] | {v}
            elif len(ps) == 2:
                s, d = ps
                if not (1 <= s < v and s < d < v):
                    raise GraphError(f"vertex {v}: bad parents {ps}")
                if d not in adj[s]:
                    raise GraphError(
                        f"vertex {v}: satellite parents {s},{d} not adjacent")
                adj[s].discard(d)
                adj[d].discard(s)
                adj[s].add(v)
                adj[d].add(v)
                adj[v].update((s, d))
                # parents of a satellite are comparable; d is the larger
                down[v] = down[d] | {v}
            else:
                raise GraphError(f"vertex {v}: needs 0, 1, or 2 parents")
            for p in ps:
                selfint[p] -= 1
            selfint[v] = -1
        children = set(p for ps in self.parents for p in ps)
        object.__setattr__(self, "_adj",
                           {v: tuple(sorted(adj[v])) for v in adj})
        object.__setattr__(self, "_selfint",
                           tuple(selfint[v] for v in range(1, n + 1)))
        object.__setattr__(self, "_down", down)
        object.__setattr__(self, "_nonmaximal", frozenset(children))

    def _check_decorations(self) -> None:
        n = self.n
        marks = self.marked_divisors
        if len(set(marks)) != len(marks):
            raise GraphError("marked divisors must be distinct")
        for v in marks:
            if not 1 <= v <= n:
                raise GraphError(f"marked divisor {v} out of range")
        branches = [b for _, b in self.arrows]
        if sorted(branches) != list(range(1, len(branches) + 1)):
            raise GraphError("arrow branch indices must be exactly 1..b")
        for v, _ in self.arrows:
            if not 1 <= v <= n:
                raise GraphError(f"arrow vertex {v} out of range")
        if n == 0 and (marks or self.arrows):
            raise GraphError("decorations on an empty graph")

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.parents)

    def vertex_ids(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def valence(self, v: int) -> int:
        return len(self._adj[v])

    def self_intersection(self, v: int) -> int:
        return self._selfint[v - 1]

    def arrows_at(self, v: int) -> Tuple[int, ...]:
        """Branch indices whose arrows sit at vertex v."""
        return tuple(b for w, b in self.arrows if w == v)

    def arrow_vertex(self, branch: int) -> int:
        for v, b in self.arrows:
            if b == branch:
                return v
        raise GraphError(f"no branch {branch}")

    def down_set(self, v: int) -> frozenset:
        """All vertices <= v in the blowup partial order (a chain)."""
        return self._down[v]

    def chain_to(self, v: int) -> Tuple[int, ...]:
        """down_set(v) sorted in chain order (ids increase along it)."""
        return tuple(sorted(self._down[v]))

    def leq(self, u: int, v: int) -> bool:
        return u in self._down[v]

    def meet(self, u: int, v: int) -> int:
        """Largest common vertex of the chains to u and to v."""
        return max(self._down[u] & self._down[v])

    def is_maximal(self, v: int) -> bool:
        return v not in self._nonmaximal

    def maximal_vertices(self) -> Tuple[int, ...]:
        return tuple(v for v in self.vertex_ids() if self.is_maximal(v))


# -- construction ---------------------------------------------------------


def blowup(graph: DualGraph, kind) -> Tuple[DualGraph, int]:
    """Append one blowup; kind is "origin", ("free", s) or ("satellite", s, d).

    Returns the extended graph and the id of the new vertex.  Decorations
    are carried over unchanged.
    """
    if kind == "origin":
        if graph.n != 0:
            raise GraphError("origin blowup only on the empty graph")
        new_parents = ((),)
    elif isinstance(kind, tuple) and len(kind) == 2 and kind[0] == "free":
        s = int(kind[1])
        if not 1 <= s <= graph.n:
            raise GraphError(f"free blowup: no vertex {s}")
        new_parents = graph.parents + ((s,),)
    elif isinstance(kind, tuple) and len(kind) == 3 and kind[0] == "satellite":
        s, d = sorted((int(kind[1]), int(kind[2])))
        if not 1 <= s <= graph.n and 1 <= d <= graph.n:
            raise GraphError(f"satellite blowup: bad pair {s},{d}")
        if d not in graph._adj.get(s, ()):
            raise GraphError(f"satellite blowup: {s} and {d} not adjacent")
        new_parents = graph.parents + ((s, d),)
    else:
        raise GraphError(f"unknown blowup kind {kind!r}")
    out = DualGraph(new_parents, graph.marked_divisors, graph.arrows)
    return out, out.n


# -- multiplicity matrix --------------------------------------------------


@lru_cache(maxsize=4096)
def _mmatrix(graph: DualGraph) -> Tuple[Tuple[int, ...], ...]:
    n = graph.n
    m = [[0] * (n + 1) for _ in range(n + 1)]
    for v in range(1, n + 1):
        ps = graph.parents[v - 1]
        for u in range(1, v):
            m[u][v] = sum(m[u][w] for w in ps)
        m[v][v] = 1 + sum(m[w][v] for w in ps)
        for u in range(1, v):
            m[v][u] = m[u][v]
    rows = tuple(tuple(m[u][1:]) for u in range(1, n + 1))

    # (-I) * m must be the identity; this also certifies unimodularity
    for u in range(1, n + 1):
        nb = set(graph.neighbors(u))
        for v in range(1, n + 1):
            acc = -graph.self_intersection(u) * rows[u - 1][v - 1]
            acc -= sum(rows[w - 1][v - 1] for w in nb)
            if acc != (1 if u == v else 0):
                raise GraphError("intersection matrix inversion failed")
    for row in rows:
        if any(e <= 0 for e in row):
            raise GraphError("multiplicity matrix must be positive")
    # growth along covers of the partial order: never decreasing, and
    # strictly increasing in every column that lies above the new vertex
    for v in range(2, n + 1):
        cover = max(graph.parents[v - 1])
        for col in range(1, n + 1):
            lo, hi = rows[cover - 1][col - 1], rows[v - 1][col - 1]
            if lo > hi or (graph.leq(v, col) and lo >= hi):
                raise GraphError("multiplicity rows must grow along covers")
    return rows


def multiplicity_matrix(graph: DualGraph) -> Tuple[Tuple[int, ...], ...]:
    """The inverse of minus the intersection matrix, as integer rows.

    Built by the proximity recursion: column v is the sum of its parents'
    columns plus the unit vector at v.  The result is verified against the
    intersection data, so a corrupted graph cannot pass silently.
    """
    if graph.n == 0:
        raise GraphError("empty graph has no multiplicity matrix")
    return _mmatrix(graph)


def bareiss_det(rows) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("square matrix required")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


# -- Euler characteristics ------------------------------------------------


def euler_smooth(graph: DualGraph, mode: str) -> Tuple[int, ...]:
    """Euler characteristic of the smooth part of each component.

    mode "divisorial": punctures are the adjacent exceptional components.
    mode "curve": arrows (strict transforms of branches) puncture as well.
    The tree identity sum(chi) = 2 - (#arrows counted in curve mode) is
    asserted on every call.
    """
    if mode not in ("divisorial", "curve"):
        raise GraphError(f"unknown mode {mode!r}")
    if graph.n == 0:
        raise GraphError("empty graph")
    chi = []
    for v in graph.vertex_ids():
        c = 2 - graph.valence(v)
        if mode == "curve":
            c -= len(graph.arrows_at(v))
        chi.append(c)
    expect = 2 - (len(graph.arrows) if mode == "curve" else 0)
    if sum(chi) != expect:
        raise GraphError("Euler characteristic bookkeeping failed")
    return tuple(chi)


# -- subsequences and contraction ----------------------------------------


def downward_closure(graph: DualGraph, S: Iterable[int]) -> DualGraph:
    """Sub-blowup-sequence of everything <= some element of S.

    The surviving vertices are renumbered in creation order and become the
    support of the closure; marked_divisors is set to S (in the given
    order).  Arrows are a curve-mode notion and must be absent.
    """
    S = [int(v) for v in S]
    if not S:
        raise GraphError("empty closure request")
    if graph.arrows:
        raise GraphError("closure is a divisorial operation; arrows present")
    keep = set()
    for v in S:
        if not 1 <= v <= graph.n:
            raise GraphError(f"no vertex {v}")
        keep |= graph.down_set(v)
    order = sorted(keep)
    remap = {old: i + 1 for i, old in enumerate(order)}
    parents = tuple(tuple(remap[p] for p in graph.parents[old - 1])
                    for old in order)
    marks = tuple(remap[v] for v in S)
    return DualGraph(parents, marks, ())


def _contract(graph: DualGraph, v: int) -> DualGraph:
    """Blow down the maximal vertex v (callers check contractibility)."""
    ps = graph.parents[v - 1]
    remap = {old: (old if old < v else old - 1)
             for old in graph.vertex_ids() if old != v}
    parents = tuple(tuple(remap[p] for p in graph.parents[old - 1])
                    for old in graph.vertex_ids() if old != v)
    marks = tuple(remap[w] for w in graph.marked_divisors)
    arrows = []
    for w, b in graph.arrows:
        if w == v:
            if len(ps) != 1:
                raise GraphError("cannot move an arrow off a satellite")
            arrows.append((remap[ps[0]], b))
        else:
            arrows.append((remap[w], b))
    return DualGraph(parents, marks, tuple(arrows))


def minimize_curve_resolution(graph: DualGraph) -> DualGraph:
    """Contract needless exceptional curves of a curve resolution.

    A maximal vertex (self-intersection -1) is blown down when it is
    unmarked, is not the last vertex, and meets at most two components of
    the total transform (edges plus arrows).  Arrows on a contracted free
    vertex reattach to its parent; contracting a satellite restores the
    adjacency of its parents.  Repeats until no contraction applies.
    """
    g = graph
    while True:
        target = None
        for v in g.maximal_vertices():
            if g.n < 2 or v in g.marked_divisors:
                continue
            load = g.valence(v) + len(g.arrows_at(v))
            if load <= 2 and not (len(g.parents[v - 1]) == 2
                                  and g.arrows_at(v)):
                target = v
                break
        if target is None:
            return g
        g = _contract(g, target)


# -- combinatorial equivalence -------------------------------------------


def _vertex_code(graph: DualGraph, v: int, memo: dict) -> str:
    if v in memo:
        return memo[v]
    ps = graph.parents[v - 1]
    if not ps:
        tag = "R"
    elif len(ps) == 1:
        tag = "F"
    else:
        other, tree_parent = ps
        pp = graph.parents[tree_parent - 1]
        if other not in pp:
            raise GraphError("satellite parents out of order")
        if len(pp) == 1:
            tag = "S1"
        else:
            tag = "SL" if other == min(pp) else "SH"
    marks = ",".join(str(i + 1)
                     for i, w in enumerate(graph.marked_divisors) if w == v)
    arrs = ",".join(str(b) for b in graph.arrows_at(v))
    kids = sorted(_vertex_code(graph, c, memo)
                  for c in graph.vertex_ids()
                  if graph.parents[c - 1] and max(graph.parents[c - 1]) == v)
    code = f"({tag};{marks};{arrs}|{''.join(kids)})"
    memo[v] = code
    return code


def canonical_code(graph: DualGraph) -> str:
    """Creation-order-independent encoding of (graph, order, decorations).

    The blowup sequence is viewed as a rooted tree (each vertex hangs off
    its largest parent); a tag records whether the vertex is free or which
    of the tree-parent's own parents the satellite point involved.  Child
    codes are sorted, so any relabeling that preserves parent structure and
    decorations yields the same string.
    """
    if graph.n == 0:
        return "()"
    memo: dict = {}
    return _vertex_code(graph, 1, memo)


def equivalent(g1: DualGraph, g2: DualGraph) -> bool:
    """Combinatorial equivalence preserving marked/arrow index roles."""
    return canonical_code(g1) == canonical_code(g2)


# -- random instances -----------------------------------------------------


def _random_sequence(rng: random.Random, n: int, satellite_bias: float
                     ) -> DualGraph:
    g, _ = blowup(DualGraph(), "origin")
    for _ in range(n - 1):
        edges = sorted((min(a, b), max(a, b))
                       for a in g.vertex_ids() for b in g.neighbors(a)
                       if a < b)
        if edges and rng.random() < satellite_bias:
            s, d = rng.choice(edges)
            g, _ = blowup(g, ("satellite", s, d))
        else:
            g, _ = blowup(g, ("free", rng.choice(list(g.vertex_ids()))))
    return g


def random_instance(seed: int, max_vertices: int, r: int, mode: str,
                    satellite_bias: float = 0.4) -> DualGraph:
    """Deterministic random minimal instance for round-trip campaigns."""
    if mode not in ("divisorial", "curve"):
        raise GraphError(f"unknown mode {mode!r}")
    if max_vertices < 1 or r < 1:
        raise GraphError("need max_vertices >= 1 and r >= 1")
    if r > max_vertices:
        raise GraphError("more valuations requested than vertices allowed")
    rng = random.Random(seed)
    n = rng.randint(r, max_vertices)
    g = _random_sequence(rng, n, satellite_bias)
    picks = rng.sample(sorted(g.vertex_ids()), r)
    if mode == "divisorial":
        return downward_closure(g, picks)
    arrows = tuple((v, i + 1) for i, v in enumerate(picks))
    g = DualGraph(g.parents, (), arrows)
    return minimize_curve_resolution(g)


# -- file format ----------------------------------------------------------


def graph_to_json(graph: DualGraph) -> str:
    doc = {
        "vertices": [
            {
                "id": v,
                "parents": list(graph.parents[v - 1]),
                "self_intersection": graph.self_intersection(v),
            }
            for v in graph.vertex_ids()
        ],
        "marked_divisors": list(graph.marked_divisors),
        "arrows": [{"vertex": v, "branch": b} for v, b in graph.arrows],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def graph_from_json(text: str) -> DualGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"bad graph JSON: {exc}") from exc
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise GraphError("graph JSON needs a 'vertices' list")
    verts = doc["vertices"]
    if not isinstance(verts, list):
        raise GraphError("'vertices' must be a list")
    try:
        rows = sorted(({"id": int(v["id"]),
                        "parents": [int(p) for p in v.get("parents", [])],
                        "si": v.get("self_intersection")}
                       for v in verts), key=lambda d: d["id"])
    except (TypeError, KeyError, ValueError) as exc:
        raise GraphError(f"bad vertex entry: {exc}") from exc
    if [d["id"] for d in rows] != list(range(1, len(rows) + 1)):
        raise GraphError("vertex ids must be exactly 1..n")
    parents = tuple(tuple(d["parents"]) for d in rows)
    marks = tuple(int(v) for v in doc.get("marked_divisors", []))
    arrows = []
    for a in doc.get("arrows", []):
        try:
            arrows.append((int(a["vertex"]), int(a["branch"])))
        except (TypeError, KeyError, ValueError) as exc:
            raise GraphError(f"bad arrow entry: {exc}") from exc
    g = DualGraph(parents, marks, tuple(arrows))
    for d in rows:
        if d["si"] is not None and int(d["si"]) != g.self_intersection(d["id"]):
            raise GraphError(
                f"vertex {d['id']}: declared self-intersection {d['si']} "
                f"disagrees with replay ({g.self_intersection(d['id'])})")
    return g
