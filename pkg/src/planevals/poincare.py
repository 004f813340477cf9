"""Poincare series of multi-index filtrations from a decorated dual graph.

Given a modification and an ordered collection of valuations (divisorial
ones named by marked vertices, branch ones by arrows), the series is the
product over vertices of (1 - t^m_sigma)^(-chi), where m_sigma collects
the multiplicity-matrix entries of sigma against the referenced vertices
and chi is the Euler characteristic of the smooth part of E_sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from .dualgraph import DualGraph, GraphError, euler_smooth, multiplicity_matrix
from .series import FactoredSeries, SeriesError, project

__all__ = [
    "Divisorial",
    "Branch",
    "ValuationSpec",
    "default_spec",
    "poincare_series",
    "projection_formula_curve",
]


@dataclass(frozen=True)
class Divisorial:
    """Valuation by order of vanishing along the exceptional component."""

    vertex: int


@dataclass(frozen=True)
class Branch:
    """Valuation by intersection order with the branch of this arrow."""

    branch: int


ValuationSpec = Sequence[Union[Divisorial, Branch]]


def default_spec(graph: DualGraph) -> Tuple[Union[Divisorial, Branch], ...]:
    """Branches in arrow order first, then marked divisors in mark order."""
    return (tuple(Branch(b) for _, b in sorted(graph.arrows,
                                               key=lambda vb: vb[1]))
            + tuple(Divisorial(v) for v in graph.marked_divisors))


def _reference_vertices(graph: DualGraph, spec: ValuationSpec
                        ) -> Tuple[int, ...]:
    if not spec:
        raise GraphError("empty valuation collection")
    if len(set(spec)) != len(spec):
        raise GraphError("valuation entries must be distinct")
    cols = []
    branches_seen = set()
    for entry in spec:
        if isinstance(entry, Divisorial):
            v = entry.vertex
            if not 1 <= v <= graph.n:
                raise GraphError(f"no vertex {v} for divisorial valuation")
            cols.append(v)
        elif isinstance(entry, Branch):
            cols.append(graph.arrow_vertex(entry.branch))
            branches_seen.add(entry.branch)
        else:
            raise GraphError(f"bad valuation entry {entry!r}")
    if branches_seen != {b for _, b in graph.arrows}:
        raise GraphError("spec must reference every arrow of the graph "
                         "exactly once (sub-collections need their own "
                         "minimal graph)")
    return tuple(cols)


def _check_minimal(graph: DualGraph, spec: ValuationSpec,
                   cols: Tuple[int, ...]) -> None:
    refs = set(cols)
    for v in graph.vertex_ids():
        if not any(graph.leq(v, w) for w in refs):
            raise GraphError(
                f"vertex {v} lies under no referenced vertex; the graph is "
                "not the minimal resolution of this collection")
    div_refs = {e.vertex for e in spec if isinstance(e, Divisorial)}
    if graph.n >= 2:
        for v in graph.maximal_vertices():
            if v in div_refs:
                continue
            if graph.valence(v) + len(graph.arrows_at(v)) <= 2:
                raise GraphError(
                    f"vertex {v} is contractible; the graph is not minimal")


def poincare_series(graph: DualGraph, spec: ValuationSpec) -> FactoredSeries:
    """Factored Poincare series of the collection described by ``spec``.

    The graph must be the minimal resolution of the collection: every
    vertex must lie under a referenced one and no vertex may be
    contractible.  Vertices with chi = 0 contribute no factor; equal
    exponent vectors merge.
    """
    spec = tuple(spec)
    cols = _reference_vertices(graph, spec)
    _check_minimal(graph, spec, cols)
    mode = "curve" if graph.arrows else "divisorial"
    chi = euler_smooth(graph, mode)
    m = multiplicity_matrix(graph)
    items = []
    for v in graph.vertex_ids():
        if chi[v - 1] == 0:
            continue
        exponent = tuple(m[v - 1][c - 1] for c in cols)
        items.append((exponent, -chi[v - 1]))
    return FactoredSeries(len(cols), items)


def projection_formula_curve(p: FactoredSeries, m_alpha,
                             i: int) -> FactoredSeries:
    """Remove branch ``i``: divide by (1 - t^m_alpha), then set t_i = 1.

    ``m_alpha`` is the exponent vector of the removed branch's arrow
    vertex.  Dividing decrements the multiplicity at that exact exponent
    (entering -1 if the factor was absent).  Removing the only branch
    leaves the empty collection, whose series is the 0-variable constant 1.
    """
    if not 1 <= i <= p.nvars:
        raise SeriesError(f"no variable index {i}")
    q = p.with_factor(tuple(m_alpha), -1)
    keep = [j for j in range(1, p.nvars + 1) if j != i]
    if not keep:
        return FactoredSeries(0, ())
    return project(q, keep)
