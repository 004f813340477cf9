"""Ground truth computed from first principles, at desk scale.

Valuations are evaluated by composing blowup charts into explicit
parametrizations and reading off leading orders; dimensions of ideal
quotients come from exact linear algebra on jet spaces; the Poincare
series is then assembled straight from its definition (L, then the two
algebraic steps).  Nothing here reuses the closed formulas, so agreement
with the poincare module is meaningful evidence.

All arithmetic is exact: integer polynomial dictionaries, rational
elimination.  Divisorial valuations use a single symbolic-generic
curvette (an indeterminate lambda), never random sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dualgraph import DualGraph, multiplicity_matrix
from .poincare import Branch, Divisorial, ValuationSpec
from .series import TruncatedSeries, divide_torus

__all__ = [
    "OracleError",
    "Parametrization",
    "curvette_parametrization",
    "branch_parametrization",
    "valuation",
    "multiplicity_sequence",
    "noether_contact",
    "ideal_dim",
    "definitional_poincare",
    "semigroup_series",
]

# polynomials in two symbols are dicts {(i, j): int}; the first symbol is
# always the one whose order we read (s in charts, tau in parametrizations)

Poly = Dict[Tuple[int, int], int]


class OracleError(RuntimeError):
    """The oracle cannot certify an answer at the requested scale."""


def _pmul(a: Poly, b: Poly, cap: int) -> Poly:
    if len(a) > len(b):
        a, b = b, a
    out: Poly = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            s = i + k
            if s > cap:
                continue
            key = (s, j + l)
            v = out.get(key, 0) + c * d
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _padd_scaled(acc: Poly, p: Poly, c: int) -> None:
    for key, d in p.items():
        v = acc.get(key, 0) + c * d
        if v:
            acc[key] = v
        elif key in acc:
            del acc[key]


def _subst(p: Poly, umono: Tuple[int, int], vpoly: Poly, cap: int) -> Poly:
    """p(U, V) where U is the monomial s^u0 t^u1 and V a short polynomial."""
    rows: Dict[int, Dict[int, int]] = {}
    for (a, b), c in p.items():
        rows.setdefault(b, {})[a] = c
    acc: Poly = {}
    for b in range(max(rows, default=0), -1, -1):
        acc = _pmul(acc, vpoly, cap)
        for a, c in rows.get(b, {}).items():
            i, j = a * umono[0], a * umono[1]
            if i <= cap:
                v = acc.get((i, j), 0) + c
                if v:
                    acc[(i, j)] = v
                elif (i, j) in acc:
                    del acc[(i, j)]
    return acc


def _order(p: Poly) -> Optional[int]:
    return min((i for i, _ in p), default=None)


# -- blowup chart composition ----------------------------------------------


def _charts(graph: DualGraph, cap: int):
    """Chart data of every vertex, truncated at s-degree ``cap``.

    For vertex v the result holds a dict mapping ``other`` to the chart
    (X, Y) whose axes are {s = 0} = E_v and {t = 0} = E_other (other is
    None for the non-divisor axis of a chart at a free point).  Also
    returns, per vertex, the center coordinate assigned to each free
    child and to each arrow: distinct finite positions on the primary
    chart, starting at 0 when the second axis is not a divisor.
    """
    n = graph.n
    charts: List[Dict[Optional[int], Tuple[Poly, Poly]]] = [None] * (n + 1)
    primary: List[Optional[int]] = [None] * (n + 1)
    counters = [0] * (n + 1)
    child_theta = {}
    for v in range(1, n + 1):
        ps = graph.parents[v - 1]
        if not ps:
            x: Poly = {(1, 0): 1}
            y: Poly = {(1, 1): 1}
            charts[v] = {None: (x, y)}
            primary[v] = None
            counters[v] = 0
        elif len(ps) == 1:
            p = ps[0]
            theta = counters[p]
            counters[p] += 1
            child_theta[v] = theta
            px, py = charts[p][primary[p]]
            va = {(1, 1): 1}
            if theta:
                va[(0, 0)] = theta
            vb = {(1, 0): 1}
            if theta:
                vb[(0, 0)] = theta
            charts[v] = {
                None: (_subst(px, (1, 0), va, cap), _subst(py, (1, 0), va, cap)),
                p: (_subst(px, (1, 1), vb, cap), _subst(py, (1, 1), vb, cap)),
            }
            primary[v] = None
            counters[v] = 0
        else:
            lo, hi = ps
            hx, hy = charts[hi][lo]
            charts[v] = {
                lo: (_subst(hx, (1, 0), {(1, 1): 1}, cap),
                     _subst(hy, (1, 0), {(1, 1): 1}, cap)),
                hi: (_subst(hx, (1, 1), {(1, 0): 1}, cap),
                     _subst(hy, (1, 1), {(1, 0): 1}, cap)),
            }
            primary[v] = lo
            counters[v] = 1
    arrow_theta = {}
    for v, branch in graph.arrows:
        arrow_theta[branch] = (v, counters[v])
        counters[v] += 1
    return charts, primary, arrow_theta


@dataclass(frozen=True)
class Parametrization:
    """Pair (x(tau), y(tau)) with coefficients polynomial in generic lambda.

    Stored as dicts {(tau_exp, lambda_exp): int}; orders past ``trunc``
    in tau are discarded.  Both components vanish at tau = 0 and the map
    is primitive (it parametrizes the image of a smooth transversal disc
    through the modification).
    """

    x: Tuple[Tuple[Tuple[int, int], int], ...]
    y: Tuple[Tuple[Tuple[int, int], int], ...]
    trunc: int

    @classmethod
    def _make(cls, x: Poly, y: Poly, trunc: int) -> "Parametrization":
        return cls(tuple(sorted(x.items())), tuple(sorted(y.items())), trunc)

    def polys(self) -> Tuple[Poly, Poly]:
        return dict(self.x), dict(self.y)


def _default_trunc(graph: DualGraph, sigma: int) -> int:
    row = multiplicity_matrix(graph)[sigma - 1]
    return 2 * max(row) + 2


def curvette_parametrization(graph: DualGraph, sigma: int,
                             trunc: Optional[int] = None) -> Parametrization:
    """Generic transversal disc through E_sigma, pushed down to (x, y).

    The second chart coordinate is left symbolic: it is the generic
    position lambda of the point where the disc crosses E_sigma.
    """
    if not 1 <= sigma <= graph.n:
        raise OracleError(f"no vertex {sigma}")
    if trunc is None:
        trunc = _default_trunc(graph, sigma)
    charts, primary, _ = _charts(graph, trunc)
    x, y = charts[sigma][primary[sigma]]
    return Parametrization._make(x, y, trunc)


def branch_parametrization(graph: DualGraph, branch: int,
                           trunc: Optional[int] = None) -> Parametrization:
    """Explicit parametrization of one arrow branch of a curve graph."""
    if branch not in {b for _, b in graph.arrows}:
        raise OracleError(f"no branch {branch}")
    alpha = graph.arrow_vertex(branch)
    if trunc is None:
        trunc = _default_trunc(graph, alpha)
    charts, primary, arrow_theta = _charts(graph, trunc)
    _, theta = arrow_theta[branch]
    x, y = charts[alpha][primary[alpha]]
    sub = {(0, 0): theta} if theta else {}
    return Parametrization._make(_subst(x, (1, 0), sub, trunc),
                                 _subst(y, (1, 0), sub, trunc), trunc)


def valuation(param: Parametrization, f) -> "int | float":
    """Leading tau-order of f pulled back along the parametrization.

    f is a polynomial {(i, j): int} in (x, y).  The leading coefficient
    is a polynomial in lambda; vanishing is decided identically, not
    numerically.  If everything cancels below the truncation degree the
    answer is only known to be >= trunc and math.inf is returned.
    """
    x, y = param.polys()
    cap = param.trunc
    xpow: List[Poly] = [{(0, 0): 1}]
    ypow: List[Poly] = [{(0, 0): 1}]
    acc: Poly = {}
    for (i, j), c in f.items():
        if not c:
            continue
        while len(xpow) <= i:
            xpow.append(_pmul(xpow[-1], x, cap))
        while len(ypow) <= j:
            ypow.append(_pmul(ypow[-1], y, cap))
        _padd_scaled(acc, _pmul(xpow[i], ypow[j], cap), c)
    o = _order(acc)
    return math.inf if o is None else o


# -- multiplicity sequences (independent of the matrix recursion) -----------


def multiplicity_sequence(graph: DualGraph, sigma: int) -> Dict[int, int]:
    """Multiplicity of a curvette of E_sigma at each center below it.

    Computed by proximity: the multiplicity at a center equals the sum
    of multiplicities at the centers proximate to it, seeded by 1 at the
    final center.
    """
    if not 1 <= sigma <= graph.n:
        raise OracleError(f"no vertex {sigma}")
    chain = graph.chain_to(sigma)
    members = set(chain)
    mu = {}
    for c in reversed(chain):
        total = 1 if c == sigma else 0
        for v in chain:
            if v > c and c in graph.parents[v - 1] and v in members:
                total += mu[v]
        mu[c] = total
    return mu


def noether_contact(graph: DualGraph, sigma: int, delta: int) -> int:
    """Intersection value of curvettes at two vertices, by Noether's sum."""
    mu_s = multiplicity_sequence(graph, sigma)
    mu_d = multiplicity_sequence(graph, delta)
    common = set(mu_s) & set(mu_d)
    return sum(mu_s[c] * mu_d[c] for c in common)


# -- jet spaces and the definitional series ---------------------------------


def _spec_pullback_sources(graph: DualGraph, spec, cap: int):
    """(X, Y) chart polynomials for every valuation in the spec."""
    charts, primary, arrow_theta = _charts(graph, cap)
    out = []
    for entry in spec:
        if isinstance(entry, Divisorial):
            out.append(charts[entry.vertex][primary[entry.vertex]])
        elif isinstance(entry, Branch):
            alpha, theta = arrow_theta[entry.branch]
            x, y = charts[alpha][primary[alpha]]
            sub = {(0, 0): theta} if theta else {}
            out.append((_subst(x, (1, 0), sub, cap),
                        _subst(y, (1, 0), sub, cap)))
        else:
            raise OracleError(f"unknown valuation {entry!r}")
    return out


def _lead(p: Poly, level: int) -> Tuple[int, ...]:
    width = max((j for i, j in p if i == level), default=0)
    row = [0] * (width + 1)
    for (i, j), c in p.items():
        if i == level:
            row[j] = c
    return tuple(row)


def _dependency(rows: List[Tuple[int, ...]]) -> Optional[List[Fraction]]:
    """Coefficients of a vanishing combination of the rows, if any."""
    width = max((len(r) for r in rows), default=0)
    ech: List[Tuple[List[Fraction], Dict[int, Fraction]]] = []
    for idx, raw in enumerate(rows):
        vec = [Fraction(raw[i]) if i < len(raw) else Fraction(0)
               for i in range(width)]
        expr = {idx: Fraction(1)}
        for evec, eexpr in ech:
            piv = next(i for i, x in enumerate(evec) if x)
            if vec[piv]:
                f = vec[piv] / evec[piv]
                for i in range(width):
                    vec[i] -= f * evec[i]
                for k, x in eexpr.items():
                    expr[k] = expr.get(k, Fraction(0)) - f * x
        if any(vec):
            ech.append((vec, expr))
        else:
            out = [Fraction(0)] * len(rows)
            for k, x in expr.items():
                out[k] = x
            return out
    return None


_BASIS_CACHE: Dict[tuple, tuple] = {}


def _adapted_profiles(graph: DualGraph, spec, W: int, cap: int):
    """Value profiles of a jet basis adapted to all valuations at once.

    Basis of the monomials of degree <= W, repeatedly corrected: whenever
    several elements share a finite leading level along one valuation and
    their leading data are linearly dependent, the combination (which
    sinks deeper) replaces the participant whose profile along the other
    valuation is smallest.  For one or two valuations this terminates
    and yields a basis whose profile counts compute dim of every needed
    J(w) intersection; more valuations are refused.
    """
    key = (graph, tuple(spec), W, cap)
    got = _BASIS_CACHE.get(key)
    if got is not None:
        return got
    r = len(spec)
    if r > 2:
        raise OracleError("adapted-basis elimination is certified for at "
                          "most two valuations")
    sources = _spec_pullback_sources(graph, spec, cap)
    powers = []
    for x, y in sources:
        xpow = [{(0, 0): 1}]
        ypow = [{(0, 0): 1}]
        for _ in range(W):
            xpow.append(_pmul(xpow[-1], x, cap))
            ypow.append(_pmul(ypow[-1], y, cap))
        powers.append((xpow, ypow))
    pulls: List[List[Poly]] = []
    for i in range(W + 1):
        for j in range(W + 1 - i):
            pulls.append([_pmul(powers[k][0][i], powers[k][1][j], cap)
                          for k in range(r)])

    def profile(ps: List[Poly]) -> Tuple[int, ...]:
        return tuple(min(cap, _order(p)) if _order(p) is not None else cap
                     for p in ps)

    profs = [profile(ps) for ps in pulls]
    changed = True
    while changed:
        changed = False
        for k in range(r):
            levels: Dict[int, List[int]] = {}
            for idx, pr in enumerate(profs):
                if pr[k] < cap:
                    levels.setdefault(pr[k], []).append(idx)
            for level, members in sorted(levels.items()):
                if len(members) < 2:
                    continue
                rows = [_lead(pulls[m][k], level) for m in members]
                dep = _dependency(rows)
                if dep is None:
                    continue
                denom = 1
                for f in dep:
                    denom = denom * f.denominator // math.gcd(
                        denom, f.denominator)
                coefs = [int(f * denom) for f in dep]
                participants = [m for m, c in zip(members, coefs) if c]
                if r == 2:
                    victim = min(participants,
                                 key=lambda m: profs[m][1 - k])
                else:
                    victim = participants[0]
                combo = [dict() for _ in range(r)]
                for m, c in zip(members, coefs):
                    if c:
                        for kk in range(r):
                            _padd_scaled(combo[kk], pulls[m][kk], c)
                pulls[victim] = combo
                profs[victim] = profile(combo)
                changed = True
                break
            if changed:
                break
    result = (tuple(profs), len(pulls))
    _BASIS_CACHE[key] = result
    return result


def _profile_counts(profs, cap: int, r: int):
    """counts[w] = number of basis profiles >= w, on the grid [0, cap]^r."""
    size = cap + 1
    if r == 1:
        counts = [0] * size
        for (a,) in profs:
            counts[min(a, cap)] += 1
        for i in range(size - 2, -1, -1):
            counts[i] += counts[i + 1]
        return counts
    counts = [[0] * size for _ in range(size)]
    for a, b in profs:
        counts[min(a, cap)][min(b, cap)] += 1
    for i in range(size - 1, -1, -1):
        for j in range(size - 2, -1, -1):
            counts[i][j] += counts[i][j + 1]
    for i in range(size - 2, -1, -1):
        for j in range(size):
            counts[i][j] += counts[i + 1][j]
    return counts


def _jdim(counts, w: Sequence[int], cap: int, r: int) -> int:
    idx = [max(0, min(x, cap)) for x in w]
    if any(x > cap for x in w):
        # a coordinate beyond the cap is outside the certified window
        raise OracleError("query beyond the jet-space window")
    if r == 1:
        return counts[idx[0]]
    return counts[idx[0]][idx[1]]


def ideal_dim(graph: DualGraph, spec: ValuationSpec, v: Sequence[int]) -> int:
    """dim J(v)/J(v + (1,..,1)) computed on jets, exactly.

    The jet space takes all monomials of degree <= max(v) + 2, enough to
    determine membership in every ideal queried here.
    """
    v = tuple(int(x) for x in v)
    r = len(spec)
    if len(v) != r or any(x < 0 for x in v):
        raise OracleError(f"value vector {v} does not match the spec")
    top = max(v) + 1 if v else 1
    cap = top + 1
    W = top + 2
    profs, _ = _adapted_profiles(graph, spec, W, cap)
    counts = _profile_counts(profs, cap, r)
    up = tuple(x + 1 for x in v)
    return _jdim(counts, v, cap, r) - _jdim(counts, up, cap, r)


def definitional_poincare(graph: DualGraph, spec: ValuationSpec,
                          bound: int) -> TruncatedSeries:
    """Poincare series straight from the definition, truncated.

    Computes dim J(v)/J(v+1) on the window, multiplies by
    prod (t_i - 1), divides by (t_1 .. t_r - 1).  Exact; the published
    contract guarantees coefficients on [0, bound - r]^r (window-edge
    effects stay outside it).
    """
    r = len(spec)
    if r < 1:
        raise OracleError("empty valuation spec")
    if bound < 1:
        raise OracleError("bound must be positive")
    W = bound + 2
    if (W + 1) * (W + 2) // 2 > 4000:
        raise OracleError(f"bound {bound} is beyond oracle feasibility")
    cap = bound + 2
    profs, _ = _adapted_profiles(graph, spec, W, cap)
    counts = _profile_counts(profs, cap, r)

    def L(v: Sequence[int]) -> int:
        lo = _jdim(counts, v, cap, r)
        hi = _jdim(counts, [x + 1 for x in v], cap, r)
        return lo - hi

    shape = (bound + 1,) * r
    prime = TruncatedSeries.zeros(r, bound)
    arr = prime.coeffs
    for w in itertools.product(range(bound + 1), repeat=r):
        total = 0
        for tset in itertools.product((0, 1), repeat=r):
            sign = (-1) ** (r - sum(tset))
            total += sign * L([w[i] - tset[i] for i in range(r)])
        arr[w] = total
    return divide_torus(prime)


def semigroup_series(generators: Sequence[int], bound: int) -> TruncatedSeries:
    """Characteristic series of the numerical semigroup, by dynamic
    programming: coefficient 1 exactly at representable values."""
    gens = [int(g) for g in generators]
    if not gens or any(g < 1 for g in gens):
        raise OracleError(f"bad generators {generators}")
    reach = [False] * (bound + 1)
    reach[0] = True
    for g in gens:
        for v in range(g, bound + 1):
            if reach[v - g]:
                reach[v] = True
    out = TruncatedSeries.zeros(1, bound)
    for v, ok in enumerate(reach):
        if ok:
            out.coeffs[(v,)] = 1
    return out
