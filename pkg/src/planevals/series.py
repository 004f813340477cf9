"""Exact multivariate series arithmetic over the integers.

Two representations are used throughout the package: a factored form
``prod (1 - t^m)^k`` with integer exponent vectors ``m`` and integer powers
``k``, and a dense truncated expansion on the grid ``[0, bound]^nvars``.
All coefficients are Python ints; numpy arrays with ``dtype=object`` serve
as exact containers, so there is no floating point and no overflow.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Union

import numpy as np

__all__ = [
    "SeriesError",
    "glex_key",
    "FactoredSeries",
    "TruncatedSeries",
    "project",
    "mul",
    "div",
    "expand",
    "factorize",
    "divide_torus",
    "series_to_text",
    "series_from_text",
]


class SeriesError(ValueError):
    """Raised for malformed series data or unsupported operations."""


def glex_key(m: tuple) -> tuple:
    """Graded lexicographic sort key for an exponent tuple."""
    return (sum(m), m)


def _check_exponent(m, nvars: int) -> tuple:
    m = tuple(int(e) for e in m)
    if len(m) != nvars:
        raise SeriesError(f"exponent {m!r} has wrong arity, expected {nvars}")
    if any(e < 0 for e in m):
        raise SeriesError(f"negative entry in exponent {m!r}")
    if not any(m):
        raise SeriesError("zero exponent vector is not allowed in a factor")
    return m


class FactoredSeries:
    """A finite product ``prod_m (1 - t^m)^{k_m}`` with integer data.

    Exponent vectors are nonnegative, nonzero integer tuples of length
    ``nvars``; powers ``k_m`` are nonzero integers (zero powers are dropped
    on construction).  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "_factors")

    def __init__(self, nvars: int,
                 factors: Union[Mapping[tuple, int], Iterable] = ()):
        if nvars < 0:
            raise SeriesError("nvars must be nonnegative")
        self.nvars = int(nvars)
        items = factors.items() if isinstance(factors, Mapping) else factors
        acc: dict = {}
        for m, k in items:
            m = _check_exponent(m, self.nvars)
            k = int(k)
            acc[m] = acc.get(m, 0) + k
        self._factors = {m: k for m, k in acc.items() if k != 0}

    def factors(self) -> dict:
        """Factor dictionary, exponent tuple -> nonzero power (a copy)."""
        return dict(self._factors)

    def items(self) -> Iterator:
        return iter(sorted(self._factors.items(),
                           key=lambda mk: glex_key(mk[0])))

    def power(self, m) -> int:
        return self._factors.get(tuple(m), 0)

    def __len__(self) -> int:
        return len(self._factors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactoredSeries):
            return NotImplemented
        return self.nvars == other.nvars and self._factors == other._factors

    def __hash__(self):
        return hash((self.nvars, frozenset(self._factors.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{m}: {k}" for m, k in self.items())
        return f"FactoredSeries({self.nvars}, {{{body}}})"

    def with_factor(self, m, delta: int) -> "FactoredSeries":
        """New series with ``delta`` added to the power at exponent ``m``."""
        items = list(self._factors.items()) + [(tuple(m), int(delta))]
        return FactoredSeries(self.nvars, items)

    def max_degree(self) -> int:
        """Largest coordinate appearing in any exponent (0 if no factors)."""
        return max((e for m in self._factors for e in m), default=0)

    def project(self, drop: int) -> "FactoredSeries":
        """Substitute ``t_drop = 1``, dropping that variable.

        Exponent vectors lose coordinate ``drop`` and equal images merge.
        A factor whose exponent vanishes entirely would degenerate to
        ``(1 - 1)^k``; that is rejected.
        """
        if not 0 <= drop < self.nvars:
            raise SeriesError(f"no variable index {drop}")
        if self.nvars == 1:
            raise SeriesError("cannot project away the last variable")
        items = []
        for m, k in self._factors.items():
            mm = m[:drop] + m[drop + 1:]
            if not any(mm):
                raise SeriesError(
                    f"factor at {m} degenerates under projection of t_{drop}")
            items.append((mm, k))
        return FactoredSeries(self.nvars - 1, items)

    def expand(self, bound: int) -> "TruncatedSeries":
        """Dense expansion on ``[0, bound]^nvars``, exact within the grid."""
        out = TruncatedSeries.one(self.nvars, bound)
        for m, k in self.items():
            out = out.mul_one_minus_power(m, k)
        return out


def _views(shape, m):
    # dst picks indices >= m, src the matching block at the low corner;
    # an exponent past the grid edge leaves both views empty
    src = tuple(slice(0, max(0, shape[i] - m[i])) for i in range(len(shape)))
    dst = tuple(slice(m[i], None) for i in range(len(shape)))
    return src, dst


class TruncatedSeries:
    """Dense series truncated to the grid ``[0, bound]^nvars``.

    Coefficients live in a numpy object array holding Python ints.  All
    operations return new instances and are exact on the grid.
    """

    __slots__ = ("nvars", "bound", "coeffs")

    def __init__(self, nvars: int, bound: int, coeffs: np.ndarray):
        if nvars < 1 or bound < 0:
            raise SeriesError("need nvars >= 1 and bound >= 0")
        shape = (bound + 1,) * nvars
        if coeffs.shape != shape or coeffs.dtype != np.dtype(object):
            raise SeriesError("coefficient array has wrong shape or dtype")
        self.nvars = nvars
        self.bound = bound
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, nvars: int, bound: int) -> "TruncatedSeries":
        arr = np.zeros((bound + 1,) * nvars, dtype=object)
        return cls(nvars, bound, arr)

    @classmethod
    def one(cls, nvars: int, bound: int) -> "TruncatedSeries":
        out = cls.zeros(nvars, bound)
        out.coeffs[(0,) * nvars] = 1
        return out

    def copy(self) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.bound, self.coeffs.copy())

    def __getitem__(self, m) -> int:
        return self.coeffs[tuple(m)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.nvars == other.nvars and self.bound == other.bound
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    def __repr__(self) -> str:
        terms = list(self.nonzero_terms())
        shown = ", ".join(f"{m}: {c}" for m, c in terms[:6])
        more = "" if len(terms) <= 6 else f", ... {len(terms)} terms"
        return (f"TruncatedSeries(nvars={self.nvars}, bound={self.bound}, "
                f"{{{shown}{more}}})")

    def nonzero_terms(self) -> Iterator:
        """Yield ``(exponent, coefficient)`` in glex order."""
        idx = np.nonzero(self.coeffs)
        terms = sorted(zip(*(ax.tolist() for ax in idx)), key=glex_key)
        for m in terms:
            yield m, self.coeffs[m]

    def is_one(self) -> bool:
        nz = np.nonzero(self.coeffs)
        if len(nz[0]) != 1:
            return False
        origin = (0,) * self.nvars
        return all(int(ax[0]) == 0 for ax in nz) and self.coeffs[origin] == 1

    def neg(self) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.bound, -self.coeffs)

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._compat(other)
        return TruncatedSeries(self.nvars, self.bound,
                               self.coeffs + other.coeffs)

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._compat(other)
        return TruncatedSeries(self.nvars, self.bound,
                               self.coeffs - other.coeffs)

    def _compat(self, other: "TruncatedSeries") -> None:
        if self.nvars != other.nvars or self.bound != other.bound:
            raise SeriesError("mismatched series grids")

    def mul_one_minus(self, m) -> "TruncatedSeries":
        """Multiply by ``(1 - t^m)``."""
        m = _check_exponent(m, self.nvars)
        out = self.coeffs.copy()
        src, dst = _views(out.shape, m)
        out[dst] -= self.coeffs[src]
        return TruncatedSeries(self.nvars, self.bound, out)

    def div_one_minus(self, m) -> "TruncatedSeries":
        """Multiply by ``1/(1 - t^m) = sum_j t^{jm}``.

        Doubling trick: adding a copy of the partial sum shifted by
        ``2^i * m`` doubles the number of geometric terms accumulated, so
        only O(log bound) passes are needed.
        """
        m = _check_exponent(m, self.nvars)
        out = self.coeffs.copy()
        step = m
        while all(s <= self.bound for s in step):
            src, dst = _views(out.shape, step)
            out[dst] += out[src]
            step = tuple(2 * s for s in step)
        return TruncatedSeries(self.nvars, self.bound, out)

    def mul_one_minus_power(self, m, k: int) -> "TruncatedSeries":
        """Multiply by ``(1 - t^m)^k`` for any integer ``k``."""
        out = self
        for _ in range(abs(int(k))):
            out = out.mul_one_minus(m) if k > 0 else out.div_one_minus(m)
        return out

    def substitute_ones(self, axis: int) -> "TruncatedSeries":
        """Sum coefficients along ``axis`` (substitute ``t_axis = 1``).

        Only meaningful where the support along the dropped axis is fully
        inside the grid; tails beyond the bound are silently lost, so
        callers must restrict comparisons accordingly.
        """
        if self.nvars < 2:
            raise SeriesError("cannot drop the last variable")
        if not 0 <= axis < self.nvars:
            raise SeriesError(f"no variable index {axis}")
        arr = self.coeffs.sum(axis=axis)
        return TruncatedSeries(self.nvars - 1, self.bound, arr)

    def factorize(self) -> FactoredSeries:
        """Write the series as ``prod (1 - t^m)^{k_m}``, exactly on the grid.

        Peels the glex-least nonconstant term repeatedly: if it is
        ``c * t^m`` the factor ``(1 - t^m)^{-c}`` accounts for it and
        multiplying by ``(1 - t^m)^{c}`` clears it without disturbing any
        glex-smaller coefficient, so the procedure terminates.  Requires
        constant term 1.  Factors supported beyond the grid are invisible;
        the result reproduces the input exactly within the bound.
        """
        origin = (0,) * self.nvars
        if self.coeffs[origin] != 1:
            raise SeriesError("factorization needs constant term 1")
        work = self
        factors: dict = {}
        while True:
            lead = None
            for m, c in work.nonzero_terms():
                if m != origin:
                    lead = (m, c)
                    break
            if lead is None:
                break
            m, c = lead
            factors[m] = factors.get(m, 0) - c
            work = work.mul_one_minus_power(m, c)
        return FactoredSeries(self.nvars, factors)


def project(f: FactoredSeries, keep) -> FactoredSeries:
    """Substitute 1 for every variable outside ``keep`` (1-based indices).

    Exponent vectors are restricted to the kept coordinates in ascending
    index order; equal restrictions merge and cancelling powers drop.  A
    factor whose restriction is all-zero would degenerate and is rejected.
    """
    keep = sorted({int(i) for i in keep})
    if not keep:
        raise SeriesError("must keep at least one variable")
    if keep[0] < 1 or keep[-1] > f.nvars:
        raise SeriesError(f"keep indices out of range 1..{f.nvars}")
    idx = [i - 1 for i in keep]
    items = []
    for m, k in f.items():
        mm = tuple(m[i] for i in idx)
        if not any(mm):
            raise SeriesError(f"factor at {m} degenerates under projection")
        items.append((mm, k))
    return FactoredSeries(len(keep), items)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Exact product, truncated to the common grid."""
    a._compat(b)
    if len(np.nonzero(b.coeffs)[0]) > len(np.nonzero(a.coeffs)[0]):
        a, b = b, a
    out = TruncatedSeries.zeros(a.nvars, a.bound)
    for m, c in b.nonzero_terms():
        src, dst = _views(out.coeffs.shape, m)
        out.coeffs[dst] += c * a.coeffs[src]
    return out


def div(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Exact quotient on the grid; ``b`` must have constant term 1 or -1."""
    a._compat(b)
    origin = (0,) * a.nvars
    b0 = b.coeffs[origin]
    if b0 not in (1, -1):
        raise SeriesError("divisor needs constant term 1 or -1")
    terms = [(m, c) for m, c in b.nonzero_terms() if m != origin]
    q = TruncatedSeries.zeros(a.nvars, a.bound)
    for w in itertools.product(range(a.bound + 1), repeat=a.nvars):
        acc = a.coeffs[w]
        for m, c in terms:
            u = tuple(w[i] - m[i] for i in range(a.nvars))
            if all(e >= 0 for e in u):
                acc -= c * q.coeffs[u]
        q.coeffs[w] = acc * b0
    return q


def expand(f: FactoredSeries, bound: int) -> TruncatedSeries:
    return f.expand(bound)


def factorize(s: TruncatedSeries) -> FactoredSeries:
    return s.factorize()


def divide_torus(p_prime: TruncatedSeries) -> TruncatedSeries:
    """Divide by ``(t_1 ... t_r - 1)`` exactly on the grid.

    Since ``(t^1 - 1) = -(1 - t^1)``, this is geometric accumulation at the
    all-ones shift followed by a sign flip.
    """
    ones = (1,) * p_prime.nvars
    return p_prime.div_one_minus(ones).neg()


def series_to_text(series: Union[FactoredSeries, TruncatedSeries]) -> str:
    """Render a series in the line-oriented interchange format.

    Header ``vars R mode {factored|expanded} bound B`` (bound 0 for the
    factored form), then one ``k e1 ... eR`` line per term in glex order.
    """
    lines = []
    if isinstance(series, FactoredSeries):
        lines.append(f"vars {series.nvars} mode factored bound 0")
        for m, k in series.items():
            lines.append(" ".join([str(k)] + [str(e) for e in m]))
    elif isinstance(series, TruncatedSeries):
        lines.append(f"vars {series.nvars} mode expanded bound {series.bound}")
        for m, c in series.nonzero_terms():
            lines.append(" ".join([str(c)] + [str(e) for e in m]))
    else:
        raise SeriesError(f"not a series: {series!r}")
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> Union[FactoredSeries, TruncatedSeries]:
    """Parse the format produced by :func:`series_to_text`."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise SeriesError("empty series text")
    head = lines[0].split()
    if (len(head) != 6 or head[0] != "vars" or head[2] != "mode"
            or head[4] != "bound"):
        raise SeriesError(f"bad header: {lines[0]!r}")
    try:
        nvars = int(head[1])
        bound = int(head[5])
    except ValueError as exc:
        raise SeriesError(f"bad header numbers: {lines[0]!r}") from exc
    mode = head[3]
    if mode not in ("factored", "expanded"):
        raise SeriesError(f"unknown mode {mode!r}")
    if nvars < 1 or bound < 0:
        raise SeriesError("need vars >= 1 and bound >= 0")

    entries = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != nvars + 1:
            raise SeriesError(f"expected {nvars + 1} fields: {ln!r}")
        try:
            vals = [int(t) for t in toks]
        except ValueError as exc:
            raise SeriesError(f"non-integer field: {ln!r}") from exc
        entries.append((tuple(vals[1:]), vals[0]))

    if mode == "factored":
        if bound != 0:
            raise SeriesError("factored series must declare bound 0")
        seen = set()
        for m, k in entries:
            if m in seen:
                raise SeriesError(f"duplicate factor exponent {m}")
            seen.add(m)
            if k == 0:
                raise SeriesError(f"zero power at {m}")
        return FactoredSeries(nvars, entries)

    out = TruncatedSeries.zeros(nvars, bound)
    seen = set()
    for m, c in entries:
        if any(e < 0 or e > bound for e in m):
            raise SeriesError(f"exponent {m} outside grid [0, {bound}]")
        if m in seen:
            raise SeriesError(f"duplicate exponent {m}")
        seen.add(m)
        out.coeffs[m] = c
    return out
