"""Series arithmetic: factored products, truncated expansions, text format."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from planevals import (FactoredSeries, SeriesError, TruncatedSeries, div,
                       divide_torus, expand, factorize, mul, project,
                       series_from_text, series_to_text)


def exponents(nvars, max_coord=6):
    return st.tuples(*[st.integers(0, max_coord)] * nvars).filter(any)


def factored(nvars, max_coord=6, max_factors=4):
    powers = st.integers(-3, 3).filter(bool)
    return st.dictionaries(exponents(nvars, max_coord), powers,
                           max_size=max_factors).map(
        lambda d: FactoredSeries(nvars, d))


# -- FactoredSeries basics ------------------------------------------------


def test_zero_powers_drop_and_duplicates_merge():
    f = FactoredSeries(2, [((1, 0), 2), ((1, 0), -2), ((0, 3), 1),
                           ((0, 3), 1)])
    assert f.factors() == {(0, 3): 2}
    assert f.power((0, 3)) == 2
    assert f.power((1, 0)) == 0
    assert len(f) == 1


def test_exponent_validation():
    with pytest.raises(SeriesError):
        FactoredSeries(2, {(0, 0): 1})
    with pytest.raises(SeriesError):
        FactoredSeries(2, {(1, -1): 1})
    with pytest.raises(SeriesError):
        FactoredSeries(2, {(1,): 1})
    with pytest.raises(SeriesError):
        FactoredSeries(-1, {})


def test_with_factor_and_equality():
    f = FactoredSeries(1, {(2,): -1})
    g = f.with_factor((2,), 1)
    assert g == FactoredSeries(1, {})
    assert f == FactoredSeries(1, {(2,): -1})
    assert hash(f) == hash(FactoredSeries(1, {(2,): -1}))


def test_max_degree_is_largest_coordinate():
    f = FactoredSeries(2, {(1, 4): -1, (3, 2): 2})
    assert f.max_degree() == 4
    assert FactoredSeries(2, {}).max_degree() == 0


def test_project_merges_and_rejects_degenerate():
    f = FactoredSeries(2, {(1, 2): -1, (1, 5): -1})
    assert project(f, [1]).factors() == {(1,): -2}
    with pytest.raises(SeriesError):
        project(FactoredSeries(2, {(0, 2): 1}), [1])
    with pytest.raises(SeriesError):
        project(f, [])
    with pytest.raises(SeriesError):
        project(f, [3])


# -- expansion ------------------------------------------------------------


def test_geometric_expansion():
    s = expand(FactoredSeries(1, {(1,): -1}), 6)
    assert [s[(k,)] for k in range(7)] == [1] * 7


def test_plain_factor_expansion():
    s = expand(FactoredSeries(1, {(2,): 1}), 6)
    assert [s[(k,)] for k in range(7)] == [1, 0, -1, 0, 0, 0, 0]


def test_expansion_with_exponent_beyond_bound():
    # a numerator factor whose exponent exceeds the grid must act as 1
    s = expand(FactoredSeries(1, {(66,): 1, (2,): -1}), 60)
    assert [s[(k,)] for k in range(8)] == [1, 0, 1, 0, 1, 0, 1, 0]
    assert s[(59,)] == 0 and s[(58,)] == 1


def test_zero_variable_constant():
    # the empty collection has the 0-variable constant series 1; it can
    # be stored and compared but a dense grid needs at least one variable
    f = FactoredSeries(0, ())
    assert f == FactoredSeries(0, {})
    assert len(f) == 0
    with pytest.raises(SeriesError):
        expand(f, 5)


def test_truncated_indexing_and_ops():
    a = expand(FactoredSeries(1, {(1,): -1}), 5)
    b = a.neg()
    assert b[(3,)] == -1
    assert a.add(b) == TruncatedSeries.zeros(1, 5)
    assert a.sub(a) == TruncatedSeries.zeros(1, 5)
    with pytest.raises(SeriesError):
        a.add(TruncatedSeries.zeros(1, 6))
    with pytest.raises(SeriesError):
        a.add(TruncatedSeries.zeros(2, 5))


def test_substitute_ones_matches_row_sums():
    f = FactoredSeries(2, {(1, 1): -1, (2, 0): -1})
    s = expand(f, 8)
    t = s.substitute_ones(1)
    assert t.nvars == 1
    for k in range(9):
        assert t[(k,)] == sum(int(s[(k, j)]) for j in range(9))


@given(factored(2, max_coord=4))
def test_expand_agrees_with_projection(f):
    # substituting 1 for var 2 in the expansion matches the projected
    # series when the support cannot escape the grid along var 2: with
    # m2 <= m1 in every factor the exponents stay below the diagonal
    if any(m[1] > m[0] for m in f.factors()):
        return
    p = expand(project(f, [1]), 10)
    q = expand(f, 10).substitute_ones(1)
    for k in range(11):
        assert p[(k,)] == q[(k,)]


# -- mul / div ------------------------------------------------------------


@given(factored(2), factored(2))
def test_mul_matches_factor_union(f, g):
    h = FactoredSeries(2, list(f.items()) + list(g.items()))
    assert mul(expand(f, 8), expand(g, 8)) == expand(h, 8)


@given(factored(2), factored(2))
def test_div_undoes_mul(f, g):
    a, b = expand(f, 8), expand(g, 8)
    assert div(mul(a, b), b) == a


def test_div_requires_unit_constant_term():
    a = expand(FactoredSeries(1, {(1,): -1}), 4)
    z = TruncatedSeries.zeros(1, 4)
    with pytest.raises(SeriesError):
        div(a, z)


def test_mul_div_one_minus_roundtrip():
    a = expand(FactoredSeries(2, {(1, 2): -2, (2, 1): 1}), 7)
    m = (1, 1)
    assert a.mul_one_minus(m).div_one_minus(m) == a
    assert a.mul_one_minus_power(m, 3).mul_one_minus_power(m, -3) == a


def test_divide_torus_inverts_torus_multiple():
    p = expand(FactoredSeries(2, {(1, 1): -1, (1, 2): -1}), 9)
    p_prime = p.mul_one_minus((1, 1)).neg()
    assert divide_torus(p_prime) == p


# -- factorization --------------------------------------------------------


@given(factored(3, max_coord=5))
def test_factorize_recovers_factored_form(f):
    assert factorize(expand(f, 20)) == f


def test_factorize_requires_unit_constant():
    s = TruncatedSeries.zeros(1, 4)
    with pytest.raises(SeriesError):
        factorize(s)


def test_factorize_reproduces_arbitrary_unit_series():
    # peeling writes any unit-constant truncation as a product, exactly
    # within the grid
    s = TruncatedSeries.zeros(1, 3)
    s.coeffs[(0,)] = 1
    s.coeffs[(1,)] = 1
    s.coeffs[(3,)] = 1
    assert expand(factorize(s), 3) == s


# -- text format ----------------------------------------------------------


def test_factored_text_roundtrip_and_determinism():
    f = FactoredSeries(2, {(2, 1): -1, (1, 2): 3})
    text = series_to_text(f)
    assert text.splitlines()[0] == "vars 2 mode factored bound 0"
    assert series_from_text(text) == f
    assert series_to_text(series_from_text(text)) == text


def test_expanded_text_roundtrip():
    s = expand(FactoredSeries(2, {(1, 1): -1}), 5)
    text = series_to_text(s)
    assert text.splitlines()[0] == "vars 2 mode expanded bound 5"
    assert series_from_text(text) == s


def test_text_comments_and_blank_lines():
    text = "# leading comment\nvars 1 mode factored bound 0\n\n-1 2\n# done\n"
    assert series_from_text(text) == FactoredSeries(1, {(2,): -1})


@pytest.mark.parametrize("bad", [
    "",
    "garbage",
    "vars 1 mode factored bound 3\n-1 2\n",
    "vars 1 mode expanded bound -1\n",
    "vars 2 mode factored bound 0\n-1 2\n",
    "vars 1 mode factored bound 0\n-1 2 junk\n",
    "vars 1 mode whatever bound 0\n",
    "vars 1 mode expanded bound 2\n1 5\n",
])
def test_text_rejects_malformed_input(bad):
    with pytest.raises(SeriesError):
        series_from_text(bad)


@given(factored(3, max_coord=5))
def test_text_roundtrip_factored(f):
    assert series_from_text(series_to_text(f)) == f


@given(factored(2, max_coord=4))
def test_text_roundtrip_expanded(f):
    s = expand(f, 6)
    assert series_from_text(series_to_text(s)) == s


def test_coefficients_are_python_ints():
    s = expand(FactoredSeries(1, {(1,): -3}), 40)
    assert isinstance(s[(40,)], int) and not isinstance(s[(40,)], np.integer)
    # binomial(42, 2), large enough to matter if dtype were fixed width
    assert s[(40,)] == 861
