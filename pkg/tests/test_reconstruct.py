"""Decoding series back into graphs: branches, contacts, full assembly."""

import pytest

from planevals import (BranchData, ContactError, DecodeError, DualGraph,
                       FactoredSeries, VerificationError, assemble,
                       branch_from_univariate, equivalent, graph_from_branch,
                       multiplicity_matrix, pairwise_contact,
                       peel_branch_curve, random_instance, reconstruct_curve,
                       reconstruct_divisorial)

from conftest import (CUSP_CURVE, CUSP_DIV, CUSP_PAIR, NAMED, NODE, SINGLE,
                      TACNODE, TRANSVERSAL_CUSPS, series_of)


# -- numerical branch data -----------------------------------------------


def test_branch_data_cusp():
    bd = BranchData.from_generators((2, 3))
    assert bd.dead_values == (6,)
    assert bd.gcds == (2, 1)
    assert (bd.g, bd.c, bd.top_value) == (1, 0, 6)


def test_branch_data_two_pairs():
    bd = BranchData.from_generators((4, 6, 13))
    assert bd.dead_values == (12, 26)
    assert bd.gcds == (4, 2, 1)
    assert bd.top_value == 26
    bd = BranchData.from_generators((6, 9, 22))
    assert bd.dead_values == (18, 66)
    assert bd.top_value == 66


def test_branch_data_smooth_with_tail():
    bd = BranchData.from_generators((1,), c=3)
    assert (bd.g, bd.c, bd.top_value) == (0, 3, 4)
    assert bd.dead_values == ()


@pytest.mark.parametrize("gens", [
    (), (0, 3), (3, 2), (2, 4), (3,), (2, 3, 5), (4, 6, 7),
])
def test_branch_data_rejects_bad_generators(gens):
    with pytest.raises(DecodeError):
        BranchData.from_generators(gens)


def test_branch_data_rejects_negative_tail():
    with pytest.raises(DecodeError):
        BranchData.from_generators((2, 3), c=-1)


# -- one-variable encode / decode ------------------------------------------


def test_univariate_shapes():
    bd = BranchData.from_generators((2, 3))
    assert bd.univariate_series("curve").factors() == {
        (2,): -1, (3,): -1, (6,): 1}
    assert bd.univariate_series("divisorial").factors() == {
        (2,): -1, (3,): -1}
    bd = BranchData.from_generators((2, 3), c=2)
    assert bd.univariate_series("divisorial").factors() == {
        (2,): -1, (3,): -1, (8,): -1, (6,): 1}
    with pytest.raises(DecodeError):
        bd.univariate_series("curve")
    with pytest.raises(DecodeError):
        bd.univariate_series("weird")


def test_univariate_smooth_and_single():
    assert BranchData.from_generators((1,)).univariate_series(
        "curve").factors() == {(1,): -1}
    assert BranchData.from_generators((1,)).univariate_series(
        "divisorial").factors() == {(1,): -2}
    assert BranchData.from_generators((1,), c=3).univariate_series(
        "divisorial").factors() == {(1,): -1, (4,): -1}


@pytest.mark.parametrize("gens,c", [
    ((1,), 0), ((1,), 1), ((1,), 4), ((2, 3), 0), ((2, 3), 2),
    ((4, 6, 13), 0), ((4, 6, 13), 1), ((6, 9, 22), 3), ((5, 7), 0),
    ((8, 12, 26, 53), 0),
])
def test_univariate_roundtrip(gens, c):
    bd = BranchData.from_generators(gens, c)
    assert branch_from_univariate(
        bd.univariate_series("divisorial"), "divisorial") == bd
    if c == 0:
        assert branch_from_univariate(
            bd.univariate_series("curve"), "curve") == bd


@pytest.mark.parametrize("factors", [
    {(2,): -1, (4,): -1},
    {(2,): -1, (3,): -1, (5,): 1},
    {(2,): -1},
    {(2,): -1, (3,): -2, (6,): 1},
    {(1,): -3},
    {(2,): 1, (3,): 1},
])
def test_decode_rejects_non_branch_series(factors):
    p = FactoredSeries(1, factors)
    with pytest.raises(DecodeError):
        branch_from_univariate(p, "curve")
    with pytest.raises(DecodeError):
        branch_from_univariate(p, "divisorial")


def test_single_branch_graphs():
    assert equivalent(graph_from_branch(
        BranchData.from_generators((2, 3)), "curve"), CUSP_CURVE)
    assert equivalent(graph_from_branch(
        BranchData.from_generators((2, 3)), "divisorial"), CUSP_DIV)
    g = graph_from_branch(BranchData.from_generators((2, 3), c=2),
                          "divisorial")
    assert g.n == 5
    assert g.marked_divisors == (5,)


# -- contacts and assembly ---------------------------------------------------


def test_assemble_tacnode_from_contacts():
    one = BranchData.from_generators((1,))
    g = assemble([one, one], [[1, 2], [2, 1]], "curve")
    assert equivalent(g, TACNODE)
    g = assemble([one, one], [[1, 1], [1, 1]], "curve")
    assert equivalent(g, NODE)


def test_assemble_divisorial_pair():
    a = branch_from_univariate(FactoredSeries(1, {(2,): -1, (3,): -1}),
                               "divisorial")
    b = branch_from_univariate(FactoredSeries(1, {(1,): -1, (2,): -1}),
                               "divisorial")
    m = multiplicity_matrix(CUSP_DIV)
    g = assemble([a, b], [[a.top_value, m[2][1]], [m[1][2], b.top_value]],
                 "divisorial")
    assert equivalent(g, CUSP_PAIR)


def test_assemble_rejects_inconsistent_contacts():
    one = BranchData.from_generators((1,))
    with pytest.raises(ContactError):
        assemble([one, one], [[1, 0], [0, 1]], "curve")
    cusp = BranchData.from_generators((2, 3))
    # contact 5 is not a value either branch geometry can realize
    with pytest.raises((ContactError, DecodeError)):
        assemble([cusp, cusp], [[6, 5], [5, 6]], "curve")


def test_assemble_rejects_identical_divisorial_pair():
    a = BranchData.from_generators((2, 3))
    with pytest.raises((ContactError, DecodeError)):
        assemble([a, a], [[6, 6], [6, 6]], "divisorial")


def test_assemble_checks_expected_series():
    one = BranchData.from_generators((1,))
    wrong = FactoredSeries(2, {(1, 1): -2})
    with pytest.raises(VerificationError):
        assemble([one, one], [[1, 2], [2, 1]], "curve", expect=wrong)


def test_pairwise_contact_on_divisorial_pairs():
    m = multiplicity_matrix(CUSP_DIV)
    p = series_of(CUSP_PAIR)
    b1 = branch_from_univariate(p.project(1), "divisorial")
    b2 = branch_from_univariate(p.project(0), "divisorial")
    assert b1.generators == (2, 3)
    assert pairwise_contact(p, b1, b2) == m[2][1] == 3
    with pytest.raises(DecodeError):
        pairwise_contact(series_of(SINGLE), b1, b2)


def test_contact_resolves_ambiguous_structural_cases():
    # marks at vertices 2 and 3 of a free chain: two structural cases
    # emit candidates (3 and 2) and only the true contact survives
    # reassembly against the pair series
    g = DualGraph(((), (1,), (2,)), (2, 3), ())
    p = series_of(g)
    assert p == FactoredSeries(2, {(1, 1): -1, (2, 3): -1})
    b1 = branch_from_univariate(p.project(1), "divisorial")
    b2 = branch_from_univariate(p.project(0), "divisorial")
    assert (b1.top_value, b2.top_value) == (2, 3)
    assert pairwise_contact(p, b1, b2) == 2


# -- full reconstruction ------------------------------------------------------


@pytest.mark.parametrize("name", ["single", "cusp_div", "cusp_pair",
                                  "cusp_marks3"])
def test_reconstruct_divisorial_examples(name):
    g = NAMED[name]
    assert equivalent(reconstruct_divisorial(series_of(g)), g)


@pytest.mark.parametrize("name", ["smooth", "cusp_curve", "node", "tacnode",
                                  "transversal_cusps"])
def test_reconstruct_curve_examples(name):
    g = NAMED[name]
    assert equivalent(reconstruct_curve(series_of(g)), g)


def test_reconstruct_ordinary_triple_point():
    g = DualGraph(((),), (), ((1, 1), (1, 2), (1, 3)))
    assert equivalent(reconstruct_curve(series_of(g)), g)


def test_reconstruct_divisorial_rejects_mixed_series():
    with pytest.raises(DecodeError):
        reconstruct_divisorial(FactoredSeries(2, {(1, 2): -1}))


def test_reconstruct_rejects_tampered_series():
    p = series_of(TACNODE)
    bad = p.with_factor((1, 1), -1)
    with pytest.raises((DecodeError, VerificationError)):
        reconstruct_curve(bad)
    q = series_of(CUSP_PAIR).with_factor((5, 4), -1)
    with pytest.raises((DecodeError, VerificationError)):
        reconstruct_divisorial(q)


def test_peel_tacnode():
    i0, alpha, gens, row, rest = peel_branch_curve(series_of(TACNODE))
    assert i0 in (1, 2)
    assert gens == (1,)
    assert alpha == (2, 2)
    assert rest == FactoredSeries(1, {(1,): -1})


def test_peel_transversal_cusps():
    i0, alpha, gens, row, rest = peel_branch_curve(
        series_of(TRANSVERSAL_CUSPS))
    assert gens == (2, 3)
    assert branch_from_univariate(rest, "curve").generators == (2, 3)


@pytest.mark.parametrize("seed", range(40))
def test_roundtrip_divisorial_random(seed):
    g = random_instance(seed, 14, 1 + seed % 3, "divisorial")
    assert equivalent(reconstruct_divisorial(series_of(g)), g)


@pytest.mark.parametrize("seed", range(40))
def test_roundtrip_curve_random(seed):
    g = random_instance(10_000 + seed, 14, 1 + seed % 4, "curve")
    assert equivalent(reconstruct_curve(series_of(g)), g)
