import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import jordan_nilpotent, jordan_weight_filtration, partitions

from logfrob import linalg
from logfrob.errors import InputError, NotMHS, NotNilpotent
from logfrob.fixtures import HODGE_FIXTURES, p1p1_pmhs, rank4_pmhs, tate_pmhs
from logfrob.frobenius import check_fts
from logfrob.hodge import (
    BilinearSpace,
    DecFiltration,
    PMHSData,
    build_pmhs,
    check_opposite,
    check_polarization,
    check_weight_filtration,
    cone_agreement,
    deligne_identities,
    graded_dim,
    h2_generation,
    nilpotency_index,
    opposite_filtration,
    split_connection,
    weight_filtration,
)
from logfrob.numbers import Q
from logfrob.series import MatrixSeries, TruncatedSeries, VariableSet

JORDAN_TYPES = [p for n in range(1, 5) for p in partitions(n)]


def conjugate(N, P):
    return linalg.matmul(linalg.matmul(P, N), linalg.inverse(P))


invertible4 = st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=4, max_size=4).map(
    lambda m: [[Q(x) for x in r] for r in m]
).filter(lambda m: linalg.det(m) != 0)


@pytest.mark.parametrize("blocks", JORDAN_TYPES, ids=lambda b: "+".join(map(str, b)))
@pytest.mark.parametrize("w", [0, 1, 3])
def test_weight_filtration_matches_jordan_oracle(blocks, w):
    N = jordan_nilpotent(blocks)
    W = weight_filtration(N, w)
    oracle = jordan_weight_filtration(N, w)
    for l, s in oracle.items():
        assert linalg.subspace_equal(W.get(l), s)
    assert check_weight_filtration(N, w, W).passed


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([p for p in JORDAN_TYPES if sum(p) == 4]), invertible4)
def test_weight_filtration_after_change_of_basis(blocks, P):
    N = conjugate(jordan_nilpotent(blocks), P)
    W = weight_filtration(N, 2)
    oracle = jordan_weight_filtration(N, 2)
    for l, s in oracle.items():
        assert linalg.subspace_equal(W.get(l), s)
    # graded dimensions are symmetric about the weight
    for k in range(-3, 8):
        assert graded_dim(W, k) == graded_dim(W, 4 - k)


@pytest.mark.parametrize("blocks", JORDAN_TYPES, ids=lambda b: "+".join(map(str, b)))
def test_scaling_n_keeps_w(blocks):
    N = jordan_nilpotent(blocks)
    W1, W2 = weight_filtration(N, 0), weight_filtration(linalg.scale(Q(-3, 2), N), 0)
    assert all(linalg.subspace_equal(W1.get(l), W2.get(l)) for l in range(-5, 6))


def test_nilpotency_check():
    assert nilpotency_index(jordan_nilpotent([3, 1])) == 3
    with pytest.raises(NotNilpotent):
        nilpotency_index([[Q(1), Q(0)], [Q(0), Q(0)]])


@pytest.mark.parametrize("name", sorted(HODGE_FIXTURES))
def test_fixtures_are_polarized(name):
    pm = HODGE_FIXTURES[name]()
    assert deligne_identities(pm).passed
    assert check_polarization(pm).passed
    U = opposite_filtration(pm.Ipq, pm.dim)
    assert check_opposite(pm.F, U, pm.Nlist).passed


def test_wrong_sign_fails_positivity():
    rep = check_polarization(tate_pmhs(-1))
    assert [c.id for c in rep.failures()] == ["positivity"]


def test_not_a_mixed_hodge_structure():
    S = [[Q(0), Q(1)], [Q(-1), Q(0)]]
    N = [[Q(0), Q(0)], [Q(1), Q(0)]]
    # F^1 = image of N puts a (1, 1) class into weight 0
    with pytest.raises(NotMHS):
        build_pmhs(BilinearSpace(2, S, 1), [N], DecFiltration(2, {1: [[Q(0), Q(1)]], 0: linalg.full_space(2)}))


def test_hodge_tate_rank4_pieces():
    pm = rank4_pmhs()
    assert sorted(pm.Ipq) == [(0, 0), (1, 1), (2, 2), (3, 3)]
    assert all(len(s) == 1 for s in pm.Ipq.values())
    assert [k for k, s in pm.I0.items() if s] == [(3, 3)]


def test_pmhs_json_round_trip_and_errors():
    pm = p1p1_pmhs()
    obj = pm.to_json()
    assert PMHSData.from_json(obj).to_json() == obj
    obj["N"][0] = [["1", "0", "0", "0"]] + [["0"] * 4] * 3
    with pytest.raises(NotNilpotent, match="/N/0"):
        PMHSData.from_json(obj)
    bad = pm.to_json()
    del bad["F"]
    with pytest.raises(InputError):
        PMHSData.from_json(bad)


def test_cone_weight_filtration_is_constant():
    N1, N2 = p1p1_pmhs().Nlist
    samples = [[Q(a), Q(b)] for a, b in itertools.product([1, 2, 5], repeat=2)]
    assert cone_agreement([N1, N2], 2, samples)


def test_h2_generation():
    assert h2_generation(rank4_pmhs().F, rank4_pmhs().Nlist)
    pm = p1p1_pmhs()
    res = h2_generation(pm.F, pm.Nlist)
    assert res.generated and res.rank_hypothesis
    # a single ruling does not reach the whole middle piece
    assert not h2_generation(pm.F, pm.Nlist[:1]).generated


@pytest.mark.parametrize("name", ["rank4", "p1p1", "tate"])
def test_split_connection(name):
    pm = HODGE_FIXTURES[name]()
    sr = split_connection(pm, bound=3)
    assert check_fts(sr.fts).passed
    assert sr.residues.passed
    assert sr.fts.U.is_zero()
    for N, C in zip(pm.Nlist, sr.fts.higgs):
        # in the adapted frame the Higgs field is -N
        B = sr.frame.constant_term()
        assert linalg.matmul(B, C.constant_term()) == linalg.scale(-1, linalg.matmul(N, B))


def test_split_connection_with_moving_filtration():
    pm = rank4_pmhs()
    vars = VariableSet.of(("q1", "log"))
    q = TruncatedSeries.variable("q1", vars, (4,))
    N = MatrixSeries.from_constant(pm.Nlist[0], vars, (4,))
    # F(q) = exp(q N) F
    E = term = MatrixSeries.identity(4, vars, (4,))
    for k in range(1, 5):
        term = (term @ N).map(lambda x, k=k: x * q * Q(1, k))
        E = E + term
    family = {p: [E.column(i) for i in range(4 - p)] for p in range(4)}
    sr = split_connection(pm, family=family, bound=4)
    assert check_fts(sr.fts).passed
    assert sr.residues.passed
    C = sr.fts.higgs[0]
    for a in range(3):
        assert C.rows[a + 1][a] == q - 1
