import pytest
from helpers import p1_fts

from logfrob import linalg
from logfrob.errors import InputError, NotIsomorphismCase, StructuralError
from logfrob.forms import flatness_residuals
from logfrob.frobenius import (
    FrobeniusGerm,
    FTSData,
    change_frame,
    check_frobenius_axioms,
    check_fts,
    check_hypotheses,
    check_pairing_symmetry,
    fts_to_trtlep,
    isocase_build,
    rational_spectrum,
    trtlep_to_fts,
)
from logfrob.numbers import Q
from logfrob.series import MatrixSeries, TruncatedSeries, VariableSet
from logfrob.unfolding import universal_unfold


def test_p1_structure_passes_all_conditions():
    rep = check_fts(p1_fts())
    assert rep.passed, rep.format()


def test_broken_U_is_reported():
    f = p1_fts()
    f.U = f.U.scale(2)
    rep = check_fts(f)
    assert [c.id for c in rep.failures()] == ["FTS2"]


def test_hypotheses_for_p1():
    h = check_hypotheses(p1_fts())
    assert h["IC"] and h["GC"] and h["EC"]
    assert h["d"] == 1


def test_trtlep_is_flat_and_symmetric():
    tr = fts_to_trtlep(p1_fts())
    assert flatness_residuals(tr.omega).passed
    assert check_pairing_symmetry(tr)


def test_round_trip_through_trtlep():
    f = p1_fts()
    back = trtlep_to_fts(fts_to_trtlep(f), f.xi, f.d)
    assert back.to_json() == f.to_json()


def test_json_round_trip():
    f = p1_fts()
    assert FTSData.from_json(f.to_json()).to_json() == f.to_json()


def test_json_errors_carry_paths():
    obj = p1_fts().to_json()
    del obj["g"]
    with pytest.raises(InputError, match="g"):
        FTSData.from_json(obj)


def test_gram_matrix_must_be_symmetric():
    bad = p1_fts().to_json()
    bad["g"] = [["0", "1"], ["2", "0"]]
    with pytest.raises(InputError, match="symmetric"):
        FTSData.from_json(bad)


def test_constant_frame_change_preserves_conditions():
    f = change_frame(p1_fts(), [[Q(1), Q(0)], [Q(3), Q(2)]])
    assert check_fts(f).passed


def test_rational_spectrum():
    assert sorted(rational_spectrum([[Q(1, 2), Q(0)], [Q(0), Q(-1, 2)]])) == [Q(-1, 2), Q(1, 2)]
    assert rational_spectrum([[Q(0), Q(1)], [Q(2), Q(0)]]) is None


def test_isomorphism_case_needs_matching_dimension():
    with pytest.raises(NotIsomorphismCase):
        isocase_build(p1_fts())


def test_isomorphism_case_germ():
    uu = universal_unfold(p1_fts(), 4)
    assert len(uu.fts.vars) == uu.fts.rank
    germ = uu.germ
    assert check_frobenius_axioms(germ).passed
    assert FrobeniusGerm.from_json(germ.to_json()).to_json() == germ.to_json()


def test_axioms_need_room_to_differentiate():
    germ = universal_unfold(p1_fts(), 4).germ
    small = germ.truncate(tuple(1 if c != "log" else b for c, b in zip(germ.vars.classes, germ.bounds)))
    with pytest.raises(StructuralError):
        check_frobenius_axioms(small)


def test_unit_acts_as_identity():
    germ = universal_unfold(p1_fts(), 4).germ
    n = germ.dim
    total = None
    for i in range(n):
        term = germ.product_matrix(i).map(lambda x, c=germ.unit[i]: x * c)
        total = term if total is None else total + term
    assert total == MatrixSeries.identity(n, germ.vars, germ.bounds)
    assert linalg.rank(germ.metric.constant_term()) == n


def _line_germ(d):
    vars = VariableSet.of(("t", "hol"))
    b = (4,)
    one = TruncatedSeries.one(vars, b)
    t = TruncatedSeries.variable("t", vars, b)
    return FrobeniusGerm(vars, b, [[[one]]], [one], [t], MatrixSeries([[one]]), d)


def test_trivial_line_germ_has_conformal_dimension_zero():
    # E = t d/dt scales dt^2 by 2, so 2 - d = 2
    assert check_frobenius_axioms(_line_germ(0)).passed
    assert [c.id for c in check_frobenius_axioms(_line_germ(2)).failures()] == ["euler_metric"]


def test_rank_one_isocase_euler_sign():
    vars = VariableSet.of(("t", "hol"))
    b = (4,)
    c = lambda x: MatrixSeries([[TruncatedSeries.constant(x, vars, b)]])
    u = Q(3)
    fts = FTSData(vars, b, [c(0)], [c(-1)], c(u), c(0), c(1), [TruncatedSeries.constant(1, vars, b)], 0, 0)
    germ = isocase_build(fts)
    assert germ.unit == [TruncatedSeries.one(vars, b)]
    assert germ.euler == [TruncatedSeries.constant(u, vars, b)]
    assert germ.mult[0][0][0] == TruncatedSeries.one(vars, b)
