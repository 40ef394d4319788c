import json

import pytest
from helpers import base_connection, base_dfs, p1_fts

from logfrob.errors import PairingEscape, StructuralError
from logfrob.forms import ConnectionForm, first_column_residuals, flatness_residuals
from logfrob.frobenius import check_frobenius_axioms, fts_to_trtlep
from logfrob.numbers import Q
from logfrob.series import TruncatedSeries, VariableSet
from logfrob.unfolding import bundle_products, extend_pairing, solve_unfolding, universal_unfold


def unfold(order=4):
    return solve_unfolding(base_connection(), base_dfs(order=order), {"y": order})


def test_base_is_flat():
    assert flatness_residuals(base_connection()).passed


@pytest.mark.parametrize("order", [1, 2, 3])
def test_unfolding_is_flat_at_each_order(order):
    omega = unfold(order)
    assert flatness_residuals(omega).passed
    assert first_column_residuals(omega, base_dfs(order=order)).passed


def test_lower_orders_are_truncations():
    hi, lo = unfold(4), unfold(2)
    assert hi.Cmat("y").truncate((6, 2)) == lo.Cmat("y")


def test_restriction_to_the_base():
    omega = unfold()
    base = base_connection()
    assert omega.C[0].set_zero(["y"]) == base.C[0]
    assert omega.U.set_zero(["y"]) == base.U


def test_connection_json_round_trip():
    omega = unfold()
    again = ConnectionForm.from_json(json.loads(json.dumps(omega.to_json())))
    assert again.to_json() == omega.to_json()


def test_dfs_with_wrong_constant_term_breaks_flatness():
    # a first column whose y-derivative disagrees with F does not come from a solution
    omega = unfold()
    wrong = base_dfs()
    wrong["y"][1] = wrong["y"][1] + TruncatedSeries.variable("y", wrong["y"][1].vars, wrong["y"][1].bounds)
    assert not first_column_residuals(omega, wrong).passed


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_pairing_extension(order):
    tr = fts_to_trtlep(p1_fts())
    data = extend_pairing(unfold(order), tr.P, tr.w)
    assert data.report.passed, data.report.format()
    R = data.normalized()
    assert all(e[-1] >= 0 for row in R.rows for x in row for e in x.coeffs)


def test_pairing_escape_is_detected():
    tr = fts_to_trtlep(p1_fts())
    # claiming a larger weight pushes the extension below z^w
    with pytest.raises(PairingEscape):
        extend_pairing(unfold(2), tr.P, tr.w + 1)


def test_initial_pairing_must_live_on_the_base():
    tr = fts_to_trtlep(p1_fts())
    vars = VariableSet.of(("q", "log"), ("y", "unfold"), ("z", "z"))
    P = tr.P.embed(vars, (6, 2, 2))
    with pytest.raises(StructuralError):
        extend_pairing(unfold(2), P, tr.w)


def test_universal_unfolding_of_p1():
    uu = universal_unfold(p1_fts(), 4)
    assert uu.axioms.passed
    g = uu.germ
    assert g.vars.names == ("q", "y1")
    # E = 2 q d/dq + y1 d/dy1 and the unit is d/dy1
    assert g.euler[0] == 2
    assert g.euler[1] == TruncatedSeries.variable("y1", g.vars, g.bounds)
    assert g.unit[0] == 0 and g.unit[1] == 1
    assert uu.dfs["y1"] == [-1, 0]
    # in the bundle frame e_0 is the unit and e_1 o e_1 = q e_0
    prods = bundle_products(g)
    assert prods[0].constant_term() == [[Q(1), Q(0)], [Q(0), Q(1)]]
    assert prods[1].constant_term() == [[Q(0), Q(0)], [Q(1), Q(0)]]


def test_universal_unfolding_passes_axioms_on_truncations():
    germ = universal_unfold(p1_fts(), 4).germ
    assert check_frobenius_axioms(germ, tuple(min(b, 3) for b in germ.bounds)).passed
