import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logfrob.errors import StructuralError
from logfrob.numbers import Q
from logfrob.series import MatrixSeries, TruncatedSeries, VariableSet, commutator, invert_unit

VARS = VariableSet.of(("q", "log"), ("t", "hol"))
BOUNDS = (3, 4)

coeff = st.builds(lambda a, b: Q(a, b), st.integers(-5, 5), st.integers(1, 4))
exponent = st.tuples(st.integers(0, 3), st.integers(0, 4))
series = st.dictionaries(exponent, coeff, max_size=6).map(lambda d: TruncatedSeries(VARS, BOUNDS, d))


def mat(entries):
    return MatrixSeries([[TruncatedSeries(VARS, BOUNDS, d) for d in row] for row in entries])


matrices = st.lists(st.lists(st.dictionaries(exponent, coeff, max_size=3), min_size=2, max_size=2), min_size=2, max_size=2).map(mat)


@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@given(series, series)
def test_truncation_is_a_ring_map(a, b):
    tb = (2, 2)
    assert (a * b).truncate(tb) == a.truncate(tb) * b.truncate(tb)
    assert (a + b).truncate(tb) == a.truncate(tb) + b.truncate(tb)


@given(series, series)
def test_leibniz_rule(a, b):
    d = lambda x: x.partial_derivative("t")
    assert d(a * b) == d(a) * b.truncate(d(b).bounds) + a.truncate(d(a).bounds) * d(b)
    L = lambda x: x.log_derivative("q")
    assert L(a * b) == L(a) * b + a * L(b)


@given(series)
def test_integrate_then_differentiate(a):
    assert a.integrate("t").partial_derivative("t") == a


@given(series)
def test_json_round_trip(a):
    assert TruncatedSeries.from_json(a.to_json()) == a


def test_terms_beyond_bounds_are_dropped():
    s = TruncatedSeries(VARS, BOUNDS, {(4, 0): 1, (1, 1): 2})
    assert s.coeffs == {(1, 1): Q(2)}
    q = TruncatedSeries.variable("q", VARS, BOUNDS)
    assert (q**4).is_zero()


def test_structural_errors():
    with pytest.raises(StructuralError):
        TruncatedSeries(VARS, (1,), {})
    s = TruncatedSeries.variable("q", VARS, (0, 2))
    with pytest.raises(StructuralError):
        s.partial_derivative("q")
    with pytest.raises(StructuralError):
        s.log_derivative("t")
    other = TruncatedSeries.one(VARS, (2, 2))
    with pytest.raises(StructuralError):
        s + other


def test_embed_and_set_zero():
    big = VARS.extend(("y", "unfold"))
    t = TruncatedSeries.variable("t", VARS, BOUNDS)
    e = t.embed(big, (3, 4, 2))
    assert e.set_zero(["y"]) == t


@given(matrices, matrices, matrices)
def test_matrix_jacobi(a, b, c):
    j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    assert j.is_zero()


@settings(max_examples=40)
@given(matrices)
def test_invert_unit(a):
    one = MatrixSeries.identity(2, VARS, BOUNDS)
    # shift into the maximal ideal so that 1 + qa is a unit
    u = one + a.map(lambda x: x.shift("q", 1))
    assert (u @ invert_unit(u)) == one
