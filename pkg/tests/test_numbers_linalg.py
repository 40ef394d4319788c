from hypothesis import given, settings
from hypothesis import strategies as st

from logfrob import linalg
from logfrob.numbers import GaussianRational, I, Q, conj, rational, rational_str, scalar_from_json, scalar_to_json

small = st.integers(-6, 6)
rationals = st.builds(lambda a, b: Q(a, b), st.integers(-20, 20), st.integers(1, 7))
gaussians = st.builds(GaussianRational, rationals, rationals)


def matrices(n, m=None):
    m = n if m is None else m
    return st.lists(st.lists(rationals, min_size=m, max_size=m), min_size=n, max_size=n)


def test_rational_parsing():
    assert rational("3/4") == Q(3, 4)
    assert rational(2) == Q(2)
    assert rational_str(Q(-6, 4)) == "-3/2"
    assert rational_str(Q(5)) == "5"


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert conj(a * b) == conj(a) * conj(b)
    if b:
        assert (a / b) * b == a


def test_imaginary_unit():
    assert I * I == -1
    assert conj(I) == -I
    assert Q(2) + I == GaussianRational(2, 1)


@given(gaussians)
def test_scalar_json_round_trip(x):
    assert scalar_from_json(scalar_to_json(x)) == x


@given(matrices(3))
def test_rank_nullity(m):
    assert linalg.rank(m) + len(linalg.nullspace(m, 3)) == 3
    for v in linalg.nullspace(m, 3):
        assert all(x == 0 for x in linalg.matvec(m, v))


@given(matrices(3))
def test_inverse(m):
    if linalg.det(m) != 0:
        assert linalg.matmul(m, linalg.inverse(m)) == linalg.identity(3)


@given(matrices(3), matrices(3))
def test_determinant_multiplicative(a, b):
    assert linalg.det(linalg.matmul(a, b)) == linalg.det(a) * linalg.det(b)


@settings(max_examples=50)
@given(matrices(2, 4), matrices(2, 4))
def test_subspace_dimension_formula(a, b):
    A, B = linalg.span(a), linalg.span(b)
    s = linalg.subspace_sum(A, B)
    i = linalg.intersect(A, B, 4)
    assert len(s) + len(i) == len(A) + len(B)
    assert linalg.is_subspace(i, A) and linalg.is_subspace(i, B)


@given(matrices(4), matrices(2, 4))
def test_preimage(m, s):
    S = linalg.span(s)
    pre = linalg.preimage(m, S, 4)
    assert linalg.is_subspace(linalg.image(m, pre), S)
    assert linalg.is_subspace(linalg.kernel(m, 4), pre)


def test_complement_basis():
    sub = [[Q(1), Q(1), Q(0)]]
    comp = linalg.complement_basis(sub, linalg.full_space(3))
    assert len(comp) == 2
    assert len(linalg.subspace_sum(sub, comp)) == 3
