"""Exact dense linear algebra over Q and Q(i).

Matrices are lists of rows.  Vectors are lists.  Subspaces are represented
by a list of basis vectors kept in reduced row echelon form, so two equal
subspaces have identical representations.
"""

from __future__ import annotations

from .numbers import Q


def zeros(r, c):
    return [[Q(0)] * c for _ in range(r)]


def identity(n):
    return [[Q(1) if i == j else Q(0) for j in range(n)] for i in range(n)]


def copy(m):
    return [list(row) for row in m]


def transpose(m):
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col) if x and y), Q(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), Q(0)) for row in a]


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a):
    return [[c * x for x in row] for row in a]


def is_zero(m):
    return all(not x for row in m for x in row)


def columns(m):
    return transpose(m)


def from_columns(cols, n=None):
    if not cols:
        return [[] for _ in range(n or 0)]
    return transpose(cols)


def rref(m):
    """Reduced row echelon form.  Pivots are taken in column order, and within
    a column the first nonzero row (smallest index) is used."""
    a = copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m):
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def det(m):
    """Determinant by Bareiss fraction-free elimination."""
    a = copy(m)
    n = len(a)
    if n == 0:
        return Q(1)
    sign = 1
    prev = Q(1)
    for k in range(n - 1):
        if not a[k][k]:
            p = next((i for i in range(k + 1, n) if a[i][k]), None)
            if p is None:
                return Q(0)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(m):
    n = len(m)
    aug = [list(row) + [Q(1) if i == j else Q(0) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def solve(a, b):
    """One solution x of a x = b, or None when the system is inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Q(0)] * cols
    for i, c in enumerate(piv):
        x[c] = red[i][cols]
    return x


def nullspace(m, ncols=None):
    """Basis of {x : m x = 0}."""
    cols = len(m[0]) if m else (ncols or 0)
    if not m:
        return [[Q(1) if i == j else Q(0) for i in range(cols)] for j in range(cols)]
    red, piv = rref(m)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Q(0)] * cols
        v[f] = Q(1)
        for i, c in enumerate(piv):
            v[c] = -red[i][f]
        basis.append(v)
    return basis


# subspaces ---------------------------------------------------------------


def span(vectors, dim=None):
    """Canonical basis (RREF rows) of the span of the given vectors."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    red, piv = rref(vecs)
    return [red[i] for i in range(len(piv))]


def subspace_dim(s):
    return len(s)


def subspace_sum(*spaces):
    vecs = [v for s in spaces for v in s]
    return span(vecs)


def contains(s, v):
    if not any(v):
        return True
    return rank(s + [list(v)]) == len(s) if s else False


def is_subspace(a, b):
    return all(contains(b, v) for v in a)


def subspace_equal(a, b):
    return len(a) == len(b) and is_subspace(a, b)


def intersect(a, b, dim):
    """Intersection of two subspaces of K^dim."""
    if not a or not b:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    m = transpose([list(v) for v in a] + [[-x for x in v] for v in b])
    ns = nullspace(m, len(a) + len(b))
    vecs = []
    for sol in ns:
        v = [Q(0)] * dim
        for coef, basis_vec in zip(sol[: len(a)], a):
            if coef:
                v = [x + coef * y for x, y in zip(v, basis_vec)]
        vecs.append(v)
    return span(vecs)


def image(m, s):
    """Image of the subspace s under the matrix m."""
    return span([matvec(m, v) for v in s])


def preimage(m, s, dim):
    """{x : m x in s}."""
    rows = len(m)
    # m x - sum c_j s_j = 0
    big = [list(m[i]) + [-v[i] for v in s] for i in range(rows)]
    ns = nullspace(big, dim + len(s))
    return span([sol[:dim] for sol in ns]) if ns else []


def kernel(m, dim):
    return span(nullspace(m, dim))


def full_space(dim):
    return identity(dim)


def complement_basis(sub, whole):
    """Vectors from ``whole`` completing a basis of ``sub`` to one of span(sub + whole)."""
    out = []
    cur = list(sub)
    for v in whole:
        if not contains(cur, v) if cur else any(v):
            out.append(list(v))
            cur = span(cur + [list(v)])
    return out


def matpow(m, k):
    n = len(m)
    out = identity(n)
    for _ in range(k):
        out = matmul(out, m)
    return out


def conj_vec(v):
    from .numbers import conj

    return [conj(x) for x in v]
