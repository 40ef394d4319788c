"""Reference computations that do not use the library's algorithms."""

from __future__ import annotations

from math import comb

import sympy

from logfrob import linalg
from logfrob.numbers import Q


def kontsevich_numbers(dmax):
    """Rational plane curves of degree d through 3d - 1 points, by the classical recursion."""
    N = {1: 1}
    for d in range(2, dmax + 1):
        total = 0
        for d1 in range(1, d):
            d2 = d - d1
            total += N[d1] * N[d2] * d1 * d1 * d2 * (d2 * comb(3 * d - 4, 3 * d1 - 2) - d1 * comb(3 * d - 4, 3 * d1 - 1))
        N[d] = total
    return N


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield [k] + rest


def jordan_nilpotent(blocks):
    """Nilpotent matrix with Jordan blocks of the given sizes (N e_i = e_{i+1} inside a block)."""
    n = sum(blocks)
    N = linalg.zeros(n, n)
    start = 0
    for k in blocks:
        for i in range(k - 1):
            N[start + i + 1][start + i] = Q(1)
        start += k
    return N


def _to_sympy(m):
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in m])


def jordan_weight_filtration(N, w):
    """W_l from a Jordan basis computed by sympy: in a chain of length k the
    vector N^j v (v the chain head) has weight w + k - 1 - 2j."""
    M = _to_sympy(N)
    n = M.shape[0]
    if n == 0 or M.is_zero_matrix:
        return {l: [] if l < w else linalg.full_space(n) for l in range(w - n, w + n + 1)}
    P, J = M.jordan_form()
    weights = []
    i = 0
    while i < n:
        k = 1
        while i + k < n and J[i + k - 1, i + k] == 1:
            k += 1
        # sympy puts ones above the diagonal: N P_j = P_{j-1}, so the last column heads the chain
        weights += [w - (k - 1) + 2 * j for j in range(k)]
        i += k
    cols = [[Q(int(sympy.fraction(P[r, c])[0]), int(sympy.fraction(P[r, c])[1])) for r in range(n)] for c in range(n)]
    out = {}
    for l in range(w - n, w + n + 1):
        out[l] = linalg.span([cols[c] for c in range(n) if weights[c] <= l], n)
    return out
