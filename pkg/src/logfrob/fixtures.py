"""Built-in example data: cohomology models, invariant tables and Hodge data."""

from __future__ import annotations

from .numbers import Q
from .quantum import CohClass, CohModel, GWTable


def _model(dimX, classes, cup_triples, pairing_pairs, c1, beta=None):
    n = len(classes)
    cup = [[[Q(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        cup[0][i][i] = cup[i][0][i] = Q(1)
    for i, j, k, v in cup_triples:
        cup[i][j][k] = cup[j][i][k] = Q(v)
    g = [[Q(0)] * n for _ in range(n)]
    for i, j, v in pairing_pairs:
        g[i][j] = g[j][i] = Q(v)
    h2 = sum(1 for c in classes if c.h2)
    if beta is None:
        beta = [[1 if a == s else 0 for a in range(h2)] for s in range(h2)]
    return CohModel(dimX, classes, cup, g, c1, len(beta), beta)


def p2_model() -> CohModel:
    """Projective plane: 1, hyperplane h, point h^2; c_1 = 3h."""
    classes = [CohClass("T0", 0, False), CohClass("T1", 2, True), CohClass("T2", 4, False)]
    return _model(2, classes, [(1, 1, 2, 1)], [(0, 2, 1), (1, 1, 1)], [3])


def p1_model() -> CohModel:
    classes = [CohClass("T0", 0, False), CohClass("T1", 2, True)]
    return _model(1, classes, [], [(0, 1, 1)], [2])


def p1p1_model() -> CohModel:
    """P^1 x P^1: 1, h1, h2, point; c_1 = 2 h1 + 2 h2."""
    classes = [CohClass("T0", 0, False), CohClass("T1", 2, True), CohClass("T2", 2, True), CohClass("T3", 4, False)]
    return _model(2, classes, [(1, 2, 3, 1)], [(0, 3, 1), (1, 2, 1)], [2, 2])


def quintic_model() -> CohModel:
    """Rank-4 model with c_1 = 0 and dim 3: 1, H, line L with H^2 = 5 L, point."""
    classes = [CohClass("T0", 0, False), CohClass("T1", 2, True), CohClass("T2", 4, False), CohClass("T3", 6, False)]
    return _model(3, classes, [(1, 1, 2, 5), (1, 2, 3, 1)], [(0, 3, 1), (1, 2, 1)], [0])


def p2_seed() -> GWTable:
    """One line through two points."""
    return GWTable({((1,), (2, 2)): 1})


KONTSEVICH = {1: 1, 2: 1, 3: 12, 4: 620, 5: 87304}


def p2_table(max_degree=5) -> GWTable:
    return GWTable({((d,), (2,) * (3 * d - 1)): v for d, v in KONTSEVICH.items() if d <= max_degree})


def p1_table() -> GWTable:
    return GWTable({((1,), ()): 1})


def p1p1_seed() -> GWTable:
    """Lines of each ruling through one point."""
    return GWTable({((1, 0), (3,)): 1, ((0, 1), (3,)): 1})


def p1p1_table() -> GWTable:
    """Curves of bidegree (a, b) <= (2, 2) through 2a + 2b - 1 points."""
    values = {(1, 0): 1, (0, 1): 1, (1, 1): 1, (2, 1): 1, (1, 2): 1, (2, 2): 12}
    return GWTable({(beta, (3,) * (2 * sum(beta) - 1)): v for beta, v in values.items()})


def quintic_table() -> GWTable:
    """Degree 1 and 2 invariants without insertions (2875 lines; the degree-2
    invariant includes the multiple-cover contribution 2875/8)."""
    return GWTable({((1,), ()): 2875, ((2,), ()): Q(609250) + Q(2875, 8)})


QUANTUM_FIXTURES = {
    "p1": (p1_model, p1_table),
    "p2": (p2_model, p2_table),
    "p1p1": (p1p1_model, p1p1_table),
    "quintic": (quintic_model, quintic_table),
}

# degree box on which each table is complete
QUANTUM_DEGREES = {"p1": 1, "p2": 5, "p1p1": [2, 2], "quintic": 2}

SEEDS = {"p2": (p2_model, p2_seed), "p1p1": (p1p1_model, p1p1_seed)}


# --------------------------------------------------------------------------
# Hodge data


def _e(n, *idx):
    return [[Q(1) if i == j else Q(0) for i in range(n)] for j in idx]


def _shift(n, pairs):
    """Matrix with N e_a = e_b for each (a, b)."""
    m = [[Q(0)] * n for _ in range(n)]
    for a, b in pairs:
        m[b][a] = Q(1)
    return m


def tate_pmhs(sign=1):
    """Degenerating elliptic curve: N e_0 = e_1, F^1 = span(e_0), S(e_0, e_1) = sign."""
    from .hodge import BilinearSpace, DecFiltration, build_pmhs

    S = [[Q(0), Q(sign)], [Q(-sign), Q(0)]]
    return build_pmhs(BilinearSpace(2, S, 1), [_shift(2, [(0, 1)])], DecFiltration(2, {1: _e(2, 0), 0: _e(2, 0, 1)}))


def elliptic_pure():
    """Pure weight-1 structure with F^1 = span(e_0 + i e_1) and N = 0."""
    from .hodge import BilinearSpace, DecFiltration, build_pmhs
    from .numbers import I

    S = [[Q(0), Q(1)], [Q(-1), Q(0)]]
    return build_pmhs(BilinearSpace(2, S, 1), [], DecFiltration(2, {1: [[Q(1), I]], 0: _e(2, 0, 1)}))


def rank4_pmhs():
    """Maximally unipotent weight-3 example: N e_i = e_{i+1}, F^p = span(e_0..e_{3-p})."""
    from .hodge import BilinearSpace, DecFiltration, build_pmhs

    S = [[Q(0), Q(0), Q(0), Q(1)], [Q(0), Q(0), Q(-1), Q(0)], [Q(0), Q(1), Q(0), Q(0)], [Q(-1), Q(0), Q(0), Q(0)]]
    F = DecFiltration(4, {p: _e(4, *range(4 - p)) for p in range(4)})
    return build_pmhs(BilinearSpace(4, S, 3), [_shift(4, [(0, 1), (1, 2), (2, 3)])], F)


def p1p1_pmhs():
    """Weight-2 structure with two commuting nilpotents (the ruling directions)."""
    from .hodge import BilinearSpace, DecFiltration, build_pmhs

    S = [[Q(0), Q(0), Q(0), Q(1)], [Q(0), Q(0), Q(-1), Q(0)], [Q(0), Q(-1), Q(0), Q(0)], [Q(1), Q(0), Q(0), Q(0)]]
    N1 = _shift(4, [(0, 1), (2, 3)])
    N2 = _shift(4, [(0, 2), (1, 3)])
    F = DecFiltration(4, {2: _e(4, 0), 1: _e(4, 0, 1, 2), 0: _e(4, 0, 1, 2, 3)})
    return build_pmhs(BilinearSpace(4, S, 2), [N1, N2], F)


HODGE_FIXTURES = {
    "tate": tate_pmhs,
    "elliptic": elliptic_pure,
    "rank4": rank4_pmhs,
    "p1p1": p1p1_pmhs,
}
