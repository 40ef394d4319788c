"""Small hand-made structures shared by several test modules."""

from logfrob.forms import ConnectionForm
from logfrob.frobenius import FTSData
from logfrob.numbers import Q
from logfrob.series import MatrixSeries, TruncatedSeries, VariableSet

BASE_VARS = VariableSet.of(("q", "log"))


def _ring(bound):
    q = TruncatedSeries.variable("q", BASE_VARS, (bound,))
    c = lambda x: TruncatedSeries.constant(x, BASE_VARS, (bound,))
    M = lambda rows: MatrixSeries([[x if isinstance(x, TruncatedSeries) else c(x) for x in r] for r in rows])
    return q, c, M


def base_connection(bound=6) -> ConnectionForm:
    """Rank-2 trTLEP base over one log variable: C = [[0,-q],[-1,0]], U = 2C', V = diag(0,1)."""
    q, c, M = _ring(bound)
    zero = M([[0, 0], [0, 0]])
    return ConnectionForm(BASE_VARS, (bound,), [zero], [M([[0, -q], [-1, 0]])], M([[0, 2 * q], [2, 0]]), M([[0, 0], [0, 1]]))


def base_dfs(bound=6, order=4):
    """Unfolding data f(q, y) = (-1 + y, q y)."""
    vars = BASE_VARS.extend(("y", "unfold"))
    b = (bound, order)
    y = TruncatedSeries.variable("y", vars, b)
    q = TruncatedSeries.variable("q", vars, b)
    return {"y": [TruncatedSeries.constant(-1, vars, b) + y, q * y]}


def p1_fts(bound=6) -> FTSData:
    """The small quantum cohomology of P^1 as a Frobenius type structure over log q."""
    q, c, M = _ring(bound)
    zero = M([[0, 0], [0, 0]])
    return FTSData(
        BASE_VARS,
        (bound,),
        [zero],
        [M([[0, -q], [-1, 0]])],
        M([[0, 2 * q], [2, 0]]),
        M([[Q(1, 2), 0], [0, Q(-1, 2)]]),
        M([[0, 1], [1, 0]]),
        [c(1), c(0)],
        1,
        1,
    )
