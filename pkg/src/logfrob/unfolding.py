"""Unfolding of logarithmic trTLEP structures by formal integration.

Given a flat connection form over a base and the derivatives df_i/dy of n
functions, the unique flat extension over new variables y is built one power
of y at a time:

* the matrices E_i of the algebra generated by the Higgs components and U with
  first column e_i are read off from a fixed list of words whose first columns
  span at the origin;
* F = sum_i (df_i/dy) E_i;
* C_a, U and V are advanced one order in y from the curvature equations
  dC_a/dy = X_a F + [A_a, F],  dU/dy = [V, F] - F,  dV/dy = 0.

Derivatives along holomorphic base directions cost one order of precision in
that direction per order in y, so the output bound of every non-logarithmic base
variable drops by the total number of y-orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    GenerationFailure,
    InternalConsistencyError,
    NotAUnit,
    PairingEscape,
    StructuralError,
)
from .forms import ConditionReport, ConnectionForm, first_column_residuals, flatness_residuals, msum, vf, vf_padded
from .frobenius import (
    FTSData,
    TrTLEPData,
    change_frame,
    check_frobenius_axioms,
    check_hypotheses,
    fts_to_trtlep,
    gc_words,
    higgs_first_columns,
    isocase_build,
    pairing_normal_form,
    trtlep_to_fts,
)
from .numbers import Q
from .series import MatrixSeries, TruncatedSeries, VariableSet, commutator, invert_unit


@dataclass
class PairingData:
    R: MatrixSeries
    w: int
    report: ConditionReport = None

    @property
    def zname(self):
        return self.R.vars.by_class("z")[0]

    def normalized(self):
        """z^{-w} R; raises PairingEscape if a term lies below z^w."""
        try:
            return pairing_normal_form(self.R, self.w, self.zname)
        except Exception as exc:
            raise PairingEscape(str(exc)) from None


# --------------------------------------------------------------------------
# words


def _word_matrix(word, gens, cache):
    if word in cache:
        return cache[word]
    k = next(i for i, x in enumerate(word) if x)
    prev = list(word)
    prev[k] -= 1
    prev = tuple(prev)
    m = gens[k] @ _word_matrix(prev, gens, cache)
    cache[word] = m
    return m


def spanning_words(omega: ConnectionForm, cap=None):
    """Words in (C_a..., U) whose first columns span at the origin."""
    n = omega.rank
    gens0 = [c.constant_term() for c in omega.C] + [omega.U.constant_term()]
    e1 = [Q(1)] + [Q(0)] * (n - 1)
    chosen, r = gc_words(gens0, e1, n, cap)
    if r < n:
        raise GenerationFailure(0, r, n)
    return [w for w, _ in chosen]


def _algebra_basis(Cs, U, words, bounds):
    gens = [c.truncate(bounds) for c in Cs] + [U.truncate(bounds)]
    n = U.shape[0]
    ident = MatrixSeries.identity(n, U.vars, bounds)
    cache = {tuple([0] * len(gens)): ident}
    return [_word_matrix(w, gens, cache) for w in words]


def first_column_basis(omega: ConnectionForm, words=None):
    """Matrices E_1..E_n in the algebra generated by the C_a and U whose first
    columns are the standard basis vectors."""
    words = words or spanning_words(omega)
    mats = _algebra_basis(omega.C, omega.U, words, omega.bounds)
    gamma = MatrixSeries.from_columns([m.column(0) for m in mats])
    try:
        ginv = invert_unit(gamma)
    except NotAUnit:
        raise GenerationFailure(0, linalg.rank(gamma.constant_term()), omega.rank) from None
    n = omega.rank
    out = []
    for i in range(n):
        acc = None
        for j, m in enumerate(mats):
            c = ginv.rows[j][i]
            if c.coeffs:
                term = m.scale(c)
                acc = term if acc is None else acc + term
        out.append(acc if acc is not None else MatrixSeries.zero(n, n, omega.vars, omega.bounds))
    return out


# --------------------------------------------------------------------------


def _as_series(x, vars, bounds):
    if isinstance(x, TruncatedSeries):
        return x.embed(vars, bounds)
    return TruncatedSeries.constant(x, vars, bounds)


def _unfold_one(omega: ConnectionForm, y: str, df, K: int, cap=None) -> ConnectionForm:
    n = omega.rank
    words = spanning_words(omega, cap)
    vars = omega.vars.extend((y, "unfold"))
    bounds = omega.bounds + (K,)
    emb = lambda m: m.embed(vars, bounds)
    A = [emb(a) for a in omega.A]
    C = [emb(c) for c in omega.C]
    U = emb(omega.U)
    V = emb(omega.V)
    df = [_as_series(x, vars, bounds) for x in df]
    F = MatrixSeries.zero(n, n, vars, bounds)
    names = omega.vars.names
    for w in range(K + 1):
        bw = bounds[:-1] + (w,)
        mats = _algebra_basis(C, U, words, bw)
        gamma = MatrixSeries.from_columns([m.column(0) for m in mats])
        ginv = invert_unit(gamma)
        coef = ginv.apply([x.truncate(bw) for x in df])
        Fw = None
        for c, m in zip(coef, mats):
            if c.coeffs:
                term = m.scale(c)
                Fw = term if Fw is None else Fw + term
        if Fw is None:
            Fw = MatrixSeries.zero(n, n, vars, bw)
        layer = Fw.layer(y, w).pad(bounds)
        F = F + layer.shift(y, w)
        if w == K:
            break
        inv = Q(1, w + 1)
        for a, name in enumerate(names):
            dC = vf_padded(layer, name, vars) + commutator(A[a], layer)
            if not dC.is_zero():
                C[a] = C[a] + dC.scale(inv).shift(y, w + 1)
        dU = commutator(V, layer) - layer
        if not dU.is_zero():
            U = U + dU.scale(inv).shift(y, w + 1)
    zero = MatrixSeries.zero(n, n, vars, bounds)
    return ConnectionForm(vars, bounds, A + [zero], C + [F], U, V)


def solve_unfolding(base: ConnectionForm, dfs, order, process=None, word_cap=None, check=True) -> ConnectionForm:
    """Flat extension of ``base`` over the unfolding variables named in ``dfs``.

    dfs: mapping name -> list of n entries (df_i/dy as scalars or series over
    base + unfolding variables).  order: mapping name -> y-bound (or an int for
    all).  The variables are unfolded one at a time in ``process`` order (default:
    the order of ``dfs``); earlier ones are computed with enough extra orders for
    the later steps, so every unfolding variable ends at its requested bound.
    Each step costs non-logarithmic base variables one bound per y-order
    computed, so their output bounds shrink by the sum of the step orders."""
    ys = list(dfs)
    if isinstance(order, int):
        order = {y: order for y in ys}
    order = dict(order)
    for y in ys:
        if y in base.vars.names:
            raise StructuralError(f"unfolding variable {y} clashes with a base variable")
        if order.get(y, -1) < 0:
            raise StructuralError(f"missing or negative order for {y}")
        if len(dfs[y]) != base.rank:
            raise StructuralError(f"dfs for {y} must have {base.rank} entries")
    process = list(process or ys)
    if sorted(process) != sorted(ys):
        raise StructuralError("process order must list every unfolding variable once")
    process_k = {y: order[y] + sum(order[v] for v in process[i + 1 :]) for i, y in enumerate(process)}
    total = sum(process_k.values())
    out_bounds = []
    for name, cls, b in zip(base.vars.names, base.vars.classes, base.bounds):
        nb = b if cls == "log" else b - total
        if nb < 0:
            raise StructuralError(f"bound {b} of {name} is too small for {total} unfolding orders")
        out_bounds.append(nb)
    spanning_words(base, word_cap)
    cur = base
    for idx, y in enumerate(process):
        later = process[idx + 1 :]
        K_int = process_k[y]
        df = []
        for x in dfs[y]:
            if isinstance(x, TruncatedSeries):
                dead = [v for v in later if v in x.vars.names]
                x = x.set_zero(dead) if dead else x
            df.append(x)
        cur = _unfold_one(cur, y, df, K_int, word_cap)
    final_vars = base.vars.extend(*[(y, "unfold") for y in ys])
    final_bounds = tuple(out_bounds) + tuple(order[y] for y in ys)
    # reorder variables to base + ys and truncate to the valid region
    inter_bounds = tuple(final_bounds[final_vars.index(nm)] for nm in cur.vars.names)
    cur = cur.truncate(inter_bounds)
    pos = [cur.vars.index(nm) for nm in final_vars.names]
    emb = lambda m: m.embed(final_vars, final_bounds)
    result = ConnectionForm(
        final_vars,
        final_bounds,
        [emb(cur.A[p]) for p in pos],
        [emb(cur.C[p]) for p in pos],
        emb(cur.U),
        emb(cur.V),
    )
    if check:
        rep = flatness_residuals(result)
        if not rep.passed:
            bad = rep.failures()[0]
            raise InternalConsistencyError(f"flatness residual {bad.id} does not vanish")
        fc = first_column_residuals(result, {y: dfs[y] for y in ys})
        if not fc.passed:
            raise InternalConsistencyError("first-column condition fails")
    return result


# --------------------------------------------------------------------------


def _pairing_residuals(omega: ConnectionForm, P: MatrixSeries, w: int, zname: str) -> ConditionReport:
    """Flatness of P in every direction, multiplied through by z:

    z X_a P - z (A_a^T P + P A_a) - (C_a^T P - P C_a) = 0
    z (z d/dz P) - (U^T P - P U) - z (V^T P + P V) = 0"""
    vars = P.vars
    emb = lambda m: m.embed(vars, P.bounds)
    report = ConditionReport()
    groups = {"pairing[z]": [], "pairing[log]": [], "pairing[hol]": [], "pairing[unfold]": []}
    U, V = emb(omega.U), emb(omega.V)
    zz = P.euler_derivative(zname)
    groups["pairing[z]"].append(
        msum(zz.shift(zname, 1), -(U.T @ P - P @ U), -((V.T @ P + P @ V).shift(zname, 1)))
    )
    for a, name in enumerate(omega.vars.names):
        A, C = emb(omega.A[a]), emb(omega.C[a])
        res = msum(vf(P, name, vars).shift(zname, 1), -((A.T @ P + P @ A).shift(zname, 1)), -(C.T @ P - P @ C))
        key = f"pairing[{omega.vars.cls(name)}]"
        groups[key].append(res)
    for k, v in groups.items():
        report.add(k, v, detail=f"{len(v)} instance(s)")
    return report


def extend_pairing(omega: ConnectionForm, P0: MatrixSeries, w: int, unfold_vars=None, check=True) -> PairingData:
    """Extend the pairing matrix P0 (over base variables and z) along the
    unfolding variables by integrating dP/dy = (1/z)(F^T P - P F) order by order.

    Every order must stay inside z^w (regular series), otherwise PairingEscape."""
    zname = P0.vars.by_class("z")[0]
    ys = list(unfold_vars if unfold_vars is not None else omega.vars.by_class("unfold"))
    zb = P0.bounds[P0.vars.index(zname)]
    base_names = [nm for nm in omega.vars.names if nm not in ys]
    for nm in P0.vars.names:
        if nm != zname and nm not in base_names:
            raise StructuralError(f"initial pairing depends on {nm}, which is not a base variable")
    P = P0
    done = []
    for idx, y in enumerate(ys):
        later = ys[idx + 1 :]
        names = base_names + done + [y]
        vars = VariableSet(
            tuple(names) + (zname,),
            tuple(omega.vars.cls(nm) for nm in names) + ("z",),
        )
        bounds = tuple(omega.bounds[omega.vars.index(nm)] for nm in names) + (zb,)
        P = P.embed(vars, bounds)
        F = omega.Cmat(y).set_zero(later) if later else omega.Cmat(y)
        F = F.embed(vars, bounds)
        K = bounds[vars.index(y)]
        for l in range(K):
            D = (F.T @ P - P @ F).layer(y, l)
            for row in D.rows:
                for x in row:
                    for e in x.coeffs:
                        if e[vars.index(zname)] <= w:
                            raise PairingEscape(f"order {l + 1} in {y}: term z^{e[vars.index(zname)] - 1} below z^{w}")
            step = D.shift(zname, -1).scale(Q(1, l + 1)).shift(y, l + 1)
            P = P + step
        done.append(y)
    full_vars = VariableSet(omega.vars.names + (zname,), omega.vars.classes + ("z",))
    P = P.embed(full_vars, omega.bounds + (zb,))
    report = None
    if check:
        report = _pairing_residuals(omega, P, w, zname)
    data = PairingData(P, w, report)
    data.normalized()
    return data


# --------------------------------------------------------------------------


@dataclass
class UniversalUnfolding:
    germ: object
    fts: FTSData
    omega: ConnectionForm = None
    pairing: PairingData = None
    dfs: dict = field(default_factory=dict)
    axioms: ConditionReport = None
    hypotheses: dict = None


def unfolding_directions(fts: FTSData, cap=None):
    """Greedy choice of l = n - m directions: walk the breadth-first word list of
    (Higgs components, U) applied to xi at the origin and keep the first words
    whose vectors enlarge the span of the Higgs first columns."""
    n = fts.rank
    l = n - len(fts.vars)
    span = linalg.span([c for c in higgs_first_columns(fts) if any(c)])
    mats = [c.constant_term() for c in fts.higgs] + [fts.U.constant_term()]
    xi0 = [x.constant_term() for x in fts.xi]
    cap = n * n if cap is None else cap
    chosen = []
    level = [tuple([0] * len(mats))]
    vec = {level[0]: xi0}
    seen = set(level)
    for _ in range(cap + 1):
        for word in level:
            v = vec[word]
            if len(chosen) < l and any(v) and not (span and linalg.contains(span, v)):
                span = linalg.span(span + [v])
                chosen.append(v)
        if len(chosen) == l:
            return chosen
        nxt = []
        for word in level:
            for k, m in enumerate(mats):
                w2 = list(word)
                w2[k] += 1
                w2 = tuple(w2)
                if w2 not in seen:
                    seen.add(w2)
                    vec[w2] = linalg.matvec(m, vec[word])
                    nxt.append(w2)
        level = sorted(nxt, reverse=True)
    raise GenerationFailure(0, len(span), n)


def _xi_first(fts: FTSData) -> FTSData:
    n = fts.rank
    xi0 = [x.constant_term() for x in fts.xi]
    if any(x.coeffs.keys() - {(0,) * len(fts.vars)} for x in fts.xi):
        raise StructuralError("xi must be constant in the given frame")
    e1 = [Q(1)] + [Q(0)] * (n - 1)
    if xi0 == e1:
        return fts
    cols = [xi0]
    for i in range(n):
        ei = [Q(1) if j == i else Q(0) for j in range(n)]
        if linalg.rank(cols + [ei]) > len(cols):
            cols.append(ei)
    P = linalg.from_columns(cols)
    return change_frame(fts, P)


def universal_unfold(fts: FTSData, order, word_cap=None, names=None, check=True) -> UniversalUnfolding:
    """Unfold a Frobenius type structure satisfying IC, GC and EC to a Frobenius
    germ.  ``order`` is the y-bound (int, or list per new variable)."""
    hyp = check_hypotheses(fts)
    missing = [k for k in ("IC", "GC", "EC") if not hyp[k]]
    if missing:
        raise ValueError("hypotheses fail: " + ", ".join(missing))
    fts = _xi_first(fts)
    n, m = fts.rank, len(fts.vars)
    if n == m:
        germ = isocase_build(fts)
        axioms = check_frobenius_axioms(germ) if check else None
        return UniversalUnfolding(germ, fts, axioms=axioms, hypotheses=hyp)
    tr = fts_to_trtlep(fts)
    dirs = unfolding_directions(fts, word_cap)
    l = n - m
    names = list(names or [f"y{i + 1}" for i in range(l)])
    for nm in names:
        if nm in fts.vars.names:
            raise StructuralError(f"unfolding variable {nm} clashes with a base variable")
    dfs = {nm: [-x for x in v] for nm, v in zip(names, dirs)}
    orders = [order] * l if isinstance(order, int) else list(order)
    order_map = dict(zip(names, orders))
    process = sorted(names, key=lambda nm: -order_map[nm])
    omega = solve_unfolding(tr.omega, dfs, order_map, process=process, word_cap=word_cap, check=check)
    pairing = extend_pairing(omega, tr.P, tr.w, names, check=check)
    if check and not pairing.report.passed:
        raise InternalConsistencyError("extended pairing is not flat: " + ", ".join(c.id for c in pairing.report.failures()))
    tr_u = TrTLEPData(omega, pairing.R, tr.w)
    xi = [TruncatedSeries.constant(1 if i == 0 else 0, omega.vars, omega.bounds) for i in range(n)]
    fts_u = trtlep_to_fts(tr_u, xi, fts.d)
    germ = isocase_build(fts_u)
    axioms = None
    if check:
        axioms = check_frobenius_axioms(germ)
    return UniversalUnfolding(germ, fts_u, omega, pairing, dfs, axioms, hyp)


def bundle_products(germ):
    """Structure matrices of the product transported to the bundle frame:
    result[i] is the matrix of e_i o (.) with e_i = v(X) for the frame map v."""
    vmap = germ.frame_map
    vinv = invert_unit(vmap)
    n = germ.dim
    zero = TruncatedSeries.zero(germ.vars, germ.bounds)
    coords = [vinv.column(i) for i in range(n)]  # e_i in the X frame
    out = []
    for i in range(n):
        cols = []
        for j in range(n):
            prod = [zero] * n
            for a in range(n):
                xa = coords[i][a]
                if not xa.coeffs:
                    continue
                for b in range(n):
                    xb = coords[j][b]
                    if not xb.coeffs:
                        continue
                    s = xa * xb
                    prod = [p + s * germ.mult[a][b][c] for c, p in enumerate(prod)]
            cols.append(vmap.apply(prod))
        out.append(MatrixSeries.from_columns(cols))
    return out
