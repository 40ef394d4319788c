"""Frobenius type structures, their trTLEP counterparts and Frobenius germs.

Everything is written in a fixed frame.  The frame vector field of a base
variable t is t d/dt for logarithmic variables and d/dt otherwise; these fields
commute, which keeps the Christoffel and Lie-derivative formulas simple.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from . import linalg
from .errors import InputError, MalformedPairing, NotAUnit, NotIsomorphismCase, StructuralError
from .forms import (
    ConditionReport,
    ConnectionForm,
    matrix_from_json,
    matrix_to_json,
    msum,
    vars_from_json,
    vector_from_json,
    vector_to_json,
    vf,
)
from .numbers import Q, rational, scalar_from_json, scalar_to_json
from .series import MatrixSeries, TruncatedSeries, VariableSet, commutator, invert_unit


@dataclass
class FTSData:
    vars: VariableSet
    bounds: tuple
    rconn: list
    higgs: list
    U: MatrixSeries
    V: MatrixSeries
    G: MatrixSeries
    xi: list
    w: int
    d: object

    def __post_init__(self):
        self.bounds = tuple(self.bounds)
        self.d = rational(self.d)
        self.w = int(self.w)
        if "z" in self.vars.classes:
            raise StructuralError("a Frobenius type structure has no z variable")
        n = self.U.shape[0]
        if len(self.rconn) != len(self.vars) or len(self.higgs) != len(self.vars):
            raise StructuralError("one connection and one Higgs matrix per base variable are required")
        for m in list(self.rconn) + list(self.higgs) + [self.U, self.V, self.G]:
            if m.shape != (n, n):
                raise StructuralError("all matrices must be n x n")
            if m.vars != self.vars or m.bounds != self.bounds:
                raise StructuralError("all matrices must share the structure's ring")
        if len(self.xi) != n:
            raise StructuralError("xi must have n entries")
        for x in self.xi:
            if x.vars != self.vars or x.bounds != self.bounds:
                raise StructuralError("xi must live in the structure's ring")
        if self.G.transpose() != self.G:
            raise StructuralError("Gram matrix must be symmetric")
        if linalg.rank(self.G.constant_term()) != n:
            raise StructuralError("Gram matrix must have invertible constant term")

    @property
    def rank(self):
        return self.U.shape[0]

    def to_json(self):
        return {
            "rank": self.rank,
            "vars": list(self.vars.names),
            "classes": list(self.vars.classes),
            "bounds": list(self.bounds),
            "rconn": [matrix_to_json(m) for m in self.rconn],
            "higgs": [matrix_to_json(m) for m in self.higgs],
            "u": matrix_to_json(self.U),
            "v": matrix_to_json(self.V),
            "g": matrix_to_json(self.G),
            "xi": vector_to_json(self.xi),
            "w": self.w,
            "d": scalar_to_json(self.d),
        }

    @classmethod
    def from_json(cls, obj, path=""):
        vars, bounds = vars_from_json(obj, path)
        try:
            U = matrix_from_json(obj["u"], vars, bounds, f"{path}/u")
            n = U.shape[0]
            zero = MatrixSeries.zero(n, n, vars, bounds)
            rconn = [matrix_from_json(m, vars, bounds, f"{path}/rconn/{i}") for i, m in enumerate(obj.get("rconn", []))]
            higgs = [matrix_from_json(m, vars, bounds, f"{path}/higgs/{i}") for i, m in enumerate(obj["higgs"])]
            if not rconn:
                rconn = [zero] * len(vars)
            V = matrix_from_json(obj["v"], vars, bounds, f"{path}/v")
            G = matrix_from_json(obj["g"], vars, bounds, f"{path}/g")
            xi = vector_from_json(obj["xi"], vars, bounds, f"{path}/xi")
            w = obj["w"]
            d = scalar_from_json(obj["d"])
        except KeyError as exc:
            raise InputError(path, f"missing key {exc}") from None
        if "rank" in obj and obj["rank"] != n:
            raise InputError(f"{path}/rank", f"rank {obj['rank']} does not match matrices of size {n}")
        try:
            return cls(vars, bounds, rconn, higgs, U, V, G, xi, w, d)
        except StructuralError as exc:
            raise InputError(path, str(exc)) from None


@dataclass
class TrTLEPData:
    """Connection form on the trivial bundle plus the pairing matrix.

    ``P`` is a matrix series in the base variables and z, holding
    P_ij = P(v_i, v_j) for v_i at z and v_j at -z."""

    omega: ConnectionForm
    P: MatrixSeries
    w: int

    @property
    def rank(self):
        return self.omega.rank

    @property
    def zname(self):
        return self.P.vars.by_class("z")[0]

    def to_json(self):
        return {"omega": self.omega.to_json(), "P": self.P.to_json(), "w": self.w}

    @classmethod
    def from_json(cls, obj, path=""):
        omega = ConnectionForm.from_json(obj["omega"], f"{path}/omega")
        P = MatrixSeries.from_json(obj["P"])
        return cls(omega, P, int(obj["w"]))


@dataclass
class FrobeniusGerm:
    vars: VariableSet
    bounds: tuple
    mult: list  # mult[i][j][k] = a_ij^k
    unit: list
    euler: list
    metric: MatrixSeries
    d: object
    frame_map: MatrixSeries = None  # columns v(X_a) in the bundle frame, when built from a structure

    @property
    def dim(self):
        return len(self.vars)

    def product_matrix(self, i):
        """Matrix of X_i o (.) in the frame X: entry (k, j) = a_ij^k."""
        n = self.dim
        return MatrixSeries([[self.mult[i][j][k] for j in range(n)] for k in range(n)])

    def truncate(self, bounds):
        bounds = tuple(bounds)
        t = lambda x: x.truncate(bounds)
        return FrobeniusGerm(
            self.vars,
            bounds,
            [[[t(x) for x in row] for row in plane] for plane in self.mult],
            [t(x) for x in self.unit],
            [t(x) for x in self.euler],
            self.metric.truncate(bounds),
            self.d,
            self.frame_map.truncate(bounds) if self.frame_map is not None else None,
        )

    def to_json(self):
        n = self.dim
        return {
            "vars": list(self.vars.names),
            "classes": list(self.vars.classes),
            "bounds": list(self.bounds),
            "mult": [[vector_to_json(self.mult[i][j]) for j in range(n)] for i in range(n)],
            "unit": vector_to_json(self.unit),
            "euler": vector_to_json(self.euler),
            "metric": matrix_to_json(self.metric),
            "d": scalar_to_json(self.d),
        }

    @classmethod
    def from_json(cls, obj, path=""):
        vars, bounds = vars_from_json(obj, path)
        n = len(vars)
        mult = [[vector_from_json(obj["mult"][i][j], vars, bounds, f"{path}/mult/{i}/{j}") for j in range(n)] for i in range(n)]
        return cls(
            vars,
            bounds,
            mult,
            vector_from_json(obj["unit"], vars, bounds, f"{path}/unit"),
            vector_from_json(obj["euler"], vars, bounds, f"{path}/euler"),
            matrix_from_json(obj["metric"], vars, bounds, f"{path}/metric"),
            scalar_from_json(obj["d"]),
        )


# --------------------------------------------------------------------------


def _const(m, vars, bounds):
    return MatrixSeries.from_constant(m, vars, bounds)


def covariant(M, G, name, vars):
    """nabla_X of an endomorphism with connection matrix G: X(M) + [G, M]."""
    return msum(vf(M, name, vars), commutator(G, M))


def check_fts(fts: FTSData) -> ConditionReport:
    vars = fts.vars
    names = vars.names
    R, C, U, V, G = fts.rconn, fts.higgs, fts.U, fts.V, fts.G
    flat, cc, fts1 = [], [], []
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            na, nb = names[a], names[b]
            flat.append(msum(vf(R[b], na, vars), -vf(R[a], nb, vars), commutator(R[a], R[b])))
            cc.append(commutator(C[a], C[b]))
            fts1.append(msum(covariant(C[b], R[a], na, vars), -covariant(C[a], R[b], nb, vars)))
    fts2, uc, vflat, gflat, gc = [], [], [], [], []
    for a, na in enumerate(names):
        fts2.append(msum(covariant(U, R[a], na, vars), -commutator(C[a], V), C[a]))
        uc.append(commutator(U, C[a]))
        vflat.append(covariant(V, R[a], na, vars))
        gflat.append(msum(vf(G, na, vars), -(R[a].T @ G), -(G @ R[a])))
        gc.append(C[a].T @ G - G @ C[a])
    report = ConditionReport()
    report.add("rconn_flat", flat)
    report.add("higgs_commute", cc)
    report.add("FTS1", fts1)
    report.add("FTS2", fts2)
    report.add("U_commutes_with_higgs", uc)
    report.add("V_flat", vflat)
    report.add("g_flat", gflat)
    report.add("g_higgs_selfadjoint", gc)
    report.add("g_U_selfadjoint", U.T @ G - G @ U)
    report.add("g_V_skew", V.T @ G + G @ V)
    return report


def change_frame(fts: FTSData, P) -> FTSData:
    """Express the structure in the frame v' = v P for a constant invertible P."""
    P = [list(r) for r in P]
    Pinv = linalg.inverse(P)
    vars, bounds = fts.vars, fts.bounds
    Ps = _const(P, vars, bounds)
    Pis = _const(Pinv, vars, bounds)
    conj = lambda m: Pis @ m @ Ps
    return FTSData(
        vars,
        bounds,
        [conj(r) for r in fts.rconn],
        [conj(c) for c in fts.higgs],
        conj(fts.U),
        conj(fts.V),
        Ps.T @ fts.G @ Ps,
        Pis.apply(fts.xi),
        fts.w,
        fts.d,
    )


def fts_to_trtlep(fts: FTSData, zname="z", check=True) -> TrTLEPData:
    """Nabla = nabla^r + C/z + (U/z - V + w/2) dz/z and P = z^w g."""
    if check:
        rep = check_fts(fts)
        if not rep.passed:
            raise ValueError("structure fails: " + ", ".join(c.id for c in rep.failures()))
    n = fts.rank
    half_w = _const(linalg.scale(Q(fts.w, 2), linalg.identity(n)), fts.vars, fts.bounds)
    omega = ConnectionForm(fts.vars, fts.bounds, list(fts.rconn), list(fts.higgs), fts.U, half_w - fts.V)
    if fts.w < 0:
        raise MalformedPairing("negative weights are not representable with power series in z")
    zvars = fts.vars.extend((zname, "z"))
    zb = fts.bounds + (fts.w + 1,)
    G = fts.G.embed(zvars, zb)
    P = G.shift(zname, fts.w)
    return TrTLEPData(omega, P, fts.w)


def pairing_normal_form(P: MatrixSeries, w: int, zname: str):
    """z^{-w} P as a regular series; raises MalformedPairing on terms below z^w."""
    i = P.vars.index(zname)
    for row in P.rows:
        for x in row:
            for e in x.coeffs:
                if e[i] < w:
                    raise MalformedPairing(f"pairing has a z^{e[i]} term below z^{w}")
    return P.shift(zname, -w)


def trtlep_to_fts(tr: TrTLEPData, xi, d) -> FTSData:
    omega = tr.omega
    n = omega.rank
    z = tr.zname
    R = pairing_normal_form(tr.P, tr.w, z)
    G = R.layer(z, 0).set_zero([z])
    if G.vars != omega.vars:
        G = G.embed(omega.vars, omega.bounds)
    G = G.truncate(omega.bounds) if G.bounds != omega.bounds else G
    if linalg.rank(G.constant_term()) != n:
        raise MalformedPairing("z^{-w} P at z = 0 is degenerate")
    half_w = _const(linalg.scale(Q(tr.w, 2), linalg.identity(n)), omega.vars, omega.bounds)
    xi = [x if isinstance(x, TruncatedSeries) else TruncatedSeries.constant(x, omega.vars, omega.bounds) for x in xi]
    return FTSData(omega.vars, omega.bounds, list(omega.A), list(omega.C), omega.U, half_w - omega.V, G, xi, tr.w, d)


def check_pairing_symmetry(tr: TrTLEPData) -> bool:
    """P(-z)^T = (-1)^w P(z)."""
    z = tr.zname
    lhs = tr.P.map(lambda x: x.scale_var(z, -1)).T
    sign = -1 if tr.w % 2 else 1
    return lhs == tr.P.scale(sign)


# --------------------------------------------------------------------------


def _constant_matrix(m):
    return m.constant_term()


def higgs_first_columns(fts: FTSData):
    xi0 = [x.constant_term() for x in fts.xi]
    return [linalg.matvec(c.constant_term(), xi0) for c in fts.higgs]


def gc_words(mats, start, n, cap=None):
    """Breadth-first closure of ``start`` under commuting constant matrices.

    Words are exponent vectors over ``mats`` enumerated by total degree.
    Returns the list of (word, vector) for words whose vector enlarged the span,
    in the order found, and the final rank."""
    cap = n * n if cap is None else cap
    chosen = []
    basis = []
    level = [tuple([0] * len(mats))]
    vec_of = {level[0]: list(start)}
    seen = set(level)
    for deg in range(cap + 1):
        nxt = []
        for word in level:
            v = vec_of[word]
            if any(v) and (not basis or not linalg.contains(basis, v)):
                basis = linalg.span(basis + [v])
                chosen.append((word, v))
                if len(basis) == n:
                    return chosen, n
        for word in level:
            for k, m in enumerate(mats):
                w2 = list(word)
                w2[k] += 1
                w2 = tuple(w2)
                if w2 in seen:
                    continue
                seen.add(w2)
                vec_of[w2] = linalg.matvec(m, vec_of[word])
                nxt.append(w2)
        level = sorted(nxt, reverse=True)
        if not level:
            break
    return chosen, len(basis)


def check_hypotheses(fts: FTSData):
    n = fts.rank
    m = len(fts.vars)
    cols = higgs_first_columns(fts)
    ic_rank = linalg.rank(cols) if cols else 0
    xi0 = [x.constant_term() for x in fts.xi]
    mats = [c.constant_term() for c in fts.higgs] + [fts.U.constant_term()]
    _, gc_rank = gc_words(mats, xi0, n)
    Vxi = fts.V.apply(fts.xi)
    half_d = fts.d / 2
    ec_res = [msum(a, -b.scale(half_d)) for a, b in zip(Vxi, fts.xi)]
    flat_res = []
    for a, name in enumerate(fts.vars.names):
        dxi = [vf(x, name, fts.vars) for x in fts.xi]
        Rx = fts.rconn[a].apply(fts.xi)
        flat_res.extend(msum(p, q) for p, q in zip(dxi, Rx))
    report = ConditionReport()
    report.add("IC", passed=ic_rank == m, detail=f"rank {ic_rank}, base dimension {m}")
    report.add("GC", passed=gc_rank == n, detail=f"closure rank {gc_rank} of {n}")
    report.add("EC", ec_res, detail=f"d = {fts.d}")
    report.add("xi_flat", flat_res)
    return {
        "IC": report["IC"].passed,
        "GC": report["GC"].passed,
        "EC": report["EC"].passed,
        "xi_flat": report["xi_flat"].passed,
        "d": fts.d,
        "report": report,
    }


def isocase_build(fts: FTSData) -> FrobeniusGerm:
    n = fts.rank
    m = len(fts.vars)
    if m != n:
        raise NotIsomorphismCase(f"base dimension {m} differs from rank {n}")
    cols = [[-x for x in c.apply(fts.xi)] for c in fts.higgs]
    vmap = MatrixSeries.from_columns(cols)
    try:
        vinv = invert_unit(vmap)
    except NotAUnit:
        raise NotIsomorphismCase("X -> -C_X xi is not invertible at the origin") from None
    Cxi = [c.apply(fts.xi) for c in fts.higgs]
    mult = []
    for i in range(n):
        plane = []
        for j in range(n):
            plane.append(vinv.apply(fts.higgs[i].apply(Cxi[j])))
        mult.append(plane)
    unit = vinv.apply(fts.xi)
    euler = vinv.apply(fts.U.apply(fts.xi))
    metric = vmap.T @ fts.G @ vmap
    return FrobeniusGerm(fts.vars, fts.bounds, mult, unit, euler, metric, fts.d, vmap)


# --------------------------------------------------------------------------


def _ssum(terms, like):
    terms = [t for t in terms if t is not None]
    if not terms:
        return like.zero_like()
    return msum(*terms)


def christoffel(germ: FrobeniusGerm):
    """Gamma[a][b][c] with nabla_{X_a} X_b = sum_c Gamma_ab^c X_c (Levi-Civita)."""
    vars = germ.vars
    n = germ.dim
    g = germ.metric
    ginv = invert_unit(g)
    dg = [[[vf(g.rows[b][c], vars.names[a], vars) for c in range(n)] for b in range(n)] for a in range(n)]
    half = Q(1, 2)
    gamma = []
    for a in range(n):
        plane = []
        for b in range(n):
            low = [msum(dg[a][b][c], dg[b][a][c], -dg[c][a][b]).scale(half) for c in range(n)]
            vec = []
            for d in range(n):
                vec.append(msum(*_align([_mul(low[c], ginv.rows[c][d]) for c in range(n)])))
            plane.append(vec)
        gamma.append(plane)
    return gamma


def check_frobenius_axioms(germ: FrobeniusGerm, bounds=None) -> ConditionReport:
    if bounds is not None:
        germ = germ.truncate(bounds)
    vars = germ.vars
    names = vars.names
    for nm, b in zip(names, germ.bounds):
        if vars.cls(nm) != "log" and b < 2:
            raise StructuralError(f"axiom checks differentiate twice; the bound of {nm} is {b} < 2")
    n = germ.dim
    a = germ.mult
    g = germ.metric.rows
    report = ConditionReport()
    rng = range(n)

    comm = [a[i][j][k] - a[j][i][k] for i in rng for j in rng for k in rng]
    report.add("commutative", comm)

    assoc = []
    for i, j, k, l in iproduct(rng, rng, rng, rng):
        lhs = _ssum([a[i][j][m] * a[m][k][l] for m in rng], a[0][0][0])
        rhs = _ssum([a[j][k][m] * a[i][m][l] for m in rng], a[0][0][0])
        assoc.append(lhs - rhs)
    report.add("associative", assoc)

    inv = []
    for i, j, k in iproduct(rng, rng, rng):
        lhs = _ssum([a[i][j][m] * g[m][k] for m in rng], a[0][0][0])
        rhs = _ssum([a[j][k][m] * g[i][m] for m in rng], a[0][0][0])
        inv.append(lhs - rhs)
    report.add("metric_invariant", inv)

    gam = christoffel(germ)

    def X(f, i):
        return vf(f, names[i], vars)

    curv = []
    for i, j, k, l in iproduct(rng, rng, rng, rng):
        if i >= j:
            continue
        terms = [X(gam[j][k][l], i), -X(gam[i][k][l], j)]
        for m in rng:
            terms.append(gam[j][k][m] * gam[i][m][l])
            terms.append(-(gam[i][k][m] * gam[j][m][l]))
        curv.append(msum(*_align(terms)))
    report.add("levi_civita_flat", curv)

    e = germ.unit
    de = []
    for i, l in iproduct(rng, rng):
        terms = [X(e[l], i)] + [_mul(e[b], gam[i][b][l]) for b in rng]
        de.append(msum(*_align(terms)))
    report.add("unit_flat", de)

    pot = []
    nab = {}
    for i, j, k in iproduct(rng, rng, rng):
        for l in rng:
            terms = [X(a[j][k][l], i)]
            for m in rng:
                terms.append(_mul(a[j][k][m], gam[i][m][l]))
                terms.append(-_mul(gam[i][j][m], a[m][k][l]))
                terms.append(-_mul(gam[i][k][m], a[j][m][l]))
            nab[i, j, k, l] = msum(*_align(terms))
    for i, j, k, l in iproduct(rng, rng, rng, rng):
        if i < j:
            pot.append(msum(nab[i, j, k, l], -nab[j, i, k, l]))
    report.add("potential", pot)

    E = germ.euler

    def Eder(f):
        return _ssum(_align([_mul(E[b], X(f, b)) for b in rng]), f)

    dE = [[X(E[c], b) for c in rng] for b in rng]  # dE[b][c] = X_b(E^c)
    lie_prod = []
    for i, j, k in iproduct(rng, rng, rng):
        terms = [Eder(a[i][j][k]), -a[i][j][k]]
        for m in rng:
            terms.append(-_mul(a[i][j][m], dE[m][k]))
            terms.append(_mul(dE[i][m], a[m][j][k]))
            terms.append(_mul(dE[j][m], a[i][m][k]))
        lie_prod.append(msum(*_align(terms)))
    report.add("euler_product", lie_prod)

    two_minus_d = 2 - germ.d
    lie_g = []
    for i, j in iproduct(rng, rng):
        terms = [Eder(g[i][j]), -g[i][j].scale(two_minus_d)]
        for m in rng:
            terms.append(_mul(dE[i][m], g[m][j]))
            terms.append(_mul(dE[j][m], g[i][m]))
        lie_g.append(msum(*_align(terms)))
    report.add("euler_metric", lie_g, detail=f"d = {germ.d}")
    report.add(
        "logarithmic_fields",
        passed=True,
        detail="unit and Euler field are power series in the logarithmic frame",
    )
    return report


def _mul(x, y):
    b = tuple(min(p, q) for p, q in zip(x.bounds, y.bounds))
    return x.truncate(b) * y.truncate(b)


def _align(terms):
    from .series import common_bounds

    b = common_bounds(*terms)
    return [t.truncate(b) for t in terms]


def rational_spectrum(m):
    """Eigenvalues with multiplicity of a constant rational matrix, or None when
    the characteristic polynomial does not split over Q."""
    import sympy

    M = sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in m])
    lam = sympy.Symbol("lam")
    poly = sympy.Poly(M.charpoly(lam).as_expr(), lam)
    roots = sympy.roots(poly, filter="Q")
    if sum(roots.values()) != len(m):
        return None
    out = []
    for r, k in roots.items():
        out.extend([Q(int(r.p), int(r.q))] * k)
    return sorted(out)
