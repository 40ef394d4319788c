"""Genus-zero Gromov-Witten potentials and big quantum products.

Coordinates: T_0 is the unit, T_1..T_r (the degree-2 classes) get logarithmic
variables q_i = e^{t_i}, and every other class T_k of degree >= 4 gets a flat
variable t_k.  Variables are named ``q<i>`` and ``t<k>`` after the class index.
The quantum part of the potential is stored in divisor normal form: a series in
the q's and t's with no t_0 and no t_1..t_r dependence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from math import factorial

from . import linalg
from .errors import GenerationFailure, Inconsistent, InputError, StructuralError, Underdetermined
from .forms import ConditionReport
from .frobenius import FTSData
from .numbers import Q, rational, rational_str
from .series import MatrixSeries, TruncatedSeries, VariableSet, commutator


@dataclass(frozen=True)
class CohClass:
    name: str
    deg: int
    h2: bool


@dataclass
class CohModel:
    dimX: int
    classes: list
    cup: list  # cup[i][j][k]: T_i u T_j = sum_k cup[i][j][k] T_k
    pairing: list
    c1: list  # one coefficient per degree-2 class, in class order
    mori_rank: int
    beta_pairing: list  # beta_pairing[s][a] = (beta_s, T_{h2[a]})

    def __post_init__(self):
        n = len(self.classes)
        self.dimX = int(self.dimX)
        self.cup = [[[rational(x) for x in row] for row in plane] for plane in self.cup]
        self.pairing = [[rational(x) for x in row] for row in self.pairing]
        self.c1 = [rational(x) for x in self.c1]
        self.beta_pairing = [[int(x) for x in row] for row in self.beta_pairing]
        if n == 0 or self.classes[0].deg != 0:
            raise StructuralError("class 0 must be the unit, of degree 0")
        for i, c in enumerate(self.classes):
            if c.deg % 2 or c.deg < 0 or c.deg > 2 * self.dimX:
                raise StructuralError(f"class {c.name}: degree {c.deg} is not an even degree of X")
            if c.h2 != (c.deg == 2):
                raise StructuralError(f"class {c.name}: h2 flag must mark exactly the degree-2 classes")
            if c.deg == 0 and i:
                raise StructuralError("only one degree-0 class is allowed")
        names = [c.name for c in self.classes]
        if len(set(names)) != n:
            raise StructuralError("class names must be distinct")
        if len(self.pairing) != n or any(len(r) != n for r in self.pairing):
            raise StructuralError("pairing must be n x n")
        for i in range(n):
            for j in range(n):
                gij = self.pairing[i][j]
                if gij != self.pairing[j][i]:
                    raise StructuralError(f"pairing not symmetric at ({i},{j})")
                if gij and self.classes[i].deg + self.classes[j].deg != 2 * self.dimX:
                    raise StructuralError(f"pairing entry ({i},{j}) joins classes of incompatible degree")
        if linalg.rank(self.pairing) != n:
            raise StructuralError("pairing is degenerate")
        if len(self.cup) != n or any(len(p) != n or any(len(r) != n for r in p) for p in self.cup):
            raise StructuralError("cup tensor must be n x n x n")
        for i, j, k in iproduct(range(n), repeat=3):
            c = self.cup[i][j][k]
            if c != self.cup[j][i][k]:
                raise StructuralError(f"cup product not commutative at ({i},{j})")
            if c and self.classes[i].deg + self.classes[j].deg != self.classes[k].deg:
                raise StructuralError(f"cup product ({i},{j}) -> {k} does not respect degrees")
        for i, k in iproduct(range(n), repeat=2):
            if self.cup[0][i][k] != (1 if i == k else 0):
                raise StructuralError("T_0 is not the unit of the cup product")
        for i, j, k in iproduct(range(n), repeat=3):
            a = [sum((self.cup[i][j][m] * self.cup[m][k][l] for m in range(n)), Q(0)) for l in range(n)]
            b = [sum((self.cup[j][k][m] * self.cup[i][m][l] for m in range(n)), Q(0)) for l in range(n)]
            if a != b:
                raise StructuralError(f"cup product not associative at ({i},{j},{k})")
        h2 = self.h2
        if len(self.c1) != len(h2):
            raise StructuralError("c1 needs one coefficient per degree-2 class")
        if self.mori_rank != len(self.beta_pairing) or any(len(r) != len(h2) for r in self.beta_pairing):
            raise StructuralError("beta_pairing must be mori_rank x (number of degree-2 classes)")
        if any(x < 0 for r in self.beta_pairing for x in r):
            raise StructuralError("beta_pairing entries must be nonnegative")
        if self.mori_rank and linalg.rank([[Q(x) for x in r] for r in self.beta_pairing]) != self.mori_rank:
            raise StructuralError("Mori generators must pair independently with H^2")
        self._ginv = linalg.inverse(self.pairing)

    # indexing -----------------------------------------------------------

    @property
    def n(self):
        return len(self.classes)

    @property
    def h2(self):
        return [i for i, c in enumerate(self.classes) if c.h2]

    @property
    def others(self):
        """Indices of the classes of degree >= 4."""
        return [i for i, c in enumerate(self.classes) if c.deg >= 4]

    @property
    def ginv(self):
        return self._ginv

    def var_name(self, i):
        if i == 0:
            return "t0"
        return f"q{i}" if self.classes[i].h2 else f"t{i}"

    @property
    def vars(self) -> VariableSet:
        return VariableSet.of(*[(self.var_name(i), "log" if self.classes[i].h2 else "hol") for i in range(1, self.n)])

    def index(self, name):
        """Class index from a class name or an integer."""
        if isinstance(name, int):
            if not 0 <= name < self.n:
                raise StructuralError(f"no class with index {name}")
            return name
        for i, c in enumerate(self.classes):
            if c.name == name:
                return i
        raise StructuralError(f"no class named {name!r}")

    def q_exponent(self, beta):
        """Exponents (beta, T_i) of the q variables."""
        return tuple(sum(b * row[a] for b, row in zip(beta, self.beta_pairing)) for a in range(len(self.h2)))

    def c1_beta(self, beta):
        return sum((r * e for r, e in zip(self.c1, self.q_exponent(beta))), Q(0))

    def beta_from_exponent(self, e):
        if not self.mori_rank:
            raise StructuralError("model has no curve classes")
        a = [[Q(self.beta_pairing[s][i]) for s in range(self.mori_rank)] for i in range(len(self.h2))]
        x = linalg.solve(a, [Q(v) for v in e])
        if x is None or any(v.denominator != 1 or v < 0 for v in x):
            raise StructuralError(f"q exponent {e} is not the image of an effective class")
        return tuple(int(v) for v in x)

    def triple(self, i, j, k):
        """Classical intersection number of T_i, T_j, T_k."""
        return sum((self.cup[i][j][l] * self.pairing[l][k] for l in range(self.n)), Q(0))

    # serialization ------------------------------------------------------

    def to_json(self):
        n = self.n
        cup = []
        for i in range(n):
            for j in range(i, n):
                for k in range(n):
                    if self.cup[i][j][k]:
                        cup.append([self.classes[i].name, self.classes[j].name, self.classes[k].name, rational_str(self.cup[i][j][k])])
        return {
            "dimX": self.dimX,
            "classes": [{"name": c.name, "deg": c.deg, "h2": c.h2} for c in self.classes],
            "cup": cup,
            "pairing": [[rational_str(x) for x in row] for row in self.pairing],
            "c1": [rational_str(x) for x in self.c1],
            "mori_rank": self.mori_rank,
            "beta_pairing": self.beta_pairing,
        }

    @classmethod
    def from_json(cls, obj, path=""):
        try:
            classes = []
            for i, c in enumerate(obj["classes"]):
                if not isinstance(c.get("deg"), int):
                    raise InputError(f"{path}/classes/{i}/deg", "degree must be an integer")
                classes.append(CohClass(str(c["name"]), c["deg"], bool(c.get("h2", c["deg"] == 2))))
            n = len(classes)
            names = {c.name: i for i, c in enumerate(classes)}

            def idx(x, p):
                if isinstance(x, int) and 0 <= x < n:
                    return x
                if x in names:
                    return names[x]
                raise InputError(p, f"unknown class {x!r}")

            cup = [[[Q(0)] * n for _ in range(n)] for _ in range(n)]
            for t, trip in enumerate(obj.get("cup", [])):
                p = f"{path}/cup/{t}"
                if len(trip) != 4:
                    raise InputError(p, "cup entries are [i, j, k, value]")
                i, j, k = (idx(x, p) for x in trip[:3])
                v = _rat(trip[3], p + "/3")
                for a, b in ((i, j), (j, i)):
                    if cup[a][b][k] and cup[a][b][k] != v:
                        raise InputError(p, f"conflicting cup constants for ({i},{j},{k})")
                    cup[a][b][k] = v
            for i in range(n):
                if not any(cup[0][i]):
                    cup[0][i][i] = cup[i][0][i] = Q(1)
            pairing = [[_rat(x, f"{path}/pairing/{i}/{j}") for j, x in enumerate(row)] for i, row in enumerate(obj["pairing"])]
            for i in range(n):
                for j in range(n):
                    if pairing[i][j] and classes[i].deg + classes[j].deg != 2 * obj["dimX"]:
                        raise InputError(f"{path}/pairing/{i}/{j}", f"nonzero pairing between classes of degree {classes[i].deg} and {classes[j].deg}")
            c1 = [_rat(x, f"{path}/c1/{i}") for i, x in enumerate(obj["c1"])]
            beta = obj.get("beta_pairing")
            h2 = [i for i, c in enumerate(classes) if c.h2]
            if beta is None:
                beta = [[1 if a == s else 0 for a in range(len(h2))] for s in range(len(h2))]
            elif beta and len(beta[0]) == n and n != len(h2):
                beta = [[row[i] for i in h2] for row in beta]
            for s, row in enumerate(beta):
                for a, x in enumerate(row):
                    if not isinstance(x, int) or x < 0:
                        raise InputError(f"{path}/beta_pairing/{s}/{a}", "entries must be nonnegative integers")
            return cls(obj["dimX"], classes, cup, pairing, c1, obj.get("mori_rank", len(beta)), beta)
        except KeyError as exc:
            raise InputError(path, f"missing key {exc}") from None
        except StructuralError as exc:
            raise InputError(path, str(exc)) from None


def _rat(x, path):
    try:
        return rational(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(path, f"not a rational: {x!r} ({exc})") from None


# --------------------------------------------------------------------------
# invariant tables


def _canon(beta, insertions):
    return tuple(int(b) for b in beta), tuple(sorted(int(i) for i in insertions))


@dataclass
class GWTable:
    """Invariants <I_{0,n,beta}>(T_{k_1} ... T_{k_n}) with every insertion of degree >= 4."""

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {_canon(b, ins): rational(v) for (b, ins), v in self.entries.items()}

    def get(self, beta, insertions=()):
        return self.entries.get(_canon(beta, insertions), Q(0))

    def set(self, beta, insertions, value):
        self.entries[_canon(beta, insertions)] = rational(value)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return _canon(*key) in self.entries

    def __eq__(self, other):
        if not isinstance(other, GWTable):
            return NotImplemented
        return {k: v for k, v in self.entries.items() if v} == {k: v for k, v in other.entries.items() if v}

    def items(self):
        return sorted(self.entries.items())

    def validate(self, model: CohModel):
        bad = []
        for (beta, ins), v in self.items():
            if len(beta) != model.mori_rank or not any(beta) or any(b < 0 for b in beta):
                bad.append((beta, ins, "beta must be a nonzero effective class"))
            elif any(not 0 <= i < model.n or model.classes[i].deg < 4 for i in ins):
                bad.append((beta, ins, "insertions must be classes of degree >= 4"))
            elif v and not admissible(model, beta, ins):
                bad.append((beta, ins, "violates the dimension constraint"))
        return bad

    def to_json(self, model: CohModel):
        out = []
        for (beta, ins), v in self.items():
            counts = {}
            for i in ins:
                counts[model.classes[i].name] = counts.get(model.classes[i].name, 0) + 1
            out.append({"beta": list(beta), "insertions": dict(sorted(counts.items())), "value": rational_str(v)})
        return out

    @classmethod
    def from_json(cls, obj, model: CohModel, path=""):
        if not isinstance(obj, list):
            raise InputError(path, "a GW table is a list of entries")
        t = cls()
        for e, item in enumerate(obj):
            p = f"{path}/{e}"
            try:
                beta = item["beta"]
                if not isinstance(beta, list) or len(beta) != model.mori_rank or any(not isinstance(b, int) or b < 0 for b in beta):
                    raise InputError(f"{p}/beta", f"beta must be {model.mori_rank} nonnegative integers")
                if not any(beta):
                    raise InputError(f"{p}/beta", "beta = 0 belongs to the classical part")
                ins = []
                for name, j in item.get("insertions", {}).items():
                    try:
                        k = model.index(name)
                    except StructuralError:
                        raise InputError(f"{p}/insertions/{name}", "unknown class") from None
                    if model.classes[k].deg < 4:
                        raise InputError(f"{p}/insertions/{name}", "insertions of degree 0 or 2 are removed by the fundamental class and divisor axioms")
                    if not isinstance(j, int) or j < 0:
                        raise InputError(f"{p}/insertions/{name}", "multiplicity must be a nonnegative integer")
                    ins += [k] * j
                v = _rat(item["value"], f"{p}/value")
            except KeyError as exc:
                raise InputError(p, f"missing key {exc}") from None
            if (beta, ins) in t:
                raise InputError(p, "duplicate entry")
            t.set(beta, ins, v)
        return t


def admissible(model: CohModel, beta, insertions) -> bool:
    """Dimension constraint: half the total insertion degree equals
    dim X + c_1(beta) + n - 3."""
    degs = [model.classes[i].deg for i in insertions]
    return Q(sum(degs), 2) == model.dimX + model.c1_beta(beta) + len(degs) - 3


def admissible_insertions(model: CohModel, beta):
    """All sorted insertion multisets of degree >= 4 classes allowed for beta."""
    budget = model.dimX + model.c1_beta(beta) - 3
    if budget < 0 or budget.denominator != 1:
        return []
    budget = int(budget)
    others = model.others
    out = []

    def rec(pos, left, acc):
        if pos == len(others):
            if left == 0:
                out.append(tuple(acc))
            return
        k = others[pos]
        w = model.classes[k].deg // 2 - 1
        for j in range(left // w + 1):
            rec(pos + 1, left - j * w, acc + [k] * j)

    rec(0, budget, [])
    return sorted(out, key=lambda ins: (len(ins), ins))


def effective_classes(model: CohModel, max_degree):
    """Nonzero beta with total degree <= max_degree (int) or componentwise <=
    max_degree (list)."""
    r = model.mori_rank
    if isinstance(max_degree, int):
        caps = [max_degree] * r
        total = max_degree
    else:
        caps = [int(x) for x in max_degree]
        total = sum(caps)
    out = [b for b in iproduct(*[range(c + 1) for c in caps]) if any(b) and sum(b) <= total]
    return sorted(out, key=lambda b: (model.c1_beta(b), sum(model.q_exponent(b)), b))


# --------------------------------------------------------------------------
# potentials


@dataclass
class PotentialSeries:
    model: CohModel
    quantum: TruncatedSeries

    @property
    def vars(self):
        return self.quantum.vars

    @property
    def bounds(self):
        return self.quantum.bounds

    def classical_terms(self):
        """Coefficients of t_i t_j t_k (i <= j <= k) in (1/6) int gamma^3."""
        m = self.model
        out = {}
        for i in range(m.n):
            for j in range(i, m.n):
                for k in range(j, m.n):
                    v = m.triple(i, j, k)
                    if v:
                        mult = len({(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)})
                        out[(i, j, k)] = v * mult / 6
        return out

    def to_json(self):
        return {
            "classical": [{"t": list(k), "c": rational_str(v)} for k, v in sorted(self.classical_terms().items())],
            "quantum": self.quantum.to_json(),
        }


def default_bounds(model: CohModel, max_degree):
    """q bounds covering beta up to max_degree and t bounds covering every
    admissible monomial there, plus three so that third derivatives keep them."""
    betas = effective_classes(model, max_degree)
    qb = [0] * len(model.h2)
    budget = model.dimX - 3
    for b in betas:
        for a, e in enumerate(model.q_exponent(b)):
            qb[a] = max(qb[a], e)
        budget = max(budget, model.dimX + model.c1_beta(b) - 3)
    out = {}
    for a, i in enumerate(model.h2):
        out[model.var_name(i)] = qb[a]
    for k in model.others:
        out[model.var_name(k)] = int(max(budget, 0) // (model.classes[k].deg // 2 - 1)) + 3
    return out


def _bounds_tuple(model, bounds):
    vars = model.vars
    if isinstance(bounds, dict):
        missing = [v for v in vars.names if v not in bounds]
        if missing:
            raise StructuralError(f"missing bounds for {missing}")
        return tuple(int(bounds[v]) for v in vars.names)
    bounds = tuple(int(b) for b in bounds)
    if len(bounds) != len(vars):
        raise StructuralError("one bound per variable is required")
    return bounds


def potential_assemble(model: CohModel, gw: GWTable, bounds) -> PotentialSeries:
    """Divisor normal form sum of q^{(beta,T)} <I>(T^j) t^j / j!.  Entries beyond
    the bounds are dropped."""
    bad = gw.validate(model)
    if bad:
        raise StructuralError("inadmissible entries: " + "; ".join(f"beta={b} insertions={i}: {why}" for b, i, why in bad))
    vars = model.vars
    bounds = _bounds_tuple(model, bounds)
    pos = {k: vars.index(model.var_name(k)) for k in model.others}
    hpos = [vars.index(model.var_name(i)) for i in model.h2]
    coeffs = {}
    for (beta, ins), v in gw.items():
        if not v:
            continue
        e = [0] * len(vars)
        for a, x in zip(hpos, model.q_exponent(beta)):
            e[a] = x
        denom = 1
        for k in set(ins):
            j = ins.count(k)
            e[pos[k]] = j
            denom *= factorial(j)
        if all(x <= b for x, b in zip(e, bounds)):
            e = tuple(e)
            coeffs[e] = coeffs.get(e, 0) + v / denom
    return PotentialSeries(model, TruncatedSeries(vars, bounds, coeffs))


def extract_invariants(phi: PotentialSeries) -> GWTable:
    """Read <I> = j! * coefficient of q^{(beta,T)} t^j."""
    m = phi.model
    hpos = [phi.vars.index(m.var_name(i)) for i in m.h2]
    opos = [(k, phi.vars.index(m.var_name(k))) for k in m.others]
    t = GWTable()
    for e, c in phi.quantum.terms():
        beta = m.beta_from_exponent([e[a] for a in hpos])
        ins = []
        mult = 1
        for k, p in opos:
            ins += [k] * e[p]
            mult *= factorial(e[p])
        t.set(beta, ins, c * mult)
    return t


# --------------------------------------------------------------------------
# derivatives and products


def _derive(f, model, i):
    """Derivative along d/dt_i in the chart q = e^t."""
    if i == 0:
        return f.zero_like()
    name = model.var_name(i)
    if model.classes[i].h2:
        return f.log_derivative(name)
    return f.partial_derivative(name)


def product_bounds(phi: PotentialSeries):
    """Bounds of the third derivatives: three orders are lost in each t."""
    out = []
    for name, b in zip(phi.vars.names, phi.bounds):
        if phi.vars.cls(name) == "hol":
            if b < 3:
                raise StructuralError(f"bound of {name} must be at least 3 to form third derivatives")
            b -= 3
        out.append(b)
    return tuple(out)


def third_derivatives(phi: PotentialSeries):
    """Phi_ijk for i <= j <= k, classical plus quantum, as series."""
    m = phi.model
    b = product_bounds(phi)
    n = m.n
    first = {i: _derive(phi.quantum, m, i) for i in range(n)}
    second = {}
    out = {}
    for i in range(n):
        for j in range(i, n):
            second[(i, j)] = _derive(first[i], m, j)
            for k in range(j, n):
                s = _derive(second[(i, j)], m, k).truncate(b) if i and j and k else TruncatedSeries.zero(phi.vars, b)
                c = m.triple(i, j, k)
                out[(i, j, k)] = s + s.const_like(c) if c else s
    return out


def _sorted3(i, j, k):
    return tuple(sorted((i, j, k)))


def product_tensor(phi: PotentialSeries):
    """a[i][j][k] with T_i * T_j = sum_k a[i][j][k] T_k."""
    m = phi.model
    n = m.n
    d3 = third_derivatives(phi)
    zero = next(iter(d3.values())).zero_like()
    a = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                s = zero
                for l in range(n):
                    g = m.ginv[l][k]
                    if g:
                        s = s + d3[_sorted3(i, j, l)].scale(g)
                a[i][j][k] = a[j][i][k] = s
    return a


def quantum_product(model: CohModel, phi: PotentialSeries):
    """Matrices of T_i * (.): entry (k, j) is the T_k coefficient of T_i * T_j."""
    if phi.model is not model and phi.model.to_json() != model.to_json():
        raise StructuralError("potential belongs to a different model")
    a = product_tensor(phi)
    n = model.n
    return [MatrixSeries([[a[i][j][k] for j in range(n)] for k in range(n)]) for i in range(n)]


def frobenius_symmetry(model: CohModel, mats):
    """g(T_i * T_j, T_k) must be totally symmetric; returns the defects."""
    n = model.n
    val = {}
    for i, j, k in iproduct(range(n), repeat=3):
        s = mats[i][0, 0].zero_like()
        for l in range(n):
            g = model.pairing[l][k]
            if g:
                s = s + mats[i][l, j].scale(g)
        val[(i, j, k)] = s
    bad = []
    for (i, j, k), s in val.items():
        for p in ((j, i, k), (i, k, j), (k, j, i)):
            if val[p] != s:
                bad.append(((i, j, k), p))
    return bad


def wdvv_residual(model: CohModel, phi: PotentialSeries):
    """Associator of the quantum product.  By commutativity
    (T_i*T_j)*T_k - T_i*(T_j*T_k) = [A_k, A_i] T_j, so the result maps
    (i, k) with i < k to the commutator [A_k, A_i]; its column j is the
    associator for (i, j, k)."""
    mats = quantum_product(model, phi)
    n = model.n
    return {(i, k): commutator(mats[k], mats[i]) for i in range(n) for k in range(i + 1, n)}


def wdvv_report(model: CohModel, phi: PotentialSeries) -> ConditionReport:
    rep = ConditionReport()
    for (i, k), r in wdvv_residual(model, phi).items():
        rep.add(f"wdvv[{model.classes[i].name},{model.classes[k].name}]", r)
    return rep


def residual_order(res: dict, model: CohModel):
    """Smallest total q-degree carrying a nonzero associator term, or None."""
    m = model
    best = None
    for r in res.values():
        vars = r.rows[0][0].vars
        hpos = [vars.index(m.var_name(i)) for i in m.h2]
        for row in r.rows:
            for x in row:
                for e in x.coeffs:
                    d = sum(e[a] for a in hpos)
                    best = d if best is None else min(best, d)
    return best


# --------------------------------------------------------------------------
# Euler grading


def euler_weights(model: CohModel):
    """Weight of each variable under E = sum (1 - deg/2) t d/dt + sum r^j q_j d/dq_j."""
    out = {}
    for a, i in enumerate(model.h2):
        out[model.var_name(i)] = model.c1[a]
    for k in model.others:
        out[model.var_name(k)] = Q(2 - model.classes[k].deg, 2)
    return out


def apply_euler(model: CohModel, f: TruncatedSeries):
    w = euler_weights(model)
    out = f.zero_like()
    for name in f.vars.names:
        if w[name]:
            out = out + f.euler_derivative(name).scale(w[name])
    return out


def euler_check(model: CohModel, phi: PotentialSeries) -> ConditionReport:
    rep = ConditionReport()
    target = 3 - model.dimX
    w = euler_weights(model)
    names = phi.vars.names
    bad = {}
    weights = []
    for e, c in phi.quantum.terms():
        wt = sum((w[nm] * x for nm, x in zip(names, e)), Q(0))
        if wt != target:
            bad[e] = c
            weights.append(f"{e}: {wt}")
    detail = f"expected weight {target}" + (", found " + "; ".join(weights[:5]) if weights else "")
    rep.add("euler_quantum", phi.quantum.like(bad), detail=detail)
    m = model
    for (i, j, k), s in third_derivatives(phi).items():
        degs = m.classes[i].deg + m.classes[j].deg + m.classes[k].deg
        lam = Q(degs, 2) - m.dimX
        rep.add(f"euler_third[{i},{j},{k}]", apply_euler(m, s) - s.scale(lam))
    return rep


# --------------------------------------------------------------------------
# reconstruction


def generates(model: CohModel, W):
    """Whether the classes in W generate the cup-product algebra."""
    n = model.n
    gens = [model.index(x) for x in W]
    e0 = [Q(1)] + [Q(0)] * (n - 1)
    span = linalg.span([e0])
    frontier = [e0]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = [sum((v[i] * model.cup[g][i][k] for i in range(n)), Q(0)) for k in range(n)]
                if any(w) and not linalg.contains(span, w):
                    span = linalg.span(span + [w])
                    nxt.append(w)
        frontier = nxt
    return len(span) == n


def _layer_vector(res, model, qexp):
    """Coefficients of q^qexp in all associator entries, keyed canonically."""
    out = {}
    for key, r in res.items():
        vars = r.rows[0][0].vars
        hpos = [vars.index(model.var_name(i)) for i in model.h2]
        for a, row in enumerate(r.rows):
            for b, x in enumerate(row):
                for e, c in x.coeffs.items():
                    if tuple(e[p] for p in hpos) == qexp:
                        out[(key, a, b, e)] = c
    return out


def reconstruct(model: CohModel, seed: GWTable, W, max_degree) -> GWTable:
    """Fill in every admissible invariant with beta up to max_degree from the
    seed by solving the associativity equations one curve class at a time.
    Within a class all unknown invariants are solved for jointly; they enter the
    q^beta coefficients of the associator linearly."""
    W = [model.index(x) for x in W]
    if not generates(model, W):
        raise GenerationFailure(0, 0, model.n)
    bad = seed.validate(model)
    if bad:
        raise StructuralError("inadmissible seed entries: " + "; ".join(f"beta={b} insertions={i}" for b, i, _ in bad))
    table = GWTable(dict(seed.entries))
    nonw = lambda ins: sum(1 for i in ins if i not in W)
    for beta in effective_classes(model, max_degree):
        qexp = model.q_exponent(beta)
        unknown = [ins for ins in admissible_insertions(model, beta) if (beta, ins) not in table]
        unknown.sort(key=lambda ins: (nonw(ins), ins))
        bounds = _local_bounds(model, beta)
        base = table
        for ins in unknown:
            base.set(beta, ins, 0)
        r0 = _layer_vector(wdvv_residual(model, potential_assemble(model, base, bounds)), model, qexp)
        cols = []
        for ins in unknown:
            base.set(beta, ins, 1)
            r = _layer_vector(wdvv_residual(model, potential_assemble(model, base, bounds)), model, qexp)
            base.set(beta, ins, 0)
            cols.append({k: r.get(k, 0) - r0.get(k, 0) for k in set(r) | set(r0)})
        keys = sorted(set(r0).union(*[set(c) for c in cols]))
        if not keys:
            continue
        a = [[c.get(k, Q(0)) for c in cols] for k in keys]
        rhs = [-r0.get(k, Q(0)) for k in keys]
        if not unknown:
            if any(rhs):
                raise Inconsistent(f"seed violates associativity at beta={beta}")
            continue
        red, piv = linalg.rref([row + [v] for row, v in zip(a, rhs)])
        if len(unknown) in piv:
            raise Inconsistent(f"seed violates associativity at beta={beta}")
        if len(piv) < len(unknown):
            free = [c for c in range(len(unknown)) if c not in piv]
            raise Underdetermined(f"invariant beta={beta} insertions={unknown[free[0]]} is not pinned by associativity")
        for row, c in zip(red, piv):
            table.set(beta, unknown[c], row[-1])
    return table


def _local_bounds(model, beta):
    """Bounds seeing exactly the q-exponents <= that of beta."""
    b = default_bounds(model, list(beta))
    for a, i in enumerate(model.h2):
        b[model.var_name(i)] = model.q_exponent(beta)[a]
    return b


# --------------------------------------------------------------------------
# restriction to a Frobenius type structure


def qc_to_fts(model: CohModel, phi: PotentialSeries, W, t0_bound=1) -> FTSData:
    """Restrict the quantum product to the coordinates of W (the others set to
    zero) and package it as a Frobenius type structure on the full cohomology
    bundle: Higgs field -(T_a *), U = E *, V = diag((dim X - deg)/2), g the
    Poincare pairing, xi = T_0 and w = d = dim X."""
    W = sorted({model.index(x) for x in W})
    n = model.n
    mats = quantum_product(model, phi)
    drop = [model.var_name(k) for k in model.others if k not in W]
    mats = [m.set_zero(drop) for m in mats]
    vars = mats[0].rows[0][0].vars
    bounds = mats[0].rows[0][0].bounds
    if 0 in W:
        vars = VariableSet(("t0",) + vars.names, ("hol",) + vars.classes)
        bounds = (int(t0_bound),) + bounds
        mats = [m.embed(vars, bounds) for m in mats]
    names = [model.var_name(i) for i in W]
    order = [vars.index(nm) for nm in names]
    if order != sorted(order):
        raise StructuralError("unexpected variable order")
    one = TruncatedSeries.one(vars, bounds)
    zero = MatrixSeries.zero(n, n, vars, bounds)
    higgs = [-mats[i] for i in W]
    euler = [zero[0, 0]] * n
    if 0 in W:
        euler[0] = TruncatedSeries.variable("t0", vars, bounds)
    for a, i in enumerate(model.h2):
        euler[i] = one.scale(model.c1[a])
    for k in model.others:
        if k in W:
            euler[k] = TruncatedSeries.variable(model.var_name(k), vars, bounds).scale(Q(2 - model.classes[k].deg, 2))
    U = zero
    for i in range(n):
        if euler[i].coeffs:
            U = U + mats[i].map(lambda x, e=euler[i]: x * e)
    V = MatrixSeries.from_constant([[Q(model.dimX - model.classes[i].deg, 2) if i == j else Q(0) for j in range(n)] for i in range(n)], vars, bounds)
    G = MatrixSeries.from_constant(model.pairing, vars, bounds)
    xi = [one if i == 0 else zero[0, 0] for i in range(n)]
    return FTSData(vars, bounds, [zero] * len(W), higgs, U, V, G, xi, model.dimX, model.dimX)
