"""Connection forms with logarithmic poles and condition reports.

A :class:`ConnectionForm` stores the z-expanded matrix-valued 1-form

    Omega = sum_a (A_a + C_a / z) theta_a + (U / z + V) dz / z

where theta_a = dt_a / t_a for logarithmic variables and dt_a for holomorphic and
unfolding variables.  Acting on column vectors of a frame v, the covariant
derivative is  nabla_X (v s) = v (X s + Omega(X) s).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError, StructuralError
from .numbers import scalar_from_json, scalar_to_json
from .series import MatrixSeries, TruncatedSeries, VariableSet, commutator, common_bounds

# --------------------------------------------------------------------------
# reports


@dataclass
class Condition:
    id: str
    passed: bool
    residual: object = None
    detail: str = ""

    def nonzero_terms(self):
        return _count_terms(self.residual)

    def to_json(self):
        out = {"condition": self.id, "pass": self.passed, "residual_nonzero_terms": self.nonzero_terms()}
        if self.detail:
            out["detail"] = self.detail
        if not self.passed and isinstance(self.residual, (MatrixSeries, TruncatedSeries)):
            out["sample"] = _sample(self.residual)
        return out


def _count_terms(r):
    if r is None:
        return 0
    if isinstance(r, TruncatedSeries):
        return len(r.coeffs)
    if isinstance(r, MatrixSeries):
        return sum(len(x.coeffs) for row in r.rows for x in row)
    if isinstance(r, (list, tuple)):
        return sum(_count_terms(x) for x in r)
    return 0 if not r else 1


def _sample(r, limit=3):
    out = []
    if isinstance(r, TruncatedSeries):
        r = MatrixSeries([[r]])
    for i, row in enumerate(r.rows):
        for j, x in enumerate(row):
            for e, c in x.terms():
                out.append({"entry": [i, j], "e": list(e), "c": scalar_to_json(c)})
                if len(out) >= limit:
                    return out
    return out


@dataclass
class ConditionReport:
    conditions: list = field(default_factory=list)

    def add(self, id, residual=None, passed=None, detail=""):
        if passed is None:
            passed = _count_terms(residual) == 0
        self.conditions.append(Condition(id, bool(passed), residual, detail))
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def failures(self):
        return [c for c in self.conditions if not c.passed]

    def __getitem__(self, id):
        for c in self.conditions:
            if c.id == id:
                return c
        raise KeyError(id)

    def ids(self):
        return [c.id for c in self.conditions]

    def to_json(self):
        return {"pass": self.passed, "conditions": [c.to_json() for c in self.conditions]}

    def format(self):
        lines = []
        width = max((len(c.id) for c in self.conditions), default=0)
        for c in self.conditions:
            status = "ok" if c.passed else "FAIL"
            extra = f"  {c.detail}" if c.detail else ""
            if not c.passed and c.nonzero_terms():
                extra += f"  ({c.nonzero_terms()} nonzero terms)"
            lines.append(f"{c.id.ljust(width)}  {status}{extra}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# helpers over frames of logarithmic vector fields


def vf(x, name, vars):
    """Apply the frame field of ``name``: t d/dt for log variables, d/dt otherwise."""
    if vars.cls(name) == "log":
        return x.euler_derivative(name)
    return x.partial_derivative(name)


def vf_padded(x, name, vars):
    if vars.cls(name) == "log":
        return x.euler_derivative(name)
    return x.partial_derivative_padded(name)


def msum(*terms):
    """Sum of series or matrix series after truncating to the common bounds."""
    terms = [t for t in terms if t is not None]
    b = common_bounds(*terms)
    out = terms[0].truncate(b)
    for t in terms[1:]:
        out = out + t.truncate(b)
    return out


# --------------------------------------------------------------------------
# matrix JSON: rows of entries; an entry is a scalar literal or a list of terms


def matrix_to_json(m: MatrixSeries):
    rows = []
    for r in m.rows:
        row = []
        for x in r:
            t = x.terms()
            if not t:
                row.append("0")
            elif len(t) == 1 and not any(t[0][0]):
                row.append(scalar_to_json(t[0][1]))
            else:
                row.append([{"e": list(e), "c": scalar_to_json(c)} for e, c in t])
        rows.append(row)
    return rows


def matrix_from_json(obj, vars, bounds, path=""):
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError(path, "matrix must be a non-empty list of rows")
    width = len(obj[0])
    rows = []
    for i, r in enumerate(obj):
        if len(r) != width:
            raise InputError(f"{path}/{i}", "ragged matrix row")
        row = []
        for j, x in enumerate(r):
            p = f"{path}/{i}/{j}"
            try:
                if isinstance(x, list):
                    coeffs = {}
                    for k, t in enumerate(x):
                        e = tuple(t["e"])
                        if len(e) != len(vars):
                            raise InputError(f"{p}/{k}/e", f"expected {len(vars)} exponents")
                        coeffs[e] = coeffs.get(e, 0) + scalar_from_json(t["c"])
                    row.append(TruncatedSeries(vars, bounds, coeffs))
                else:
                    row.append(TruncatedSeries.constant(scalar_from_json(x), vars, bounds))
            except InputError:
                raise
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise InputError(p, f"bad matrix entry: {exc}") from None
        rows.append(row)
    return MatrixSeries(rows)


def vector_from_json(obj, vars, bounds, path=""):
    m = matrix_from_json([[x] for x in obj], vars, bounds, path)
    return m.column(0)


def vector_to_json(vec):
    return [r[0] for r in matrix_to_json(MatrixSeries([[x] for x in vec]))]


def vars_from_json(obj, path=""):
    try:
        return VariableSet(tuple(obj["vars"]), tuple(obj["classes"])), tuple(int(b) for b in obj["bounds"])
    except KeyError as exc:
        raise InputError(path, f"missing key {exc}") from None
    except StructuralError as exc:
        raise InputError(path, str(exc)) from None


# --------------------------------------------------------------------------


@dataclass
class ConnectionForm:
    """Per-variable matrices A_a (z^0 part) and C_a (z^-1 part), plus U and V.

    For holomorphic and unfolding variables A_a is normally zero; it is kept so
    that gauge transformations and the generic curvature stay exact.  The
    unfolding-variable entries of ``C`` are the matrices F_alpha."""

    vars: VariableSet
    bounds: tuple
    A: list
    C: list
    U: MatrixSeries
    V: MatrixSeries

    def __post_init__(self):
        self.bounds = tuple(self.bounds)
        if "z" in self.vars.classes:
            raise StructuralError("connection matrices must not depend on z")
        if len(self.A) != len(self.vars) or len(self.C) != len(self.vars):
            raise StructuralError("one A and one C matrix per variable are required")
        for m in list(self.A) + list(self.C) + [self.U, self.V]:
            if m.vars != self.vars or m.bounds != self.bounds:
                raise StructuralError("all matrices must share the form's ring")
        n = self.U.shape[0]
        for m in list(self.A) + list(self.C) + [self.U, self.V]:
            if m.shape != (n, n):
                raise StructuralError("all matrices must be square of the same rank")

    @property
    def rank(self):
        return self.U.shape[0]

    def index(self, name):
        return self.vars.index(name)

    def Amat(self, name):
        return self.A[self.vars.index(name)]

    def Cmat(self, name):
        return self.C[self.vars.index(name)]

    @property
    def Alog(self):
        return [a for a, c in zip(self.A, self.vars.classes) if c == "log"]

    @property
    def Clog(self):
        return [a for a, c in zip(self.C, self.vars.classes) if c == "log"]

    @property
    def Chol(self):
        return [a for a, c in zip(self.C, self.vars.classes) if c == "hol"]

    @property
    def Funf(self):
        return [a for a, c in zip(self.C, self.vars.classes) if c == "unfold"]

    def map(self, f, vars=None, bounds=None):
        A = [f(a) for a in self.A]
        C = [f(c) for c in self.C]
        U, V = f(self.U), f(self.V)
        return ConnectionForm(vars or U.vars, bounds or U.bounds, A, C, U, V)

    def truncate(self, bounds):
        bounds = tuple(bounds)
        return self.map(lambda m: m.truncate(bounds), self.vars, bounds)

    def set_zero(self, names):
        keep = [i for i, n in enumerate(self.vars.names) if n not in names]
        vars = self.vars.without(names)
        bounds = tuple(self.bounds[i] for i in keep)
        return ConnectionForm(
            vars,
            bounds,
            [self.A[i].set_zero(names) for i in keep],
            [self.C[i].set_zero(names) for i in keep],
            self.U.set_zero(names),
            self.V.set_zero(names),
        )

    def __eq__(self, other):
        if not isinstance(other, ConnectionForm):
            return NotImplemented
        if self.vars != other.vars or self.bounds != other.bounds:
            return False
        pairs = list(zip(self.A, other.A)) + list(zip(self.C, other.C)) + [(self.U, other.U), (self.V, other.V)]
        return all(a == b for a, b in pairs)

    __hash__ = None

    def to_json(self):
        return {
            "rank": self.rank,
            "vars": list(self.vars.names),
            "classes": list(self.vars.classes),
            "bounds": list(self.bounds),
            "A": {n: matrix_to_json(a) for n, a in zip(self.vars.names, self.A) if not a.is_zero()},
            "C": {n: matrix_to_json(c) for n, c in zip(self.vars.names, self.C)},
            "U": matrix_to_json(self.U),
            "V": matrix_to_json(self.V),
        }

    @classmethod
    def from_json(cls, obj, path=""):
        vars, bounds = vars_from_json(obj, path)
        if "z" in vars.classes:
            raise InputError(f"{path}/classes", "connection matrices must not depend on z")
        n = obj.get("rank")
        try:
            U = matrix_from_json(obj["U"], vars, bounds, f"{path}/U")
            V = matrix_from_json(obj["V"], vars, bounds, f"{path}/V")
        except KeyError as exc:
            raise InputError(path, f"missing key {exc}") from None
        n = n or U.shape[0]
        zero = MatrixSeries.zero(n, n, vars, bounds)
        A, C = [], []
        Aj, Cj = obj.get("A", {}), obj.get("C", {})
        for k in list(Aj) + list(Cj):
            if k not in vars.names:
                raise InputError(f"{path}/{'A' if k in Aj else 'C'}/{k}", "unknown variable")
        for name in vars.names:
            A.append(matrix_from_json(Aj[name], vars, bounds, f"{path}/A/{name}") if name in Aj else zero)
            C.append(matrix_from_json(Cj[name], vars, bounds, f"{path}/C/{name}") if name in Cj else zero)
        try:
            return cls(vars, bounds, A, C, U, V)
        except StructuralError as exc:
            raise InputError(path, str(exc)) from None


def _label_z0(ca, cb):
    kinds = {ca, cb}
    if kinds == {"log"}:
        return "z0[log,log]"
    if "unfold" in kinds:
        return "z0[unfold]"
    return "z0[base]"


_ORDER = ["log", "hol", "unfold"]


def _label_zm1(ca, cb):
    a, b = sorted((ca, cb), key=_ORDER.index)
    return f"z-1[{a},{b}]"


def _label_zm2(ca, cb):
    n = (ca == "unfold") + (cb == "unfold")
    return ("z-2[base]", "z-2[mixed]", "z-2[unfold]")[n]


FLATNESS_LABELS = (
    ["z0[base]", "z0[unfold]", "z0[log,log]", "z-2[base]", "z-2[mixed]", "z-2[unfold]"]
    + [f"z-1[{a},{b}]" for i, a in enumerate(_ORDER) for b in _ORDER[i:]]
    + ["UC[base]", "UC[unfold]"]
    + [f"U[{k}]" for k in _ORDER]
    + [f"V[{k}]" for k in _ORDER]
)


def flatness_residuals(omega: ConnectionForm) -> ConditionReport:
    """Curvature of Omega split by powers of z, one condition per kind of
    equation and pair of variable classes (20 conditions):

    z0[..]     X_a A_b - X_b A_a + [A_a, A_b]
    z-1[..]    X_a C_b - X_b C_a + [A_a, C_b] - [A_b, C_a]
    z-2[..]    [C_a, C_b]
    UC[..]     [U, C_a]
    U[..]      X_a U - [U, A_a] + C_a - [V, C_a]
    V[..]      X_a V - [V, A_a]
    """
    vars = omega.vars
    names = vars.names
    cls = vars.classes
    groups = {k: [] for k in FLATNESS_LABELS}
    A, C, U, V = omega.A, omega.C, omega.U, omega.V
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            na, nb = names[a], names[b]
            r0 = msum(vf(A[b], na, vars), -vf(A[a], nb, vars), commutator(A[a], A[b]))
            groups[_label_z0(cls[a], cls[b])].append(r0)
            r1 = msum(vf(C[b], na, vars), -vf(C[a], nb, vars), commutator(A[a], C[b]), -commutator(A[b], C[a]))
            groups[_label_zm1(cls[a], cls[b])].append(r1)
            groups[_label_zm2(cls[a], cls[b])].append(commutator(C[a], C[b]))
    for a, na in enumerate(names):
        k = cls[a]
        groups["UC[unfold]" if k == "unfold" else "UC[base]"].append(commutator(U, C[a]))
        r1 = msum(vf(U, na, vars), -commutator(U, A[a]), C[a], -commutator(V, C[a]))
        groups[f"U[{k}]"].append(r1)
        r0 = msum(vf(V, na, vars), -commutator(V, A[a]))
        groups[f"V[{k}]"].append(r0)
    report = ConditionReport()
    for label in FLATNESS_LABELS:
        res = groups[label]
        report.add(label, res, detail=f"{len(res)} instance(s)")
    return report


def first_column_residuals(omega: ConnectionForm, dfs: dict) -> ConditionReport:
    """(F_alpha)_{i1} - df_i/dy_alpha for each unfolding variable."""
    report = ConditionReport()
    for name, df in dfs.items():
        F = omega.Cmat(name)
        col = F.column(0)
        res = []
        for x, d in zip(col, df):
            if not isinstance(d, TruncatedSeries):
                d = TruncatedSeries.constant(d, omega.vars, omega.bounds)
            elif d.vars != omega.vars:
                tb = tuple(
                    min(b, d.bounds[d.vars.index(nm)]) if nm in d.vars.names else b
                    for nm, b in zip(omega.vars.names, omega.bounds)
                )
                d = d.set_zero([nm for nm in d.vars.names if nm not in omega.vars.names]).embed(omega.vars, tb)
            b = common_bounds(x, d)
            res.append(x.truncate(b) - d.truncate(b))
        report.add(f"first_column[{name}]", res)
    return report
