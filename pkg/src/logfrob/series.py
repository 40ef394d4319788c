"""Truncated multivariate power series and matrices of them.

A series lives in the ring Q[[x_1..x_r]] / (x_v^{b_v + 1}), described by a
:class:`VariableSet` and a tuple of per-variable exponent bounds.  Arithmetic
between series of different rings raises :class:`StructuralError`; narrowing a
series to smaller bounds is always explicit (:meth:`TruncatedSeries.truncate`).

Coefficients are gmpy2 rationals or :class:`GaussianRational`.  Zero
coefficients are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .errors import NotAUnit, StructuralError
from .numbers import GaussianRational, Q, rational, scalar_from_json, scalar_to_json, simplify

VAR_CLASSES = ("log", "hol", "unfold", "z")


@dataclass(frozen=True)
class VariableSet:
    names: tuple
    classes: tuple

    def __post_init__(self):
        names = tuple(self.names)
        classes = tuple(self.classes)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "classes", classes)
        if len(names) != len(classes):
            raise StructuralError("names and classes differ in length")
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        for c in classes:
            if c not in VAR_CLASSES:
                raise StructuralError(f"unknown variable class {c!r}")
        if classes.count("z") > 1:
            raise StructuralError("at most one z variable is allowed")

    @classmethod
    def of(cls, *pairs):
        """VariableSet.of(("t", "log"), ("y", "unfold"))"""
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def __len__(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise StructuralError(f"no variable named {name!r}") from None

    def cls(self, name):
        return self.classes[self.index(name)]

    def by_class(self, c):
        return [n for n, k in zip(self.names, self.classes) if k == c]

    def extend(self, *pairs):
        return VariableSet(self.names + tuple(p[0] for p in pairs), self.classes + tuple(p[1] for p in pairs))

    def without(self, names):
        keep = [i for i, n in enumerate(self.names) if n not in names]
        return VariableSet(tuple(self.names[i] for i in keep), tuple(self.classes[i] for i in keep))

    def reclassify(self, name, new_class):
        classes = list(self.classes)
        classes[self.index(name)] = new_class
        return VariableSet(self.names, tuple(classes))


def _coerce(c):
    if isinstance(c, GaussianRational):
        return simplify(c)
    return rational(c)


@lru_cache(maxsize=None)
def _layout(bounds):
    """Bit packing of exponent vectors with a guard bit per field.

    Field v holds an exponent e <= b_v in k_v bits (2^k_v > b_v) plus one guard
    bit.  For packed a, b the sum a + b + bias has a guard bit set exactly when
    some component of the exponent sum exceeds its bound."""
    shifts = []
    bias = 0
    guard = 0
    pos = 0
    widths = []
    for b in bounds:
        k = max(b, 0).bit_length()
        shifts.append(pos)
        widths.append(k)
        bias |= ((1 << k) - 1 - b) << pos
        guard |= 1 << (pos + k)
        pos += k + 1
    return tuple(shifts), tuple(widths), bias, guard


def _pack(e, shifts):
    key = 0
    for x, s in zip(e, shifts):
        key |= x << s
    return key


def _unpack(key, shifts, widths):
    return tuple((key >> s) & ((1 << (w + 1)) - 1) for s, w in zip(shifts, widths))


class TruncatedSeries:
    __slots__ = ("vars", "bounds", "coeffs")

    def __init__(self, vars: VariableSet, bounds, coeffs=None):
        bounds = tuple(int(b) for b in bounds)
        if len(bounds) != len(vars):
            raise StructuralError("one bound per variable is required")
        if any(b < 0 for b in bounds):
            raise StructuralError(f"negative bound in {bounds}")
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(bounds):
                raise StructuralError(f"exponent {e} has wrong length")
            if any(x < 0 for x in e):
                raise StructuralError(f"negative exponent {e}")
            if any(x > b for x, b in zip(e, bounds)):
                continue
            c = _coerce(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.vars = vars
        self.bounds = bounds
        self.coeffs = {e: c for e, c in clean.items() if c}

    @classmethod
    def _make(cls, vars, bounds, coeffs):
        s = object.__new__(cls)
        s.vars = vars
        s.bounds = bounds
        s.coeffs = coeffs
        return s

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars, bounds):
        return cls._make(vars, tuple(bounds), {})

    @classmethod
    def constant(cls, c, vars, bounds):
        c = _coerce(c)
        return cls._make(vars, tuple(bounds), {(0,) * len(vars): c} if c else {})

    @classmethod
    def one(cls, vars, bounds):
        return cls.constant(1, vars, bounds)

    @classmethod
    def monomial(cls, exps, c, vars, bounds):
        return cls(vars, bounds, {tuple(exps): c})

    @classmethod
    def variable(cls, name, vars, bounds):
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, bounds, {tuple(e): 1})

    def like(self, coeffs):
        return TruncatedSeries._make(self.vars, self.bounds, coeffs)

    def zero_like(self):
        return TruncatedSeries._make(self.vars, self.bounds, {})

    def const_like(self, c):
        return TruncatedSeries.constant(c, self.vars, self.bounds)

    # basic queries ------------------------------------------------------

    def same_ring(self, other):
        return self.vars == other.vars and self.bounds == other.bounds

    def _check(self, other):
        if not self.same_ring(other):
            raise StructuralError(
                f"series rings differ: {self.vars.names}{self.bounds} vs {other.vars.names}{other.bounds}"
            )

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coefficient(self, e):
        return self.coeffs.get(tuple(e), Q(0))

    def constant_term(self):
        return self.coeffs.get((0,) * len(self.bounds), Q(0))

    def terms(self):
        return sorted(self.coeffs.items())

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({self.vars.names}, {self.bounds}, {self.format()})"

    def format(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in self.terms():
            mono = "*".join(
                (n if x == 1 else f"{n}^{x}") for n, x in zip(self.vars.names, e) if x
            )
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(parts)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return self.coeffs == other.coeffs
        if isinstance(other, (int, GaussianRational)) or type(other) is type(Q(0)):
            return self.coeffs == ({(0,) * len(self.bounds): _coerce(other)} if other != 0 else {})
        return NotImplemented

    __hash__ = None

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + self.const_like(other)
        self._check(other)
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return self.like(out)

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + self.const_like(-_coerce(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _coerce(c)
        if not c:
            return self.zero_like()
        out = {}
        for e, x in self.coeffs.items():
            v = x * c
            if v:
                out[e] = v
        return self.like(out)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            if isinstance(other, MatrixSeries):
                return NotImplemented
            return self.scale(other)
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return self.zero_like()
        shifts, widths, bias, guard = _layout(self.bounds)
        pa = [(_pack(e, shifts), c) for e, c in self.coeffs.items()]
        pb = [(_pack(e, shifts), c) for e, c in other.coeffs.items()]
        if len(pa) > len(pb):
            pa, pb = pb, pa
        out = {}
        get = out.get
        for ka, ca in pa:
            base = ka + bias
            for kb, cb in pb:
                if (base + kb) & guard:
                    continue
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        res = {}
        for k, c in out.items():
            if c:
                res[_unpack(k, shifts, widths)] = c
        return self.like(res)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        out = self.const_like(1)
        for _ in range(k):
            out = out * self
        return out

    # calculus -----------------------------------------------------------

    def partial_derivative(self, name):
        """d/dv.  The bound in v decreases by one, since the top coefficient of the
        derivative is not determined by a truncated input."""
        i = self.vars.index(name)
        if self.bounds[i] == 0:
            raise StructuralError(f"cannot differentiate in {name}: bound is 0")
        bounds = list(self.bounds)
        bounds[i] -= 1
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return TruncatedSeries._make(self.vars, tuple(bounds), out)

    def partial_derivative_padded(self, name):
        """d/dv kept in the original ring.  The top v-coefficient is set to zero and
        is therefore not meaningful; callers track the loss of precision."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return self.like(out)

    def log_derivative(self, name):
        """v d/dv for a logarithmic variable; bounds are unchanged."""
        i = self.vars.index(name)
        if self.vars.classes[i] != "log":
            raise StructuralError(f"log_derivative needs a log variable, {name} is {self.vars.classes[i]}")
        return self.euler_derivative(name)

    def euler_derivative(self, name):
        """v d/dv for any variable (used for z d/dz)."""
        i = self.vars.index(name)
        return self.like({e: c * e[i] for e, c in self.coeffs.items() if e[i]})

    def integrate(self, name):
        """Formal antiderivative in v vanishing at v = 0; the bound grows by one."""
        i = self.vars.index(name)
        bounds = list(self.bounds)
        bounds[i] += 1
        out = {}
        for e, c in self.coeffs.items():
            f = list(e)
            f[i] += 1
            out[tuple(f)] = c * Q(1, e[i] + 1)
        return TruncatedSeries._make(self.vars, tuple(bounds), out)

    # ring changes -------------------------------------------------------

    def truncate(self, bounds):
        bounds = tuple(bounds)
        if len(bounds) != len(self.bounds) or any(b > c for b, c in zip(bounds, self.bounds)):
            raise StructuralError(f"cannot truncate {self.bounds} to larger bounds {bounds}")
        if bounds == self.bounds:
            return self
        out = {e: c for e, c in self.coeffs.items() if all(x <= b for x, b in zip(e, bounds))}
        return TruncatedSeries._make(self.vars, bounds, out)

    def with_bound(self, name, b):
        bounds = list(self.bounds)
        bounds[self.vars.index(name)] = b
        return self.truncate(bounds)

    def pad(self, bounds):
        """Reinterpret in a ring with bounds >= the current ones.  The new top
        coefficients are zero by fiat; only use when tracking precision."""
        bounds = tuple(bounds)
        if any(b < c for b, c in zip(bounds, self.bounds)):
            raise StructuralError("pad needs larger bounds")
        return TruncatedSeries._make(self.vars, bounds, dict(self.coeffs))

    def embed(self, vars: VariableSet, bounds):
        """Map into a ring whose variables contain ours; the shared variables must
        keep their bounds or shrink."""
        bounds = tuple(bounds)
        pos = [vars.index(n) for n in self.vars.names]
        for p, b in zip(pos, self.bounds):
            if bounds[p] > b:
                raise StructuralError(f"embedding would enlarge the bound of {vars.names[p]}")
        out = {}
        for e, c in self.coeffs.items():
            f = [0] * len(vars)
            for p, x in zip(pos, e):
                f[p] = x
            if all(x <= b for x, b in zip(f, bounds)):
                out[tuple(f)] = c
        return TruncatedSeries._make(vars, bounds, out)

    def set_zero(self, names):
        """Restrict to v = 0 for the named variables and drop them."""
        idx = [self.vars.index(n) for n in names]
        keep = [i for i in range(len(self.bounds)) if i not in idx]
        vars = self.vars.without(names)
        bounds = tuple(self.bounds[i] for i in keep)
        out = {}
        for e, c in self.coeffs.items():
            if all(e[i] == 0 for i in idx):
                out[tuple(e[i] for i in keep)] = c
        return TruncatedSeries._make(vars, bounds, out)

    def rename(self, vars: VariableSet):
        if len(vars) != len(self.vars):
            raise StructuralError("rename needs the same number of variables")
        return TruncatedSeries._make(vars, self.bounds, dict(self.coeffs))

    def layer(self, name, k):
        """Coefficient of v^k, as a series in the same ring (no v dependence)."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == k:
                f = list(e)
                f[i] = 0
                out[tuple(f)] = c
        return self.like(out)

    def below(self, name, k):
        """Terms with v-exponent < k."""
        i = self.vars.index(name)
        return self.like({e: c for e, c in self.coeffs.items() if e[i] < k})

    def shift(self, name, k):
        """Multiply by v^k (k may be negative when the low terms vanish)."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.coeffs.items():
            x = e[i] + k
            if x < 0:
                raise StructuralError(f"shift by {k} would create a negative power of {name}")
            if x <= self.bounds[i]:
                f = list(e)
                f[i] = x
                out[tuple(f)] = c
        return self.like(out)

    def scale_var(self, name, factor):
        """Substitute v -> factor * v."""
        i = self.vars.index(name)
        factor = _coerce(factor)
        out = {}
        for e, c in self.coeffs.items():
            v = c * factor ** e[i]
            if v:
                out[e] = v
        return self.like(out)

    def map_coeffs(self, f):
        out = {}
        for e, c in self.coeffs.items():
            v = _coerce(f(c))
            if v:
                out[e] = v
        return self.like(out)

    def max_degree(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.coeffs), default=-1)

    def min_degree(self, name):
        i = self.vars.index(name)
        return min((e[i] for e in self.coeffs), default=None)

    # serialization ------------------------------------------------------

    def to_json(self):
        return {
            "vars": list(self.vars.names),
            "classes": list(self.vars.classes),
            "bounds": list(self.bounds),
            "terms": [{"e": list(e), "c": scalar_to_json(c)} for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj):
        vars = VariableSet(tuple(obj["vars"]), tuple(obj["classes"]))
        coeffs = {}
        for t in obj.get("terms", []):
            e = tuple(t["e"])
            coeffs[e] = coeffs.get(e, 0) + scalar_from_json(t["c"])
        return cls(vars, obj["bounds"], coeffs)


def common_bounds(*series):
    """Elementwise minimum of the bounds of series over the same variables."""
    vars = series[0].vars
    for s in series:
        if s.vars != vars:
            raise StructuralError("series have different variables")
    return tuple(min(b) for b in zip(*(s.bounds for s in series)))


class MatrixSeries:
    """Matrix whose entries are series over a common ring."""

    __slots__ = ("rows", "vars", "bounds")

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise StructuralError("empty matrix")
        first = rows[0][0]
        w = len(rows[0])
        for r in rows:
            if len(r) != w:
                raise StructuralError("ragged matrix")
            for x in r:
                if not isinstance(x, TruncatedSeries):
                    raise StructuralError("matrix entries must be TruncatedSeries")
                first._check(x)
        self.rows = rows
        self.vars = first.vars
        self.bounds = first.bounds

    @classmethod
    def _make(cls, rows, vars, bounds):
        m = object.__new__(cls)
        m.rows = rows
        m.vars = vars
        m.bounds = bounds
        return m

    @classmethod
    def zero(cls, nrows, ncols, vars, bounds):
        bounds = tuple(bounds)
        return cls._make([[TruncatedSeries.zero(vars, bounds) for _ in range(ncols)] for _ in range(nrows)], vars, bounds)

    @classmethod
    def identity(cls, n, vars, bounds):
        return cls.from_constant(linalg.identity(n), vars, bounds)

    @classmethod
    def from_constant(cls, m, vars, bounds):
        bounds = tuple(bounds)
        return cls._make(
            [[TruncatedSeries.constant(x, vars, bounds) for x in row] for row in m], vars, bounds
        )

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def like(self, rows):
        return MatrixSeries._make(rows, self.vars, self.bounds)

    def _check(self, other):
        if self.vars != other.vars or self.bounds != other.bounds:
            raise StructuralError(
                f"matrix rings differ: {self.vars.names}{self.bounds} vs {other.vars.names}{other.bounds}"
            )

    def map(self, f):
        rows = [[f(x) for x in r] for r in self.rows]
        b = rows[0][0].bounds
        return MatrixSeries._make(rows, rows[0][0].vars, b)

    def __add__(self, other):
        self._check(other)
        return self.like([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return self.like([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.like([[-a for a in r] for r in self.rows])

    def scale(self, c):
        if isinstance(c, TruncatedSeries):
            return self.like([[a * c for a in r] for r in self.rows])
        return self.like([[a.scale(c) for a in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, MatrixSeries):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other):
        self._check(other)
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise StructuralError(f"cannot multiply {self.shape} by {other.shape}")
        rows = []
        for i in range(n):
            row = []
            ri = self.rows[i]
            for j in range(m):
                acc = None
                for l in range(k):
                    a = ri[l]
                    if not a.coeffs:
                        continue
                    b = other.rows[l][j]
                    if not b.coeffs:
                        continue
                    p = a * b
                    acc = p if acc is None else acc + p
                row.append(acc if acc is not None else TruncatedSeries.zero(self.vars, self.bounds))
            rows.append(row)
        return self.like(rows)

    def apply(self, vec):
        """Matrix times a column vector given as a list of series."""
        out = []
        for r in self.rows:
            acc = TruncatedSeries.zero(self.vars, self.bounds)
            for a, v in zip(r, vec):
                if a.coeffs and v.coeffs:
                    acc = acc + a * v
            out.append(acc)
        return out

    def transpose(self):
        return self.like([list(c) for c in zip(*self.rows)])

    @property
    def T(self):
        return self.transpose()

    def column(self, j):
        return [r[j] for r in self.rows]

    @classmethod
    def from_columns(cls, cols):
        return cls([list(r) for r in zip(*cols)])

    def is_zero(self):
        return all(not x.coeffs for r in self.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        self._check(other)
        return self.shape == other.shape and all(
            a.coeffs == b.coeffs for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    __hash__ = None

    def constant_term(self):
        return [[x.constant_term() for x in r] for r in self.rows]

    def coefficient(self, e):
        return [[x.coefficient(e) for x in r] for r in self.rows]

    def truncate(self, bounds):
        bounds = tuple(bounds)
        return MatrixSeries._make([[x.truncate(bounds) for x in r] for r in self.rows], self.vars, bounds)

    def pad(self, bounds):
        bounds = tuple(bounds)
        return MatrixSeries._make([[x.pad(bounds) for x in r] for r in self.rows], self.vars, bounds)

    def embed(self, vars, bounds):
        bounds = tuple(bounds)
        return MatrixSeries._make([[x.embed(vars, bounds) for x in r] for r in self.rows], vars, bounds)

    def set_zero(self, names):
        return self.map(lambda x: x.set_zero(names))

    def partial_derivative(self, name):
        return self.map(lambda x: x.partial_derivative(name))

    def partial_derivative_padded(self, name):
        return self.map(lambda x: x.partial_derivative_padded(name))

    def log_derivative(self, name):
        return self.map(lambda x: x.log_derivative(name))

    def euler_derivative(self, name):
        return self.map(lambda x: x.euler_derivative(name))

    def integrate(self, name):
        return self.map(lambda x: x.integrate(name))

    def layer(self, name, k):
        return self.map(lambda x: x.layer(name, k))

    def shift(self, name, k):
        return self.map(lambda x: x.shift(name, k))

    def to_json(self):
        return {
            "vars": list(self.vars.names),
            "classes": list(self.vars.classes),
            "bounds": list(self.bounds),
            "entries": [[[{"e": list(e), "c": scalar_to_json(c)} for e, c in x.terms()] for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj):
        vars = VariableSet(tuple(obj["vars"]), tuple(obj["classes"]))
        rows = []
        for r in obj["entries"]:
            row = []
            for terms in r:
                coeffs = {}
                for t in terms:
                    e = tuple(t["e"])
                    coeffs[e] = coeffs.get(e, 0) + scalar_from_json(t["c"])
                row.append(TruncatedSeries(vars, obj["bounds"], coeffs))
            rows.append(row)
        return cls(rows)

    def __repr__(self):
        return "MatrixSeries([" + ", ".join("[" + ", ".join(x.format() for x in r) + "]" for r in self.rows) + "])"


def commutator(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    return a @ b - b @ a


def invert_unit(a: MatrixSeries) -> MatrixSeries:
    """Inverse of a square matrix series with invertible constant term.

    With a = a0 (1 + a0^{-1} a'), a' without constant term, the inverse is the
    finite Neumann sum  sum_k (-a0^{-1} a')^k a0^{-1}  in the truncated ring."""
    n, m = a.shape
    if n != m:
        raise StructuralError("only square matrices can be inverted")
    a0 = a.constant_term()
    try:
        inv0 = linalg.inverse(a0)
    except ZeroDivisionError:
        raise NotAUnit("constant term is singular") from None
    vars, bounds = a.vars, a.bounds
    inv0s = MatrixSeries.from_constant(inv0, vars, bounds)
    rest = a - MatrixSeries.from_constant(a0, vars, bounds)
    step = -(inv0s @ rest)
    term = inv0s
    total = inv0s
    limit = sum(bounds) + 1
    for _ in range(limit):
        term = step @ term
        if term.is_zero():
            break
        total = total + term
    return total


def matrix_from_constant_rows(rows, vars, bounds):
    return MatrixSeries.from_constant([[rational(x) if not isinstance(x, GaussianRational) else x for x in r] for r in rows], vars, bounds)
