"""Limiting mixed Hodge structures of nilpotent orbits.

Vectors are coordinate columns in the standard basis e_0..e_{n-1} of H.  The
real structure is the rational span of that basis, so complex conjugation acts
entrywise.  Subspaces are canonical RREF bases (see :mod:`linalg`); a matrix N
acts on columns, so ``N e_i = e_{i+1}`` means N[i+1][i] = 1.

Connections on the nilpotent orbit are written in the twisted flat frame in
which the Hodge filtration is constant; there the connection matrix of the
logarithmic field q_j d/dq_j is -N_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from . import linalg
from .errors import InputError, NotGriffiths, NotMHS, NotNilpotent, NotOpposite, StructuralError
from .forms import ConditionReport
from .frobenius import FTSData
from .numbers import GaussianRational, I, Q, conj, scalar_from_json, scalar_to_json, simplify
from .series import MatrixSeries, TruncatedSeries, VariableSet, invert_unit


def _S(x):
    return [list(v) for v in x]


def conj_space(s):
    return linalg.span([linalg.conj_vec(v) for v in s])


def _eq(a, b):
    return linalg.subspace_equal(a, b)


def _dim(s):
    return len(s)


# --------------------------------------------------------------------------
# spaces and filtrations


@dataclass
class BilinearSpace:
    dim: int
    S: list
    w: int

    def __post_init__(self):
        n = self.dim
        self.S = [[simplify(x) for x in row] for row in self.S]
        if len(self.S) != n or any(len(r) != n for r in self.S):
            raise StructuralError("S must be dim x dim")
        sign = -1 if self.w % 2 else 1
        for i, j in iproduct(range(n), repeat=2):
            if self.S[j][i] != sign * self.S[i][j]:
                raise StructuralError(f"S is not (-1)^w symmetric at ({i},{j})")
        if linalg.rank(self.S) != n:
            raise StructuralError("S is degenerate")

    def pair(self, a, b):
        """S(a, b) = a^T S b (bilinear, no conjugation)."""
        return simplify(sum((a[i] * self.S[i][j] * b[j] for i in range(self.dim) for j in range(self.dim) if a[i] and b[j]), Q(0)))


@dataclass
class DecFiltration:
    """F^p for p in the declared range; F^p = H below it and 0 above it."""

    dim: int
    steps: dict

    def __post_init__(self):
        self.steps = {int(p): linalg.span(_S(s)) for p, s in self.steps.items()}
        if not self.steps:
            raise StructuralError("a filtration needs at least one step")
        ps = sorted(self.steps)
        if ps != list(range(ps[0], ps[-1] + 1)):
            raise StructuralError("filtration steps must be consecutive")
        for p in ps[:-1]:
            if not linalg.is_subspace(self.steps[p + 1], self.steps[p]):
                raise StructuralError(f"F^{p + 1} is not contained in F^{p}")

    @property
    def pmin(self):
        return min(self.steps)

    @property
    def pmax(self):
        return max(self.steps)

    def get(self, p):
        if p < self.pmin:
            return linalg.full_space(self.dim)
        if p > self.pmax:
            return []
        return self.steps[p]

    def conj(self):
        return DecFiltration(self.dim, {p: conj_space(s) for p, s in self.steps.items()})

    def to_json(self):
        return {str(p): [[scalar_to_json(x) for x in v] for v in s] for p, s in sorted(self.steps.items())}


@dataclass
class IncFiltration:
    """W_l (or U_p) for l in the declared range; 0 below and H above."""

    dim: int
    steps: dict

    def __post_init__(self):
        self.steps = {int(l): linalg.span(_S(s)) for l, s in self.steps.items()}
        ls = sorted(self.steps)
        for l in ls[:-1]:
            if not linalg.is_subspace(self.steps[l], self.steps[l + 1]):
                raise StructuralError(f"step {l} is not contained in step {l + 1}")

    @property
    def lmin(self):
        return min(self.steps)

    @property
    def lmax(self):
        return max(self.steps)

    def get(self, l):
        if l < self.lmin:
            return []
        if l > self.lmax:
            return linalg.full_space(self.dim)
        return self.steps[l]

    def same(self, other):
        lo = min(self.lmin, other.lmin)
        hi = max(self.lmax, other.lmax)
        return all(_eq(self.get(l), other.get(l)) for l in range(lo, hi + 1))

    def to_json(self):
        return {str(l): [[scalar_to_json(x) for x in v] for v in s] for l, s in sorted(self.steps.items())}


# --------------------------------------------------------------------------
# nilpotent operators and the weight filtration


def nilpotency_index(N):
    """Smallest k with N^k = 0; raises NotNilpotent."""
    n = len(N)
    p = linalg.identity(n)
    for k in range(n + 1):
        if linalg.is_zero(p):
            return k
        p = linalg.matmul(N, p)
    raise NotNilpotent("matrix is not nilpotent")


def _wf(N, A, B, dim):
    """Relative weight filtration on A/B centred at 0: keys -k-1..k."""
    if _dim(A) == _dim(B):
        return {-1: B, 0: A}
    k = 0
    P = N
    while True:
        img = linalg.subspace_sum(linalg.image(P, A), B)
        if _dim(img) == _dim(B):
            break
        k += 1
        P = linalg.matmul(N, P)
    if k == 0:
        return {-1: B, 0: A}
    Nk = linalg.matpow(N, k)
    top = linalg.intersect(A, linalg.preimage(Nk, B, dim), dim)
    bottom = linalg.subspace_sum(linalg.image(Nk, A), B)
    inner = _wf(N, top, bottom, dim)
    kk = max(inner)
    assert kk <= k - 1
    out = {k: A, -k - 1: B}
    for l in range(-k, k):
        if l > kk:
            out[l] = top
        elif l < -kk - 1:
            out[l] = bottom
        else:
            out[l] = inner[l]
    return out


def weight_filtration(N, w, verify=True) -> IncFiltration:
    """The monodromy weight filtration of a nilpotent N centred at w."""
    n = len(N)
    nilpotency_index(N)
    rel = _wf(N, linalg.full_space(n), [], n)
    W = IncFiltration(n, {l + w: s for l, s in rel.items()})
    if verify:
        rep = check_weight_filtration(N, w, W)
        if not rep.passed:
            raise ArithmeticError("weight filtration failed its defining properties")
    return W


def graded_dim(W: IncFiltration, l):
    return _dim(W.get(l)) - _dim(W.get(l - 1))


def check_weight_filtration(N, w, W: IncFiltration) -> ConditionReport:
    """N W_l in W_{l-2}, and N^l: Gr_{w+l} -> Gr_{w-l} is an isomorphism."""
    n = len(N)
    rep = ConditionReport()
    lo, hi = W.lmin - 1, W.lmax + 1
    lowers = all(linalg.is_subspace(linalg.image(N, W.get(l)), W.get(l - 2)) for l in range(lo, hi + 1))
    rep.add("N_lowers_weight", passed=lowers)
    exhaustive = not W.get(lo) and _dim(W.get(hi)) == n
    rep.add("exhaustive", passed=exhaustive)
    for l in range(0, max(hi - w, w - lo) + 1):
        Nl = linalg.matpow(N, l)
        src, src_low = W.get(w + l), W.get(w + l - 1)
        dst, dst_low = W.get(w - l), W.get(w - l - 1)
        into = linalg.is_subspace(linalg.image(Nl, src), dst) and linalg.is_subspace(linalg.image(Nl, src_low), dst_low)
        onto = _eq(linalg.subspace_sum(linalg.image(Nl, src), dst_low), linalg.subspace_sum(dst, dst_low))
        same = graded_dim(W, w + l) == graded_dim(W, w - l)
        rep.add(f"iso[{l}]", passed=into and onto and same)
    return rep


# --------------------------------------------------------------------------
# mixed Hodge structures


def check_mhs(F: DecFiltration, W: IncFiltration):
    """Each Gr^W_k with the induced F is a pure Hodge structure of weight k.
    Raises NotMHS naming the failing graded piece."""
    Fb = F.conj()
    for k in range(W.lmin, W.lmax + 1):
        Wk, Wk1 = W.get(k), W.get(k - 1)
        if _dim(Wk) == _dim(Wk1):
            continue
        for p in range(F.pmin - 1, F.pmax + 2):
            a = linalg.subspace_sum(linalg.intersect(F.get(p), Wk, F.dim), Wk1)
            b = linalg.subspace_sum(linalg.intersect(Fb.get(k + 1 - p), Wk, F.dim), Wk1)
            total = linalg.subspace_sum(a, b)
            meet = linalg.intersect(a, b, F.dim)
            if not (_eq(total, Wk) and _dim(meet) == _dim(Wk1)):
                raise NotMHS(f"Gr^W_{k} is not a Hodge structure of weight {k} (fails at p = {p})")


def deligne_splitting(F: DecFiltration, W: IncFiltration, check=True):
    """I^{p,q} = F^p n W_{p+q} n (conj F^q n W_{p+q} + sum_{j>0} conj F^{q-j} n W_{p+q-j-1})."""
    if check:
        check_mhs(F, W)
    n = F.dim
    Fb = F.conj()
    out = {}
    prange = range(F.pmin - 1, F.pmax + 1)
    for p, q in iproduct(prange, prange):
        l = p + q
        Wl = W.get(l)
        left = linalg.intersect(F.get(p), Wl, n)
        if not left:
            continue
        parts = [linalg.intersect(Fb.get(q), Wl, n)]
        j = 1
        while l - j - 1 >= W.lmin:
            parts.append(linalg.intersect(Fb.get(q - j), W.get(l - j - 1), n))
            j += 1
        piece = linalg.intersect(left, linalg.subspace_sum(*parts), n)
        if piece:
            out[(p, q)] = piece
    if check and sum(_dim(s) for s in out.values()) != n:
        raise NotMHS("the Deligne pieces do not fill H")
    return out


def primitive_parts(Ipq, N, w, dim):
    """I_0^{p,q} = ker(N^{p+q-w+1}) on I^{p,q}; zero when p + q < w."""
    out = {}
    for (p, q), s in Ipq.items():
        e = p + q - w + 1
        if e <= 0:
            continue
        k = linalg.intersect(s, linalg.kernel(linalg.matpow(N, e), dim), dim)
        if k:
            out[(p, q)] = k
    return out


def _direct_sum(spaces, target):
    total = sum(_dim(s) for s in spaces)
    return total == _dim(target) and _eq(linalg.subspace_sum(*spaces) if spaces else [], target)


@dataclass
class PMHSData:
    space: BilinearSpace
    Nlist: list
    F: DecFiltration
    W: IncFiltration = None
    Ipq: dict = None
    I0: dict = None

    @property
    def dim(self):
        return self.space.dim

    @property
    def w(self):
        return self.space.w

    @property
    def N(self):
        """The cone element sum_j N_j."""
        n = self.dim
        out = linalg.zeros(n, n)
        for m in self.Nlist:
            out = linalg.add(out, m)
        return out

    def to_json(self):
        return {
            "dim": self.dim,
            "w": self.w,
            "S": [[scalar_to_json(x) for x in row] for row in self.space.S],
            "N": [[[scalar_to_json(x) for x in row] for row in m] for m in self.Nlist],
            "F": self.F.to_json(),
        }

    @classmethod
    def from_json(cls, obj, path=""):
        try:
            n = obj["dim"]
            w = obj["w"]
            if not isinstance(n, int) or n <= 0:
                raise InputError(f"{path}/dim", "dim must be a positive integer")
            if not isinstance(w, int):
                raise InputError(f"{path}/w", "w must be an integer")
            S = _matrix(obj["S"], n, f"{path}/S")
            Ns = [_matrix(m, n, f"{path}/N/{i}") for i, m in enumerate(obj.get("N", []))]
            steps = {}
            for p, basis in obj["F"].items():
                try:
                    pi = int(p)
                except ValueError:
                    raise InputError(f"{path}/F/{p}", "filtration index must be an integer") from None
                vecs = []
                for j, v in enumerate(basis):
                    if len(v) != n:
                        raise InputError(f"{path}/F/{p}/{j}", f"basis vector must have {n} entries")
                    vecs.append([_scalar(x, f"{path}/F/{p}/{j}/{k}") for k, x in enumerate(v)])
                steps[pi] = vecs
        except KeyError as exc:
            raise InputError(path, f"missing key {exc}") from None
        for i, m in enumerate(Ns):
            try:
                nilpotency_index(m)
            except NotNilpotent:
                raise NotNilpotent(f"{path}/N/{i}: matrix is not nilpotent") from None
        try:
            space = BilinearSpace(n, S, w)
            F = DecFiltration(n, steps)
        except StructuralError as exc:
            raise InputError(path, str(exc)) from None
        return build_pmhs(space, Ns, F)


def _scalar(x, path):
    try:
        return scalar_from_json(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(path, f"not a scalar: {x!r} ({exc})") from None


def _matrix(m, n, path):
    if not isinstance(m, list) or len(m) != n:
        raise InputError(path, f"expected {n} rows")
    out = []
    for i, row in enumerate(m):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"{path}/{i}", f"expected {n} entries")
        out.append([_scalar(x, f"{path}/{i}/{j}") for j, x in enumerate(row)])
    return out


def build_pmhs(space: BilinearSpace, Nlist, F: DecFiltration, check=True) -> PMHSData:
    """Attach the weight filtration of sum N_j, the Deligne pieces and their
    primitive parts."""
    n = space.dim
    for m in Nlist:
        nilpotency_index(m)
    pm = PMHSData(space, [linalg.copy(m) for m in Nlist], F)
    N = pm.N if Nlist else linalg.zeros(n, n)
    pm.W = weight_filtration(N, space.w)
    pm.Ipq = deligne_splitting(F, pm.W, check=check)
    pm.I0 = primitive_parts(pm.Ipq, N, space.w, n)
    return pm


def deligne_identities(pm: PMHSData) -> ConditionReport:
    n = pm.dim
    w = pm.w
    N = pm.N if pm.Nlist else linalg.zeros(n, n)
    Ipq, I0 = pm.Ipq, pm.I0
    rep = ConditionReport()
    ps = [p for p, _ in Ipq]
    prange = range(min(ps + [pm.F.pmin]) - 1, max(ps + [pm.F.pmax]) + 2)
    ok = all(_direct_sum([s for (i, q), s in Ipq.items() if i >= p], pm.F.get(p)) for p in prange)
    rep.add("F_decomposition", passed=ok)
    lrange = range(pm.W.lmin - 1, pm.W.lmax + 2)
    ok = all(_direct_sum([s for (p, q), s in Ipq.items() if p + q <= l], pm.W.get(l)) for l in lrange)
    rep.add("W_decomposition", passed=ok)
    ok = all(linalg.is_subspace(linalg.image(N, s), Ipq.get((p - 1, q - 1), [])) for (p, q), s in Ipq.items())
    rep.add("N_lowers_type", passed=ok)
    ok = True
    for (p, q), s in Ipq.items():
        parts = [linalg.image(linalg.matpow(N, j), I0[(p + j, q + j)]) for j in range(n + 1) if (p + j, q + j) in I0]
        ok = ok and _direct_sum([x for x in parts if x], s)
    rep.add("primitive_decomposition", passed=ok)
    ok = True
    for ((p, q), a), ((r, s), b) in iproduct(Ipq.items(), Ipq.items()):
        if (r, s) != (w - p, w - q):
            ok = ok and all(not pm.space.pair(x, y) for x in a for y in b)
    rep.add("S_orthogonality", passed=ok)
    ok = True
    for ((p, q), a), ((r, s), b) in iproduct(I0.items(), I0.items()):
        for i in range(p + q - w + 1):
            for j in range(r + s - w + 1):
                if (r, s, i + j) == (q, p, p + q - w):
                    continue
                Na = linalg.image(linalg.matpow(N, i), a)
                Nb = linalg.image(linalg.matpow(N, j), b)
                ok = ok and all(not pm.space.pair(x, y) for x in Na for y in Nb)
    rep.add("S_primitive_orthogonality", passed=ok)

    def conj_mod(pieces):
        good = True
        for (p, q), s in pieces.items():
            low = pm.W.get(p + q - 2)
            other = pieces.get((q, p), [])
            good = good and _eq(linalg.subspace_sum(other, low), linalg.subspace_sum(conj_space(s), low))
        return good

    rep.add("conjugate_symmetry", passed=conj_mod(Ipq))
    rep.add("conjugate_symmetry_primitive", passed=conj_mod(I0))
    return rep


def _hermitian_positive(h):
    """Positive definiteness of a Hermitian matrix over Q(i) by leading minors."""
    n = len(h)
    for i in range(n):
        for j in range(n):
            if h[i][j] != conj(h[j][i]):
                return False
    for k in range(1, n + 1):
        d = simplify(linalg.det([row[:k] for row in h[:k]]))
        if isinstance(d, GaussianRational) or d <= 0:
            return False
    return True


def check_polarization(pm: PMHSData) -> ConditionReport:
    n = pm.dim
    w = pm.w
    S = pm.space
    rep = ConditionReport()
    F = pm.F
    prange = range(F.pmin - 1, F.pmax + 2)
    # the Hodge decomposition on graded pieces comes first
    try:
        check_mhs(F, pm.W)
        rep.add("hodge_decomposition", passed=True)
    except NotMHS as exc:
        rep.add("hodge_decomposition", passed=False, detail=str(exc))
        return rep
    ok = True
    for i, m in enumerate(pm.Nlist):
        for j, m2 in enumerate(pm.Nlist):
            ok = ok and linalg.matmul(m, m2) == linalg.matmul(m2, m)
    rep.add("N_commute", passed=ok)
    ok = all(
        not (S.pair(linalg.matvec(m, a), b) + S.pair(a, linalg.matvec(m, b)))
        for m in pm.Nlist
        for a in linalg.identity(n)
        for b in linalg.identity(n)
    )
    rep.add("N_isometry", passed=ok)
    ok = all(linalg.is_subspace(linalg.image(m, F.get(p)), F.get(p - 1)) for m in pm.Nlist for p in prange)
    rep.add("griffiths_transversality", passed=ok)
    ok = all(not S.pair(a, b) for p in prange for a in F.get(p) for b in F.get(w + 1 - p))
    rep.add("F_isotropic", passed=ok)
    ok = True
    for l in range(pm.W.lmin, pm.W.lmax + 1):
        for l2 in range(pm.W.lmin, pm.W.lmax + 1):
            if l + l2 < w:
                ok = ok and all(not S.pair(a, b) for a in pm.W.get(l) for b in pm.W.get(l2))
    rep.add("W_isotropic", passed=ok)
    # Gr_{w+l} = sum_i N^i P_{w+l+2i}, primitive parts as the I_0 pieces
    N = pm.N if pm.Nlist else linalg.zeros(n, n)
    ok = True
    for k in range(pm.W.lmin, pm.W.lmax + 1):
        parts = []
        for (p, q), s in pm.I0.items():
            i = (p + q - k)
            if i >= 0 and i % 2 == 0:
                parts.append(linalg.image(linalg.matpow(N, i // 2), s))
        parts = [x for x in parts if x]
        total = linalg.subspace_sum(*(parts + [pm.W.get(k - 1)])) if parts else pm.W.get(k - 1)
        ok = ok and _eq(total, pm.W.get(k)) and sum(_dim(x) for x in parts) == graded_dim(pm.W, k)
    rep.add("primitive_decomposition", passed=ok)
    pos = []
    ok = True
    for (p, q), s in sorted(pm.I0.items()):
        l = p + q - w
        Nl = linalg.matpow(N, l)
        ip = I ** (p - q)
        h = [[simplify(ip * S.pair(a, linalg.matvec(Nl, linalg.conj_vec(b)))) for b in s] for a in s]
        good = _hermitian_positive(h)
        ok = ok and good
        if not good:
            pos.append(f"I0[{p},{q}]")
    rep.add("positivity", passed=ok, detail=("fails on " + ", ".join(pos)) if pos else "")
    return rep


# --------------------------------------------------------------------------
# opposite filtration, cone, generation


def opposite_filtration(Ipq, dim) -> IncFiltration:
    """U_p = sum of I^{i,q} with i <= p."""
    ps = sorted({p for p, _ in Ipq})
    steps = {}
    for p in range(ps[0] - 1, ps[-1] + 1):
        steps[p] = linalg.subspace_sum(*[s for (i, q), s in Ipq.items() if i <= p]) if p >= ps[0] else []
    return IncFiltration(dim, steps)


def check_opposite(F: DecFiltration, U: IncFiltration, Nlist=()) -> ConditionReport:
    n = F.dim
    rep = ConditionReport()
    lo = min(F.pmin, U.lmin) - 1
    hi = max(F.pmax, U.lmax) + 2
    bad = []
    for p in range(lo, hi + 1):
        Fp, Up = F.get(p), U.get(p - 1)
        if linalg.intersect(Fp, Up, n) or _dim(Fp) + _dim(Up) != n:
            bad.append(p)
    rep.add("opposite", passed=not bad, detail=f"fails at p = {bad}" if bad else "")
    ok = all(linalg.is_subspace(linalg.image(m, U.get(p)), U.get(p - 1)) for m in Nlist for p in range(lo, hi + 1))
    rep.add("N_lowers_U", passed=ok)
    return rep


def cone_agreement(Nlist, w, samples) -> bool:
    """Whether sum lambda_j N_j has the same weight filtration for every sample."""
    n = len(Nlist[0])
    for a in Nlist:
        for b in Nlist:
            if linalg.matmul(a, b) != linalg.matmul(b, a):
                raise StructuralError("cone generators must commute")
    first = None
    for lam in samples:
        if len(lam) != len(Nlist) or any(Q(x) <= 0 for x in lam):
            raise StructuralError("cone samples need one positive coefficient per generator")
        N = linalg.zeros(n, n)
        for c, m in zip(lam, Nlist):
            N = linalg.add(N, linalg.scale(Q(c), m))
        W = weight_filtration(N, w)
        if first is None:
            first = W
        elif not first.same(W):
            return False
    return True


@dataclass
class GenerationResult:
    generated: bool
    rank_hypothesis: bool
    detail: str = ""

    def __bool__(self):
        return self.generated


def h2_generation(F: DecFiltration, Nlist, w=None) -> GenerationResult:
    """Whether F^w and its images under words in the N_j induce every quotient
    F^p / F^{p+1}; also reports dim F^{w-1} = 1 + #N."""
    n = F.dim
    w = F.pmax if w is None else w
    top = F.get(w)
    if _dim(top) != 1:
        raise StructuralError(f"dim F^{w} = {_dim(top)}, expected 1")
    rank_ok = _dim(F.get(w - 1)) == 1 + len(Nlist)
    level = [top[0]]
    missing = []
    p = w
    while True:
        have = linalg.subspace_sum(linalg.span(level), F.get(p + 1))
        if not linalg.is_subspace(F.get(p), have):
            missing.append(p)
        if _dim(F.get(p)) == n:
            break
        level = [linalg.matvec(m, v) for v in level for m in Nlist]
        p -= 1
    detail = f"no generation at p = {missing}" if missing else ""
    return GenerationResult(not missing, rank_ok, detail)


# --------------------------------------------------------------------------
# from the nilpotent orbit to a Frobenius type structure


@dataclass
class SplitResult:
    fts: FTSData
    frame: MatrixSeries
    levels: list
    residues: ConditionReport


def adapted_basis(pm: PMHSData):
    """Basis of H adapted to the pieces F^p n U_p, top level first."""
    U = opposite_filtration(pm.Ipq, pm.dim)
    rep = check_opposite(pm.F, U, pm.Nlist)
    if not rep.passed:
        raise NotOpposite("; ".join(c.id + " " + c.detail for c in rep.failures()))
    n = pm.dim
    cols, levels = [], []
    for p in range(pm.F.pmax, pm.F.pmin - 2, -1):
        piece = linalg.intersect(pm.F.get(p), U.get(p), n)
        for v in piece:
            cols.append(v)
            levels.append(p)
    if len(cols) != n:
        raise NotOpposite("the pieces F^p n U_p do not fill H")
    return cols, levels, U


def split_connection(pm: PMHSData, family=None, bound=4, names=None) -> SplitResult:
    """Split the connection d - sum N_j dq_j/q_j of the nilpotent orbit (or of a
    family F(q) given in the same twisted frame) into nabla^r + Higgs field.

    ``family`` maps p to a list of series vectors spanning F^p(q); by default
    the constant limit filtration is used.  The result lives over logarithmic
    variables q1..qr with the given bound."""
    n = pm.dim
    w = pm.w
    r = len(pm.Nlist)
    names = list(names or [f"q{j + 1}" for j in range(r)])
    vars = VariableSet.of(*[(nm, "log") for nm in names])
    bounds = (bound,) * r
    cols, levels, U = adapted_basis(pm)
    B = linalg.from_columns(cols)
    if family is None:
        sigma = MatrixSeries.from_constant(B, vars, bounds)
    else:
        sigma = _family_frame(family, B, levels, vars, bounds, n)
    sinv = invert_unit(sigma)
    higgs, rconn = [], []
    for j, nm in enumerate(names):
        Nj = MatrixSeries.from_constant(pm.Nlist[j], vars, bounds)
        om = sinv @ (sigma.map(lambda x, nm=nm: x.log_derivative(nm)) - Nj @ sigma)
        diag = [[om.rows[a][b] if levels[a] == levels[b] else om.rows[a][b].zero_like() for b in range(n)] for a in range(n)]
        sub = [[om.rows[a][b] if levels[a] == levels[b] - 1 else om.rows[a][b].zero_like() for b in range(n)] for a in range(n)]
        for a, b in iproduct(range(n), repeat=2):
            if levels[a] not in (levels[b], levels[b] - 1) and om.rows[a][b].coeffs:
                raise NotGriffiths(f"connection of {nm} maps level {levels[b]} to level {levels[a]}")
        rconn.append(MatrixSeries(diag))
        higgs.append(MatrixSeries(sub))
    zero = MatrixSeries.zero(n, n, vars, bounds)
    V = MatrixSeries.from_constant([[Q(2 * levels[a] - w, 2) if a == b else Q(0) for b in range(n)] for a in range(n)], vars, bounds)
    Smat = MatrixSeries.from_constant(pm.space.S, vars, bounds)
    G = sigma.T @ Smat @ sigma
    G = MatrixSeries([[x.scale(-1) if levels[a] % 2 else x for x in row] for a, row in enumerate(G.rows)])
    xi = [TruncatedSeries.constant(1 if a == 0 else 0, vars, bounds) for a in range(n)]
    fts = FTSData(vars, bounds, rconn, higgs, zero, V, G, xi, w, w)
    res = ConditionReport()
    for nm, m in zip(names, rconn):
        res.add(f"residue[{nm}]", MatrixSeries.from_constant(m.constant_term(), vars, bounds))
    return SplitResult(fts, sigma, levels, res)


def _family_frame(family, B, levels, vars, bounds, n):
    """Sections sigma of F^p(q) congruent to the adapted basis modulo U_{p-1}."""
    Binv = linalg.inverse(B)
    Bi = MatrixSeries.from_constant(Binv, vars, bounds)
    out_cols = [None] * n
    for p in sorted(set(levels), reverse=True):
        vecs = [[x if isinstance(x, TruncatedSeries) else TruncatedSeries.constant(x, vars, bounds) for x in v] for v in family[p]]
        M = Bi @ MatrixSeries.from_columns(vecs)  # adapted coordinates
        top = [a for a in range(n) if levels[a] >= p]
        if len(vecs) != len(top):
            raise NotOpposite(f"F^{p}(q) has {len(vecs)} generators, expected {len(top)}")
        T = MatrixSeries([[M.rows[a][c] for c in range(len(vecs))] for a in top])
        Ms = M @ invert_unit(T)
        for c, a in enumerate(top):
            if levels[a] == p:
                out_cols[a] = [x for x in Ms.column(c)]
    frame_adapted = MatrixSeries.from_columns(out_cols)
    return MatrixSeries.from_constant(B, vars, bounds) @ frame_adapted


def germ_flat_euler_kernel(germ):
    """Dimension of the kernel of nabla E at the origin, for the Levi-Civita
    connection of the germ's metric."""
    from .frobenius import christoffel
    from .forms import vf

    n = germ.dim
    gam = christoffel(germ)
    m = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            s = vf(germ.euler[k], germ.vars.names[i], germ.vars).constant_term()
            for b in range(n):
                s = s + germ.euler[b].constant_term() * gam[i][b][k].constant_term()
            m[k][i] = s
    return n - linalg.rank(m)
