"""Command-line driver.

Every subcommand reads JSON inputs (or ``builtin:<name>`` fixtures), calls the
library and prints a text summary (default) or JSON.  ``--output`` always
receives the JSON document.  Exit codes: 0 success, 2 invalid input, 3 a
checked condition fails, 4 a solver could not determine the answer.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import fixtures, linalg
from .errors import (
    GenerationFailure,
    Inconsistent,
    InputError,
    InternalConsistencyError,
    MalformedPairing,
    NotAUnit,
    NotGriffiths,
    NotIsomorphismCase,
    NotMHS,
    NotNilpotent,
    NotOpposite,
    PairingEscape,
    StructuralError,
    Underdetermined,
)
from .forms import ConditionReport, ConnectionForm, first_column_residuals, flatness_residuals, matrix_to_json, vector_from_json
from .frobenius import FTSData, check_fts, check_hypotheses, fts_to_trtlep, rational_spectrum
from .hodge import (
    PMHSData,
    check_opposite,
    check_polarization,
    check_weight_filtration,
    cone_agreement,
    deligne_identities,
    germ_flat_euler_kernel,
    h2_generation,
    opposite_filtration,
    split_connection,
    weight_filtration,
)
from .numbers import rational, scalar_to_json
from .quantum import (
    CohModel,
    GWTable,
    default_bounds,
    euler_check,
    frobenius_symmetry,
    potential_assemble,
    quantum_product,
    qc_to_fts,
    reconstruct,
    wdvv_report,
)
from .series import MatrixSeries
from .unfolding import extend_pairing, solve_unfolding, universal_unfold

EXIT_OK, EXIT_INPUT, EXIT_CONDITION, EXIT_SOLVER = 0, 2, 3, 4
DEFAULT_MAX_TERMS = 10**7


@dataclass
class RunReport:
    data: dict
    text: str
    ok: bool = True
    format: str = "text"


class TooLarge(Exception):
    pass


# --------------------------------------------------------------------------
# input helpers


def _builtin(kind, name):
    try:
        if kind == "model":
            return fixtures.QUANTUM_FIXTURES[name][0]().to_json()
        if kind == "gw":
            base, _, which = name.partition("-")
            if which == "seed":
                model_f, table_f = fixtures.SEEDS[base]
            elif not which:
                model_f, table_f = fixtures.QUANTUM_FIXTURES[base]
            else:
                raise KeyError(name)
            return table_f().to_json(model_f())
        if kind == "pmhs":
            return fixtures.HODGE_FIXTURES[name]().to_json()
    except KeyError:
        pass
    raise InputError("", f"no built-in {kind} named {name!r}")


def load_json(path, kind=None):
    if path.startswith("builtin:"):
        return _builtin(kind, path[len("builtin:") :])
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError("", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError("", f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_model(path):
    return CohModel.from_json(load_json(path, "model"))


def load_gw(path, model):
    return GWTable.from_json(load_json(path, "gw"), model)


def load_pmhs(path):
    return PMHSData.from_json(load_json(path, "pmhs"))


def load_fts(path):
    return FTSData.from_json(load_json(path, "fts"))


def _max_terms():
    try:
        return int(os.environ.get("FORGE_MAX_TERMS", DEFAULT_MAX_TERMS))
    except ValueError:
        raise InputError("", "FORGE_MAX_TERMS must be an integer") from None


def guard(n, bounds, count=1):
    """Refuse runs whose dense coefficient storage would exceed FORGE_MAX_TERMS."""
    size = n * n * count
    for b in bounds:
        size *= b + 1
    cap = _max_terms()
    if size > cap:
        raise TooLarge(f"estimated {size} stored coefficients exceed FORGE_MAX_TERMS = {cap}")


def _int_list(s, what):
    try:
        return [int(x) for x in str(s).split(",") if x.strip()]
    except ValueError:
        raise InputError("", f"{what} must be an integer or a comma-separated list") from None


def _order(s):
    vals = _int_list(s, "--order")
    return vals[0] if len(vals) == 1 else vals


def _max_degree(s):
    if s is None:
        return None
    vals = _int_list(s, "--max-degree")
    return vals[0] if len(vals) == 1 else vals


def _W(model, s):
    names = [x.strip() for x in s.split(",") if x.strip()]
    try:
        return [model.index(int(x)) if x.isdigit() else model.index(x) for x in names]
    except StructuralError as exc:
        raise InputError("", f"--W: {exc}") from None


def _bounds_arg(s):
    out = {}
    for part in s.split(","):
        name, _, v = part.partition("=")
        try:
            out[name.strip()] = int(v)
        except ValueError:
            raise InputError("", f"--bounds entries look like q1=5, got {part!r}") from None
    return out


def _potential(args, model, gw):
    if getattr(args, "bounds", None):
        bounds = _bounds_arg(args.bounds)
    else:
        deg = _max_degree(args.max_degree)
        if deg is None:
            # the largest degree box present in the table
            deg = [max((b[i] for (b, _), _ in gw.items()), default=0) for i in range(model.mori_rank)]
            deg = deg[0] if len(deg) == 1 else deg
        bounds = default_bounds(model, deg)
    guard(model.n, bounds.values(), model.n)
    return potential_assemble(model, gw, bounds)


# --------------------------------------------------------------------------
# rendering


def _report_text(title, rep: ConditionReport):
    return f"{title}: {'pass' if rep.passed else 'FAIL'}\n" + rep.format()


def _table_text(model, table: GWTable):
    rows = [("beta", "insertions", "value")]
    for (beta, ins), v in table.items():
        counts = {}
        for i in ins:
            counts[model.classes[i].name] = counts.get(model.classes[i].name, 0) + 1
        rows.append((str(list(beta)), " ".join(f"{k}^{c}" for k, c in sorted(counts.items())) or "-", str(v)))
    widths = [max(len(r[k]) for r in rows) for k in range(3)]
    return "\n".join("  ".join(r[k].ljust(widths[k]) if k < 2 else r[k].rjust(widths[k]) for k in range(3)) for r in rows)


def _subspace_json(s):
    return [[scalar_to_json(x) for x in v] for v in s]


def _filtration_text(name, filt):
    lines = []
    for k, s in sorted(filt.steps.items()):
        vecs = " ".join("(" + ",".join(str(x) for x in v) + ")" for v in s) or "0"
        lines.append(f"{name}_{k}: dim {len(s)}  {vecs}")
    return "\n".join(lines)


def _pieces_json(pieces):
    return {f"{p},{q}": _subspace_json(s) for (p, q), s in sorted(pieces.items())}


# --------------------------------------------------------------------------
# commands


def cmd_validate(args):
    kind = args.kind
    if kind == "model":
        load_model(args.file)
    elif kind == "gw":
        if not args.model:
            raise InputError("", "validating a GW table needs --model")
        model = load_model(args.model)
        table = load_gw(args.file, model)
        bad = table.validate(model)
        if bad:
            raise InputError("", "inadmissible entries: " + "; ".join(f"beta={b} insertions={i}: {why}" for b, i, why in bad))
    elif kind == "fts":
        load_fts(args.file)
    elif kind == "omega":
        ConnectionForm.from_json(load_json(args.file))
    elif kind == "pmhs":
        load_pmhs(args.file)
    return RunReport({"valid": True, "kind": kind}, f"{args.file}: valid {kind}")


def cmd_check_fts(args):
    fts = load_fts(args.fts)
    rep = check_fts(fts)
    hyp = check_hypotheses(fts)
    hj = {k: (scalar_to_json(v) if k == "d" and v is not None else v) for k, v in hyp.items() if k != "report"}
    text = _report_text("Frobenius type structure", rep) + "\n" + "  ".join(f"{k}={v}" for k, v in sorted(hj.items()))
    return RunReport({"report": rep.to_json(), "hypotheses": hj}, text, rep.passed)


def cmd_fts_to_trtlep(args):
    fts = load_fts(args.fts)
    tr = fts_to_trtlep(fts)
    rep = flatness_residuals(tr.omega)
    return RunReport({"trtlep": tr.to_json(), "flatness": rep.to_json()}, _report_text("trTLEP flatness", rep), rep.passed)


def cmd_flatness(args):
    omega = ConnectionForm.from_json(load_json(args.omega))
    rep = flatness_residuals(omega)
    return RunReport(rep.to_json(), _report_text("flatness", rep), rep.passed)


def _read_unfold_inputs(args):
    if args.spec:
        obj = load_json(args.spec)
        try:
            base_obj, dfs_obj, order = obj["base"], obj["dfs"], obj["order"]
        except KeyError as exc:
            raise InputError("", f"missing key {exc}") from None
    else:
        if not (args.base and args.dfs and args.order is not None):
            raise InputError("", "unfold needs --spec or all of --base, --dfs, --order")
        base_obj, dfs_obj, order = load_json(args.base), load_json(args.dfs), _order(args.order)
    base = ConnectionForm.from_json(base_obj, "/base" if args.spec else "")
    if isinstance(dfs_obj, list):
        dfs_obj = {f"y{i + 1}": v for i, v in enumerate(dfs_obj)}
    names = list(dfs_obj)
    orders = order if isinstance(order, list) else [order] * len(names)
    if len(orders) != len(names):
        raise InputError("/order", f"expected {len(names)} orders")
    order_map = dict(zip(names, [int(k) for k in orders]))
    vars = base.vars.extend(*[(y, "unfold") for y in names])
    bounds = base.bounds + tuple(order_map[y] for y in names)
    dfs = {y: vector_from_json(v, vars, bounds, f"/dfs/{y}") for y, v in dfs_obj.items()}
    for y, v in dfs.items():
        if len(v) != base.rank:
            raise InputError(f"/dfs/{y}", f"expected {base.rank} entries")
    return base, dfs, order_map


def cmd_unfold(args):
    base, dfs, order = _read_unfold_inputs(args)
    guard(base.rank, base.bounds + tuple(order.values()), 2 * len(base.vars) + 2 * len(order) + 2)
    process = [x.strip() for x in args.process.split(",")] if args.process else None
    omega = solve_unfolding(base, dfs, order, process=process)
    rep = flatness_residuals(omega)
    fc = first_column_residuals(omega, dfs)
    data = {"omega": omega.to_json(), "flatness": rep.to_json(), "first_column": fc.to_json()}
    text = _report_text("unfolded connection", rep) + "\n" + _report_text("first columns", fc)
    return RunReport(data, text, rep.passed and fc.passed)


def cmd_extend_pairing(args):
    omega = ConnectionForm.from_json(load_json(args.omega))
    pobj = load_json(args.pairing)
    try:
        P0 = MatrixSeries.from_json(pobj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("", f"bad pairing matrix: {exc}") from None
    data = extend_pairing(omega, P0, args.w)
    rep = data.report
    return RunReport({"pairing": data.R.to_json(), "report": rep.to_json()}, _report_text("pairing flatness", rep), rep.passed)


def cmd_universal_unfold(args):
    fts = load_fts(args.fts)
    order = _order(args.order)
    l = fts.rank - len(fts.vars)
    ks = order if isinstance(order, list) else [order] * l
    guard(fts.rank, fts.bounds + tuple(ks), 4 * (len(fts.vars) + l) + 4)
    uu = universal_unfold(fts, order)
    rep = uu.axioms
    data = {
        "germ": uu.germ.to_json(),
        "dfs": {k: [scalar_to_json(x) for x in v] for k, v in uu.dfs.items()},
        "axioms": rep.to_json(),
    }
    return RunReport(data, _report_text("Frobenius axioms", rep), rep.passed)


def cmd_qc_potential(args):
    model = load_model(args.model)
    gw = load_gw(args.gw, model)
    phi = _potential(args, model, gw)
    text = f"quantum part ({len(phi.quantum)} terms, bounds {dict(zip(phi.vars.names, phi.bounds))}):\n{phi.quantum.format()}"
    return RunReport(phi.to_json(), text)


def cmd_qc_product(args):
    model = load_model(args.model)
    gw = load_gw(args.gw, model)
    phi = _potential(args, model, gw)
    mats = quantum_product(model, phi)
    sym = frobenius_symmetry(model, mats)
    cup_ok = all(
        mats[i].constant_term()[k][j] == model.cup[i][j][k] for i in range(model.n) for j in range(model.n) for k in range(model.n)
    )
    rep = ConditionReport()
    rep.add("frobenius_symmetry", passed=not sym)
    rep.add("degenerates_to_cup", passed=cup_ok)
    lines = []
    for i, m in enumerate(mats):
        lines.append(f"{model.classes[i].name} * (.):")
        for row in m.rows:
            lines.append("  " + " | ".join(x.format() for x in row))
    text = "\n".join(lines) + "\n" + _report_text("product checks", rep)
    data = {"product": {model.classes[i].name: matrix_to_json(m) for i, m in enumerate(mats)}, "vars": list(mats[0].rows[0][0].vars.names), "bounds": list(mats[0].rows[0][0].bounds), "report": rep.to_json()}
    return RunReport(data, text, rep.passed)


def cmd_qc_wdvv(args):
    model = load_model(args.model)
    gw = load_gw(args.gw, model)
    phi = _potential(args, model, gw)
    rep = wdvv_report(model, phi)
    return RunReport(rep.to_json(), _report_text("WDVV", rep), rep.passed)


def cmd_qc_euler(args):
    model = load_model(args.model)
    gw = load_gw(args.gw, model)
    phi = _potential(args, model, gw)
    rep = euler_check(model, phi)
    return RunReport(rep.to_json(), _report_text("Euler grading", rep), rep.passed)


def cmd_qc_reconstruct(args):
    model = load_model(args.model)
    seed = load_gw(args.seed, model)
    W = _W(model, args.W) if args.W else model.h2
    deg = _max_degree(args.max_degree)
    table = reconstruct(model, seed, W, deg)
    return RunReport(table.to_json(model), _table_text(model, table))


def cmd_qc_to_fts(args):
    model = load_model(args.model)
    gw = load_gw(args.gw, model)
    phi = _potential(args, model, gw)
    W = _W(model, args.W) if args.W else model.h2
    fts = qc_to_fts(model, phi, W, t0_bound=args.t0_bound)
    rep = check_fts(fts)
    return RunReport({"fts": fts.to_json(), "report": rep.to_json()}, _report_text("Frobenius type structure", rep), rep.passed)


def _N(pm):
    return pm.N if pm.Nlist else linalg.zeros(pm.dim, pm.dim)


def cmd_hodge_weight(args):
    pm = load_pmhs(args.pmhs)
    N = pm.Nlist[args.index] if args.index is not None else _N(pm)
    W = weight_filtration(N, pm.w)
    rep = check_weight_filtration(N, pm.w, W)
    return RunReport({"W": W.to_json(), "report": rep.to_json()}, _filtration_text("W", W) + "\n" + _report_text("defining properties", rep), rep.passed)


def cmd_hodge_ipq(args):
    pm = load_pmhs(args.pmhs)
    rep = deligne_identities(pm)
    lines = [f"I^{p},{q}: dim {len(s)}" for (p, q), s in sorted(pm.Ipq.items())]
    lines += [f"I0^{p},{q}: dim {len(s)}" for (p, q), s in sorted(pm.I0.items())]
    data = {"Ipq": _pieces_json(pm.Ipq), "I0": _pieces_json(pm.I0), "report": rep.to_json()}
    return RunReport(data, "\n".join(lines) + "\n" + _report_text("splitting identities", rep), rep.passed)


def cmd_hodge_opposite(args):
    pm = load_pmhs(args.pmhs)
    U = opposite_filtration(pm.Ipq, pm.dim)
    rep = check_opposite(pm.F, U, pm.Nlist)
    return RunReport({"U": U.to_json(), "report": rep.to_json()}, _filtration_text("U", U) + "\n" + _report_text("oppositeness", rep), rep.passed)


def cmd_hodge_pmhs(args):
    pm = load_pmhs(args.pmhs)
    pol = check_polarization(pm)
    ids = deligne_identities(pm)
    ok = pol.passed and ids.passed
    data = {"polarization": pol.to_json(), "identities": ids.to_json(), "W": pm.W.to_json()}
    return RunReport(data, _report_text("polarization", pol) + "\n" + _report_text("splitting identities", ids), ok)


def cmd_hodge_cone(args):
    pm = load_pmhs(args.pmhs)
    if not pm.Nlist:
        raise InputError("/N", "the cone needs at least one nilpotent")
    samples = []
    for part in args.samples.split(";"):
        try:
            samples.append([rational(x) for x in part.split(",")])
        except (TypeError, ValueError) as exc:
            raise InputError("", f"bad sample {part!r}: {exc}") from None
    ok = cone_agreement(pm.Nlist, pm.w, samples)
    return RunReport({"agree": ok, "samples": [[str(x) for x in s] for s in samples]}, f"weight filtrations agree: {ok}", ok)


def _split(pm, bound):
    guard(pm.dim, (bound,) * len(pm.Nlist), 2 * len(pm.Nlist) + 3)
    return split_connection(pm, bound=bound)


def cmd_hodge_to_fts(args):
    pm = load_pmhs(args.pmhs)
    sr = _split(pm, args.bound)
    rep = check_fts(sr.fts)
    ok = rep.passed and sr.residues.passed
    data = {"fts": sr.fts.to_json(), "report": rep.to_json(), "residues": sr.residues.to_json(), "levels": sr.levels}
    return RunReport(data, _report_text("Frobenius type structure", rep) + "\n" + _report_text("residues of the flat part", sr.residues), ok)


def cmd_pipeline(args):
    pm = load_pmhs(args.pmhs)
    pol = check_polarization(pm)
    sr = _split(pm, args.bound)
    fts = sr.fts
    rep = check_fts(fts)
    gen = h2_generation(pm.F, pm.Nlist, pm.w)
    spectrum = rational_spectrum(fts.V.constant_term())
    u_zero = fts.U.is_zero()
    l = fts.rank - len(fts.vars)
    guard(fts.rank, fts.bounds + (args.order,) * l, 4 * fts.rank + 4)
    summary = ConditionReport()
    summary.add("polarized", passed=pol.passed)
    summary.add("fts", passed=rep.passed)
    summary.add("U_zero", passed=u_zero)
    summary.add("flat_part_residues_zero", passed=sr.residues.passed)
    summary.add("h2_generation", passed=bool(gen), detail=gen.detail)
    uu = None
    if gen:
        uu = universal_unfold(fts, args.order)
        summary.add("frobenius_axioms", passed=uu.axioms.passed)
        k = germ_flat_euler_kernel(uu.germ)
        summary.add("euler_kernel", passed=k == len(pm.Nlist), detail=f"dim ker(nabla E) = {k}")
    data = {
        "summary": summary.to_json(),
        "fts": fts.to_json(),
        "spectrum_V": [str(x) for x in spectrum] if spectrum is not None else None,
        "germ": uu.germ.to_json() if uu else None,
        "axioms": uu.axioms.to_json() if uu else None,
    }
    text = _report_text("pipeline", summary) + f"\nspec(V) = {{{', '.join(str(x) for x in sorted(spectrum or [], reverse=True))}}}"
    return RunReport(data, text, summary.passed)


def cmd_fixtures(args):
    os.makedirs(args.out, exist_ok=True)
    written = []
    for name, (mf, tf) in fixtures.QUANTUM_FIXTURES.items():
        m = mf()
        written.append(_write(os.path.join(args.out, f"{name}_model.json"), m.to_json()))
        written.append(_write(os.path.join(args.out, f"{name}_gw.json"), tf().to_json(m)))
    for name, (mf, sf) in fixtures.SEEDS.items():
        written.append(_write(os.path.join(args.out, f"{name}_seed.json"), sf().to_json(mf())))
    for name, f in fixtures.HODGE_FIXTURES.items():
        written.append(_write(os.path.join(args.out, f"{name}_pmhs.json"), f().to_json()))
    return RunReport({"written": written}, "\n".join(written))


def _write(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
    return path


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------


COMMANDS = {
    "validate": cmd_validate,
    "check-fts": cmd_check_fts,
    "fts-to-trtlep": cmd_fts_to_trtlep,
    "flatness": cmd_flatness,
    "unfold": cmd_unfold,
    "extend-pairing": cmd_extend_pairing,
    "universal-unfold": cmd_universal_unfold,
    "qc-potential": cmd_qc_potential,
    "qc-product": cmd_qc_product,
    "qc-wdvv": cmd_qc_wdvv,
    "qc-euler": cmd_qc_euler,
    "qc-reconstruct": cmd_qc_reconstruct,
    "qc-to-fts": cmd_qc_to_fts,
    "hodge-weight": cmd_hodge_weight,
    "hodge-ipq": cmd_hodge_ipq,
    "hodge-opposite": cmd_hodge_opposite,
    "hodge-pmhs": cmd_hodge_pmhs,
    "hodge-cone": cmd_hodge_cone,
    "hodge-to-fts": cmd_hodge_to_fts,
    "pipeline-vphs-to-frobenius": cmd_pipeline,
    "fixtures": cmd_fixtures,
}


def build_parser():
    p = argparse.ArgumentParser(prog="logfrob", description="Exact computations with logarithmic Frobenius structures.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text", help="stdout format")
    common.add_argument("--output", help="write the JSON result to this file")
    common.add_argument("--jobs", type=int, default=1, help="worker count (computations are currently sequential)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[common], help=help)

    s = add("validate", "validate an input file")
    s.add_argument("kind", choices=["model", "gw", "fts", "omega", "pmhs"])
    s.add_argument("file")
    s.add_argument("--model", help="model for validating a GW table")

    add("check-fts", "check a Frobenius type structure and the unfolding hypotheses").add_argument("--fts", required=True)
    add("fts-to-trtlep", "convert a Frobenius type structure to a trTLEP structure").add_argument("--fts", required=True)
    add("flatness", "flatness residuals of a connection form").add_argument("--omega", required=True)

    s = add("unfold", "solve the unfolding equations")
    s.add_argument("--spec", help="combined file with base, dfs and order")
    s.add_argument("--base")
    s.add_argument("--dfs")
    s.add_argument("--order")
    s.add_argument("--process", help="comma-separated processing order of the unfolding variables")

    s = add("extend-pairing", "extend a pairing along unfolding variables")
    s.add_argument("--omega", required=True)
    s.add_argument("--pairing", required=True)
    s.add_argument("--w", type=int, required=True)

    s = add("universal-unfold", "build the Frobenius germ of a Frobenius type structure")
    s.add_argument("--fts", required=True)
    s.add_argument("--order", required=True)

    for name, help in (
        ("qc-potential", "assemble the Gromov-Witten potential"),
        ("qc-product", "big quantum product"),
        ("qc-wdvv", "associativity residuals"),
        ("qc-euler", "Euler grading checks"),
        ("qc-to-fts", "Frobenius type structure of the quantum product on W"),
    ):
        s = add(name, help)
        s.add_argument("--model", required=True)
        s.add_argument("--gw", required=True)
        s.add_argument("--max-degree")
        s.add_argument("--bounds", help="explicit bounds such as q1=5,t2=14")
        if name == "qc-to-fts":
            s.add_argument("--W", help="comma-separated classes (default: H^2)")
            s.add_argument("--t0-bound", type=int, default=2)

    s = add("qc-reconstruct", "reconstruct invariants from a seed")
    s.add_argument("--model", required=True)
    s.add_argument("--seed", required=True)
    s.add_argument("--W", help="comma-separated generating classes (default: H^2)")
    s.add_argument("--max-degree", required=True)

    s = add("hodge-weight", "monodromy weight filtration")
    s.add_argument("--pmhs", required=True)
    s.add_argument("--index", type=int, help="use N_j instead of the sum of all N_j")
    add("hodge-ipq", "Deligne splitting").add_argument("--pmhs", required=True)
    add("hodge-opposite", "opposite filtration").add_argument("--pmhs", required=True)
    add("hodge-pmhs", "polarization and splitting checks").add_argument("--pmhs", required=True)
    s = add("hodge-cone", "weight filtrations across the monodromy cone")
    s.add_argument("--pmhs", required=True)
    s.add_argument("--samples", default="1,1;1,2;3,1", help="semicolon-separated coefficient vectors")
    s = add("hodge-to-fts", "split the nilpotent orbit connection")
    s.add_argument("--pmhs", required=True)
    s.add_argument("--bound", type=int, default=4)
    s = add("pipeline-vphs-to-frobenius", "nilpotent orbit to Frobenius germ")
    s.add_argument("--pmhs", required=True)
    s.add_argument("--bound", type=int, default=4)
    s.add_argument("--order", type=int, default=4)
    add("fixtures", "write the built-in fixtures as JSON").add_argument("--out", required=True)
    return p


def run_command(argv):
    """Parse and run; returns (exit code, RunReport or None, error message)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_INPUT if exc.code else EXIT_OK), None, ""
    try:
        rep = COMMANDS[args.command](args)
    except (InputError, StructuralError, NotNilpotent, TooLarge) as exc:
        return EXIT_INPUT, None, f"invalid input: {exc}"
    except (GenerationFailure, Underdetermined) as exc:
        return EXIT_SOLVER, None, f"solver failure: {exc}"
    except (
        Inconsistent,
        NotMHS,
        NotOpposite,
        NotGriffiths,
        MalformedPairing,
        PairingEscape,
        InternalConsistencyError,
        NotAUnit,
        NotIsomorphismCase,
        ValueError,
        ArithmeticError,
    ) as exc:
        return EXIT_CONDITION, None, f"condition failure: {type(exc).__name__}: {exc}"
    rep.format = args.format
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dumps(rep.data))
    return (EXIT_OK if rep.ok else EXIT_CONDITION), rep, ""


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    code, rep, err = run_command(argv)
    if err:
        print(err, file=sys.stderr)
    if rep is not None:
        sys.stdout.write(dumps(rep.data) if rep.format == "json" else rep.text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
