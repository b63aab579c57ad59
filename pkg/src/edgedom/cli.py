"""Command line front end.

Every subcommand prints one JSON document (or CSV with ``--format csv``).
Errors are printed as JSON too, with exit code 2 for bad input, 3 for an
infeasible request and 4 for an exhausted search budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import bounds, constructions, ifpairs, matching
from .core import (IncidenceFreePair, Polarity, classify, is_incidence_free, read_inc,
                   trim_pair, write_inc)
from .errors import BudgetExceeded, EdgeDomError, InvalidInput, NoPerfectMatching

FAMILIES = ("pg", "hd-paley", "menon-bush", "sbp-elation", "sbp-homology", "sbp-baer", "sbp-affine")
METHODS = ("exact", "polarity", "arc", "denniston", "random", "case1", "case2", "case3", "remark")
SWEEP_COLUMNS = ("instance", "v", "b", "k", "r", "lam", "best_lower", "best_upper",
                 "gamma", "certified", "nodes")


def sidecar_path(inc_path) -> Path:
    return Path(str(inc_path) + ".json")


def load_sidecar(inc_path) -> dict:
    path = sidecar_path(inc_path)
    if path.exists():
        return json.loads(path.read_text())
    return {}


def _load(path):
    D = read_inc(path)
    D.name = Path(path).stem
    return D, load_sidecar(path)


def _parse_S(text: str, n: int):
    if text == "weight1":
        return constructions.weight_one_set(n)
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(int(tok, 2) if len(tok) == n and set(tok) <= {"0", "1"} else int(tok))
    return out


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InvalidInput(f"family {args.family} needs --{' --'.join(missing)}")


# ----------------------------------------------------------------------
# commands


def cmd_construct(args) -> dict:
    fam = args.family
    info: dict = {"family": fam}
    polarity = None
    if fam == "pg":
        _need(args, "n", "q", "k")
        D = constructions.pg_points_kspaces(args.n, args.q, args.k)
        info.update(n=args.n, q=args.q, k=args.k)
        if args.k == args.n - 1:
            polarity = constructions.standard_polarity(args.n, args.q, D)
    elif fam == "hd-paley":
        _need(args, "q")
        D, polarity = constructions.paley_hadamard_design(args.q)
        info.update(q=args.q)
    elif fam == "menon-bush":
        _need(args, "h")
        M = constructions.bush_type_hadamard(args.h, args.matrix)
        D = constructions.menon_from_hadamard(M, args.eps)
        info.update(h=args.h, eps=args.eps)
    elif fam in ("sbp-elation", "sbp-homology", "sbp-baer"):
        _need(args, "q")
        gen = {"sbp-elation": constructions.sbp_elation,
               "sbp-homology": constructions.sbp_homology,
               "sbp-baer": constructions.sbp_baer}[fam]
        D = gen(args.q)
        info.update(q=args.q)
    else:
        _need(args, "n")
        S = _parse_S(args.s, args.n)
        D = constructions.sbp_affine_binary(args.n, S)
        info.update(n=args.n, S=constructions.check_affine_set(args.n, S))
    write_inc(D, args.out)
    side = dict(info, polarity=list(polarity.sigma) if polarity is not None else None)
    sidecar_path(args.out).write_text(json.dumps(side) + "\n")
    return {"out": str(args.out), "family": info, "params": classify(D).as_dict()}


def cmd_classify(args) -> dict:
    D, _ = _load(args.inc)
    return {"params": classify(D).as_dict()}


def cmd_bounds(args):
    D, side = _load(args.inc)
    fam = side if side.get("family") else None
    rep = bounds.bounds_report(D, family=fam, spectral=args.spectral, name=D.name)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("name", "kind", "raw", "integer", "hypothesis_ok"))
        for e in rep.to_json()["bounds"]:
            w.writerow((e["name"], e["kind"], e["raw"], e["integer"], e["hypothesis_ok"]))
        return buf.getvalue()
    out = rep.to_json()
    out.update(best_lower=rep.best_lower(), best_upper=rep.best_upper())
    return out


def cmd_gamma(args) -> dict:
    D, _ = _load(args.inc)
    return matching.gamma_exact(D, budget=args.budget).to_json()


def _polarity(D, side, args) -> Polarity:
    if args.polarity:
        sigma = json.loads(Path(args.polarity).read_text())
        sigma = sigma["polarity"] if isinstance(sigma, dict) else sigma
    else:
        sigma = side.get("polarity")
    if not sigma:
        raise InvalidInput("no polarity known for this structure (use --polarity)")
    pol = Polarity(tuple(int(s) for s in sigma))
    pol.check(D)
    return pol


def _family_model_check(D, side, fam, *keys):
    if side.get("family") != fam:
        raise InvalidInput(f"method needs a structure built with --family {fam}")
    return [side[k] for k in keys]


def cmd_ifpair(args) -> dict:
    D, side = _load(args.inc)
    m = args.method
    extra: dict = {}
    if m == "exact":
        res = ifpairs.alpha_exact(D, budget=args.budget)
        pair = res.pair
        extra = {"certified": res.certified, "upper_bound": res.upper_bound, "nodes": res.nodes}
    elif m == "polarity":
        pol = _polarity(D, side, args)
        R = ifpairs.polarity_graph(D, pol)
        C = (ifpairs.coclique_greedy(R, args.seed) if args.greedy
             else ifpairs.coclique_exact(R, budget=args.budget))
        pair = ifpairs.from_coclique(D, pol, C)
        if args.greedy:
            pair = IncidenceFreePair(pair.X, pair.Y, "polarity", args.seed)
    elif m == "arc":
        if args.order is None:
            raise InvalidInput("--method arc needs --order")
        arc = ifpairs.maximal_arc_search(D, args.order, budget=args.budget)
        pair = arc.to_pair()
        extra = {"arc": arc.to_json()}
    elif m == "denniston":
        n, q, k = _family_model_check(D, side, "pg", "n", "q", "k")
        if (n, k) != (2, 1) or args.order is None:
            raise InvalidInput("denniston needs a PG(2,q) structure and --order")
        P, arc = ifpairs.denniston_arc(q, args.order)
        if P != D:
            raise InvalidInput("structure differs from the generated PG(2,q)")
        pair = arc.to_pair()
        extra = {"arc": arc.to_json()}
    elif m == "random":
        pair = ifpairs.random_ifpair(D, seed=args.seed, trials=args.trials)
        extra = dict(pair.extra or {})
    else:
        fam, key, fn = {"case1": ("sbp-elation", "q", ifpairs.ifpair_elation),
                        "case2": ("sbp-homology", "q", ifpairs.ifpair_homology),
                        "case3": ("sbp-baer", "q", ifpairs.ifpair_baer),
                        "remark": ("sbp-affine", "n", ifpairs.ifpair_affine_remark)}[m]
        (val,) = _family_model_check(D, side, fam, key)
        if fam == "sbp-affine" and side["S"] != constructions.weight_one_set(val):
            raise InvalidInput("remark pair needs S = weight-one vectors")
        pair = fn(val)
        extra = dict(pair.extra or {})
    if not is_incidence_free(D, pair.X, pair.Y):
        raise InvalidInput("constructed pair does not fit this structure")
    X, Y = pair.X, pair.Y
    if len(X) != len(Y):
        X, Y = trim_pair(X, Y)
        pair = IncidenceFreePair(X, Y, pair.method, pair.seed, pair.extra)
    out = pair.to_json(verified=True)
    if extra:
        out["extra"] = extra
    return out


def cmd_dominate(args) -> dict:
    D, _ = _load(args.inc)
    pair = IncidenceFreePair.from_json(json.loads(Path(args.pair).read_text()))
    return matching.dominating_from_ifpair(D, pair).to_json()


def cmd_spectrum(args) -> dict:
    D, _ = _load(args.inc)
    return bounds.spectrum_exact(D).to_json()


def _verify_json(D, side, data) -> tuple[bool, str, str]:
    if isinstance(data, list):
        data = {"polarity": data}
    if isinstance(data.get("family"), str) or set(data) == {"polarity"}:
        # a structure sidecar or a bare polarity
        pol = data.get("polarity")
        if pol is None:
            return True, "sidecar", "no polarity recorded"
        ok = Polarity(tuple(pol)).is_polarity(D)
        return ok, "polarity", "polarity" if ok else "not a polarity"
    if "X" in data and "Y" in data:
        ok = is_incidence_free(D, data["X"], data["Y"])
        ok = ok and data.get("alpha", min(len(data["X"]), len(data["Y"]))) == min(
            len(data["X"]), len(data["Y"]))
        return ok, "pair", "incidence-free" if ok else "pair has an incidence"
    if "edges" in data:
        edges = [tuple(e) for e in data["edges"]]
        ok = matching.is_edge_dominating(D, edges)
        why = "dominating" if ok else "some edge is not dominated"
        if ok and (data.get("is_maximal_matching") or "gamma" in data):
            ok = matching.is_matching(edges)
            why = "maximal matching" if ok else "edges are not a matching"
        if ok and "gamma" in data and data["gamma"] != len(edges):
            ok, why = False, "gamma differs from the witness size"
        return ok, "dominating_set", why
    if "S" in data:
        n = ifpairs.is_maximal_arc(D, data["S"])
        ok = n == data.get("n", n) and n is not None
        if ok and "T" in data:
            ok = tuple(data["T"]) == ifpairs.dual_arc(D, data["S"])
        return ok, "arc", "maximal arc" if ok else "not a maximal arc of the stated order"
    if "eigenvalues" in data:
        fresh = bounds.spectrum_exact(D).to_json()["eigenvalues"]
        old = data["eigenvalues"]
        ok = len(fresh) == len(old) and all(
            m1 == m2 and abs(x1 - x2) <= 1e-9 * max(1.0, abs(x1))
            for (x1, m1), (x2, m2) in zip(fresh, old))
        return ok, "spectrum", "spectrum" if ok else "eigenvalues differ"
    if "bounds" in data:
        fam = side if side.get("family") else None
        fresh = bounds.bounds_report(D, family=fam).to_json()["bounds"]
        want = {e["name"]: e["integer"] for e in fresh}
        ok = all(want.get(e["name"]) == e["integer"] for e in data["bounds"])
        return ok, "bounds", "bounds" if ok else "bound values differ"
    if "params" in data:
        ok = classify(D).as_dict() == data["params"]
        return ok, "params", "parameters" if ok else "parameters differ"
    raise InvalidInput("unrecognised artifact")


def cmd_verify(args) -> dict:
    path = Path(args.artifact)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if data is None:
        M = constructions.read_hadamard(path)
        out = {"artifact": "hadamard", "n": M.n, "normalized": M.normalized,
               "regular": M.regular, "symmetric": M.symmetric, "bush_type": M.bush_type}
        ok, why = True, "Hadamard matrix"
    else:
        if args.inc is None:
            raise InvalidInput("verifying this artifact needs the structure file")
        D, side = _load(args.inc)
        ok, kind, why = _verify_json(D, side, data)
        out = {"artifact": kind}
    out.update(valid=ok, reason=why)
    if not ok:
        out["exit_code"] = 3
    return out


def cmd_sweep(args):
    rows = []
    for path in args.inc:
        D, side = _load(path)
        rep = bounds.bounds_report(D, family=side if side.get("family") else None,
                                   spectral=args.spectral, name=D.name)
        p = rep.params
        row = {"instance": D.name, "v": p.v, "b": p.b, "k": p.k, "r": p.r, "lam": p.lam,
               "best_lower": rep.best_lower(), "best_upper": rep.best_upper(),
               "gamma": None, "certified": False, "nodes": 0}
        try:
            res = matching.gamma_exact(D, budget=args.budget)
            row.update(gamma=res.gamma, certified=True, nodes=res.nodes)
        except BudgetExceeded as exc:
            row.update(gamma=exc.upper, certified=False, nodes=exc.nodes)
        rows.append(row)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    return {"rows": rows}


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edgedom", description=__doc__.splitlines()[0])
    ap.add_argument("--no-timing", action="store_true",
                    help="omit the wall-clock field so output is byte-identical across runs")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a family member and write it as .inc")
    c.add_argument("--family", required=True, choices=FAMILIES)
    c.add_argument("--n", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--h", type=int)
    c.add_argument("--eps", type=int, default=-1, choices=(-1, 1))
    c.add_argument("--s", default="weight1",
                   help="'weight1' or comma-separated vectors (bit strings or integers)")
    c.add_argument("--matrix", help="Hadamard matrix file for menon-bush")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("classify", help="parameters and classification flags")
    c.add_argument("inc")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("bounds", help="all applicable bounds on the edge domination number")
    c.add_argument("inc")
    c.add_argument("--spectral", action=argparse.BooleanOptionalAction, default=True)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.set_defaults(func=cmd_bounds)

    c = sub.add_parser("gamma", help="exact edge domination number with witness")
    c.add_argument("inc")
    c.add_argument("--budget", type=int, default=matching.DEFAULT_BUDGET)
    c.set_defaults(func=cmd_gamma)

    c = sub.add_parser("ifpair", help="construct an incidence-free pair")
    c.add_argument("inc")
    c.add_argument("--method", required=True, choices=METHODS)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--trials", type=int, default=20)
    c.add_argument("--budget", type=int, default=matching.DEFAULT_BUDGET)
    c.add_argument("--order", type=int, help="arc order for arc/denniston")
    c.add_argument("--greedy", action="store_true", help="greedy coclique instead of exact")
    c.add_argument("--polarity", help="JSON file with the polarity as a list")
    c.set_defaults(func=cmd_ifpair)

    c = sub.add_parser("dominate", help="edge dominating set from an incidence-free pair")
    c.add_argument("inc")
    c.add_argument("--pair", required=True)
    c.set_defaults(func=cmd_dominate)

    c = sub.add_parser("spectrum", help="adjacency spectrum of the incidence graph")
    c.add_argument("inc")
    c.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("verify", help="re-check an artifact against its predicate")
    c.add_argument("inc", nargs="?")
    c.add_argument("--artifact", required=True)
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("sweep", help="bounds and exact values for several instances")
    c.add_argument("inc", nargs="+")
    c.add_argument("--budget", type=int, default=matching.DEFAULT_BUDGET)
    c.add_argument("--spectral", action=argparse.BooleanOptionalAction, default=True)
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.set_defaults(func=cmd_sweep)
    return ap


def _error_json(exc: EdgeDomError) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    if isinstance(exc, NoPerfectMatching):
        out["hall_violator"] = exc.certificate.to_json()
    if isinstance(exc, BudgetExceeded):
        out.update(lower=exc.lower, upper=exc.upper, nodes=exc.nodes)
        w = exc.witness
        if w is not None:
            out["witness"] = w.to_json() if hasattr(w, "to_json") else w
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    code = 0
    try:
        result = args.func(args)
    except EdgeDomError as exc:
        result = _error_json(exc)
        code = exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        result = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
        code = 2
    if isinstance(result, str):
        sys.stdout.write(result)
        return code
    code = result.get("exit_code", code)
    out = {"command": args.command}
    out.update(result)
    if not args.no_timing:
        out["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
