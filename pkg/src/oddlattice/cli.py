"""Command-line front end: every subcommand prints one JSON report.

Exit codes: 0 all checks pass, 1 a checked condition failed (the report
carries the witness), 2 usage or budget error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__

SCHEMA = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        return {"command": self.command, "params": self.params, "seed": self.seed}


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


# ---------------------------------------------------------------------------
# subcommands; each returns (ok, result, conditions)


def cmd_odd(a):
    from .complexes import (automorphisms, build_odd, fixator_report, girth, is_superstar_transitive,
                            odd_automorphisms, odd_to_json)
    K = build_odd(a.d)
    if a.format == "dot":
        return True, K.to_dot(f"O_{a.d}"), []
    if a.format == "graph-json":
        return True, json.loads(odd_to_json(a.d, K)), []
    res = {"d": a.d, "vertices": len(K), "edges": len(K.edges()), "girth": girth(K),
           "triangle_free": K.is_triangle_free(), "regular": K.is_regular()}
    conds = ["girth"]
    if a.automorphisms:
        if len(K) > 40:
            raise UsageError("brute-force automorphisms are capped at 40 vertices")
        res["aut_order_bruteforce"] = str(len(automorphisms(K)))
        res["aut_order_sym"] = str(math.factorial(2 * a.d - 1))
        conds.append("automorphisms")
    if a.fixators:
        mode = "brute" if a.d <= 4 else "chain"
        res["fixators"] = {t: str(fixator_report(a.d, t, mode=mode).order)
                           for t in ("vertex", "edge", "star", "edge-star")}
        conds.append("fixators")
    ok = True
    if a.superstar:
        rep = is_superstar_transitive(K, odd_automorphisms(a.d, K) if len(K) > 40 else None)
        res["superstar"] = rep.to_json()
        ok = rep.holds
        conds.append("superstar-transitive")
    return ok, res, conds


def cmd_ball(a):
    from .complexes import build_odd
    from .coxeter import RacgPresentation, build_ball
    from .geometry import lsup_metric
    P = RacgPresentation(build_odd(a.d))
    try:
        ball = build_ball(P, a.radius, a.metric, cap=a.budget)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if a.format == "dot":
        return True, ball.to_dot(), []
    res = {"d": a.d, "radius": a.radius, "metric": a.metric, "vertices": len(ball),
           "sphere_sizes": ball.sphere_sizes()}
    if a.metric == "linf":
        res["king_bfs_sphere_sizes"] = lsup_metric(ball).sphere_sizes()
    return True, res, []


def cmd_claims(a):
    from .complexes import build_odd, odd_automorphisms
    from .coxeter import RacgPresentation
    from .geometry import InapplicableError, classify_sphere, king_ball, sphere_representatives, verify_sphere_claims
    L = build_odd(a.d)
    P = RacgPresentation(L)
    explicit = not a.orbits
    king = king_ball(P, a.radius, implicit=not explicit)
    out = {"d": a.d, "radius": a.radius, "base": "identity (vertex-transitive)",
           "vertices": "all" if explicit else "orbit representatives", "spheres": {}}
    reps = None if explicit else sphere_representatives(king, a.radius, odd_automorphisms(a.d, L))
    ok = True
    try:
        for n in range(1, a.radius + 1):
            vs = None if explicit else reps[n]
            s = classify_sphere(king, n).counts() if explicit else {"representatives": len(vs)}
            r = verify_sphere_claims(king, n, vs, paths=not a.no_paths)
            out["spheres"][str(n)] = {"structure": s, **r.to_json()}
            ok &= r.ok
    except InapplicableError as e:
        raise UsageError(str(e)) from None
    return ok, out, ["free-or-partly-free", "no-three-consecutive-partly-free", "block-in-one-sector",
                     "unique-up-path", "down-is-reverse-up", "path-concatenation"]


def cmd_universal(a):
    from .universal import product_structure_report
    if a.d > 4 and not a.large:
        raise UsageError(f"d={a.d} restriction groups are large; pass --large to run them")
    res = {"product": product_structure_report(a.d, a.n, "all" if a.all_centres else "orbits")}
    ok = res["product"]["ok"]
    conds = ["order", "commuting-factors", "square-determination", "free-vertex-determined"]
    if a.density:
        from .complexes import build_odd, odd_automorphisms
        from .coxeter import RacgPresentation
        from .geometry import king_ball
        from .universal import density_condition_check, u_generators
        L = build_odd(a.d)
        P = RacgPresentation(L)
        king = king_ball(P, 2)
        dens = density_condition_check(u_generators(king, odd_automorphisms(a.d, L)), king)
        res["density"] = dens
        ok &= dens["holds"]
        conds.append("density")
    return ok, res, conds


def cmd_scaffold(a):
    from .construction import scaffolding_formulas, verify_scaffolding
    S = scaffolding_formulas(a.n, a.d)
    res = {"scaffolding": S.to_json()}
    ok = True
    if a.verify:
        rep = verify_scaffolding(S)
        res["verification"] = rep
        ok = rep["ok"]
    return ok, res, ["E1", "E2", "E3", "E4"] if a.verify else []


def _load_bmw(path):
    from .bmw import BmwPresentation
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, list):
        return [BmwPresentation.from_json(o) for o in obj]
    return [BmwPresentation.from_json(obj)]


def _search(a):
    from .bmw import SearchFilters, search_involutive
    f = SearchFilters(a.transitive_x, a.transitive_a, a.alt_x, a.alt_a, a.limit)
    try:
        return search_involutive(a.m, a.n, f, seed=a.seed, max_tables=a.budget)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_bmw(a):
    from .bmw import order_of_local_actions, validate
    if a.action == "validate":
        if not a.input:
            raise UsageError("bmw validate needs --input")
        reps = []
        for P in _load_bmw(a.input):
            r = validate(P)
            if r["valid"]:
                ox, oa = order_of_local_actions(P)
                r["order_xi"], r["order_alpha"] = str(ox), str(oa)
            reps.append(r)
        return all(r["valid"] for r in reps), {"reports": reps}, ["bmw-valid"]
    st = _search(a)
    res = {"found": [P.to_json() for P in st.found], "exhausted": st.exhausted, "resume": st.resume}
    return True, res, []


def _fixtures(a):
    if a.input:
        return _load_bmw(a.input)
    st = _search(a)
    if not st.found:
        raise UsageError("search produced no presentation")
    return st.found


def cmd_lattice(a):
    from .construction import (build_interlacing, build_scaffolding, check_embedding, check_link,
                               development_report, emit_lattice, hand_pair_d4, local_action_report,
                               trivial_pair, verify_interlacing)
    if a.action == "develop":
        pair = hand_pair_d4() if a.pair == "hand" else trivial_pair(a.d, a.c)
        rep = development_report(emit_lattice(pair), a.radius)
        return rep["ok"], rep, ["development-counts", "interior-links"]
    G = _fixtures(a)[0]
    S = build_scaffolding(G.n)
    pair = build_interlacing(G, S, verify=False)
    if a.action == "build":
        rep = verify_interlacing(pair)
        res = {"pair": pair.to_json(), "verification": rep}
        if rep["ok"]:
            res["presentation"] = emit_lattice(pair).to_json() if a.full else emit_lattice(pair).counts()
        return rep["ok"], res, ["D1", "D2", "D3", "D4", "D5"]
    if a.action == "verify-link":
        rep = check_link(emit_lattice(pair))
        return rep["ok"], rep, ["link-is-join", "flag"]
    if a.action == "local-actions":
        rep = local_action_report(pair)
        return rep["ok"], rep, ["alternating-local-actions"]
    rep = check_embedding(G, pair, S)
    return rep["ok"], rep, ["embedding"]


def cmd_pipeline(a):
    from .construction import pipeline
    fx = _fixtures(a)
    reps = [pipeline(G, link=not a.no_link) for G in fx]
    res = {"fixtures": [{"bmw": G.to_json(), **r} for G, r in zip(fx, reps)],
           "constructed": sorted({(r["c"], r["d"]) for r in reps})}
    return all(r["ok"] for r in reps), res, ["E1", "E2", "E3", "E4", "D1", "D2", "D3", "D4", "D5",
                                             "link-is-join", "flag", "alternating-local-actions", "embedding"]


# ---------------------------------------------------------------------------


def _search_args(p):
    p.add_argument("--m", type=_positive, default=5)
    p.add_argument("--n", type=_positive, default=5)
    p.add_argument("--alt-x", action="store_true", help="alpha side generates Alt_m")
    p.add_argument("--alt-a", action="store_true", help="xi side generates Alt_n")
    p.add_argument("--transitive-x", action="store_true")
    p.add_argument("--transitive-a", action="store_true")
    p.add_argument("--limit", type=_positive, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=_positive, default=2_000_000, help="max complete tables visited")
    p.add_argument("--input", help="BMW JSON file (object or list)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oddlattice", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("odd", "complexes"):
        p = sub.add_parser(name, help="Odd graph reports and export")
        p.add_argument("--d", type=_positive, required=True)
        p.add_argument("--format", choices=["report", "graph-json", "dot"],
                       default="report" if name == "odd" else "graph-json")
        p.add_argument("--automorphisms", action="store_true")
        p.add_argument("--fixators", action="store_true")
        p.add_argument("--superstar", action="store_true")
        p.set_defaults(func=cmd_odd)

    p = sub.add_parser("ball", help="Davis balls in the graph or l-infinity metric")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--metric", choices=["graph", "linf"], default="graph")
    p.add_argument("--budget", type=_positive, default=2_000_000, help="max vertices")
    p.add_argument("--format", choices=["report", "dot"], default="report")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("claims", help="sphere claims in an l-infinity ball")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--radius", type=_positive, required=True)
    p.add_argument("--orbits", action="store_true", help="check orbit representatives only")
    p.add_argument("--no-paths", action="store_true")
    p.set_defaults(func=cmd_claims)

    p = sub.add_parser("universal", help="restriction groups and the density condition")
    p.add_argument("--d", type=_positive, default=4)
    p.add_argument("--n", type=_positive, default=1)
    p.add_argument("--density", action="store_true")
    p.add_argument("--all-centres", action="store_true")
    p.add_argument("--large", action="store_true", help="allow d > 4")
    p.set_defaults(func=cmd_universal)

    p = sub.add_parser("scaffold", help="build an n-scaffolding")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--d", type=_positive, default=None)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_scaffold)

    p = sub.add_parser("bmw", help="validate or search involutive BMW presentations")
    p.add_argument("action", choices=["validate", "search"])
    _search_args(p)
    p.set_defaults(func=cmd_bmw)

    p = sub.add_parser("lattice", help="interlacing pair, presentation and checks")
    p.add_argument("action", choices=["build", "verify-link", "develop", "local-actions", "embed"])
    _search_args(p)
    p.add_argument("--full", action="store_true", help="include the full presentation")
    p.add_argument("--pair", choices=["hand", "trivial"], default="hand", help="pair for develop")
    p.add_argument("--d", type=_positive, default=4)
    p.add_argument("--c", type=_positive, default=3)
    p.add_argument("--radius", type=_positive, default=2)
    p.set_defaults(func=cmd_lattice, alt_x=True, alt_a=True)

    p = sub.add_parser("pipeline", help="BMW search to lattice presentation, with every check")
    _search_args(p)
    p.add_argument("--no-link", action="store_true")
    p.set_defaults(func=cmd_pipeline, alt_x=True, alt_a=True)
    return ap


def run(argv=None) -> int:
    from .construction import ConstructionError
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    if a.command in ("pipeline", "lattice") and a.seed is None and a.input is None:
        a.seed = 1
    params = {k: v for k, v in sorted(vars(a).items()) if k not in ("func", "command", "output")}
    cfg = RunConfig(a.command, params, a.output, getattr(a, "seed", None))
    try:
        ok, result, conds = a.func(a)
    except UsageError as e:
        print(_dumps({"version": __version__, "error": str(e), "config": cfg.to_json()}), file=sys.stderr)
        return 2
    except ConstructionError as e:
        ok, result, conds = False, {"error": str(e), "witness": e.report}, []
    if isinstance(result, str):
        text = result
    else:
        text = _dumps({"schema": SCHEMA, "version": __version__, "config": cfg.to_json(),
                       "conditions": conds, "ok": ok, "result": result})
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
