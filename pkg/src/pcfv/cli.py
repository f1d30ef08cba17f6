"""Command-line front end: ``pcfv <command> ...``.

Exit codes: 0 ok or no difference found, 1 a check failed, 2 the program was
rejected (syntax or type error), 3 fuel exhausted, 4 confirmed different,
5 candidate different, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .opsem import Converged, evaluate
from .syntax import ParseError, is_value, parse, parse_type, pretty, pretty_type
from .typecheck import TypeCheckError, check

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_REJECTED = 2
EXIT_EXHAUSTED = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


def _emit(args, text: str, data=None):
    if args.json and data is not None:
        print(json.dumps(data, ensure_ascii=False, indent=2))
    else:
        print(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def _load_program(path: str, want_comp: bool = True):
    """Parse and typecheck a closed program; values are wrapped in ``return``."""
    from .syntax import Ret
    term = parse(_read(path))
    ty = check([], term)
    if want_comp and is_value(term):
        term = Ret(term)
    return term, ty


def _type_arg(s: str):
    try:
        return parse_type(s)
    except ParseError as e:
        raise UsageError(f"bad type {s!r}: {e}") from None


# ---------------------------------------------------------------------------
# program commands


def cmd_check(args) -> int:
    term, ty = _load_program(args.file, want_comp=False)
    kind = "value" if is_value(term) else "computation"
    _emit(args, f"{kind} : {pretty_type(ty)}", {"kind": kind, "type": pretty_type(ty)})
    return EXIT_OK


def cmd_run(args) -> int:
    term, ty = _load_program(args.file)
    out = evaluate(term, args.fuel)
    if isinstance(out, Converged):
        _emit(args, str(out), {"outcome": "converged", "value": pretty(out.value), "steps": out.steps})
        return EXIT_OK
    _emit(args, str(out), {"outcome": "exhausted", "fuel": out.fuel})
    return EXIT_EXHAUSTED


def cmd_psi(args) -> int:
    from .truncation import psi
    ty = _type_arg(args.type)
    term = psi(ty, args.level, args.var)
    _emit(args, pretty(term), {"type": pretty_type(ty), "level": args.level, "term": pretty(term)})
    return EXIT_OK


def cmd_enum(args) -> int:
    from .truncation import BasisCache, point_str, point_to_json
    ty = _type_arg(args.type)
    cache = BasisCache(args.level, args.budget, args.fuel)
    b = cache.get(ty)
    lines = [f"{len(b)} points of {pretty_type(ty)} at level {args.level}"
             + ("" if b.exact else f" (term basis, budget {args.budget})")]
    for p, v in b.entries:
        lines.append(f"{point_str(p)}    {pretty(v)}")
    data = {"type": pretty_type(ty), "level": args.level, "exact": b.exact, "basis": b.id,
            "points": [{"point": point_to_json(p), "realizer": pretty(v)} for p, v in b.entries]}
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_tabulate(args) -> int:
    from .truncation import tabulate
    term, ty = _load_program(args.file)
    table = tabulate(term, ty, args.level, args.fuel, args.budget)
    _emit(args, str(table), table.to_json())
    return EXIT_OK


def cmd_equiv(args) -> int:
    from .truncation import ConfirmedDifferent, CandidateDifferent, equiv
    t1, ty1 = _load_program(args.file1)
    t2, ty2 = _load_program(args.file2)
    if ty1 != ty2:
        raise TypeCheckError("equiv", t2, f"types differ: {pretty_type(ty1)} vs {pretty_type(ty2)}")
    v = equiv(t1, t2, ty1, args.level, args.fuel, args.budget)
    data = {"verdict": type(v).__name__, "level": args.level, "fuel": args.fuel, "budget": args.budget}
    if isinstance(v, ConfirmedDifferent):
        data.update(witness=pretty(v.witness.body), left=pretty(v.observation_left),
                    right=pretty(v.observation_right), path=list(v.path))
    elif isinstance(v, CandidateDifferent):
        data.update(path=list(v.entry_path))
    _emit(args, str(v), data)
    return v.exit_code


# ---------------------------------------------------------------------------
# SSP and sites


def cmd_ssp(args) -> int:
    from .ssp import check_axioms, closure, ssp_from_json, ssp_to_json
    carrier, system = ssp_from_json(_read_json(args.file))
    if args.ssp_cmd == "check":
        bad = check_axioms(carrier, system)
        if bad is None:
            _emit(args, "ok", {"ok": True})
            return EXIT_OK
        _emit(args, str(bad), {"ok": False, "axiom": bad.axiom, "detail": bad.detail})
        return EXIT_FAILED
    o = closure(carrier, system)
    _emit(args, str(o), ssp_to_json(o))
    return EXIT_OK


def _cf_from_json(data):
    from .sites import CFPresentation
    from .ssp import SSPObject, ssp_from_json
    objs = {}
    for name, o in data["objects"].items():
        carrier, system = ssp_from_json(o)
        objs[name] = SSPObject(carrier, system)
    morphs = [(m.get("name", f"m{i}"), m["src"], m["tgt"], dict(m["map"]))
              for i, m in enumerate(data.get("morphisms", []))]
    return CFPresentation(objs, morphs)


def _report(args, rep) -> int:
    data = {"ok": rep.ok, "checked": rep.checked,
            "violations": [{"check": v.check, "detail": v.detail} for v in rep.violations]}
    _emit(args, str(rep), data)
    return EXIT_OK if rep.ok else EXIT_FAILED


def _presheaf_from_json(site, data):
    from .sites import (
        delta_site, function_presheaf, representable, set_presheaf, sheafify_representable,
    )
    kind = data.get("kind")
    if kind == "set":
        return set_presheaf(site, tuple(data["values"]))
    if kind == "delta":
        return delta_site(site)
    if kind in ("representable", "sheafified"):
        obj = data["object"]
        if obj not in site.points:
            raise UsageError(f"unknown object {obj!r}")
        return representable(site, obj) if kind == "representable" else sheafify_representable(site, obj)
    if kind == "functions":
        vals = {a: [tuple(_freeze(x) for x in s) for s in data["values"].get(a, [])]
                for a in site.objects}
        return function_presheaf(site, vals, data.get("name", "P"))
    raise UsageError(f"unknown presheaf kind {kind!r}")


def _freeze(x):
    return tuple(_freeze(y) for y in x) if isinstance(x, list) else x


def cmd_site(args) -> int:
    from .sites import (
        build_site, check_generic_semidecidable, check_presheaf, check_site, delta_site, is_sheaf,
        site_from_basis, site_from_json, site_to_json, sum_sites,
    )
    sc = args.site_cmd
    if sc == "build":
        site = build_site(_cf_from_json(_read_json(args.file)))
        _emit(args, json.dumps(site_to_json(site), ensure_ascii=False, indent=2), site_to_json(site))
        return EXIT_OK
    if sc == "check":
        site = site_from_json(_read_json(args.file))
        rep = check_site(site)
        if site.delta is not None:
            rep.merge(check_generic_semidecidable(site))
            fail = is_sheaf(delta_site(site))
            if fail is not None:
                rep.add("Δ", f"not a sheaf: {fail}")
        return _report(args, rep)
    if sc == "sheaf":
        site = site_from_json(_read_json(args.site))
        P = _presheaf_from_json(site, _read_json(args.presheaf))
        rep = check_presheaf(P)
        if not rep.ok:
            return _report(args, rep)
        fail = is_sheaf(P)
        if fail is None:
            _emit(args, "sheaf", {"sheaf": True})
            return EXIT_OK
        _emit(args, f"not a sheaf: {fail}", {"sheaf": False, "kind": fail.kind,
                                             "object": str(fail.cover[0]),
                                             "legs": len(fail.cover[1])})
        return EXIT_FAILED
    if sc == "sum":
        sites = [site_from_json(_read_json(f)) for f in args.files]
        s = sum_sites(sites)
        _emit(args, json.dumps(site_to_json(s), ensure_ascii=False, indent=2), site_to_json(s))
        return EXIT_OK
    if sc == "from-basis":
        from .truncation import point_str
        types = [_type_arg(t) for t in args.types.split(",")]
        cf = site_from_basis(args.level, args.fuel, args.budget, types)
        site = build_site(cf)
        rep = check_site(site)
        rep.merge(check_generic_semidecidable(site))
        data = {
            "objects": {k: {"carrier": [point_str(a) for a in o.atoms()], "partitions": len(o.system),
                            "semidecidable": len(o.semidecidable())} for k, o in cf.objects.items()},
            "morphisms": len(cf.morphisms),
            "site": {"objects": len(site.objects), "morphisms": site.n_morphisms(),
                     "covers": len(site.covers)},
            "checks": {"ok": rep.ok, "violations": [str(v) for v in rep.violations]},
        }
        lines = [f"{k}: {len(o.carrier)} points, {len(o.system)} partitions"
                 for k, o in cf.objects.items()]
        lines.append(f"{len(cf.morphisms)} morphisms between types")
        lines.append(f"site: {len(site.objects)} objects, {site.n_morphisms()} morphisms, "
                     f"{len(site.covers)} covers")
        lines.append("checks: " + str(rep))
        _emit(args, "\n".join(lines), data)
        return EXIT_OK if rep.ok else EXIT_FAILED
    raise UsageError("missing site subcommand")


# ---------------------------------------------------------------------------
# suites


def cmd_vnat_test(args) -> int:
    from .suites import criterion_10
    r = criterion_10(seed=args.seed, samples=args.samples)
    _emit(args, r.line(), {"passed": r.passed, "checked": r.checked,
                           "violations": [repr(v) for v in r.violations[:20]]})
    return EXIT_OK if r.passed else EXIT_FAILED


def cmd_suite(args) -> int:
    from .suites import run_all
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise UsageError("--only takes a comma-separated list of criterion numbers") from None
    echo = None if args.json else print
    results = run_all(seed=args.seed, only=only, echo=echo)
    if args.json:
        print(json.dumps([{"criterion": r.number, "title": r.title, "passed": r.passed,
                           "checked": r.checked, "violations": len(r.violations),
                           "notes": r.notes} for r in results], ensure_ascii=False, indent=2))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    level = argparse.ArgumentParser(add_help=False)
    level.add_argument("--level", "-n", type=int, default=1)
    level.add_argument("--fuel", type=int, default=10_000)
    level.add_argument("--budget", type=int, default=8)

    p = argparse.ArgumentParser(prog="pcfv", description="Call-by-value PCF workbench.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("check", parents=[common], help="typecheck a closed program")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("run", parents=[common], help="evaluate a closed program")
    s.add_argument("file")
    s.add_argument("--fuel", type=int, default=10_000)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("psi", parents=[common], help="print the truncation term")
    s.add_argument("--type", required=True)
    s.add_argument("--level", "-n", type=int, required=True)
    s.add_argument("--var", default="x")
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("enum", parents=[common, level], help="list the points of a type")
    s.add_argument("--type", required=True)
    s.set_defaults(func=cmd_enum)

    s = sub.add_parser("tabulate", parents=[common, level], help="table of a closed program")
    s.add_argument("file")
    s.set_defaults(func=cmd_tabulate)

    s = sub.add_parser("equiv", parents=[common, level], help="search for a distinguishing context")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("ssp", help="systems of partitions")
    ssub = s.add_subparsers(dest="ssp_cmd", required=True)
    for name, hlp in (("check", "check the axioms"), ("close", "least system containing the input")):
        t = ssub.add_parser(name, parents=[common], help=hlp)
        t.add_argument("file")
        t.set_defaults(func=cmd_ssp)

    s = sub.add_parser("site", help="finite concrete sites")
    ssub = s.add_subparsers(dest="site_cmd", required=True)
    t = ssub.add_parser("build", parents=[common], help="site of a (C, F) presentation")
    t.add_argument("file")
    t = ssub.add_parser("check", parents=[common], help="coverage, (M), (L), concreteness")
    t.add_argument("file")
    t = ssub.add_parser("sheaf", parents=[common], help="check the sheaf condition")
    t.add_argument("site")
    t.add_argument("presheaf")
    t = ssub.add_parser("sum", parents=[common], help="sum of sites")
    t.add_argument("files", nargs="+")
    t = ssub.add_parser("from-basis", parents=[common, level], help="site from tabulated terms")
    t.add_argument("--types", required=True)
    for t in ssub.choices.values():
        t.set_defaults(func=cmd_site)

    s = sub.add_parser("vnat-test", parents=[common], help="vertical naturals property suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_vnat_test)

    s = sub.add_parser("suite", parents=[common], help="run the acceptance property suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if not hasattr(args, "json"):
        args.json = False
    try:
        return args.func(args)
    except UsageError as e:
        print(f"pcfv: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"pcfv: syntax error: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except TypeCheckError as e:
        print(f"pcfv: type error: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except ValueError as e:
        print(f"pcfv: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
