"""Command line front end.

One subcommand per engine entry point, plus ``verify`` for the named
verification batteries.  Every subcommand prints a short human report by
default and a machine report with ``--json``.  JSON reports carry
``"schema": 1``, are key-sorted, and contain no timestamps, so identical
invocations produce byte-identical output.

Exit status: 0 on success, 2 on bad input (the diagnostic names the
offending flag or config field), 1 when a verification battery reports a
failed case.  Findings do not fail a battery.

Monoid grammar for ``--monoid``: the shorthands ``N``, ``N2``, ``N3`` for
the free charts, or inline generators such as ``1,0;1,1;1,2`` (semicolon
separated lattice points, all of the same length).  Coefficient grammar
for ``--coeff``: ``gmlog-bar``, ``const:M``, ``mu:M``, ``torus:D``,
``unipotent``.  Module grammar for ``--module``: ``+``-joined tokens
``Z``, ``Z^r``, ``Z/k``, for example ``Z/2+Z/4``.

The bar-complex size budget honors the environment variable named in
:data:`kummercech.groupcoh.BUDGET_ENV`.
"""

import argparse
import json
import sys

from .cech import (CechSetup, cech_cohomology, colimit_cech_cohomology,
                   refinement_death_table)
from .cochain import module_int
from .coefficients import (ConstFinite, GmLogModGm, MuM, SplitTorus,
                           UnipotentSolvable, descriptor_to_json,
                           h2_torsion_formula, kn_stalk_formula, r1_formula)
from .exactseq import dedekind_example, dvr_example
from .fgab import FgAbGroup
from .groupcoh import FiniteAction, cyclic_closed_form, group_cohomology
from .monoid import FsMonoid, LogPoint, group_envelope, hn_points, is_fs
from .verify import SUITE_ORDER, expand_suite_names, run_suites


class CliError(Exception):
    """Bad input; ``field`` names the offending flag or config field."""

    def __init__(self, field, message):
        super().__init__(message)
        self.field = field


# ---------------------------------------------------------------------------
# input grammars


def parse_monoid(text, field="--monoid"):
    named = {"N": 1, "N1": 1, "N2": 2, "N3": 3}
    if text in named:
        return FsMonoid.natural(named[text])
    try:
        rows = [tuple(int(x) for x in part.split(","))
                for part in text.split(";") if part.strip()]
    except ValueError:
        raise CliError(field, f"cannot parse {text!r}; expected N, N2, N3 "
                              "or generators like 1,0;1,1;1,2")
    if not rows:
        raise CliError(field, "no generators given")
    if len({len(r) for r in rows}) != 1:
        raise CliError(field, "generators must all have the same length")
    try:
        return FsMonoid(len(rows[0]), rows)
    except ValueError as err:
        raise CliError(field, str(err))


def parse_coefficient(text, field="--coeff"):
    if text == "gmlog-bar":
        return GmLogModGm()
    if text == "unipotent":
        return UnipotentSolvable()
    kind, _, arg = text.partition(":")
    table = {"const": ConstFinite, "mu": MuM, "torus": SplitTorus}
    if kind in table and arg:
        try:
            return table[kind](int(arg))
        except ValueError as err:
            raise CliError(field, str(err))
    raise CliError(field, f"cannot parse {text!r}; expected gmlog-bar, "
                          "const:M, mu:M, torus:D or unipotent")


def parse_module(text, field="--module"):
    free, factors = 0, []
    for token in text.split("+"):
        token = token.strip()
        if token == "Z":
            free += 1
        elif token.startswith("Z^"):
            try:
                free += int(token[2:])
            except ValueError:
                raise CliError(field, f"bad free rank in {token!r}")
        elif token.startswith("Z/"):
            try:
                factors.append(int(token[2:]))
            except ValueError:
                raise CliError(field, f"bad torsion order in {token!r}")
        elif token == "0":
            continue
        else:
            raise CliError(field, f"cannot parse {token!r}; expected Z, "
                                  "Z^r, Z/k joined by +")
    factors.sort()
    try:
        return FgAbGroup.from_invariants(free, factors)
    except ValueError:
        # arbitrary cyclic summands; build by direct sum instead
        M = FgAbGroup.free(free)
        for k in factors:
            M = M.direct_sum(FgAbGroup.cyclic(k))
        return M


def parse_degrees(text, field="--degrees"):
    try:
        degrees = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(field, f"cannot parse {text!r}; expected integers "
                              "joined by commas")
    if not degrees:
        raise CliError(field, "no degrees given")
    return degrees


def _point(args):
    return LogPoint(args.char, parse_monoid(args.monoid))


def _emit(args, payload, lines):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0


def _degree_report(values):
    return ", ".join(f"H^{i} = {v.render()}" for i, v in enumerate(values))


# ---------------------------------------------------------------------------
# subcommands


def cmd_monoid_info(args):
    P = parse_monoid(args.monoid)
    cert = is_fs(P)
    envelope = group_envelope(P)
    payload = {"schema": 1, "command": "monoid-info",
               "monoid": P.to_json(),
               "envelope_rank": envelope.free_rank,
               "fine": cert.fine, "saturated": cert.saturated,
               "sharp": cert.sharp}
    lines = [f"monoid: {args.monoid} (ambient rank {P.ambient_rank}, "
             f"{len(P.generators)} generators)",
             f"envelope rank: {envelope.free_rank}",
             f"fine: {'yes' if cert.fine else 'no'}, "
             f"saturated: {'yes' if cert.saturated else 'no'}, "
             f"sharp: {'yes' if cert.sharp else 'no'}"]
    if args.level is not None:
        H = hn_points(P, args.level, args.char)
        payload["cover"] = {"level": args.level, "char": args.char,
                            "deck_group": H.group.to_json(),
                            "deck_render": H.group.render(),
                            "points": H.group.order(),
                            "tame_level": H.n_prime,
                            "residue_power": H.p_power}
        lines.append(f"level {args.level} over char {args.char}: "
                     f"deck group {H.group.render()}, "
                     f"{H.group.order()} points, tame level {H.n_prime}, "
                     f"residue power {H.p_power}")
    return _emit(args, payload, lines)


def cmd_cech(args):
    if args.max_degree < 1:
        raise CliError("--max-degree", "need at least degree 0")
    coefficient = parse_coefficient(args.coeff)
    truncation = max(3, args.max_degree)
    S = CechSetup(_point(args), args.level, coefficient,
                  truncation=truncation)
    values = cech_cohomology(S, range(args.max_degree))
    payload = {"schema": 1, "command": "cech",
               "monoid": S.base.chart.to_json(),
               "level": args.level, "char": args.char,
               "coefficient": descriptor_to_json(coefficient),
               "values": [{"degree": i, "value": v.render()}
                          for i, v in enumerate(values)]}
    return _emit(args, payload, [_degree_report(values)])


def cmd_groupcoh(args):
    M = parse_module(args.module)
    degrees = parse_degrees(args.degrees)
    if args.order < 1:
        raise CliError("--order", "acting group order must be positive")
    A = FiniteAction.trivial(FgAbGroup.cyclic(args.order), module_int(M))
    values = group_cohomology(A, degrees)
    oracle = cyclic_closed_form(args.order, A.module, degrees)
    agree = all(g.is_isomorphic(w) for g, w in zip(values, oracle))
    payload = {"schema": 1, "command": "groupcoh", "order": args.order,
               "module": M.to_json(),
               "values": [{"degree": d, "value": v.render(),
                           "closed_form": w.render()}
                          for d, v, w in zip(degrees, values, oracle)],
               "matches_closed_form": agree}
    lines = [", ".join(f"H^{d} = {v.render()}"
                       for d, v in zip(degrees, values)),
             "closed form agrees" if agree else "closed form DISAGREES"]
    _emit(args, payload, lines)
    return 0 if agree else 1


def cmd_formula(args):
    point = _point(args)
    if args.which == "h2-torsion":
        value = h2_torsion_formula(SplitTorus(args.torus_dim), args.n, point)
        payload = {"schema": 1, "command": "formula", "formula": args.which,
                   "torus_dim": args.torus_dim, "n": args.n,
                   "char": args.char, "monoid": point.chart.to_json(),
                   "group": value.group.to_json(), "twist": value.twist,
                   "value": value.render()}
        return _emit(args, payload, [value.render()])
    if args.which == "r1":
        value = r1_formula(SplitTorus(args.torus_dim), point, mode=args.mode)
        payload = {"schema": 1, "command": "formula", "formula": args.which,
                   "torus_dim": args.torus_dim, "mode": args.mode,
                   "char": args.char, "monoid": point.chart.to_json(),
                   "value": value.render(), "group": value.to_json()}
        return _emit(args, payload, [value.render()])
    value = kn_stalk_formula(ConstFinite(args.m), args.n, args.q, point)
    payload = {"schema": 1, "command": "formula", "formula": args.which,
               "m": args.m, "n": args.n, "q": args.q, "char": args.char,
               "monoid": point.chart.to_json(),
               "group": value.group.to_json(), "twist": value.twist,
               "value": value.render()}
    return _emit(args, payload, [value.render()])


def cmd_colimit(args):
    coefficient = parse_coefficient(args.coeff)
    point = _point(args)
    value = colimit_cech_cohomology(point, coefficient, args.degree,
                                    mode=args.mode, window=args.window,
                                    extra_coprime=args.coprime_to,
                                    budget=args.budget)
    cert = value.certificate
    payload = {"schema": 1, "command": "colimit", "degree": args.degree,
               "mode": args.mode, "window": args.window, "char": args.char,
               "monoid": point.chart.to_json(),
               "coefficient": descriptor_to_json(coefficient),
               "value": value.render(), "group": value.to_json(),
               "certificate": cert}
    lines = [f"colimit value: {value.render()}",
             f"certificate grade: {cert['grade']} "
             f"(window {cert['effective_window']}, "
             f"{len(cert['levels'])} levels)"]
    if args.deaths:
        verdict, table = refinement_death_table(
            point, coefficient, args.degree, mode=args.mode,
            window=args.window, extra_coprime=args.coprime_to,
            budget=args.budget)
        payload["deaths"] = {"verdict": verdict, "witnesses": table}
        lines.append(f"refinement deaths: "
                     f"{'all classes die' if verdict else 'SURVIVORS'} "
                     f"({len(table)} witnesses)")
    return _emit(args, payload, lines)


def cmd_example_dvr(args):
    residue = args.residue.replace("_", "-")
    out = dvr_example(residue, chart_rank=args.chart_rank)
    payload = {"schema": 1, "command": "example-dvr", "residue": residue,
               "chart_rank": args.chart_rank,
               "h1_kfl": out["h1_kfl"].render(),
               "h2_kfl": out["h2_kfl"].render(),
               "sequence": out["sequence"].to_json(),
               "r2_check": out["r2_check"], "citations": out["citations"]}
    lines = [f"H1_kfl = {out['h1_kfl'].render()}, "
             f"H2_kfl = {out['h2_kfl'].render()}"]
    return _emit(args, payload, lines)


def _dedekind_config(args):
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except OSError as err:
            raise CliError("--config", str(err))
        except json.JSONDecodeError as err:
            raise CliError("--config", f"not valid JSON: {err}")
        for key in ("pic", "real_places", "S"):
            if key not in raw:
                raise CliError(f"config.{key}", "missing")
        pic = raw["pic"]
        if not isinstance(pic, dict) or "free_rank" not in pic:
            raise CliError("config.pic", "expected {free_rank, "
                                         "invariant_factors}")
        config = {"pic": FgAbGroup.from_invariants(
                      pic["free_rank"], pic.get("invariant_factors", [])),
                  "real_places": raw["real_places"],
                  "S": raw["S"]}
        if "pic_degrees" in raw:
            config["pic_degrees"] = raw["pic_degrees"]
        return config
    places = [p.strip() for p in args.places.split(",") if p.strip()]
    if not places:
        raise CliError("--places", "need at least one place")
    return {"pic": parse_module(args.pic, field="--pic"),
            "real_places": args.real_places,
            "S": [{"residue": p.replace("_", "-")} for p in places]}


def cmd_example_dedekind(args):
    config = _dedekind_config(args)
    out = dedekind_example(config)
    ends = {e["behavior"]: e for e in out["right_end"]}
    payload = {"schema": 1, "command": "example-dedekind",
               "pic_log": out["pic_log"].render(),
               "h2_fl": out["h2_fl"].render(),
               "picard_sequence": out["picard_sequence"].to_json(),
               "degree_two_sequence": out["degree_two_sequence"].to_json(),
               "right_end": out["right_end"],
               "degree_diagram": out["degree_diagram_report"],
               "citations": out["citations"]}
    squares = out["degree_diagram_report"]["squares"]
    lines = [f"degree one: {out['picard_sequence'].render()}",
             f"log Picard value: {out['pic_log'].render()}",
             f"degree two flat value: {out['h2_fl'].render()}"]
    for behavior in sorted(ends):
        e = ends[behavior]
        state = "permitted" if e["permitted"] else "excluded"
        lines.append(f"right end {behavior}: {state}, "
                     f"H2_kfl = {e.get('h2_kfl', '-')}")
    commuting = sum(1 for s in squares if s["commutes"])
    lines.append(f"degree diagram: {commuting} of {len(squares)} "
                 "generator squares commute")
    return _emit(args, payload, lines)


def cmd_verify(args):
    try:
        names = expand_suite_names(args.suites)
    except ValueError as err:
        raise CliError("suite", str(err))
    report = run_suites(names, strict=args.strict)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for suite in report["suites"]:
            print(f"suite {suite['anchor']}:")
            for row in suite["cases"]:
                print(f"  [{row['anchor']}] {row['case']}: expected "
                      f"{row['expected']} | computed {row['computed']} "
                      f"| {row['status']}")
                if row["detail"]:
                    print(f"      note: {row['detail']}")
            print(f"  {suite['passed']} passed, {suite['findings']} "
                  f"findings, {suite['failed']} failed")
        print("overall: " + ("ok" if report["ok"] else "FAILED"))
    return 0 if report["ok"] else 1


# ---------------------------------------------------------------------------
# argument plumbing


def _add_point_flags(parser):
    parser.add_argument("--monoid", default="N",
                        help="chart: N, N2, N3 or inline generators "
                             "like 1,0;1,1;1,2")
    parser.add_argument("--char", type=int, default=0,
                        help="residue characteristic (0 or a prime)")


def build_parser():
    top = argparse.ArgumentParser(
        prog="kummercech",
        description="Exact cohomology of finite level covers of log points, "
                    "their colimits, and the worked arithmetic examples.")
    sub = top.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("monoid-info", help="chart and cover structure")
    _add_point_flags(p)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_monoid_info)

    p = sub.add_parser("cech", help="cover cohomology at one level")
    _add_point_flags(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--coeff", default="gmlog-bar")
    p.add_argument("--max-degree", type=int, default=3,
                   help="report degrees 0..max-degree-1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_cech)

    p = sub.add_parser("groupcoh",
                       help="cyclic group cohomology with the closed-form "
                            "cross check")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--module", default="Z")
    p.add_argument("--degrees", default="0,1,2,3")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_groupcoh)

    p = sub.add_parser("formula", help="closed-form values")
    which = p.add_subparsers(dest="which", required=True)

    f = which.add_parser("h2-torsion",
                         help="level torsion of the degree-two value")
    f.add_argument("--torus-dim", type=int, default=1)
    f.add_argument("--n", type=int, required=True)
    _add_point_flags(f)
    f.add_argument("--json", action="store_true")
    f.set_defaults(handler=cmd_formula)

    f = which.add_parser("r1", help="first higher image value")
    f.add_argument("--torus-dim", type=int, default=1)
    f.add_argument("--mode", choices=("kfl", "ket"), default="kfl")
    _add_point_flags(f)
    f.add_argument("--json", action="store_true")
    f.set_defaults(handler=cmd_formula)

    f = which.add_parser("kn-stalk",
                         help="stalk value for constant coefficients")
    f.add_argument("--m", type=int, required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--q", type=int, default=1)
    _add_point_flags(f)
    f.add_argument("--json", action="store_true")
    f.set_defaults(handler=cmd_formula)

    p = sub.add_parser("colimit", help="stalk colimit over all levels")
    _add_point_flags(p)
    p.add_argument("--coeff", default="const:2")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--mode", choices=("kfl", "ket"), default="kfl")
    p.add_argument("--window", type=int, default=24)
    p.add_argument("--coprime-to", type=int, default=None,
                   help="keep only levels coprime to this number")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--deaths", action="store_true",
                   help="include the refinement death table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_colimit)

    p = sub.add_parser("example-dvr",
                       help="henselian discrete valuation point")
    p.add_argument("--residue", default="finite",
                   choices=("finite", "separably-closed", "separably_closed"))
    p.add_argument("--chart-rank", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_example_dvr)

    p = sub.add_parser("example-dedekind",
                       help="global curve with inverted places")
    p.add_argument("--config", default=None,
                   help="JSON file: {pic: {free_rank, invariant_factors}, "
                        "real_places, S: [{residue}], pic_degrees?}")
    p.add_argument("--pic", default="0", help="classical class group")
    p.add_argument("--real-places", type=int, default=1)
    p.add_argument("--places", default="finite,finite",
                   help="comma list of residue markers for the inverted "
                        "places")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_example_dedekind)

    p = sub.add_parser("verify", help="named verification batteries")
    p.add_argument("suites", nargs="*", default=["all"],
                   help="all or any of: " + ", ".join(SUITE_ORDER))
    p.add_argument("--strict", action="store_true",
                   help="stop after the first battery with a failure")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_verify)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as err:
        print(f"error: {err.field}: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
