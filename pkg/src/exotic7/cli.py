"""Command line front end. Every command prints one deterministic JSON report
(``--pretty`` for indented text) and exits 0 on success, 1 when a
verification fails, 2 on bad input."""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Sequence

from . import fibers, forms, homology2, parkpipeline, pencil, plumbing
from .errors import InputError, LedgerError, UndecidedError
from .exact import parse_poly, rational_json

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return rational_json(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return str(obj)


def _pretty(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines += _pretty(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}-")
                lines += _pretty(v, indent + 1)
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and all(
        not isinstance(x, list) or all(not isinstance(y, (list, dict)) for y in x) for x in v
    )


def _inline(v) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(v, sort_keys=True)


def emit(report: dict, pretty: bool, out) -> None:
    data = _jsonable(report)
    if pretty:
        out.write("\n".join(_pretty(data)) + "\n")
    else:
        out.write(json.dumps(data, sort_keys=True) + "\n")


def make_report(command: str, inputs: dict, results: dict, anchors: Sequence[str]) -> dict:
    return {"command": command, "inputs": inputs, "results": results, "anchors": list(anchors)}


# -- named inputs

def resolve_form(text: str):
    t = text.strip()
    if t.startswith("@"):
        name = t[1:]
        if name == "e8minus":
            return forms.e8_minus()
        if name == "h":
            return forms.hyperbolic()
        if name == "x7":
            return parkpipeline.x7_invariants()
        if name == "e1":
            return forms.blown_up_plane(9)
        m = re.fullmatch(r"cp2_(\d+)bar", name)
        if m:
            return forms.blown_up_plane(int(m.group(1)))
        raise InputError(f"unknown named form {t!r}")
    if os.path.isfile(t):
        with open(t) as fh:
            t = fh.read()
    return forms.parse_form(t)


def _form_json(q) -> dict:
    if isinstance(q, forms.FormInvariants):
        return {"invariants_only": True}
    return {"matrix": q.matrix.to_json()}


def _resolve_pencil(args) -> tuple[pencil.CubicPencil, object, str]:
    if args.pencil:
        name = args.pencil.lstrip("@")
        if name not in pencil.SHIPPED_PENCILS:
            raise InputError(f"unknown pencil {args.pencil!r}")
        pen, line = pencil.shipped_pencil(name)
        return pen, line, name
    if not (args.p0 and args.p1):
        raise InputError("give --pencil or both --p0 and --p1")
    pen = pencil.CubicPencil.parse(args.p0, args.p1)
    line = parse_poly(args.line) if args.line else None
    return pen, line, "custom"


# -- commands

def cmd_form_invariants(args):
    q = resolve_form(args.q)
    inv = q if isinstance(q, forms.FormInvariants) else forms.invariants(q)
    results = {"invariants": inv.to_json()}
    if isinstance(q, forms.SymForm) and abs(inv.det) == 1:
        rep = forms.smoothability_obstructions(q)
        results["rohlin"] = rep.rohlin
        results["mod8_holds"] = rep.mod8_holds
    return EXIT_OK, make_report("form invariants", {"q": args.q, **_form_json(q)}, results,
                                ["rank-signature-parity", "rohlin-divisibility"])


def cmd_form_obstructions(args):
    q = resolve_form(args.q)
    if isinstance(q, forms.FormInvariants):
        raise InputError("obstructions need the form matrix")
    rep = forms.smoothability_obstructions(q)
    return EXIT_OK, make_report("form obstructions", {"q": args.q}, rep.to_json(),
                                ["rohlin-divisibility", "characteristic-mod-8"])


def cmd_form_freedman(args):
    q1, q2 = resolve_form(args.q1), resolve_form(args.q2)
    i1 = q1 if isinstance(q1, forms.FormInvariants) else forms.invariants(q1)
    i2 = q2 if isinstance(q2, forms.FormInvariants) else forms.invariants(q2)
    verdict = forms.freedman_homeomorphic(q1, q2, both_smooth=args.smooth)
    results = {
        "homeomorphic": verdict,
        "q1": i1.to_json(),
        "q2": i2.to_json(),
        "both_smooth": args.smooth,
    }
    return EXIT_OK, make_report("form freedman", {"q1": args.q1, "q2": args.q2}, results,
                                ["indefinite-classification", "homeomorphism-from-forms"])


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"expected a comma separated list of integers, got {text!r}") from None


def cmd_chain(args):
    framings = _parse_int_list(args.framings)
    if not framings:
        raise InputError("empty framing list")
    pres = plumbing.SurgeryPresentation.chain(framings)
    grp = plumbing.h1(pres)
    snf = grp.snf
    table = []
    order = grp.order()
    for g in grp.generators:
        o = plumbing.element_order(grp, g)
        table.append({
            "generator": g,
            "order": "infinite" if o is None else o,
            "generates": bool(grp.is_cyclic() and order is not None and o == order),
        })
    results = {
        "h1": grp.describe(),
        "order": "infinite" if order is None else order,
        "invariant_factors": list(snf.invariant_factors),
        "free_rank": snf.free_rank,
        "relation_matrix": grp.relation_matrix.to_json(),
        "generators": table,
    }
    try:
        lens = plumbing.chain_boundary(framings)
        results["boundary"] = {"lens": str(lens), "p": lens.p, "q": lens.q, "mirror": lens.mirror}
    except InputError as exc:
        results["boundary"] = {"lens": None, "reason": str(exc)}
    return EXIT_OK, make_report("chain", {"framings": framings}, results,
                                ["meridian-presentation", "chain-boundary-lens-space"])


def cmd_hj(args):
    coeffs = plumbing.hj_expand(args.p, args.q)
    back = plumbing.hj_evaluate(coeffs)
    results = {"coefficients": coeffs, "evaluates_to": str(back)}
    return EXIT_OK, make_report("hj", {"p": args.p, "q": args.q}, results, ["hirzebruch-jung-expansion"])


def cmd_pencil_singular(args):
    pen, line, name = _resolve_pencil(args)
    reports = pencil.singular_parameters(pen)
    results = {
        "p0": str(pen.p0),
        "p1": str(pen.p1),
        "singular_members": [r.to_json() for r in reports],
        "interior_parameters": [str(p) for p in pencil.interior_parameters(reports)],
    }
    if line is not None:
        results["base_points"] = pencil.base_points_on_line(pen, line).to_json()
        results["base_points"]["line"] = str(line)
    return EXIT_OK, make_report("pencil singular", {"pencil": name}, results,
                                ["pencil-singular-parameters", "base-points-on-line"])


def cmd_pencil_classify(args):
    f = parse_poly(args.f)
    pt = pencil.ProjPoint.parse(args.point)
    kind = pencil.classify_point(f, pt)
    return EXIT_OK, make_report("pencil classify", {"f": str(f), "point": str(pt)}, {"type": kind},
                                ["node-cusp-classification"])


def cmd_mcg_eval(args):
    w = fibers.parse_word(args.word)
    m = fibers.evaluate(w)
    results = {"matrix": m.rows(), "trace": m.trace, "is_identity": m == fibers.SL2Mat.identity()}
    return EXIT_OK, make_report("mcg eval", {"word": str(w)}, results, ["sl2z-image"])


def cmd_mcg_reduce(args):
    w = fibers.parse_word(args.word)
    r = fibers.free_reduce(w)
    results = {"reduced": str(r), "length": len(r), "matrix": fibers.evaluate(r).rows()}
    return EXIT_OK, make_report("mcg reduce", {"word": str(w)}, results, ["free-reduction"])


def cmd_mcg_verify(args):
    source = args.factorization
    name = source.lstrip("@") if source.startswith("@") else source
    f = fibers.load_factorization(name)
    rep = fibers.verify_factorization(f, args.bound)
    code = EXIT_OK if rep.passed else EXIT_FAIL
    return code, make_report("mcg verify", {"factorization": source, "name": f.name, "bound": args.bound},
                             rep.to_json(), ["monodromy-factorization", "euler-budget"])


def cmd_mcg_budget(args):
    config = fibers.parse_config(args.config)
    total, ok = fibers.euler_budget(config)
    results = {"fibres": [str(f) for f in config], "euler_total": total, "accept": ok}
    return EXIT_OK, make_report("mcg budget", {"config": args.config}, results, ["euler-budget"])


def cmd_ledger_replay(args):
    source = args.ledger
    name = source.lstrip("@").replace("ledger", "") if source.startswith("@") else source
    data = homology2.load_ledger(name)
    try:
        res = homology2.replay_ledger(data)
    except LedgerError as exc:
        return EXIT_FAIL, make_report("ledger replay", {"ledger": source}, {"consistent": False, "error": str(exc)},
                                      ["blow-up-multiplicity-ledger"])
    results = {"consistent": True, **res.to_json()}
    return EXIT_OK, make_report("ledger replay", {"ledger": source}, results, ["blow-up-multiplicity-ledger"])


def cmd_park7(args):
    rep = parkpipeline.park_report()
    emb = rep.embedding
    cp2 = forms.blown_up_plane(7)
    verdict = forms.freedman_homeomorphic(rep.after, cp2, both_smooth=True)
    results = {
        "classes": [str(u) for u in emb.classes],
        "P": emb.P.to_json(),
        "T": emb.T.to_json(),
        "T_times_minus_49": emb.T.scale(-49).to_json(),
        "K_restriction": [rational_json(x) for x in rep.k_restriction],
        "omega_restriction": [str(x) for x in rep.omega_restriction],
        "K_dot_omega": str(rep.k_dot_omega),
        "config_pairing": str(rep.config_pairing),
        "functional": str(rep.functional),
        "functional_times_7": str(rep.functional * 7),
        "certificate": rep.certificate.to_json(),
        "certificate_verified": rep.certificate_ok,
        "bookkeeping": {"before": rep.before.to_json(), "after": rep.after.to_json()},
        "homeomorphic_to_cp2_7bar": verdict,
        "facts_assumed": [
            "the configuration is symplectically embedded, so the blowdown is symplectic",
            "the blown-down manifold is simply connected",
        ],
    }
    code = EXIT_OK if rep.certificate_ok else EXIT_FAIL
    return code, make_report("park7 report", {}, results,
                             ["c7-gram-and-inverse", "canonical-class-restriction", "blowdown-pairing",
                              "positivity-certificate", "blowdown-bookkeeping"])


# -- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's default from clobbering a flag given before it
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS,
                        help="indented text instead of JSON")
    p = argparse.ArgumentParser(prog="exotic7", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="group", required=True)

    form = sub.add_parser("form", help="intersection forms")
    fsub = form.add_subparsers(dest="action", required=True)
    a = fsub.add_parser("invariants", parents=[common])
    a.add_argument("--q", required=True, help="JSON matrix, named form, or @name")
    a.set_defaults(func=cmd_form_invariants)
    a = fsub.add_parser("obstructions", parents=[common])
    a.add_argument("--q", required=True)
    a.set_defaults(func=cmd_form_obstructions)
    a = fsub.add_parser("freedman", parents=[common])
    a.add_argument("--q1", required=True)
    a.add_argument("--q2", required=True)
    a.add_argument("--smooth", action="store_true", help="both manifolds are smooth")
    a.set_defaults(func=cmd_form_freedman)

    a = sub.add_parser("chain", parents=[common], help="linear plumbing homology and boundary")
    a.add_argument("--framings", required=True, help="comma separated, e.g. -9,-2,-2")
    a.set_defaults(func=cmd_chain)

    a = sub.add_parser("hj", parents=[common], help="Hirzebruch-Jung continued fraction")
    a.add_argument("p", type=int)
    a.add_argument("q", type=int)
    a.set_defaults(func=cmd_hj)

    pen = sub.add_parser("pencil", help="cubic pencils")
    psub = pen.add_subparsers(dest="action", required=True)
    a = psub.add_parser("singular", parents=[common])
    a.add_argument("--pencil", help="@e8pencil or @e6pencil")
    a.add_argument("--p0")
    a.add_argument("--p1")
    a.add_argument("--line", help="l with p0 = c*l^3, to count base points")
    a.set_defaults(func=cmd_pencil_singular)
    a = psub.add_parser("classify", parents=[common])
    a.add_argument("--f", required=True)
    a.add_argument("--point", required=True, help="x:y:z")
    a.set_defaults(func=cmd_pencil_classify)

    mcg = sub.add_parser("mcg", help="torus mapping class words")
    msub = mcg.add_subparsers(dest="action", required=True)
    a = msub.add_parser("eval", parents=[common])
    a.add_argument("--word", required=True)
    a.set_defaults(func=cmd_mcg_eval)
    a = msub.add_parser("reduce", parents=[common])
    a.add_argument("--word", required=True)
    a.set_defaults(func=cmd_mcg_reduce)
    a = msub.add_parser("verify", parents=[common])
    a.add_argument("--factorization", required=True, help="JSON file or @e6_fishtails / @i6_fishtails")
    a.add_argument("--bound", type=int, default=6)
    a.set_defaults(func=cmd_mcg_verify)
    a = msub.add_parser("budget", parents=[common])
    a.add_argument("--config", required=True, help="e.g. 'E6~, I1x4'")
    a.set_defaults(func=cmd_mcg_budget)

    led = sub.add_parser("ledger", help="blow-up ledgers")
    lsub = led.add_subparsers(dest="action", required=True)
    a = lsub.add_parser("replay", parents=[common])
    a.add_argument("ledger", help="@e8ledger, @e6ledger, or a JSON file")
    a.set_defaults(func=cmd_ledger_replay)

    park = sub.add_parser("park7", help="C_7 rational blowdown pipeline")
    ksub = park.add_subparsers(dest="action", required=True)
    a = ksub.add_parser("report", parents=[common])
    a.set_defaults(func=cmd_park7)
    return p


_LIST_FLAGS = ("--framings",)


def _glue_negative_lists(argv: list[str]) -> list[str]:
    # "--framings -9,-2" would be read as two options by argparse
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = _glue_negative_lists(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, report = args.func(args)
    except (InputError, UndecidedError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    emit(report, getattr(args, "pretty", False), out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
