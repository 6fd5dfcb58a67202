"""Command-line entry point: ``rootcryst VERB [options]``.

Exit statuses: 0 success, 2 usage error, 3 work ceiling hit, 4 internal check failed
(including a family whose verification report has issues).  Errors are also written
to stderr as one JSON record.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import catalog as data
from .crystgrp import (
    finite_quotient,
    group_from_struct,
    reflection_coset_profile,
    split_witness,
)
from .errors import (
    CeilingError,
    InconsistentVectorSystem,
    InternalError,
    RootCrystError,
    UnsupportedFormat,
    UsageError,
)
from .exactla import commutant_dimension, format_rational
from .invariants import (
    build_representative,
    case_family,
    chi_profile,
    distinguish,
    eta_check,
    parse_family_key,
    reduced_eta_realizers,
    verify_family,
)
from .lattices import (
    InvariantLattice,
    check_invariant_sandwich,
    enumerate_centerings,
    maximal_classes,
)
from .rootsys import build_root_system, lattice_for, root_lattice, weight_lattice
from .weyl import CEILING_ENV, classify_reflections, coxeter_matrix_and_diagram, diagram_automorphisms, weyl_group

SCHEMA_VERSION = 1
EXCEPTIONAL = ("E6", "E7", "E8", "F4", "G2")
VERIFY_FAMILIES = ("B3-CL", "B4-CL", "B3-CCL", "B4-CCL", "C3-FL", "C5-FL", "D6-FL")


# --------------------------------------------------------------------------
# argument helpers


def _type_and_rank(args) -> tuple[str, int]:
    t = args.type
    if t is None:
        raise UsageError("--type is required")
    if t in EXCEPTIONAL:
        implied = int(t[1])
        if args.rank not in (None, implied):
            raise UsageError(f"{t} has rank {implied}")
        return t, implied
    if args.rank is None:
        raise UsageError("--rank is required")
    return t, args.rank


def _lattice_name(name: str | None) -> tuple[str, int | None]:
    if name is None:
        raise UsageError("--lattice is required")
    if name.startswith("Lambda") and name[6:].isdigit():
        return "Lambda", int(name[6:])
    return name, None


def _rep_name(rep: str | None) -> str:
    if rep is None:
        raise UsageError("--rep is required")
    return rep if rep.startswith("W") else f"W{rep}"


def _vec(v) -> list[str]:
    return [format_rational(x) for x in v]


def _plain(x: Fraction) -> str:
    return str(x)


def _vtext(v) -> str:
    return "(" + ", ".join(_plain(Fraction(x)) for x in v) + ")"


# --------------------------------------------------------------------------
# verbs; each returns (structured payload, text, exit status)


def cmd_rootsys(args):
    t, l = _type_and_rank(args)
    R = build_root_system(t, l)
    show = args.show or "summary"
    payload = {"type": t, "rank": l, "ambient_dim": R.ambient_dim, "root_count": len(R.roots)}
    if show == "summary":
        text = f"{t}{l}: {len(R.roots)} roots in dimension {R.ambient_dim}\n"
        text += "".join(f"  a{i + 1} = {_vtext(a)}\n" for i, a in enumerate(R.simple_roots))
        payload["simple_roots"] = [_vec(a) for a in R.simple_roots]
    elif show == "roots":
        payload["roots"] = [{"vector": _vec(r), "positive": r in R.positive_roots, "coroot": _vec(R.coroot(r))}
                            for r in R.roots]
        text = "".join(f"{_vtext(r)}{' +' if r in R.positive_roots else ''}\n" for r in R.roots)
    elif show == "cartan":
        C = R.cartan_matrix()
        payload["cartan"] = [[_plain(x) for x in row] for row in C]
        text = "".join(" ".join(f"{_plain(x):>3}" for x in row) + "\n" for row in C)
    elif show == "lattices":
        Q, P = root_lattice(R), weight_lattice(R)
        payload["root_lattice"] = [_vec(c) for c in Q.canonical().columns()]
        payload["weight_lattice"] = [_vec(c) for c in P.canonical().columns()]
        payload["index_of_connection"] = P.index_of(Q)
        text = f"[P : Q] = {P.index_of(Q)}\n"
    else:
        raise UsageError(f"unknown --show {show} for rootsys")
    return payload, text, 0


def cmd_weyl(args):
    t, l = _type_and_rank(args)
    W = weyl_group(t, l)
    show = args.show or "order"
    m, diagram = coxeter_matrix_and_diagram(W)
    payload = {"type": t, "rank": l}
    if show == "order":
        payload["order"] = W.order
        text = f"{W.order}\n"
    elif show == "coxeter":
        payload["coxeter_matrix"] = m
        text = "".join(" ".join(str(x) for x in row) + "\n" for row in m)
    elif show == "diagram":
        payload["diagram"] = diagram.to_struct()
        text = diagram.to_text()
    elif show == "automorphisms":
        autos = diagram_automorphisms(diagram)
        payload["automorphisms"] = [list(a) for a in autos]
        text = "".join(" ".join(str(x) for x in a) + "\n" for a in autos)
    elif show == "reflections":
        refl = classify_reflections(W)
        payload["reflection_count"] = len(refl)
        text = f"{len(refl)}\n"
    else:
        raise UsageError(f"unknown --show {show} for weyl")
    return payload, text, 0


def cmd_lattice(args):
    t, l = _type_and_rank(args)
    fam, parameter = _lattice_name(args.lattice)
    spec = lattice_for(t, l, fam, parameter)
    R = build_root_system(t, l)
    L = InvariantLattice(spec, group=weyl_group(t, l))
    show = args.show or "basis"
    payload = {"type": t, "rank": l, "lattice": args.lattice}
    if show == "basis":
        cols = L.basis.columns()
        payload["basis"] = [_vec(c) for c in cols]
        text = "".join(_vtext(c) + "\n" for c in cols)
    elif show == "sandwich":
        ok = check_invariant_sandwich(spec, R)
        payload["sandwich"] = ok
        text = f"{str(ok).lower()}\n"
    elif show == "irreducible":
        d = commutant_dimension(list(L.action_matrices))
        payload["commutant_dimension"] = d
        payload["absolutely_irreducible"] = d == 1
        text = f"commutant dimension {d}\n"
    elif show in ("centerings", "maximal"):
        bound = args.max_index or 8
        found = enumerate_centerings(L, bound) if show == "centerings" else maximal_classes(L, bound)
        payload["max_index"] = bound
        payload[show] = [{"index": c.index, "hnf": c.coords.to_lists()} for c in found]
        text = "".join(f"index {c.index}: {c.coords.to_lists()}\n" for c in found)
    else:
        raise UsageError(f"unknown --show {show} for lattice")
    return payload, text, 0


def _load_group(args):
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{args.input}: not JSON ({exc})") from None
        if isinstance(obj, dict) and "result" in obj:  # accept a whole export document
            obj = obj["result"]
        return group_from_struct(obj)
    t, l = _type_and_rank(args)
    fam, parameter = _lattice_name(args.lattice)
    family = case_family(t, l, fam, parameter)
    try:
        return build_representative(family, _rep_name(args.rep))
    except InconsistentVectorSystem as exc:
        raise InternalError(f"shipped representative {family.key} {_rep_name(args.rep)} does not build: {exc}") from None


def cmd_group(args):
    W = _load_group(args)
    check = args.check or "describe"
    payload = {"group": W.to_struct()}
    if check == "describe":
        text = W.describe() + "\n" + "".join(f"  u{k + 1} = ({_vtext(t)}, s{k + 1})\n"
                                             for k, t in enumerate(W.gen_translations))
    elif check == "split":
        v = split_witness(W)
        payload["split"] = v is not None
        payload["witness"] = None if v is None else _vec(v)
        text = f"{str(v is not None).lower()}\n"
    elif check == "cocycle":
        ok = W.check_cocycle(exhaustive=True)
        payload["cocycle"] = ok
        text = f"{str(ok).lower()}\n"
    elif check == "chi":
        m = W.meta
        label = case_family(m["type"], m["rank"], m["lattice"], m.get("parameter")).case_label
        prof = chi_profile(W, label)
        payload["chi"] = prof.to_struct()
        text = "".join(f"{k}: {'yes' if v else 'no'}\n" for k, v in prof.flags.items())
        text += f"label: {prof.label or '-'}\n"
    elif check == "eta":
        tuples = reduced_eta_realizers(W)
        payload["tuples"] = [[[k + 1 for k in W.point_group.word(z.g)] for z in tup] for tup in tuples]
        payload["eta"] = all(eta_check(W, tup) for tup in tuples)
        text = f"{len(tuples)} tuple(s), all pass: {str(payload['eta']).lower()}\n"
    elif check == "profile":
        W0 = W.point_group
        rows = []
        for k in range(W0.rank):
            prof = reflection_coset_profile(W, W0.generator_index(k))
            rows.append({"generator": k + 1, "profile": list(prof)})
        payload["profiles"] = rows
        text = "".join(f"s{r['generator']}: {tuple(r['profile'])}\n" for r in rows)
    elif check == "quotient":
        if not args.modulus:
            raise UsageError("--check quotient needs --modulus")
        fp = finite_quotient(W, args.modulus, args.ceiling).fingerprint()
        payload["fingerprint"] = fp
        text = "".join(f"{k}: {fp[k]}\n" for k in sorted(fp))
    else:
        raise UsageError(f"unknown --check {check}")
    return payload, text, 0


def cmd_verify(args):
    keys = VERIFY_FAMILIES if args.family in (None, "all") else (args.family,)
    reports = [verify_family(*parse_family_key(k)) for k in keys]
    payload = {"reports": [r.to_struct() for r in reports]}
    text = "".join(r.render_text() for r in reports)
    return payload, text, 0 if all(r.ok for r in reports) else 4


def cmd_distinguish(args):
    t, l = _type_and_rank(args)
    fam, parameter = _lattice_name(args.lattice)
    family = case_family(t, l, fam, parameter)
    a, b = (_rep_name(x) for x in args.pair)
    sep = distinguish(build_representative(family, a), build_representative(family, b), family.case_label)
    return {"family": family.key, "a": a, "b": b, "separated_by": sep}, f"{sep or 'none'}\n", 0


def export_entity(args) -> tuple[dict | None, str]:
    """(structured payload, text rendering) for --entity; text may be a DOT graph for diagrams."""
    entity = args.entity
    if entity == "rootsys":
        t, l = _type_and_rank(args)
        R = build_root_system(t, l)
        obj = {"kind": "root_system", "type": t, "rank": l, "ambient_dim": R.ambient_dim,
               "simple_roots": [_vec(a) for a in R.simple_roots],
               "roots": [{"vector": _vec(r), "positive": r in R.positive_roots} for r in R.roots]}
        return obj, "".join(_vtext(r) + "\n" for r in R.roots)
    if entity == "diagram":
        t, l = _type_and_rank(args)
        _, diagram = coxeter_matrix_and_diagram(weyl_group(t, l))
        obj = {"kind": "coxeter_diagram", "type": t, "rank": l, **diagram.to_struct()}
        return obj, diagram.to_dot(t if t in EXCEPTIONAL else f"{t}{l}")
    if entity == "group":
        W = _load_group(args)
        return W.to_struct(), W.describe() + "\n"
    if entity == "catalog":
        return data.load_catalog(), json.dumps(data.load_catalog(), indent=2, sort_keys=True) + "\n"
    raise UsageError(f"unknown --entity {entity}")


def cmd_export(args):
    if args.format not in ("structured", "text"):
        raise UnsupportedFormat(args.format)
    obj, text = export_entity(args)
    return obj, text, 0


# --------------------------------------------------------------------------
# dispatch


VERBS = {
    "rootsys": cmd_rootsys,
    "weyl": cmd_weyl,
    "lattice": cmd_lattice,
    "group": cmd_group,
    "verify": cmd_verify,
    "distinguish": cmd_distinguish,
    "export": cmd_export,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rootcryst", description="Crystallographic groups from irreducible root systems.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--type")
    p.add_argument("--rank", type=int)
    p.add_argument("--lattice", help="CL, CCL, FL, Omega, Q6, P6, Q7, P7, QofR, PofR or Lambda<k>")
    p.add_argument("--rep", help="representative, e.g. 2 or W2")
    p.add_argument("--pair", nargs=2, metavar="REP", help="two representatives (distinguish)")
    p.add_argument("--family", help="family key such as D6-FL, or 'all' (verify)")
    p.add_argument("--show")
    p.add_argument("--check")
    p.add_argument("--entity", help="rootsys, diagram, group or catalog (export)")
    p.add_argument("--input", help="serialized group to load instead of a catalog representative")
    p.add_argument("--modulus", type=int)
    p.add_argument("--max-index", type=int)
    p.add_argument("--ceiling", type=int, help=f"work ceiling; default from ${CEILING_ENV}")
    p.add_argument("--format", default="text", help="text or structured")
    return p


@contextmanager
def _ceiling_override(value: int | None):
    if value is None:
        yield
        return
    old = os.environ.get(CEILING_ENV)
    os.environ[CEILING_ENV] = str(value)
    weyl_group.cache_clear()
    try:
        yield
    finally:
        if old is None:
            os.environ.pop(CEILING_ENV, None)
        else:
            os.environ[CEILING_ENV] = old
        weyl_group.cache_clear()


def _status_of(exc: Exception) -> int:
    if isinstance(exc, UsageError):
        return 2
    if isinstance(exc, CeilingError):
        return 3
    return 4


def run(argv: list[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    fmt = "text"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        if fmt not in ("text", "structured"):
            raise UnsupportedFormat(f"unsupported format {fmt!r}")
        with _ceiling_override(args.ceiling):
            payload, text, status = VERBS[args.verb](args)
    except Exception as exc:  # every failure becomes one error record
        status = _status_of(exc) if isinstance(exc, RootCrystError) else 4
        record = {"schema_version": SCHEMA_VERSION, "status": status,
                  "error": {"kind": type(exc).__name__, "message": str(exc)}}
        err.write(json.dumps(record, sort_keys=True) + "\n")
        return status
    if fmt == "structured":
        doc = {"schema_version": SCHEMA_VERSION, "verb": args.verb, "status": status, "result": payload}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        out.write(text)
    return status


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
