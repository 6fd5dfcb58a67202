"""Separating the extension classes of a family by split tests and coset predicates.

Each family of representatives gets a battery of coset predicates (involutions in a
coset, equal squares across cosets, commuting with an involution).  The predicates
are evaluated on every generator tuple obtained from the canonical one by a Coxeter
diagram automorphism, and a verdict holds only when it holds on all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import catalog as data
from .crystgrp import (
    CrystGroup,
    GroupElement,
    coset_commuting_with_involution,
    coset_equal_squares_many,
    coset_involution_exists,
    invert,
    multiply,
    reflection_coset_profile,
    split_witness,
)
from .errors import FamilyMismatch, InconsistentVectorSystem, InternalError, UnknownCatalogEntry
from .exactla import format_rational
from .lattices import invariant_lattice
from .weyl import classify_reflections, coxeter_matrix_and_diagram, diagram_automorphisms

CASE_LABELS = ("Case3", "Case4.1", "Case4.2", "Case4.3", "split-only")


@dataclass(frozen=True)
class CaseFamily:
    root_type: str
    rank: int
    lattice: str
    parameter: int | None
    names: tuple[str, ...]
    case_label: str
    count: int | None
    source: str

    @property
    def key(self) -> str:
        lat = self.lattice if self.parameter is None else f"{self.lattice}{self.parameter}"
        rank = "" if self.root_type[1:].isdigit() else self.rank
        return f"{self.root_type}{rank}-{lat}"


def case_family(root_type: str, rank: int, lattice: str, parameter: int | None = None) -> CaseFamily:
    entry = data.representative_entry(root_type, rank, lattice)
    count = data.extension_count(root_type, rank, lattice, parameter)
    if entry is None:
        if count == 1:
            return CaseFamily(root_type, rank, lattice, parameter, ("W1",), "split-only", 1, "table")
        raise UnknownCatalogEntry(f"no representatives shipped for {root_type}{rank} with {lattice}")
    names = tuple(g["name"] for g in entry["groups"])
    return CaseFamily(root_type, rank, lattice, parameter, names, entry["case"], count, entry["source"])


def parse_family_key(key: str) -> tuple[str, int, str, int | None]:
    """'D6-FL' -> ('D', 6, 'FL', None); 'E6-Q6' -> ('E6', 6, 'Q6', None); 'A5-Lambda2' -> ('A', 5, 'Lambda', 2)."""
    try:
        head, lat = key.split("-", 1)
    except ValueError:
        raise UnknownCatalogEntry(f"family key {key!r} should look like D6-FL") from None
    if head in ("E6", "E7", "E8", "F4", "G2"):
        root_type, rank = head, int(head[1])
    else:
        root_type, digits = head[:1], head[1:]
        if not digits.isdigit():
            raise UnknownCatalogEntry(f"family key {key!r} should look like D6-FL")
        rank = int(digits)
    parameter = None
    if lat.startswith("Lambda") and lat[6:].isdigit():
        lat, parameter = "Lambda", int(lat[6:])
    return root_type, rank, lat, parameter


def _translations(fam: CaseFamily, name: str, n: int) -> list:
    entry = data.representative_entry(fam.root_type, fam.rank, fam.lattice)
    if entry is None:
        return [(0,) * n] * fam.rank
    group = next(g for g in entry["groups"] if g["name"] == name)
    return data.generator_translations(group, fam.rank, n)


def build_representative(fam: CaseFamily, name: str) -> CrystGroup:
    if name not in fam.names:
        raise UnknownCatalogEntry(f"{fam.key} has no representative {name}")
    L = invariant_lattice(fam.root_type, fam.rank, fam.lattice, fam.parameter)
    meta = {"type": fam.root_type, "rank": fam.rank, "lattice": fam.lattice,
            "parameter": fam.parameter, "name": name}
    return CrystGroup(L, _translations(fam, name, L.ambient_dim), meta)


def catalog(root_type: str, rank: int, lattice: str, parameter: int | None = None) -> list[CrystGroup]:
    """All shipped representatives of the family, built and consistency-checked."""
    fam = case_family(root_type, rank, lattice, parameter)
    return [build_representative(fam, name) for name in fam.names]


def catalog_status(fam: CaseFamily) -> list[tuple[str, CrystGroup | None, str | None]]:
    """(name, group, problem) per representative; entries that fail to build carry the reason."""
    out = []
    for name in fam.names:
        try:
            out.append((name, build_representative(fam, name), None))
        except InconsistentVectorSystem as exc:
            out.append((name, None, f"inconsistent vector system: {exc}"))
    return out


# --------------------------------------------------------------------------
# generator tuples


def _point_hom(W: CrystGroup, images: list[int]) -> list[int] | None:
    """The endomorphism of W0 sending generator k to images[k], or None if that is not a homomorphism."""
    W0 = W.point_group
    f = [0] * W0.order
    for i in range(1, W0.order):
        f[i] = W0.multiply(f[W0.parent[i]], images[W0.via[i]])
    for i in range(W0.order):
        for k in range(W0.rank):
            if f[W0.right[i][k]] != W0.multiply(f[i], images[k]):
                return None
    return f


def eta_check(W: CrystGroup, elements: tuple) -> bool:
    """Generator-tuple test: the point parts give an automorphism of W0 carrying
    reflections exactly onto the involutions whose coset has the reflection profile."""
    W0 = W.point_group
    l = W.rank
    if len(elements) != W0.rank:
        return False
    images = [z.g for z in elements]
    f = _point_hom(W, images)
    if f is None or len(set(f)) != W0.order:
        return False
    reflections = classify_reflections(W0)
    want = (2 ** (l - 1), 2)
    for h in range(1, W0.order):
        if not W0.is_involution(h):
            continue
        passes = reflection_coset_profile(W, f[h])[2:] == want
        if passes != (h in reflections):
            return False
    return True


def reduced_eta_realizers(W: CrystGroup) -> list[tuple[GroupElement, ...]]:
    """Canonical generators permuted by every Coxeter diagram automorphism (identity first)."""
    W0 = W.point_group
    _, diagram = coxeter_matrix_and_diagram(W0)
    gens = [W.generator(k) for k in range(W0.rank)]
    tuples = [tuple(gens[sigma[i] - 1] for i in range(W0.rank)) for sigma in diagram_automorphisms(diagram)]
    for t in tuples:
        if not eta_check(W, t):
            raise InternalError("a diagram-twisted generator tuple fails the tuple test")
    return tuples


def conjugate_tuple(elements: tuple, u: GroupElement) -> tuple:
    ui = invert(u)
    return tuple(multiply(multiply(u, z), ui) for z in elements)


# --------------------------------------------------------------------------
# predicate batteries


def _flag_names(case_label: str, l: int) -> list[str]:
    if case_label == "Case3":
        return [f"equal-squares(s{l - 1},s{l})"]
    if case_label == "Case4.1":
        return [f"involution(s{i})" for i in range(1, l + 1)]
    if case_label == "Case4.2":
        return ["triple-squares(s1,s2,s3)", "commuting-involution(s1,s4)"]
    if case_label == "Case4.3":
        return [f"involution(s{i})" for i in range(1, l + 1)] + [f"equal-squares(s2,s{l})"]
    return []


def _evaluate(W: CrystGroup, flag: str, cosets: list[int]):
    """Witness (truthy) or None for one predicate on the cosets of a generator tuple."""
    args = [int(x[1:]) - 1 for x in flag[flag.index("(") + 1:-1].split(",")]
    gs = [cosets[a] for a in args]
    if flag.startswith("involution"):
        z = coset_involution_exists(W, gs[0])
        return None if z is None else (z,)
    if flag.startswith("equal-squares") or flag.startswith("triple-squares"):
        return coset_equal_squares_many(W, gs)
    if flag.startswith("commuting-involution"):
        return coset_commuting_with_involution(W, gs[0], gs[1])
    raise InternalError(f"unknown predicate {flag}")


def _chi_label(case_label: str, flags: dict, l: int) -> str | None:
    f = flags
    if case_label == "Case3":
        return "chi2" if f[f"equal-squares(s{l - 1},s{l})"] else "chi3"
    if case_label == "Case4.1":
        lower = [f[f"involution(s{i})"] for i in range(1, l)]
        last = f[f"involution(s{l})"]
        if all(lower) and not last:
            return "chi2"
        if last and not any(lower):
            return "chi3"
        if not any(lower) and not last:
            return "chi4"
        return None
    if case_label == "Case4.2":
        if f["triple-squares(s1,s2,s3)"]:
            return "chi2"
        return "chi3" if f["commuting-involution(s1,s4)"] else "chi4"
    if case_label == "Case4.3":
        if all(f[f"involution(s{i})"] for i in range(1, l)):
            return "chi2"
        if f["involution(s2)"]:
            return None
        return "chi3" if f[f"equal-squares(s2,s{l})"] else "chi4"
    return None


@dataclass
class ChiProfile:
    case_label: str
    flags: dict[str, bool]
    witnesses: dict[str, tuple | None]
    label: str | None
    tuple_count: int
    provenance: str = field(default="")

    def to_struct(self) -> dict:
        return {
            "case": self.case_label,
            "flags": dict(self.flags),
            "chi": self.label,
            "tuples": self.tuple_count,
            "provenance": self.provenance,
            "witnesses": {k: None if w is None else [element_struct(z) for z in w]
                          for k, w in self.witnesses.items()},
        }


def element_struct(z: GroupElement) -> dict:
    W0 = z.group.point_group
    return {"v": [format_rational(x) for x in z.v], "g_word": [k + 1 for k in W0.word(z.g)]}


def chi_profile(W: CrystGroup, case_label: str, tuples: list[tuple] | None = None) -> ChiProfile:
    """Predicate flags of the case battery, each the conjunction over the generator tuples."""
    if case_label not in CASE_LABELS:
        raise FamilyMismatch(f"unknown case label {case_label!r}")
    if tuples is None:
        tuples = reduced_eta_realizers(W)
        provenance = "diagram-twisted canonical generators"
    else:
        provenance = "caller-supplied generator tuples"
    names = _flag_names(case_label, W.rank)
    flags = {n: True for n in names}
    witnesses: dict = {n: None for n in names}
    labels = set()
    for t in tuples:
        cosets = [z.g for z in t]
        per = {}
        for n in names:
            w = _evaluate(W, n, cosets)
            per[n] = w is not None
            if w is not None and witnesses[n] is None:
                witnesses[n] = w
        for n in names:
            flags[n] = flags[n] and per[n]
        labels.add(_chi_label(case_label, per, W.rank))
    label = labels.pop() if len(labels) == 1 else None
    witnesses = {n: (witnesses[n] if flags[n] else None) for n in names}
    return ChiProfile(case_label, flags, witnesses, label, len(tuples), provenance)


def _same_family(W: CrystGroup, Wp: CrystGroup) -> bool:
    keys = ("type", "rank", "lattice", "parameter")
    return all(W.meta.get(k) == Wp.meta.get(k) for k in keys) and W.meta.get("type") is not None


def distinguish(W: CrystGroup, Wp: CrystGroup, case_label: str | None = None) -> str | None:
    """Name of the first invariant on which the two groups differ, or None."""
    if not _same_family(W, Wp):
        raise FamilyMismatch("groups come from different (type, rank, lattice) families")
    if (split_witness(W) is None) != (split_witness(Wp) is None):
        return "split"
    if case_label is None:
        m = W.meta
        case_label = case_family(m["type"], m["rank"], m["lattice"], m.get("parameter")).case_label
    a, b = chi_profile(W, case_label), chi_profile(Wp, case_label)
    for name in a.flags:
        if a.flags[name] != b.flags[name]:
            return name
    return None


# --------------------------------------------------------------------------
# family verification report


@dataclass
class RepresentativeRow:
    name: str
    built: bool
    problem: str | None = None
    split: bool | None = None
    split_witness: tuple | None = None
    profile: ChiProfile | None = None

    def to_struct(self) -> dict:
        out = {"name": self.name, "built": self.built}
        if self.problem:
            out["problem"] = self.problem
        if self.built:
            out["split"] = self.split
            out["split_witness"] = None if self.split_witness is None else [format_rational(x) for x in self.split_witness]
            out["profile"] = self.profile.to_struct()
        return out


@dataclass
class FamilyReport:
    family: CaseFamily
    rows: list[RepresentativeRow]
    pairs: dict[tuple[str, str], str | None]
    issues: list[str]

    @property
    def ok(self) -> bool:
        return not self.issues

    def to_struct(self) -> dict:
        f = self.family
        return {
            "family": f.key,
            "type": f.root_type,
            "rank": f.rank,
            "lattice": f.lattice,
            "parameter": f.parameter,
            "case": f.case_label,
            "table_count": f.count,
            "source": f.source,
            "representatives": [r.to_struct() for r in self.rows],
            "pairs": [{"a": a, "b": b, "separated_by": s} for (a, b), s in self.pairs.items()],
            "issues": list(self.issues),
            "ok": self.ok,
        }

    def render_text(self) -> str:
        f = self.family
        lines = [f"family {f.key}  case {f.case_label}  table count {f.count}  source {f.source}"]
        for r in self.rows:
            if not r.built:
                lines.append(f"  {r.name}: not built ({r.problem})")
                continue
            flags = " ".join(f"{k}={'yes' if v else 'no'}" for k, v in r.profile.flags.items())
            label = r.profile.label or "-"
            lines.append(f"  {r.name}: split={'yes' if r.split else 'no'} {label} {flags}".rstrip())
        for (a, b), s in self.pairs.items():
            lines.append(f"  {a} vs {b}: {s if s else 'NOT separated'}")
        for issue in self.issues:
            lines.append(f"  issue: {issue}")
        lines.append("  verdict: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines) + "\n"


def verify_family(root_type: str, rank: int, lattice: str, parameter: int | None = None) -> FamilyReport:
    fam = case_family(root_type, rank, lattice, parameter)
    rows, groups, issues = [], {}, []
    if fam.count is not None and fam.count != len(fam.names):
        issues.append(f"table count {fam.count} differs from {len(fam.names)} shipped representatives")
    for name, W, problem in catalog_status(fam):
        if W is None:
            rows.append(RepresentativeRow(name, False, problem))
            issues.append(f"{name} does not build: {problem}")
            continue
        v = split_witness(W)
        prof = chi_profile(W, fam.case_label)
        rows.append(RepresentativeRow(name, True, None, v is not None, v, prof))
        groups[name] = (W, v is not None, prof)
    pairs = {}
    for a, b in combinations(fam.names, 2):
        if a not in groups or b not in groups:
            continue
        (_, sa, pa), (_, sb, pb) = groups[a], groups[b]
        sep = "split" if sa != sb else next((n for n in pa.flags if pa.flags[n] != pb.flags[n]), None)
        pairs[(a, b)] = sep
        if sep is None:
            issues.append(f"{a} and {b} are not separated")
    split_names = [r.name for r in rows if r.built and r.split]
    if split_names and split_names != ["W1"]:
        issues.append(f"split representatives {split_names}, expected only W1")
    return FamilyReport(fam, rows, pairs, issues)
