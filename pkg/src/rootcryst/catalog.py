"""Shipped table data: Coxeter diagrams, extension counts, lattice families, representatives.

The data lives in ``data/catalog.json`` next to a ``catalog.sha256`` digest.  Vectors
are written as small expressions over the standard basis:

    e3            standard basis vector
    sum, sum6     sum of all (or the first 6) basis vectors
    h             1/2*sum
    1/2*e3+1/4*sum

Templates ``{"expr": "e{i}-e{i+1}", "i": [1, "l-1"]}`` expand over an index range; the
bounds and the placeholders may use ``l`` (rank), ``n`` (ambient dimension) and ``a``
(lattice parameter).
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import CatalogCorrupt, UnknownCatalogEntry, UsageError

SCHEMA_VERSION = 1
_TERM = re.compile(r"([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(e\d+|sum\d*|h)?")


def _read_bytes(name: str) -> bytes:
    return resources.files("rootcryst").joinpath("data").joinpath(name).read_bytes()


@lru_cache(maxsize=1)
def load_catalog() -> dict:
    raw = _read_bytes("catalog.json")
    expected = _read_bytes("catalog.sha256").decode().split()[0]
    if hashlib.sha256(raw).hexdigest() != expected:
        raise CatalogCorrupt("catalog.json does not match its checksum")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogCorrupt(f"catalog.json is not valid JSON: {exc}") from None
    if data.get("schema_version") != SCHEMA_VERSION:
        raise CatalogCorrupt(f"unsupported catalog schema {data.get('schema_version')}")
    return data


def parse_vector(expr: str, n: int) -> tuple[Fraction, ...]:
    """Evaluate a vector expression in dimension n."""
    text = expr.replace(" ", "")
    out = [Fraction(0)] * n
    if text in ("", "0"):
        return tuple(out)
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(3) is None):
            raise UsageError(f"cannot parse vector expression {expr!r} at {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        atom = m.group(3)
        if atom == "h":
            coef, atom = coef / 2, "sum"
        if atom.startswith("sum"):
            upto = int(atom[3:]) if len(atom) > 3 else n
            idx = range(upto)
        else:
            idx = [int(atom[1:]) - 1]
        for i in idx:
            if not 0 <= i < n:
                raise UsageError(f"index out of range in {expr!r}")
            out[i] += sign * coef
        pos = m.end()
    return tuple(out)


def _bound(value, env: dict) -> int:
    """Integer bound: a literal, or a variable with an optional offset such as "l-1"."""
    if isinstance(value, int):
        return value
    m = re.fullmatch(r"\s*(\d+|[a-z])\s*(?:([+-])\s*(\d+))?\s*", value)
    if not m:
        raise CatalogCorrupt(f"bad bound {value!r}")
    base = int(m.group(1)) if m.group(1).isdigit() else env[m.group(1)]
    offset = int(m.group(3) or 0)
    return base - offset if m.group(2) == "-" else base + offset


def _fill(template: str, env: dict) -> str:
    def repl(m):
        return str(_bound(m.group(1), env))

    return re.sub(r"\{([^}]*)\}", repl, template)


def expand(items: Sequence[dict], l: int, n: int, parameter: int | None = None) -> list[tuple[Fraction, ...]]:
    env = {"l": l, "n": n, "a": parameter if parameter is not None else 0}
    vectors = []
    for item in items:
        if "i" in item:
            lo, hi = (_bound(b, env) for b in item["i"])
            for i in range(lo, hi + 1):
                vectors.append(parse_vector(_fill(item["expr"], {**env, "i": i}), n))
        else:
            vectors.append(parse_vector(_fill(item["expr"], env), n))
    return vectors


def _rank_ok(row: dict, l: int) -> bool:
    if l < row.get("min_rank", 1) or l > row.get("max_rank", l):
        return False
    rule = row.get("ranks")
    if rule == "odd":
        return l % 2 == 1
    if rule == "even":
        return l % 2 == 0
    if rule == "odd_or_4":
        return l % 2 == 1 or l == 4
    return True


def extension_count(type_label: str, l: int, family: str, parameter: int | None = None) -> int | None:
    """n(W0, L) from the shipped table, or None when the table has no such row."""
    for row in load_catalog()["extension_counts"]:
        if row["type"] != type_label or row["family"] != family or not _rank_ok(row, l):
            continue
        count = row["count"]
        if isinstance(count, int):
            return count
        if "parameter_parity" in count:
            if parameter is None:
                raise UsageError("this row needs the lattice parameter")
            return count["parameter_parity"]["odd" if parameter % 2 else "even"]
        if "rank_parity" in count:
            return count["rank_parity"]["odd" if l % 2 else "even"]
        return count["by_rank"].get(str(l), count["otherwise"])
    return None


def extension_rows() -> list[dict]:
    return list(load_catalog()["extension_counts"])


def diagram_edges(type_label: str, l: int) -> list[tuple[int, int, int]]:
    entry = load_catalog()["coxeter_diagrams"].get(type_label)
    if entry is None:
        raise UnknownCatalogEntry(f"no diagram for {type_label}")
    if "edges" in entry:
        return sorted(tuple(e) for e in entry["edges"])
    if entry["shape"] == "chain":
        edges = [(i, i + 1, 3) for i in range(1, l)]
        if "last_label" in entry and l >= 2:
            edges[-1] = (l - 1, l, entry["last_label"])
        return edges
    # fork: chain 1..l-1 plus an extra edge (l-2, l)
    return sorted([(i, i + 1, 3) for i in range(1, l - 1)] + [(l - 2, l, 3)])


def catalog_simple_roots(type_label: str, l: int) -> list[tuple[Fraction, ...]] | None:
    items = load_catalog()["simple_roots"].get(type_label)
    return None if items is None else expand(items, l, l)


def family_generators(family: str, l: int, parameter: int | None = None) -> list[tuple[Fraction, ...]]:
    entry = load_catalog()["lattice_families"].get(family)
    if entry is None:
        raise UnknownCatalogEntry(f"no lattice family {family}")
    n = _bound(entry["ambient"], {"l": l})
    return expand(entry["generators"], l, n, parameter)


def representative_entry(type_label: str, l: int, family: str) -> dict | None:
    for entry in load_catalog()["representatives"]:
        if entry["type"] == type_label and entry["family"] == family and _rank_ok(entry, l):
            return entry
    return None


def representative_entries() -> list[dict]:
    return list(load_catalog()["representatives"])


def generator_translations(group: dict, l: int, n: int) -> list[tuple[Fraction, ...]]:
    spec = group["translations"]
    if "list" in spec:
        if len(spec["list"]) != l:
            raise CatalogCorrupt(f"{group['name']} lists {len(spec['list'])} translations for rank {l}")
        return [parse_vector(x, n) for x in spec["list"]]
    out = [parse_vector(spec["default"], n)] * l
    if "last" in spec:
        out[-1] = parse_vector(spec["last"], n)
    return out
