"""Finite reflection groups as explicit matrix groups."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import DiagramTooLarge, GroupTooLarge, UsageError
from .exactla import RationalMatrix, integer_rank, matrix_to_text, nullspace

DEFAULT_GROUP_CEILING = 2_000_000
CEILING_ENV = "ROOTCRYST_CEILING"


def default_ceiling() -> int:
    raw = os.environ.get(CEILING_ENV)
    return int(raw) if raw else DEFAULT_GROUP_CEILING


def element_order(M: RationalMatrix, limit: int = 1000) -> int:
    """Multiplicative order of M, or 0 if it exceeds limit."""
    P = M
    for k in range(1, limit + 1):
        if P.is_identity():
            return k
        P = P @ M
    return 0


def coxeter_matrix_of(gens: Sequence[RationalMatrix]) -> list[list[int]]:
    """m(i, j) = order of s_i s_j (0 when infinite or beyond the search limit)."""
    l = len(gens)
    m = [[1] * l for _ in range(l)]
    for i in range(l):
        for j in range(i + 1, l):
            m[i][j] = m[j][i] = element_order(gens[i] @ gens[j])
    return m


def diagram_connected(m: list[list[int]]) -> bool:
    l = len(m)
    if l == 0:
        return False
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in range(l):
            if j not in seen and m[i][j] != 2:
                seen.add(j)
                stack.append(j)
    return len(seen) == l


def _components(m: list[list[int]]) -> list[list[int]]:
    l = len(m)
    seen, comps = set(), []
    for s in range(l):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(l):
                if j not in seen and m[i][j] != 2:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _component_order(m: list[list[int]], nodes: list[int]) -> int | None:
    n = len(nodes)
    if n == 1:
        return 2
    edges = [(i, j, m[i][j]) for a, i in enumerate(nodes) for j in nodes[a + 1:] if m[i][j] != 2]
    if any(lab == 0 for _, _, lab in edges) or len(edges) != n - 1:
        return None
    if n == 2:
        return 2 * edges[0][2]
    deg = {i: 0 for i in nodes}
    for i, j, _ in edges:
        deg[i] += 1
        deg[j] += 1
    labels = sorted(lab for _, _, lab in edges)
    heavy = [e for e in edges if e[2] > 3]
    if max(deg.values()) > 3:
        return None
    branch = [i for i in nodes if deg[i] == 3]
    if not heavy and not branch:
        return math.factorial(n + 1)
    if not heavy and len(branch) == 1:
        arms = sorted(_arm_length(edges, branch[0], nb) for nb in _neighbours(edges, branch[0]))
        if arms[:2] == [1, 1]:
            return 2 ** (n - 1) * math.factorial(n)
        return {(1, 2, 2): 51840, (1, 2, 3): 2903040, (1, 2, 4): 696729600}.get(tuple(arms))
    if branch or len(heavy) != 1 or labels[-2] != 3:
        return None
    i, j, lab = heavy[0]
    at_end = deg[i] == 1 or deg[j] == 1
    if lab == 4:
        if at_end:
            return 2 ** n * math.factorial(n)
        return 1152 if n == 4 else None
    if lab == 5 and at_end:
        return {3: 120, 4: 14400}.get(n)
    return None


def _neighbours(edges, v):
    return [j if i == v else i for i, j, _ in edges if v in (i, j)]


def _arm_length(edges, root, start) -> int:
    length, prev, cur = 1, root, start
    while True:
        nxt = [x for x in _neighbours(edges, cur) if x != prev]
        if not nxt:
            return length
        prev, cur = cur, nxt[0]
        length += 1


def coxeter_group_order(m: list[list[int]]) -> int | None:
    """Order of the Coxeter group with matrix m when it is finite and classified, else None."""
    total = 1
    for comp in _components(m):
        o = _component_order(m, comp)
        if o is None:
            return None
        total *= o
    return total


@dataclass(frozen=True)
class CoxeterDiagram:
    nodes: tuple
    edges: tuple  # (i, j, label) with i < j, label >= 3 (0 for infinity)

    @classmethod
    def from_matrix(cls, m: list[list[int]]) -> "CoxeterDiagram":
        l = len(m)
        edges = tuple((i + 1, j + 1, m[i][j]) for i in range(l) for j in range(i + 1, l) if m[i][j] != 2)
        return cls(tuple(range(1, l + 1)), edges)

    def label(self, i: int, j: int) -> int:
        if i == j:
            return 1
        a, b = min(i, j), max(i, j)
        for x, y, lab in self.edges:
            if (x, y) == (a, b):
                return lab
        return 2

    def to_text(self) -> str:
        lines = [f"nodes {len(self.nodes)}"]
        lines += [f"{i} {j} {lab}" for i, j, lab in self.edges]
        return "\n".join(lines) + "\n"

    def to_dot(self, name: str = "coxeter") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  s{i};" for i in self.nodes]
        for i, j, lab in self.edges:
            attr = "" if lab == 3 else f' [label="{lab if lab else "inf"}"]'
            lines.append(f"  s{i} -- s{j}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_struct(self) -> dict:
        return {"nodes": list(self.nodes), "edges": [list(e) for e in self.edges]}


class WeylGroup:
    """Finite matrix group generated by the given involutions (or any finite-order matrices)."""

    def __init__(self, gens: Sequence[RationalMatrix], ceiling: int | None = None, label: str = ""):
        gens = list(gens)
        if not gens:
            raise UsageError("need at least one generator")
        n = gens[0].rows
        if any(g.rows != n or g.cols != n for g in gens):
            raise UsageError("generators must be square of one size")
        self.label = label
        self.gens = tuple(gens)
        self.dim = n
        self.ceiling = default_ceiling() if ceiling is None else ceiling
        self.coxeter_matrix = coxeter_matrix_of(gens)
        if all(element_order(g, 2) == 2 for g in gens):
            predicted = coxeter_group_order(self.coxeter_matrix)
            if predicted is not None and predicted > self.ceiling:
                raise GroupTooLarge(f"group order {predicted} exceeds ceiling {self.ceiling}")
        self._generate()
        self._words: dict[int, tuple] = {0: ()}
        self._inverse: dict[int, int] = {}
        self._orthogonal = all((g.T @ g).is_identity() for g in gens)

    def _generate(self) -> None:
        ident = RationalMatrix.identity(self.dim)
        elements = [ident]
        index = {ident: 0}
        parent, via, length = [-1], [-1], [0]
        right: list = [None]
        layer = [0]
        depth = 0
        while layer:
            depth += 1
            pending: dict[RationalMatrix, tuple[int, int]] = {}
            unresolved = []
            for i in layer:
                row = [-1] * len(self.gens)
                for k, s in enumerate(self.gens):
                    P = elements[i] @ s
                    j = index.get(P)
                    if j is None:
                        if P not in pending:
                            pending[P] = (i, k)
                        unresolved.append((i, k, P))
                    else:
                        row[k] = j
                right[i] = row
            new = sorted(pending, key=RationalMatrix.sort_key)
            if len(elements) + len(new) > self.ceiling:
                raise GroupTooLarge(f"more than {self.ceiling} elements")
            layer = []
            for P in new:
                idx = len(elements)
                index[P] = idx
                elements.append(P)
                p, k = pending[P]
                parent.append(p)
                via.append(k)
                length.append(depth)
                layer.append(idx)
                right.append(None)
            for i, k, P in unresolved:
                right[i][k] = index[P]
        self.elements = elements
        self.index = index
        self.parent = parent
        self.via = via
        self.length = length
        self.right = right

    # basic queries --------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def rank(self) -> int:
        return len(self.gens)

    def __len__(self) -> int:
        return len(self.elements)

    def generator_index(self, k: int) -> int:
        return self.right[0][k]

    def index_of(self, M: RationalMatrix) -> int:
        try:
            return self.index[M]
        except KeyError:
            raise UsageError("matrix is not an element of this group") from None

    def word(self, i: int) -> tuple:
        """Shortest generator word (0-based generator indices) with product equal to element i."""
        w = self._words.get(i)
        if w is None:
            out = []
            j = i
            while j and j not in self._words:
                out.append(self.via[j])
                j = self.parent[j]
            w = self._words[j] + tuple(reversed(out))
            self._words[i] = w
        return w

    def multiply(self, i: int, j: int) -> int:
        r = i
        for k in self.word(j):
            r = self.right[r][k]
        return r

    def inverse(self, i: int) -> int:
        inv = self._inverse.get(i)
        if inv is None:
            M = self.elements[i]
            inv = self.index[M.T if self._orthogonal else M.inverse()]
            self._inverse[i] = inv
            self._inverse[inv] = i
        return inv

    def conjugate(self, w: int, g: int) -> int:
        """w g w^-1."""
        return self.multiply(self.multiply(w, g), self.inverse(w))

    def is_involution(self, i: int) -> bool:
        return i != 0 and self.multiply(i, i) == 0

    def evaluate_word(self, word: Sequence[int]) -> RationalMatrix:
        M = RationalMatrix.identity(self.dim)
        for k in word:
            M = M @ self.gens[k]
        return M

    def element_table_text(self) -> str:
        return "".join(matrix_to_text(M) for M in self.elements)


def generate(S: Sequence[RationalMatrix], ceiling: int | None = None) -> WeylGroup:
    return WeylGroup(S, ceiling)


@lru_cache(maxsize=16)
def weyl_group(type_label: str, l: int, ceiling: int | None = None) -> WeylGroup:
    from .rootsys import build_root_system

    R = build_root_system(type_label, l)
    return WeylGroup(R.simple_reflections(), ceiling, R.type_label)


def coxeter_matrix_and_diagram(W: WeylGroup) -> tuple[list[list[int]], CoxeterDiagram]:
    m = [list(r) for r in W.coxeter_matrix]
    return m, CoxeterDiagram.from_matrix(m)


def diagram_automorphisms(diagram: CoxeterDiagram, max_nodes: int = 10) -> list[tuple]:
    """All label-preserving node permutations, as tuples sigma with sigma[i-1] = image of node i."""
    nodes = diagram.nodes
    n = len(nodes)
    if n > max_nodes:
        raise DiagramTooLarge(f"{n} nodes exceeds the brute-force limit {max_nodes}")
    out = []

    def extend(partial: list):
        i = len(partial)
        if i == n:
            out.append(tuple(partial))
            return
        for cand in nodes:
            if cand in partial:
                continue
            if all(diagram.label(nodes[a], nodes[i]) == diagram.label(partial[a], cand) for a in range(i)):
                extend(partial + [cand])

    extend([])
    return sorted(out)


def _fixed_dim(W: WeylGroup, i: int) -> int:
    M = W.elements[i]
    n = W.dim
    I = RationalMatrix.identity(n)
    D = I - M
    rows = [list(D.num[r * n:(r + 1) * n]) for r in range(n)]
    return n - integer_rank(rows)


def classify_reflections(W: WeylGroup) -> frozenset:
    """Indices of involutions whose fixed space is a hyperplane of the space W acts on."""
    return frozenset(i for i in range(W.order) if W.is_involution(i) and _fixed_dim(W, i) == W.dim - 1)


def generator_conjugates(W: WeylGroup) -> frozenset:
    gens = [W.generator_index(k) for k in range(W.rank)]
    return frozenset(W.conjugate(w, s) for w in range(W.order) for s in gens)


def is_essential(W: WeylGroup) -> bool:
    n = W.dim
    I = RationalMatrix.identity(n)
    rows = []
    for g in W.gens:
        rows += (I - g).to_rows()
    return not nullspace(rows, n)
