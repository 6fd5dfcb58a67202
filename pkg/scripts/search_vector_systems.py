"""Enumerate vector systems with generator translations on a 1/DEN grid and group them by class.

usage: python3 scripts/search_vector_systems.py TYPE RANK FAMILY [DEN]

Backtracks over the generators, pruning with the Coxeter relations among the
generators chosen so far, then groups the survivors by cohomology class (two
systems are in one class when their difference splits).  Grid points are taken
modulo the lattice through its HNF basis, so the search is finite.
"""
import sys
from fractions import Fraction as F
from itertools import product

from rootcryst.crystgrp import CrystGroup, is_split
from rootcryst.lattices import InvariantLattice


def affine_power(t, s, k):
    acc_t, acc_s = None, None
    for _ in range(k):
        if acc_s is None:
            acc_t, acc_s = list(t), s
        else:
            acc_t = [a + b for a, b in zip(acc_t, acc_s.apply(t))]
            acc_s = acc_s @ s
    return acc_t


def search(type_label, rank, family, den=4):
    L = InvariantLattice.for_root_system(type_label, rank, family)
    W0 = L.group
    S, m = W0.gens, W0.coxeter_matrix
    # grid of lattice coordinates in [0,1)^l with denominator den
    grid = [L.vector([F(k, den) for k in ks]) for ks in product(range(den), repeat=L.rank)]

    def ok_pair(ti, si, tj, sj, mij):
        t = [a + b for a, b in zip(ti, si.apply(tj))]
        return L.contains(affine_power(t, si @ sj, mij))

    sols = []

    def rec(chosen):
        k = len(chosen)
        if k == len(S):
            sols.append(list(chosen))
            return
        for t in grid:
            if not L.contains([a + b for a, b in zip(t, S[k].apply(t))]):
                continue
            if all(ok_pair(chosen[i], S[i], t, S[k], m[i][k]) for i in range(k)):
                rec(chosen + [list(t)])

    rec([])
    classes = []
    for ts in sols:
        for rep in classes:
            diff = CrystGroup(L, [[a - b for a, b in zip(x, y)] for x, y in zip(ts, rep[0])])
            if is_split(diff):
                rep[1] += 1
                break
        else:
            classes.append([ts, 1])
    return L, len(sols), classes


if __name__ == "__main__":
    t, rank, fam = sys.argv[1], int(sys.argv[2]), sys.argv[3]
    den = int(sys.argv[4]) if len(sys.argv) > 4 else 4
    L, count, classes = search(t, rank, fam, den)
    print("cocycles", count, "classes", len(classes))
    for ts, n in classes:
        W = CrystGroup(L, ts)
        print(n, "split" if is_split(W) else "nonsplit", [[str(x) for x in t] for t in ts])
