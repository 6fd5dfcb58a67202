"""Print |H^1(W0, V/L)| for one (type, rank, family).

usage: python3 scripts/cohomology_order.py TYPE RANK FAMILY [PARAMETER]
"""
import sys

from rootcryst.crystgrp import cohomology_order
from rootcryst.lattices import InvariantLattice

if __name__ == "__main__":
    t, rank, fam = sys.argv[1], int(sys.argv[2]), sys.argv[3]
    param = int(sys.argv[4]) if len(sys.argv) > 4 else None
    L = InvariantLattice.for_root_system(t, rank, fam, param)
    print(t, rank, fam, param or "", cohomology_order(L))
