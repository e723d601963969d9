"""Integer kernels of rational constraint matrices.

Rows are scaled to integers and reduced over ZZ with sympy's Smith normal
form; S A T = D with S, T unimodular, so the columns of T past the rank of
D span {m in Z^n : A m = 0}. The kernel basis is LLL-reduced before use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from ..core.errors import InvalidInputError

Matrix = List[List[int]]


@dataclass(frozen=True)
class IntegerKernel:
    rank: int  # rank of the constraint matrix
    basis: Matrix  # Z-basis of the kernel, one vector per row

    @property
    def trivial(self) -> bool:
        return not self.basis


def clear_denominators(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    """Scale each rational row by the lcm of its denominators."""
    out: Matrix = []
    for row in rows:
        den = math.lcm(*(Fraction(c).denominator for c in row))
        out.append([int(Fraction(c) * den) for c in row])
    return out


def _identity(n: int) -> Matrix:
    return [[1 if r == c else 0 for c in range(n)] for r in range(n)]


def integer_kernel(rows: Sequence[Sequence[Fraction]], ncols: int) -> IntegerKernel:
    """Z-basis of {m in Z^ncols : rows . m = 0}."""
    ints = clear_denominators(rows)
    for row in ints:
        if len(row) != ncols:
            raise InvalidInputError(f"row length {len(row)} != {ncols}")
    if not any(any(row) for row in ints):
        return IntegerKernel(rank=0, basis=_identity(ncols))
    a = DomainMatrix([[ZZ(c) for c in row] for row in ints], (len(ints), ncols), ZZ)
    d, _, t = smith_normal_decomp(a)
    diagonal = d.to_list()
    rank = sum(1 for i in range(min(len(ints), ncols)) if diagonal[i][i] != 0)
    columns = t.to_list()
    basis = [[int(columns[r][c]) for r in range(ncols)] for c in range(rank, ncols)]
    if len(basis) > 1:
        reduced = DomainMatrix([[ZZ(c) for c in w] for w in basis], (len(basis), ncols), ZZ).lll()
        basis = [[int(c) for c in w] for w in reduced.to_list()]
    return IntegerKernel(rank=rank, basis=basis)


def primitive(vector: Sequence[int]) -> List[int]:
    """Divide by the content and make the first nonzero entry positive."""
    g = math.gcd(*vector)
    if g == 0:
        return list(vector)
    out = [c // g for c in vector]
    sign = next((1 if c > 0 else -1 for c in out if c != 0), 1)
    return [sign * c for c in out]
