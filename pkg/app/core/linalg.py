"""
Exact linear algebra over QQ.

Vectors are sparse dicts {index: Fraction}; matrices are assembled from
lists of such columns into sympy DomainMatrix objects over QQ, which do the
elimination (sparse, fraction-free where profitable). Pivots are always taken
left to right, so every basis returned here is deterministic.
"""
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

SparseVector = Dict[int, Fraction]


def to_qq(c: Fraction):
    return QQ(c.numerator, c.denominator)


def from_qq(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def add_into(target: SparseVector, vector: SparseVector, scale: Fraction = Fraction(1)):
    """target += scale * vector, dropping zeros"""
    for i, c in vector.items():
        value = target.get(i, 0) + scale * c
        if value:
            target[i] = value
        else:
            target.pop(i, None)


def column_matrix(columns: Sequence[SparseVector], nrows: int) -> DomainMatrix:
    dod: Dict[int, Dict[int, object]] = {}
    for j, column in enumerate(columns):
        for i, c in column.items():
            if c:
                dod.setdefault(i, {})[j] = to_qq(c)
    return DomainMatrix(dod, (nrows, len(columns)), QQ)


def _rref(columns: Sequence[SparseVector], nrows: int) -> Tuple[Dict[int, Dict[int, object]], Tuple[int, ...]]:
    reduced, pivots = column_matrix(columns, nrows).rref()
    return reduced.to_dod(), tuple(pivots)


def rank(columns: Sequence[SparseVector], nrows: int) -> int:
    if not columns or nrows == 0:
        return 0
    if all(not c for c in columns):
        return 0
    return column_matrix(columns, nrows).rank()


def pivot_columns(columns: Sequence[SparseVector], nrows: int) -> Tuple[int, ...]:
    """Indices of the leftmost columns forming a basis of their span"""
    if not columns or nrows == 0:
        return ()
    return _rref(columns, nrows)[1]


def kernel(columns: Sequence[SparseVector], nrows: int) -> List[SparseVector]:
    """Reduced-echelon basis of the kernel, one vector per free column"""
    ncols = len(columns)
    if ncols == 0:
        return []
    if nrows == 0 or all(not c for c in columns):
        return [{j: Fraction(1)} for j in range(ncols)]
    rows, pivots = _rref(columns, nrows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = {free: Fraction(1)}
        for r, p in enumerate(pivots):
            c = rows.get(r, {}).get(free)
            if c:
                vector[p] = -from_qq(c)
        basis.append(vector)
    return basis


def solve(columns: Sequence[SparseVector], target: SparseVector, nrows: int) -> Optional[SparseVector]:
    """
    Find x with sum_j x[j] * columns[j] == target, or None if target is not in
    the span. Free variables are set to zero.
    """
    if not target:
        return {}
    if not columns:
        return None
    augmented = list(columns) + [target]
    rows, pivots = _rref(augmented, nrows)
    last = len(columns)
    if last in pivots:
        return None
    solution = {}
    for r, p in enumerate(pivots):
        c = rows.get(r, {}).get(last)
        if c:
            solution[p] = from_qq(c)
    return solution


def complement(span: Sequence[SparseVector], candidates: Sequence[SparseVector], nrows: int) -> List[int]:
    """
    Indices of candidates that extend a basis of span(span) to a basis of
    span(span + candidates), chosen greedily from the left.
    """
    pivots = pivot_columns(list(span) + list(candidates), nrows)
    offset = len(span)
    return [p - offset for p in pivots if p >= offset]
