"""
Homotopy transfer: contraction of a dg algebra onto its cohomology and the
inductive construction of the connection (ω, ð).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..core.errors import ClosednessError, ModelValidationError, NotSimplyConnectedError
from ..core.linalg import SparseVector, add_into, complement, kernel, solve
from ..models.algebra import DGAlgebra, koszul, validate_dga
from ..models.element import Chain, TensorSpace, algebra_space, chain_add_into, chain_scale
from ..models.words import (
    GeneratorSet,
    Polynomial,
    apply_derivation_poly,
    poly_add_into,
)
from ..utils.formatting import format_vector, format_chain
from ..utils.log import get_logger

LOG = get_logger(__name__)


# ===================== CONTRACTION =====================

@dataclass
class HomotopyData:
    """
    Contraction (p, i, h) of A onto H(A). Class 0 is the unit; the remaining
    classes are sorted by degree and give the generators x_1, x_2, ...
    """
    algebra: DGAlgebra
    representatives: List[SparseVector]
    class_degrees: List[int]
    projection: List[Dict[int, Fraction]]
    homotopy: List[SparseVector]
    pivot_order: str = "lowest"

    def p(self, v: SparseVector) -> Dict[int, Fraction]:
        result: Dict[int, Fraction] = {}
        for j, c in v.items():
            add_into(result, self.projection[j], c)
        return result

    def i(self, coords: Dict[int, Fraction]) -> SparseVector:
        result: SparseVector = {}
        for k, c in coords.items():
            add_into(result, self.representatives[k], c)
        return result

    def h(self, v: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for j, c in v.items():
            add_into(result, self.homotopy[j], c)
        return result

    @property
    def reduced_classes(self) -> List[int]:
        return list(range(1, len(self.representatives)))

    def class_name(self, k: int) -> str:
        return f"[{format_vector(self.representatives[k], self.algebra.basis.names)}]"


def build_contraction(A: DGAlgebra, pivot_order: str = "lowest") -> HomotopyData:
    """
    Per degree k split A^k = B_k ⊕ H_k ⊕ C_k with B = im d, H a complement of B
    in ker d and C a complement of ker d; h inverts d: C_{k-1} -> B_k.
    """
    report = validate_dga(A)
    if not report.ok:
        raise ModelValidationError(A.name, report)
    if pivot_order not in ("lowest", "highest"):
        raise ValueError(f"unknown pivot order: {pivot_order}")

    degrees = sorted(set(A.basis.degrees))
    ordered = {
        k: (A.basis.in_degree(k)[::-1] if pivot_order == "highest" else A.basis.in_degree(k))
        for k in degrees
    }
    position = {k: {g: p for p, g in enumerate(ordered[k])} for k in degrees}

    def local(v: SparseVector, k: int) -> SparseVector:
        return {position[k][g]: c for g, c in v.items()}

    def globalize(v: SparseVector, k: int) -> SparseVector:
        return {ordered[k][p]: c for p, c in v.items()}

    complements: Dict[int, List[SparseVector]] = {}
    classes: List[Tuple[int, int, SparseVector]] = []
    projection: List[Dict[int, Fraction]] = [dict() for _ in range(len(A))]
    homotopy: List[SparseVector] = [dict() for _ in range(len(A))]
    pending: List[Tuple[int, List[int], List[SparseVector], List[SparseVector]]] = []

    for k in degrees:
        n = len(ordered[k])
        target = ordered.get(k + 1, [])
        columns = [local(A.diff[g], k + 1) if target else {} for g in ordered[k]]
        cycles = kernel(columns, len(target)) if target else [{p: Fraction(1)} for p in range(n)]
        standard = [{p: Fraction(1)} for p in range(n)]
        chosen_c = [standard[p] for p in complement(cycles, standard, n)]
        complements[k] = [globalize(v, k) for v in chosen_c]

        sources = complements.get(k - 1, [])
        boundaries = [local(A.d(c), k) for c in sources]
        candidates = list(cycles)
        if k == 0:
            candidates.insert(0, {position[0][A.unit]: Fraction(1)})
        chosen_h = [candidates[j] for j in complement(boundaries, candidates, n)]
        for order, v in enumerate(chosen_h):
            classes.append((k, order, globalize(v, k)))
        pending.append((k, boundaries, chosen_h, chosen_c))
        LOG.debug(f"degree {k}: dim {n}, cycles {len(cycles)}, boundaries {len(boundaries)}, classes {len(chosen_h)}")

    unit_vector = A.unit_vector
    classes.sort(key=lambda entry: (entry[2] != unit_vector, entry[0], entry[1]))
    class_index = {(k, order): idx for idx, (k, order, _) in enumerate(classes)}

    for k, boundaries, chosen_h, chosen_c in pending:
        n = len(ordered[k])
        frame = boundaries + chosen_h + chosen_c
        sources = complements.get(k - 1, [])
        for p in range(n):
            coords = solve(frame, {p: Fraction(1)}, n)
            g = ordered[k][p]
            for j, c in coords.items():
                if j < len(boundaries):
                    add_into(homotopy[g], sources[j], c)
                elif j < len(boundaries) + len(chosen_h):
                    projection[g][class_index[(k, j - len(boundaries))]] = c

    hd = HomotopyData(
        algebra=A,
        representatives=[v for _, _, v in classes],
        class_degrees=[k for k, _, _ in classes],
        projection=projection,
        homotopy=homotopy,
        pivot_order=pivot_order,
    )
    # h -> h d h
    hd.homotopy = [hd.h(A.d(hd.homotopy[g])) for g in range(len(A))]
    return hd


def check_contraction(hd: HomotopyData) -> List[str]:
    """Exact check of dh + hd = id - ip, pi = id, pd = 0, di = 0, hh = 0, hi = 0, ph = 0"""
    A = hd.algebra
    names = A.basis.names
    failures = []
    for g in range(len(A)):
        e = {g: Fraction(1)}
        lhs = A.d(hd.h(e))
        add_into(lhs, hd.h(A.d(e)))
        rhs = dict(e)
        add_into(rhs, hd.i(hd.p(e)), Fraction(-1))
        if lhs != rhs:
            failures.append(f"dh+hd=id-ip at {names[g]}")
        if hd.p(A.d(e)):
            failures.append(f"pd=0 at {names[g]}")
        if hd.h(hd.h(e)):
            failures.append(f"hh=0 at {names[g]}")
        if hd.p(hd.h(e)):
            failures.append(f"ph=0 at {names[g]}")
    for k, rep in enumerate(hd.representatives):
        if hd.p(rep) != {k: Fraction(1)}:
            failures.append(f"pi=id at {hd.class_name(k)}")
        if A.d(rep):
            failures.append(f"di=0 at {hd.class_name(k)}")
        if hd.h(rep):
            failures.append(f"hi=0 at {hd.class_name(k)}")
    return failures


# ===================== CONNECTION =====================

@dataclass
class Connection:
    """ω by word length and ð on generators, both exact up to word length max_len"""
    algebra: DGAlgebra
    gens: GeneratorSet
    omega: Dict[int, Chain]
    eth: Dict[int, Polynomial]
    max_len: int
    representatives: List[SparseVector] = field(default_factory=list)

    @property
    def space(self) -> TensorSpace:
        return algebra_space(self.algebra, self.gens)

    def omega_chain(self, max_length: Optional[int] = None) -> Chain:
        result: Chain = {}
        for k, component in self.omega.items():
            if max_length is None or k <= max_length:
                chain_add_into(result, component)
        return result


def generators_for(hd: HomotopyData) -> GeneratorSet:
    """Generators dual to the reduced classes; rejects models that are not simply connected"""
    obstructing = [
        hd.class_name(k) for k in hd.reduced_classes if hd.class_degrees[k] <= 1
    ]
    if obstructing:
        raise NotSimplyConnectedError(obstructing)
    return GeneratorSet.for_classes([hd.class_degrees[k] for k in hd.reduced_classes])


def chen_connection(A: DGAlgebra, hd: HomotopyData, max_len: int,
                    start: Optional[Connection] = None) -> Connection:
    """
    Induction on word length: ω_1 = Σ e^i⊗x_i; at stage k the obstruction
    L_k = Σ ð_j(ω_m) + Σ ω_i ω_j (m >= 2) is closed, ω_k = -h(L_k) and
    ð_k(x_i) = -(-1)^{|e^i|} P_i where ip(L_k) = Σ e^i⊗P_i.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    gens = generators_for(hd)
    space = algebra_space(A, gens)
    classes = hd.reduced_classes

    if start is not None:
        omega = {k: dict(v) for k, v in start.omega.items()}
        eth = {i: dict(p) for i, p in start.eth.items()}
        first = start.max_len + 1
    else:
        omega = {1: {}}
        for g, k in enumerate(classes):
            for a, c in hd.representatives[k].items():
                chain_add_into(omega[1], {(a, (g,)): c})
        eth = {g: {} for g in range(len(gens))}
        first = 2

    for k in range(first, max_len + 1):
        eth_by_length = {
            j: {i: {w: c for w, c in p.items() if len(w) == j} for i, p in eth.items()}
            for j in range(2, k)
        }
        L: Chain = {}
        for m in range(2, k):
            j = k - m + 1
            if omega.get(m) and j in eth_by_length:
                chain_add_into(L, space.eth(omega[m], eth_by_length[j]))
        for i in range(1, k):
            if omega.get(i) and omega.get(k - i):
                chain_add_into(L, space.mul(omega[i], omega[k - i]))

        closed = space.d_carrier(L)
        if closed:
            raise ClosednessError(k, format_chain(space, closed))

        by_word: Dict[tuple, SparseVector] = {}
        for (a, w), c in L.items():
            by_word.setdefault(w, {})[a] = c
        component: Chain = {}
        for w, vector in by_word.items():
            coords = hd.p(vector)
            if coords.get(0):
                raise ClosednessError(k, f"unit component along word {w}")
            for cls, c in coords.items():
                g = cls - 1
                sign = koszul(hd.class_degrees[cls])
                poly_add_into(eth[g], {w: -sign * c})
            for a, c in hd.h(vector).items():
                chain_add_into(component, {(a, w): -c})
        omega[k] = component
        LOG.debug(f"stage {k}: |L|={len(L)}, |ω_k|={len(component)}")

    return Connection(A, gens, omega, eth, max_len, list(hd.representatives))


def extend_connection(conn: Connection, hd: HomotopyData, max_len: int) -> Connection:
    if max_len <= conn.max_len:
        return conn
    return chen_connection(conn.algebra, hd, max_len, start=conn)


def mc_residual(A: DGAlgebra, conn: Connection):
    """dω + ðω + ωω up to word length max_len, from the summed ω"""
    space = conn.space
    N = conn.max_len
    omega = conn.omega_chain()
    residual = space.d_carrier(omega)
    chain_add_into(residual, space.eth(omega, conn.eth, N))
    chain_add_into(residual, space.mul(omega, omega, N))
    return space.element({k: c for k, c in residual.items() if len(k[1]) <= N})


def eth_square(conn: Connection) -> Dict[str, Polynomial]:
    N = conn.max_len
    return {
        conn.gens.names[i]: apply_derivation_poly(conn.gens, conn.eth, p, N)
        for i, p in conn.eth.items()
    }


def eth_in_square_ideal(conn: Connection) -> bool:
    """ð(x_i) has no constant or linear terms and raises degree by one"""
    for i, p in conn.eth.items():
        for w, _ in p.items():
            if len(w) < 2:
                return False
            if sum(conn.gens.degrees[l] for l in w) != conn.gens.degrees[i] + 1:
                return False
    return True
