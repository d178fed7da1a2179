"""
String topology on top of the twisted complexes: free loop homology with the
Chas-Sullivan ring, based loop homology, brane complexes and the maps
between them.

Degree dictionary:
    ℍ_m(LM)  = H^{-m}(A⊗k<X>, d_ω)       H_k(LM)  = H^{n-k}
    H_k(ΩM)  = H^{-k}(k<X>, ð)
    ℍ_m(L_f) = H^{-m}(A_Z⊗k<X>, d_f*ω)   H_k(L_f) = H^{p-k}
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..core.config import EngineConfig
from ..core.errors import MorphismError, NotClosedError
from ..core.linalg import SparseVector
from ..models.algebra import AlgebraMorphism, DGAlgebra, validate_morphism
from ..models.element import TwistedElement
from ..utils.formatting import format_chain
from ..utils.log import get_logger
from .transfer import Connection, HomotopyData, build_contraction, chen_connection
from .twisted import (
    CohomologyTable,
    RingPresentation,
    TwistedComplex,
    algebra_complex,
    brane_complex,
    class_coordinates,
    class_element,
    cohomology,
    complete_representative,
    dualize,
    module_complex,
    parse_window,
    ring_structure,
    word_complex,
)

LOG = get_logger(__name__)


@dataclass
class LoopReport:
    model: str
    top_degree: Optional[int]
    convention: str
    betti: Dict[int, int]
    shifted: Dict[int, int]
    table: CohomologyTable
    ring: Optional[RingPresentation] = None
    ring_entries: List[Tuple[str, str, str]] = field(default_factory=list)

    def nonzero_degrees(self) -> List[int]:
        return sorted(k for k, v in self.betti.items() if v)


def connection_for(A: DGAlgebra, window, pivot_order: str = "lowest",
                   hd: Optional[HomotopyData] = None) -> Tuple[HomotopyData, Connection]:
    """Contraction plus a connection long enough for the window on A itself"""
    lo, _ = parse_window(window)
    hd = hd or build_contraction(A, pivot_order)
    length = max(1, A.max_degree - lo + 1)
    return hd, chen_connection(A, hd, length)


def ring_entries(ring: RingPresentation) -> List[Tuple[str, str, str]]:
    entries = []
    for (a, b), coords in ring.products.items():
        if coords is None:
            entries.append((a, b, "outside window"))
        else:
            entries.append((a, b, ring.describe(ring.degrees[a] + ring.degrees[b], coords)))
    return entries


def _attach_ring(report: LoopReport, named: Optional[Dict[str, TwistedElement]]) -> LoopReport:
    if named:
        report.ring = ring_structure(report.table, named)
        report.ring_entries = ring_entries(report.ring)
    return report


def loop_homology(A: DGAlgebra, n: int, window, named: Optional[Dict[str, TwistedElement]] = None,
                  route: str = "algebra", config: Optional[EngineConfig] = None,
                  conn: Optional[Connection] = None, hd: Optional[HomotopyData] = None) -> LoopReport:
    """
    Free loop homology from the twisted complex. `window` is a window of
    complex degrees for the algebra route; the dual route computes the same
    homological degrees from (A*⊗k<X>, d_ω) shifted down by n.
    """
    lo, hi = parse_window(window)
    if conn is None:
        hd, conn = connection_for(A, (lo, hi), hd=hd)
    if route == "dual":
        cx = module_complex(conn, dualize(A), hd)
        table = cohomology(cx, (lo - n, hi - n), config)
        betti = {-d: dim for d, dim in table.dims().items()}
        shifted = {k - n: dim for k, dim in betti.items()}
        convention = "H_k(LM) = H^{-k}(A*⊗k<X>)"
    elif route == "algebra":
        cx = algebra_complex(conn, hd)
        table = cohomology(cx, (lo, hi), config)
        shifted = {-d: dim for d, dim in table.dims().items()}
        betti = {n - d: dim for d, dim in table.dims().items()}
        convention = "ℍ_m(LM) = H^{-m}(A⊗k<X>), H_k(LM) = ℍ_{k-n}"
    else:
        raise ValueError(f"unknown route: {route}")
    report = LoopReport(A.name, n, convention, dict(sorted(betti.items())), dict(sorted(shifted.items())), table)
    return _attach_ring(report, named if route == "algebra" else None)


def chas_sullivan_ring(A: DGAlgebra, n: int, window, named: Dict[str, TwistedElement],
                       config: Optional[EngineConfig] = None, conn: Optional[Connection] = None) -> RingPresentation:
    return loop_homology(A, n, window, named, config=config, conn=conn).ring


def based_loop_ring(A: DGAlgebra, window, named: Optional[Dict[str, TwistedElement]] = None,
                    config: Optional[EngineConfig] = None, conn: Optional[Connection] = None,
                    hd: Optional[HomotopyData] = None) -> LoopReport:
    """Pontrjagin ring H_•(ΩM) as the cohomology of (k<X>, ð)"""
    lo, hi = parse_window(window)
    if conn is None:
        hd, conn = connection_for(A, (lo, hi), hd=hd)
    table = pure_word_cohomology(conn, (lo, hi), config, hd)
    betti = {-d: dim for d, dim in table.dims().items()}
    report = LoopReport(A.name, None, "H_k(ΩM) = H^{-k}(k<X>, ð)", dict(sorted(betti.items())),
                        dict(sorted(betti.items())), table)
    return _attach_ring(report, named)


def pure_word_cohomology(conn: Connection, window, config: Optional[EngineConfig] = None,
                         hd: Optional[HomotopyData] = None) -> CohomologyTable:
    return cohomology(word_complex(conn, hd), window, config)


def require_morphism(f: AlgebraMorphism):
    report = validate_morphism(f)
    if not report.ok:
        failure = report.failures[0]
        raise MorphismError(failure.axiom, failure.witness)


def brane_homology(A_M: DGAlgebra, A_Z: DGAlgebra, p: int, f: AlgebraMorphism, window,
                   named: Optional[Dict[str, TwistedElement]] = None,
                   config: Optional[EngineConfig] = None, conn: Optional[Connection] = None,
                   hd: Optional[HomotopyData] = None) -> LoopReport:
    """(A_Z⊗k<X>, d_{f*ω}) with ð from M; ℍ_m(L_f) = H^{-m}, H_k(L_f) = ℍ_{k-p}"""
    if not (f.source.structurally_equal(A_M) and f.target.structurally_equal(A_Z)):
        raise MorphismError("source/target", (f.source.name, f.target.name))
    require_morphism(f)
    lo, hi = parse_window(window)
    if conn is None:
        hd, conn = connection_for(A_M, (lo, hi), hd=hd)
    table = cohomology(brane_complex(conn, f, hd), (lo, hi), config)
    shifted = {-d: dim for d, dim in table.dims().items()}
    betti = {p - d: dim for d, dim in table.dims().items()}
    report = LoopReport(f"{A_Z.name} -> {A_M.name}", p, "ℍ_m(L_f) = H^{-m}(A_Z⊗k<X>), H_k(L_f) = ℍ_{k-p}",
                        dict(sorted(betti.items())), dict(sorted(shifted.items())), table)
    return _attach_ring(report, named)


def pullback(f: AlgebraMorphism, source: TwistedComplex, target: TwistedComplex,
             t: TwistedElement) -> TwistedElement:
    """f*⊗id on twisted elements"""
    source.space.check(t)
    return target.element(source.space.map_carrier(t.chain(), f.images))


def intersection_map(f: AlgebraMorphism, loop_table: CohomologyTable, brane_table: CohomologyTable,
                     t: TwistedElement, name: str = "") -> Tuple[TwistedElement, Dict[int, Fraction]]:
    """Image of a loop cocycle in the brane complex and its class coordinates"""
    if loop_table.complex.kind == "algebra" and t.space == loop_table.complex.space.tag:
        t = complete_representative(loop_table, t, name)
    image = pullback(f, loop_table.complex, brane_table.complex, t)
    try:
        return image, class_coordinates(brane_table, image)
    except NotClosedError:
        raise NotClosedError(name or format_chain(brane_table.complex.space, image.chain())) from None


@dataclass
class IntersectionReport:
    images: Dict[str, str]
    ring_map_failures: List[Tuple[str, str]]


def intersection_report(f: AlgebraMorphism, loop_ring: RingPresentation, brane_ring: RingPresentation) -> IntersectionReport:
    """
    Images of the named loop generators, described in the brane ring, and a
    ring-map check on all pairs whose products stay inside both windows.
    """
    loop_table, brane_table = loop_ring.table, brane_ring.table
    images, coords = {}, {}
    space = brane_table.complex.space
    for name, cocycle in loop_ring.generators.items():
        element, c = intersection_map(f, loop_table, brane_table, cocycle, name)
        degree = loop_ring.degrees[name]
        coords[name] = (degree, element, c)
        images[name] = brane_ring.describe(degree, c)

    failures = []
    for (a, b), product in loop_ring.products.items():
        if product is None:
            continue
        degree = loop_ring.degrees[a] + loop_ring.degrees[b]
        if not brane_table.contains(degree):
            continue
        image_product = space.element(space.mul(coords[a][1].chain(), coords[b][1].chain()))
        lhs = class_coordinates(brane_table, image_product)
        product_cocycle = class_element(loop_table, degree, product)
        _, rhs = intersection_map(f, loop_table, brane_table, product_cocycle)
        if lhs != rhs:
            failures.append((a, b))
    return IntersectionReport(images, failures)


def constant_loops_map(table: CohomologyTable, a: SparseVector) -> Dict[int, Fraction]:
    """Class of a⊗1 for a cocycle a of a graded commutative algebra"""
    space = table.complex.space
    element = space.element({(k, ()): c for k, c in a.items()})
    return class_coordinates(table, element)
