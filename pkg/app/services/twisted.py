"""
Twisted complexes carrier⊗k<X> with d_ω = d + ð + [ω, -]: differentials,
exact cohomology over a degree window, ring structure, dualization and the
Poincaré map.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.config import EngineConfig
from ..core.errors import (
    CarrierMismatchError,
    DegeneratePairingError,
    NotClosedError,
    ProductOutsideWindow,
    TruncationOverflow,
    WindowError,
)
from ..core.linalg import SparseVector, add_into, complement, kernel, rank, solve
from ..models.algebra import (
    AlgebraMorphism,
    DGAlgebra,
    DGBimodule,
    GradedBasis,
    koszul,
    point_algebra,
)
from ..models.element import (
    ALGEBRA,
    MODULE,
    WORDS,
    Chain,
    Key,
    TensorSpace,
    TwistedElement,
    algebra_space,
    chain_add_into,
    module_space,
)
from ..models.words import words_of_degree
from ..utils.formatting import format_chain, format_scalar
from ..utils.log import get_logger
from .transfer import Connection, HomotopyData, extend_connection

LOG = get_logger(__name__)

BRANE = "brane"


# ===================== COMPLEXES =====================

@dataclass
class TwistedComplex:
    """
    (carrier⊗k<X>, d + ð + [ω, -]). The twisting element is read off the
    connection, pushed along `morphism` for brane complexes and dropped for
    the pure-word complex.
    """
    kind: str
    space: TensorSpace
    conn: Connection
    hd: Optional[HomotopyData] = None
    morphism: Optional[AlgebraMorphism] = None
    name: str = ""
    _omega: Optional[Chain] = field(default=None, repr=False)

    @property
    def omega(self) -> Chain:
        if self._omega is None:
            if self.kind == WORDS:
                self._omega = {}
            elif self.morphism is not None:
                self._omega = self.space.map_carrier(self.conn.omega_chain(), self.morphism.images)
            else:
                self._omega = self.conn.omega_chain()
        return self._omega

    @property
    def max_carrier_degree(self) -> int:
        return self.space.max_carrier_degree

    def required_length(self, degree: int) -> int:
        """Connection length needed to apply d_ω exactly in a degree"""
        return max(0, self.max_carrier_degree - degree)

    def window_length(self, window: Tuple[int, int]) -> int:
        return max(0, self.max_carrier_degree - window[0] + 1)

    def extended(self, max_len: int) -> "TwistedComplex":
        if self.hd is None:
            raise TruncationOverflow(max_len, self.conn.max_len)
        conn = extend_connection(self.conn, self.hd, max_len)
        space = _rebuild_space(self.space, conn)
        return replace(self, conn=conn, space=space, _omega=None)

    def element(self, chain: Chain) -> TwistedElement:
        return self.space.element(chain)


def _rebuild_space(space: TensorSpace, conn: Connection) -> TensorSpace:
    return TensorSpace(space.kind, space.algebra, conn.gens, space.module)


def algebra_complex(conn: Connection, hd: Optional[HomotopyData] = None) -> TwistedComplex:
    return TwistedComplex(ALGEBRA, algebra_space(conn.algebra, conn.gens), conn, hd, name=conn.algebra.name)


def module_complex(conn: Connection, M: DGBimodule, hd: Optional[HomotopyData] = None) -> TwistedComplex:
    if M.algebra is not conn.algebra and not M.algebra.structurally_equal(conn.algebra):
        raise CarrierMismatchError(f"bimodule {M.name} is not over {conn.algebra.name}")
    return TwistedComplex(MODULE, module_space(M, conn.gens), conn, hd, name=M.name)


def brane_complex(conn: Connection, f: AlgebraMorphism, hd: Optional[HomotopyData] = None) -> TwistedComplex:
    """(A_Z⊗k<X>, d_{f*ω}) with ð unchanged"""
    space = TensorSpace(ALGEBRA, f.target, conn.gens)
    return TwistedComplex(BRANE, space, conn, hd, morphism=f, name=f"{f.target.name}<-{f.source.name}")


def word_complex(conn: Connection, hd: Optional[HomotopyData] = None) -> TwistedComplex:
    space = TensorSpace(WORDS, point_algebra(), conn.gens)
    return TwistedComplex(WORDS, space, conn, hd, name="words")


# ===================== DIFFERENTIAL =====================

def _apply_diff(cx: TwistedComplex, chain: Chain) -> Chain:
    space = cx.space
    result = space.d_carrier(chain)
    chain_add_into(result, space.eth(chain, cx.conn.eth))
    chain_add_into(result, space.bracket(cx.omega, chain))
    return result


def twisted_diff(cx: TwistedComplex, t: TwistedElement) -> TwistedElement:
    """d(t) + ð(t) + [ω, t]"""
    cx.space.check(t)
    chain = t.chain()
    degrees = {cx.space.key_degree(k) for k in chain}
    for d in degrees:
        required = cx.required_length(d)
        if required > cx.conn.max_len:
            raise TruncationOverflow(required, cx.conn.max_len)
    return cx.element(_apply_diff(cx, chain))


def basis_enumeration(cx: TwistedComplex, degree: int) -> List[Key]:
    """All (carrier, word) of total degree `degree`, carrier-major, shortest words first"""
    space = cx.space
    if degree > cx.max_carrier_degree:
        return []
    max_length = cx.max_carrier_degree - degree
    keys: List[Key] = []
    for m, deg in enumerate(space.carrier_degrees):
        for w in words_of_degree(space.gens, degree - deg, max_length):
            keys.append((m, w))
    return keys


# ===================== COHOMOLOGY =====================

@dataclass
class DegreeData:
    degree: int
    basis: List[Key]
    index: Dict[Key, int]
    outgoing: List[SparseVector]
    boundaries: List[SparseVector]
    representatives: List[SparseVector]
    rank_out: int
    rank_in: int

    @property
    def dim(self) -> int:
        return len(self.representatives)

    @property
    def chain_dim(self) -> int:
        return len(self.basis)


@dataclass
class CohomologyTable:
    complex: TwistedComplex
    window: Tuple[int, int]
    degrees: Dict[int, DegreeData]

    def dims(self) -> Dict[int, int]:
        return {d: data.dim for d, data in sorted(self.degrees.items())}

    def dim(self, degree: int) -> int:
        return self.degrees[degree].dim

    def representatives(self, degree: int) -> List[TwistedElement]:
        data = self.degrees[degree]
        return [self.complex.element(to_chain(data, v)) for v in data.representatives]

    def contains(self, degree: int) -> bool:
        return degree in self.degrees

    def vanishes_above(self, degree: int) -> bool:
        """The complex is zero above the top carrier degree"""
        return degree > self.complex.max_carrier_degree

    def known(self, degree: int) -> bool:
        return self.contains(degree) or self.vanishes_above(degree)


def to_chain(data: DegreeData, vector: SparseVector) -> Chain:
    return {data.basis[j]: c for j, c in vector.items()}


def to_vector(data: DegreeData, chain: Chain) -> SparseVector:
    vector: SparseVector = {}
    for key, c in chain.items():
        if key not in data.index:
            raise CarrierMismatchError(f"term {key} is not a basis element in degree {data.degree}")
        vector[data.index[key]] = c
    return vector


def parse_window(window) -> Tuple[int, int]:
    """(lo, hi) from a pair or from text 'lo..hi'"""
    if isinstance(window, str):
        window = window.split("..")
        if len(window) != 2:
            raise WindowError("window must be written lo..hi")
    try:
        lo, hi = int(window[0]), int(window[1])
    except (TypeError, ValueError, IndexError):
        raise WindowError(f"malformed window: {window!r}") from None
    if lo > hi:
        raise WindowError(f"empty window {lo}..{hi}")
    return lo, hi


def prepare(cx: TwistedComplex, window, config: Optional[EngineConfig] = None) -> TwistedComplex:
    """Extend the connection so that the window is computed exactly"""
    config = config or EngineConfig()
    required = cx.window_length(parse_window(window))
    if required <= cx.conn.max_len:
        return cx
    if required > config.MAX_WORD_LENGTH_CAP:
        raise TruncationOverflow(required, config.MAX_WORD_LENGTH_CAP)
    LOG.info(f"   extending connection from length {cx.conn.max_len} to {required}")
    return cx.extended(required)


def cohomology(cx: TwistedComplex, window, config: Optional[EngineConfig] = None) -> CohomologyTable:
    """dim H^d = dim ker D_d - rank D_{d-1} over every degree of the window"""
    config = config or EngineConfig()
    lo, hi = parse_window(window)
    cx = prepare(cx, (lo, hi), config)

    span = list(range(lo - 1, hi + 2))
    with ThreadPoolExecutor(max_workers=max(1, config.WORKERS)) as pool:
        bases = list(pool.map(lambda d: basis_enumeration(cx, d), span))
    basis = dict(zip(span, bases))
    index = {d: {k: j for j, k in enumerate(keys)} for d, keys in basis.items()}

    def build(d: int) -> List[SparseVector]:
        target = index[d + 1]
        columns = []
        for key in basis[d]:
            image = _apply_diff(cx, {key: Fraction(1)})
            columns.append({target[k]: c for k, c in image.items()})
        return columns

    with ThreadPoolExecutor(max_workers=max(1, config.WORKERS)) as pool:
        matrices = dict(zip(span[:-1], pool.map(build, span[:-1])))

    def reduce(d: int) -> DegreeData:
        n = len(basis[d])
        outgoing, incoming = matrices[d], matrices[d - 1]
        cycles = kernel(outgoing, len(basis[d + 1])) if basis[d + 1] else [{j: Fraction(1)} for j in range(n)]
        reps = [cycles[j] for j in complement(incoming, cycles, n)]
        data = DegreeData(
            degree=d,
            basis=basis[d],
            index=index[d],
            outgoing=outgoing,
            boundaries=incoming,
            representatives=reps,
            rank_out=rank(outgoing, len(basis[d + 1])),
            rank_in=rank(incoming, n),
        )
        LOG.debug(f"{cx.name} degree {d}: chains {n}, cohomology {data.dim}")
        return data

    degrees = list(range(lo, hi + 1))
    with ThreadPoolExecutor(max_workers=max(1, config.WORKERS)) as pool:
        reduced = list(pool.map(reduce, degrees))
    return CohomologyTable(cx, (lo, hi), dict(zip(degrees, reduced)))


def is_closed(table: CohomologyTable, t: TwistedElement) -> bool:
    return not _apply_diff(table.complex, t.chain())


def class_coordinates(table: CohomologyTable, t: TwistedElement) -> Dict[int, Fraction]:
    """Coordinates of the class of a cocycle in the representative basis of its degree"""
    table.complex.space.check(t)
    chain = t.chain()
    if not chain:
        return {}
    degree = table.complex.space.degree(chain)
    if degree is None:
        raise CarrierMismatchError("element is not homogeneous")
    if not table.contains(degree):
        raise ProductOutsideWindow(degree)
    if not is_closed(table, t):
        raise NotClosedError(format_chain(table.complex.space, chain))
    data = table.degrees[degree]
    frame = list(data.boundaries) + list(data.representatives)
    coords = solve(frame, to_vector(data, chain), len(data.basis))
    if coords is None:
        raise NotClosedError(format_chain(table.complex.space, chain))
    offset = len(data.boundaries)
    return {j - offset: c for j, c in coords.items() if j >= offset}


def class_element(table: CohomologyTable, degree: int, coords: Dict[int, Fraction]) -> TwistedElement:
    data = table.degrees[degree]
    vector: SparseVector = {}
    for j, c in coords.items():
        add_into(vector, data.representatives[j], c)
    return table.complex.element(to_chain(data, vector))


def complete_representative(table: CohomologyTable, leading: TwistedElement, name: str = "") -> TwistedElement:
    """
    Add terms of strictly higher carrier degree to `leading` so that the sum
    is a cocycle. Closed inputs are returned unchanged.
    """
    if is_closed(table, leading):
        return leading
    space = table.complex.space
    chain = leading.chain()
    degree = space.degree(chain)
    if degree is None or not table.contains(degree):
        raise ProductOutsideWindow(degree if degree is not None else 0)
    data = table.degrees[degree]
    top = max(space.carrier_degrees[m] for m, _ in chain)
    allowed = [j for j, (m, _) in enumerate(data.basis) if space.carrier_degrees[m] > top]
    target_index = {k: j for j, k in enumerate(basis_enumeration(table.complex, degree + 1))}
    columns = [{target_index[k]: c for k, c in _apply_diff(table.complex, {data.basis[j]: Fraction(1)}).items()}
               for j in allowed]
    defect = {target_index[k]: -c for k, c in _apply_diff(table.complex, chain).items()}
    correction = solve(columns, defect, len(target_index))
    if correction is None:
        raise NotClosedError(name or format_chain(space, chain))
    for j, c in correction.items():
        chain_add_into(chain, {data.basis[allowed[j]]: c})
    return space.element(chain)


def euler_check(table: CohomologyTable) -> Tuple[int, int]:
    """
    Alternating sums over the window: chains versus cohomology plus the
    boundary ranks (outgoing at the top, incoming at the bottom).
    """
    lo, hi = table.window
    chains = sum(koszul(d) * table.degrees[d].chain_dim for d in range(lo, hi + 1))
    homology = sum(koszul(d) * table.degrees[d].dim for d in range(lo, hi + 1))
    homology += koszul(hi) * table.degrees[hi].rank_out + koszul(lo) * table.degrees[lo].rank_in
    return chains, homology


def d_squared_failures(cx: TwistedComplex, window) -> List[str]:
    """Apply d_ω twice to every basis element of every window degree"""
    lo, hi = parse_window(window)
    failures = []
    for d in range(lo, hi + 1):
        for key in basis_enumeration(cx, d):
            once = _apply_diff(cx, {key: Fraction(1)})
            if _apply_diff(cx, once):
                failures.append(format_chain(cx.space, {key: Fraction(1)}))
    return failures


# ===================== RINGS =====================

@dataclass
class RingPresentation:
    table: CohomologyTable
    generators: Dict[str, TwistedElement]
    degrees: Dict[str, int]
    coordinates: Dict[str, Dict[int, Fraction]]
    products: Dict[Tuple[str, str], Optional[Dict[int, Fraction]]]
    outside: List[Tuple[str, str]] = field(default_factory=list)
    associativity_failures: List[Tuple[str, str, str]] = field(default_factory=list)
    dependent: List[str] = field(default_factory=list)

    def multiply_class(self, degree: int, coords: Dict[int, Fraction], name: str) -> Tuple[int, Dict[int, Fraction]]:
        table = self.table
        product_degree = degree + self.degrees[name]
        if not coords or table.vanishes_above(product_degree):
            return product_degree, {}
        if not table.contains(product_degree):
            raise ProductOutsideWindow(product_degree)
        left = class_element(table, degree, coords)
        space = table.complex.space
        product = space.element(space.mul(left.chain(), self.generators[name].chain()))
        return product_degree, class_coordinates(table, product)

    def evaluate(self, monomial: Sequence[str]) -> Tuple[int, Dict[int, Fraction]]:
        """Class of a left-bracketed product of named generators"""
        if not monomial:
            unit = self.table.complex.space.algebra.unit
            element = self.table.complex.element({(unit, ()): Fraction(1)})
            return 0, class_coordinates(self.table, element)
        first, *rest = monomial
        degree, coords = self.degrees[first], dict(self.coordinates[first])
        for name in rest:
            degree, coords = self.multiply_class(degree, coords, name)
        return degree, coords

    def vanishes(self, monomial: Sequence[str]) -> bool:
        return not self.evaluate(monomial)[1]

    def describe(self, degree: int, coords: Dict[int, Fraction]) -> str:
        """Name a class as a multiple of a named generator, or of a product of two, when possible"""
        if not coords:
            return "0"
        candidates = [(name, self.degrees[name], own) for name, own in self.coordinates.items()]
        candidates += [
            (f"{a}{b}", self.degrees[a] + self.degrees[b], own)
            for (a, b), own in self.products.items()
            if own is not None
        ]
        for label, label_degree, own in candidates:
            if label_degree != degree or not own:
                continue
            j = min(own)
            ratio = coords.get(j, Fraction(0)) / own[j]
            if ratio and {k: ratio * c for k, c in own.items()} == coords:
                return label if ratio == 1 else f"{format_scalar(ratio)}*{label}"
        return " + ".join(f"{format_scalar(c)}*[{degree}:{j}]" for j, c in sorted(coords.items()))


def ring_structure(table: CohomologyTable, named: Dict[str, TwistedElement]) -> RingPresentation:
    """
    Complete the named leading terms to cocycles, express them in the class
    basis, multiply all ordered pairs inside the window and check
    associativity on all triples whose products stay inside the window.
    """
    space = table.complex.space
    if space.kind not in (ALGEBRA, WORDS):
        raise CarrierMismatchError("ring structure needs an algebra carrier")

    generators, degrees, coordinates = {}, {}, {}
    for name, leading in named.items():
        cocycle = complete_representative(table, leading, name)
        generators[name] = cocycle
        degrees[name] = space.degree(cocycle.chain())
        coordinates[name] = class_coordinates(table, cocycle)

    ring = RingPresentation(table, generators, degrees, coordinates, {})

    by_degree: Dict[int, List[str]] = {}
    for name in named:
        by_degree.setdefault(degrees[name], []).append(name)
    for d, names in by_degree.items():
        vectors = [coordinates[n] for n in names]
        if rank(vectors, table.dim(d)) < len(names):
            ring.dependent.extend(names)

    for a, b in cartesian(named, repeat=2):
        d = degrees[a] + degrees[b]
        if table.vanishes_above(d):
            ring.products[(a, b)] = {}
            continue
        if not table.contains(d):
            ring.products[(a, b)] = None
            ring.outside.append((a, b))
            continue
        product = space.element(space.mul(generators[a].chain(), generators[b].chain()))
        ring.products[(a, b)] = class_coordinates(table, product)

    for a, b, c in cartesian(named, repeat=3):
        degrees_needed = (degrees[a] + degrees[b], degrees[b] + degrees[c], degrees[a] + degrees[b] + degrees[c])
        if not all(table.known(d) for d in degrees_needed):
            continue
        _, left = ring.evaluate([a, b, c])
        bc_degree, bc = ring.evaluate([b, c])
        if not bc or table.vanishes_above(degrees_needed[2]):
            right = {}
        else:
            bc_element = class_element(table, bc_degree, bc)
            right_product = space.element(space.mul(generators[a].chain(), bc_element.chain()))
            right = class_coordinates(table, right_product)
        if left != right:
            ring.associativity_failures.append((a, b, c))
    return ring


# ===================== DUAL MODULE AND POINCARÉ MAP =====================

def dualize(A: DGAlgebra) -> DGBimodule:
    """
    A* with basis φ_i dual to a_i, |φ_i| = -|a_i|, and
        (a·φ)(c) = (-1)^{|a|(|φ|+|c|)} φ(ca)
        (φ·b)(c) = φ(bc)
        (dφ)(c)  = -(-1)^{|φ|} φ(dc)
    """
    n = len(A)
    names = tuple(f"{name}*" for name in A.basis.names)
    degrees = tuple(-d for d in A.basis.degrees)
    left: Dict[Tuple[int, int], SparseVector] = {}
    right: Dict[Tuple[int, int], SparseVector] = {}
    for a, j in cartesian(range(n), repeat=2):
        phi_degree = degrees[j]
        lv, rv = {}, {}
        for c in range(n):
            value = A.product(c, a).get(j)
            if value:
                lv[c] = koszul(A.degree(a) * (phi_degree + A.degree(c))) * value
            value = A.product(a, c).get(j)
            if value:
                rv[c] = value
        if lv:
            left[(a, j)] = lv
        if rv:
            right[(j, a)] = rv
    diff: List[SparseVector] = []
    for j in range(n):
        image = {}
        for c in range(n):
            value = A.diff[c].get(j)
            if value:
                image[c] = -koszul(degrees[j]) * value
        diff.append(image)
    return DGBimodule(f"{A.name}*", A, GradedBasis(names, degrees), left, right, diff)


def top_class_trace(A: DGAlgebra, n: int) -> SparseVector:
    """Trace functional of degree -n: 1 on the unique top basis element"""
    top = A.basis.in_degree(n)
    if len(top) != 1:
        raise DegeneratePairingError(f"{A.name} has {len(top)} basis elements in degree {n}; a trace must be given")
    return {top[0]: Fraction(1)}


def pairing_images(A: DGAlgebra, trace: SparseVector) -> List[SparseVector]:
    """P(a_i) = Σ_k tr(a_i a_k) φ_k, checked for tr∘d = 0 and nondegeneracy"""
    n = len(A)

    def tr(v: SparseVector) -> Fraction:
        return sum((trace.get(i, 0) * c for i, c in v.items()), Fraction(0))

    degrees = {A.degree(i) for i in trace}
    if len(degrees) > 1:
        raise DegeneratePairingError("trace is not homogeneous")
    for c in range(n):
        if tr(A.diff[c]):
            raise DegeneratePairingError(f"trace does not vanish on d({A.basis.names[c]})")
    images = [{k: tr(A.product(i, k)) for k in range(n) if tr(A.product(i, k))} for i in range(n)]
    if rank(images, n) < n:
        raise DegeneratePairingError(f"pairing on {A.name} is degenerate")
    return images


def poincare_map(source: TwistedComplex, target: TwistedComplex, images: List[SparseVector],
                 t: TwistedElement) -> TwistedElement:
    """𝒫(a⊗w) = P(a)⊗w"""
    source.space.check(t)
    return target.element(source.space.map_carrier(t.chain(), images))


@dataclass
class PoincareCheck:
    top_degree: int
    chain_map_failures: List[str]
    ranks: Dict[int, Tuple[int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.chain_map_failures and all(r == a == b for r, a, b in self.ranks.values())


def check_poincare(source: TwistedComplex, target: TwistedComplex, n: int, window,
                   trace: Optional[SparseVector] = None, config: Optional[EngineConfig] = None,
                   tables: Tuple[Optional[CohomologyTable], Optional[CohomologyTable]] = (None, None)) -> PoincareCheck:
    """
    Chain-map identity 𝒫∘d_ω = (-1)^n d^{A*}_ω∘𝒫 on every window basis element,
    and full rank of the induced map H^d(A⊗k<X>) -> H^{d-n}(A*⊗k<X>).
    """
    lo, hi = parse_window(window)
    A = source.space.algebra
    images = pairing_images(A, trace if trace is not None else top_class_trace(A, n))
    source_table = tables[0] or cohomology(source, (lo, hi), config)
    target_table = tables[1] or cohomology(target, (lo - n, hi - n), config)
    source, target = source_table.complex, target_table.complex
    sign = koszul(n)

    failures = []
    for d in range(lo, hi + 1):
        for key in basis_enumeration(source, d):
            lhs = source.space.map_carrier(_apply_diff(source, {key: Fraction(1)}), images)
            rhs = _apply_diff(target, source.space.map_carrier({key: Fraction(1)}, images))
            chain_add_into(lhs, rhs, Fraction(-sign))
            if lhs:
                failures.append(format_chain(source.space, {key: Fraction(1)}))

    ranks = {}
    for d in range(lo, hi + 1):
        columns = [
            class_coordinates(target_table, poincare_map(source, target, images, rep))
            for rep in source_table.representatives(d)
        ]
        ranks[d] = (rank(columns, target_table.dim(d - n)), source_table.dim(d), target_table.dim(d - n))
    return PoincareCheck(n, failures, ranks)
