"""
Brute-force Hochschild cohomology on the normalized bar complex, the cup
product, and the bar-language re-derivation of the Maurer-Cartan equation.

Shifted degrees: s(a) = |a| - 1, and the bar degree of [a1|...|am] is
Σ s(a_i). A cochain f: Ā^{⊗m} -> M has total degree |f(u)| - bar degree(u).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.config import EngineConfig
from ..core.errors import NotSimplyConnectedError, WindowError
from ..core.linalg import SparseVector, add_into, rank
from ..models.algebra import DGAlgebra, DGBimodule, koszul, regular_bimodule
from ..models.element import Chain, TwistedElement, algebra_space, chain_add_into
from ..models.words import apply_derivation, word_degree, words_of_degree
from ..utils.log import get_logger
from .transfer import Connection, HomotopyData

LOG = get_logger(__name__)

BarWord = Tuple[int, ...]


@dataclass
class BarCochain:
    """Sparse map from bar words (tuples of reduced basis indices) to value vectors"""
    degree: int
    values: Dict[BarWord, SparseVector] = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return not any(self.values.values())

    def arity(self) -> Optional[int]:
        arities = {len(w) for w, v in self.values.items() if v}
        return arities.pop() if len(arities) == 1 else None


@dataclass
class OracleTable:
    window: Tuple[int, int]
    module: str
    dims: Dict[int, int]
    chain_dims: Dict[int, int]
    max_arity: int


# ===================== BAR COMPLEX =====================

class BarComplex:
    """Normalized cochains Hom(B̄A, M) graded by total degree"""

    def __init__(self, A: DGAlgebra, M: Optional[DGBimodule] = None, arity_cap: int = 12):
        self.A = A
        self.M = M if M is not None else regular_bimodule(A)
        self.reduced = [i for i in range(len(A)) if i != A.unit]
        self.arity_cap = arity_cap
        low = [A.basis.names[i] for i in self.reduced if A.degree(i) < 2]
        if low:
            raise NotSimplyConnectedError(low)
        self._words = lru_cache(maxsize=None)(self._words_uncached)

    def shifted(self, a: int) -> int:
        return self.A.degree(a) - 1

    def bar_degree(self, word: BarWord) -> int:
        return sum(self.shifted(a) for a in word)

    def _words_uncached(self, s: int) -> Tuple[BarWord, ...]:
        if s < 0:
            return ()
        if s == 0:
            return ((),)
        found = []
        for a in self.reduced:
            sa = self.shifted(a)
            if sa <= s:
                found.extend((a,) + tail for tail in self._words(s - sa))
        return tuple(sorted(found, key=lambda w: (len(w), w)))

    def words(self, s: int) -> Tuple[BarWord, ...]:
        """Bar words of bar degree s (every reduced element has s(a) >= 1, so arity <= s)"""
        if s > self.arity_cap:
            raise WindowError(f"bar words of degree {s} exceed the oracle arity cap {self.arity_cap}")
        return self._words(s)

    def basis(self, t: int) -> List[Tuple[BarWord, int]]:
        cells = []
        for b in range(len(self.M)):
            s = self.M.degree(b) - t
            if s >= 0:
                cells.extend((w, b) for w in self.words(s))
        return cells

    def project(self, v: SparseVector) -> SparseVector:
        return {i: c for i, c in v.items() if i != self.A.unit}

    def q2(self, word: BarWord) -> Dict[BarWord, Fraction]:
        """
        Σ_k -(-1)^{ε_{k-1}} [..|da_k|..] - Σ_k (-1)^{ε_k} [..|a_k a_{k+1}|..]
        with ε_k the bar degree of a_1..a_k; products projected to Ā
        """
        A = self.A
        result: Dict[BarWord, Fraction] = {}

        def add(w, c):
            value = result.get(w, 0) + c
            if value:
                result[w] = value
            else:
                result.pop(w, None)

        prefix = 0
        for k, a in enumerate(word):
            sign = -koszul(prefix)
            for b, c in self.project(A.diff[a]).items():
                add(word[:k] + (b,) + word[k + 1:], sign * c)
            prefix += self.shifted(a)
            if k + 1 < len(word):
                sign = -koszul(prefix)
                for b, c in self.project(A.product(a, word[k + 1])).items():
                    add(word[:k] + (b,) + word[k + 2:], sign * c)
        return result

    def differential(self, t: int) -> Tuple[List[Tuple[BarWord, int]], List[Tuple[BarWord, int]], List[SparseVector]]:
        """
        Columns of δf = d∘f - (-1)^{|f|} f∘Q₂ + ω∪f - (-1)^{|f|} f∪ω from degree
        t to t+1, with ω the inclusion Ā -> A.
        """
        M = self.M
        source, target = self.basis(t), self.basis(t + 1)
        row = {cell: j for j, cell in enumerate(target)}
        sign_t = koszul(t)

        reverse: Dict[BarWord, List[Tuple[BarWord, Fraction]]] = {}
        for u in sorted({w for w, _ in target}, key=lambda w: (len(w), w)):
            for alpha, c in self.q2(u).items():
                reverse.setdefault(alpha, []).append((u, c))

        columns = []
        for alpha, b in source:
            image: SparseVector = {}
            for b2, c in M.diff[b].items():
                add_into(image, {row[(alpha, b2)]: Fraction(1)}, c)
            for u, c in reverse.get(alpha, []):
                add_into(image, {row[(u, b)]: Fraction(1)}, -sign_t * c)
            s_alpha = self.bar_degree(alpha)
            for a in self.reduced:
                left = koszul(t * self.shifted(a))
                for b2, c in M.act_left(a, b).items():
                    add_into(image, {row[((a,) + alpha, b2)]: Fraction(1)}, left * c)
                right = -sign_t * koszul(s_alpha)
                for b2, c in M.act_right(b, a).items():
                    add_into(image, {row[(alpha + (a,), b2)]: Fraction(1)}, right * c)
            columns.append(image)
        return source, target, columns


def hochschild_dims_bruteforce(A: DGAlgebra, window, module: Optional[DGBimodule] = None,
                               config: Optional[EngineConfig] = None) -> OracleTable:
    """dim Hoch^t(A, M) for t in the window, M = A unless a bimodule is given"""
    config = config or EngineConfig()
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise WindowError(f"empty window {lo}..{hi}")
    bar = BarComplex(A, module, config.ORACLE_ARITY_CAP)
    span = list(range(lo - 1, hi + 1))

    def build(t):
        source, target, columns = bar.differential(t)
        return len(source), rank(columns, len(target))

    with ThreadPoolExecutor(max_workers=max(1, config.WORKERS)) as pool:
        results = dict(zip(span, pool.map(build, span)))

    dims, chain_dims = {}, {}
    for t in range(lo, hi + 1):
        n, rank_out = results[t]
        dims[t] = n - rank_out - results[t - 1][1]
        chain_dims[t] = n
        LOG.debug(f"oracle {bar.M.name} degree {t}: cochains {n}, cohomology {dims[t]}")
    max_arity = max((bar.M.degree(b) - lo + 1 for b in range(len(bar.M))), default=0)
    return OracleTable((lo, hi), bar.M.name, dims, chain_dims, max_arity)


def bar_square_failures(A: DGAlgebra, t: int, module: Optional[DGBimodule] = None,
                        arity_cap: int = 12) -> int:
    """Number of degree-t basis cochains f with δδf != 0"""
    bar = BarComplex(A, module, arity_cap)
    _, middle, first = bar.differential(t)
    _, _, second = bar.differential(t + 1)
    failures = 0
    for column in first:
        image: SparseVector = {}
        for j, c in column.items():
            add_into(image, second[j], c)
        if image:
            failures += 1
    return failures


# ===================== CUP PRODUCT =====================

def shifted_degree(A: DGAlgebra, word: BarWord) -> int:
    return sum(A.degree(a) - 1 for a in word)


def cup_bruteforce(A: DGAlgebra, f: BarCochain, g: BarCochain) -> BarCochain:
    """(f∪g)[u1|u2] = (-1)^{|g| s(u1)} f(u1) g(u2)"""
    values: Dict[BarWord, SparseVector] = {}
    for w1, v1 in f.values.items():
        sign = koszul(g.degree * shifted_degree(A, w1))
        for w2, v2 in g.values.items():
            product = A.multiply(v1, v2)
            if product:
                target = values.setdefault(w1 + w2, {})
                add_into(target, product, Fraction(sign))
    return BarCochain(f.degree + g.degree, {w: v for w, v in values.items() if v})


def unit_cochain(A: DGAlgebra) -> BarCochain:
    return BarCochain(0, {(): A.unit_vector})


def inclusion_cochain(A: DGAlgebra) -> BarCochain:
    """ω: [a] -> a, of degree 1"""
    return BarCochain(1, {(a,): {a: Fraction(1)} for a in range(len(A)) if a != A.unit})


def cochain_differential(A: DGAlgebra, f: BarCochain, module: Optional[DGBimodule] = None,
                         arity_cap: int = 12) -> BarCochain:
    """δf for a homogeneous cochain, through the same matrix as the dimension count"""
    bar = BarComplex(A, module, arity_cap)
    source, target, columns = bar.differential(f.degree)
    position = {cell: j for j, cell in enumerate(source)}
    image: SparseVector = {}
    for word, vector in f.values.items():
        for b, c in vector.items():
            add_into(image, columns[position[(word, b)]], c)
    values: Dict[BarWord, SparseVector] = {}
    for j, c in image.items():
        word, b = target[j]
        values.setdefault(word, {})[b] = c
    return BarCochain(f.degree + 1, values)


# ===================== TWISTING COCHAIN =====================

def koszul_reversal(gens_degrees: Sequence[int], word: Sequence[int]) -> int:
    """ε(x_{i1}..x_{im}) = Π_{j<k} (-1)^{|x_ij||x_ik|}"""
    sign, running = 1, 0
    for letter in word:
        d = gens_degrees[letter]
        sign *= koszul(d * running)
        running += d
    return sign


def _omega_by_word(conn: Connection) -> Dict[Tuple[int, ...], SparseVector]:
    by_word: Dict[Tuple[int, ...], SparseVector] = {}
    for (a, w), c in conn.omega_chain().items():
        by_word.setdefault(w, {})[a] = c
    return by_word


def twisting_cochain_check(A: DGAlgebra, hd: HomotopyData, conn: Connection) -> BarCochain:
    """
    Evaluate d∘ω̂ + ω̂∘Q₁ + ω̂∪ω̂ on every bar word of H̄ up to the connection
    length, where ω̂(u) = ε(u) a_w for ω = Σ a_w⊗w and Q₁ is dual to ð.
    Returns the residual; it vanishes exactly when the connection is flat.
    """
    gens = conn.gens
    degrees = gens.degrees
    N = conn.max_len
    omega = _omega_by_word(conn)

    def hat(w) -> SparseVector:
        v = omega.get(w)
        if not v:
            return {}
        eps = koszul_reversal(degrees, w)
        return {a: eps * c for a, c in v.items()}

    q1_terms: Dict[Tuple[int, ...], SparseVector] = {}
    for w_prime, a in omega.items():
        for w, c in apply_derivation(gens, conn.eth, w_prime, N).items():
            target = q1_terms.setdefault(w, {})
            add_into(target, a, koszul(word_degree(gens, w)) * c)

    values: Dict[Tuple[int, ...], SparseVector] = {}
    lowest = 2 - A.max_degree
    for degree in range(0, lowest - 1, -1):
        for w in words_of_degree(gens, degree, N):
            if not w:
                continue
            eps = koszul_reversal(degrees, w)
            residual: SparseVector = {}
            base = A.d(omega.get(w, {}))
            add_into(base, q1_terms.get(w, {}))
            add_into(residual, base, Fraction(eps))
            for cut in range(1, len(w)):
                left, right = hat(w[:cut]), hat(w[cut:])
                if left and right:
                    sign = koszul(word_degree(gens, w[:cut]))
                    add_into(residual, A.multiply(left, right), Fraction(sign))
            if residual:
                values[w] = residual
    LOG.debug(f"twisting cochain residual: {len(values)} nonzero words")
    return BarCochain(2, values)


def comparison_map(A: DGAlgebra, conn: Connection, f: BarCochain) -> TwistedElement:
    """
    f ↦ f∘Ω with Ω(u) = Σ [ω̂(u_1)|...|ω̂(u_m)] over splittings into nonempty
    pieces, read back in A⊗k<X> as Σ_w ε(w) (f∘Ω)(u_w)⊗w.
    """
    gens = conn.gens
    degrees = gens.degrees
    omega = _omega_by_word(conn)
    space = algebra_space(A, gens)

    hats: Dict[int, List[Tuple[Tuple[int, ...], Fraction]]] = {}
    for w, vector in omega.items():
        eps = koszul_reversal(degrees, w)
        for a, c in vector.items():
            if a != A.unit:
                hats.setdefault(a, []).append((w, eps * c))

    chain: Chain = {}
    for alpha, value in f.values.items():
        choices = [hats.get(a, []) for a in alpha]
        for pieces in cartesian(*choices):
            word: Tuple[int, ...] = ()
            coefficient = Fraction(1)
            for w, c in pieces:
                word += w
                coefficient *= c
            eps = koszul_reversal(degrees, word)
            for b, c in value.items():
                chain_add_into(chain, {(b, word): eps * coefficient * c})
    return space.element(chain)
