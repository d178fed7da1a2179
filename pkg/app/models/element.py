"""
Elements of A⊗k<X> (or M⊗k<X>, or k<X>) and their Koszul-signed arithmetic.

Conventions, fixed once for the whole engine:
    (a⊗w)(b⊗v) = (-1)^{|w||b|} ab⊗wv
    d(a⊗w)     = da⊗w
    ð(a⊗w)     = (-1)^{|a|} a⊗ðw
    [u, v]     = uv - (-1)^{|u||v|} vu
Module actions carry the same signs as the product.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.errors import CarrierMismatchError
from ..core.linalg import SparseVector
from ..utils.formatting import format_scalar
from .algebra import DGAlgebra, DGBimodule, koszul
from .words import GeneratorSet, Polynomial, Word, apply_derivation, word_degree

Key = Tuple[int, Word]
Chain = Dict[Key, Fraction]

ALGEBRA, MODULE, WORDS = "algebra", "module", "words"


def chain_add_into(target: Chain, chain: Chain, scale=Fraction(1)):
    for key, c in chain.items():
        value = target.get(key, 0) + scale * c
        if value:
            target[key] = value
        else:
            target.pop(key, None)


def chain_scale(chain: Chain, c) -> Chain:
    if not c:
        return {}
    return {k: c * v for k, v in chain.items()}


@dataclass(frozen=True)
class TwistedElement:
    """Canonical finite sum of (coefficient, carrier index, word); terms sorted, merged, nonzero"""
    space: str
    terms: Tuple[Tuple[Key, Fraction], ...] = ()

    @classmethod
    def from_chain(cls, space: str, chain: Chain) -> "TwistedElement":
        items = sorted(((k, Fraction(c)) for k, c in chain.items() if c), key=lambda t: (t[0][0], len(t[0][1]), t[0][1]))
        return cls(space, tuple(items))

    def chain(self) -> Chain:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TwistedElement") -> "TwistedElement":
        if other.space != self.space:
            raise CarrierMismatchError(f"cannot add elements of {self.space} and {other.space}")
        chain = self.chain()
        chain_add_into(chain, other.chain())
        return TwistedElement.from_chain(self.space, chain)

    def __neg__(self) -> "TwistedElement":
        return self.scaled(-1)

    def __sub__(self, other: "TwistedElement") -> "TwistedElement":
        return self + (-other)

    def scaled(self, c) -> "TwistedElement":
        return TwistedElement.from_chain(self.space, chain_scale(self.chain(), Fraction(c)))

    def max_word_length(self) -> int:
        return max((len(w) for (_, w), _ in self.terms), default=0)


@dataclass(frozen=True, eq=False)
class TensorSpace:
    """
    The graded vector space carrier⊗k<X>. For a module space the carrier is
    a bimodule over `algebra`; otherwise the carrier is `algebra` itself
    (the pure-word space uses the one-dimensional algebra).
    """
    kind: str
    algebra: DGAlgebra
    gens: GeneratorSet
    module: Optional[DGBimodule] = None

    @property
    def tag(self) -> str:
        carrier = self.module.name if self.module is not None else self.algebra.name
        return f"{self.kind}:{carrier}"

    @property
    def carrier_names(self) -> Tuple[str, ...]:
        return (self.module or self.algebra).basis.names

    @property
    def carrier_degrees(self) -> Tuple[int, ...]:
        return (self.module or self.algebra).basis.degrees

    @property
    def max_carrier_degree(self) -> int:
        return max(self.carrier_degrees)

    def key_degree(self, key: Key) -> int:
        carrier, word = key
        return self.carrier_degrees[carrier] + word_degree(self.gens, word)

    def degree(self, t: Chain) -> Optional[int]:
        degrees = {self.key_degree(k) for k in t}
        return degrees.pop() if len(degrees) == 1 else None

    def element(self, chain: Chain) -> TwistedElement:
        return TwistedElement.from_chain(self.tag, chain)

    def check(self, *elements: TwistedElement):
        for e in elements:
            if e.space != self.tag:
                raise CarrierMismatchError(f"element of {e.space} used in {self.tag}")

    # ---------- products ----------

    def mul(self, u: Chain, v: Chain, max_length: Optional[int] = None) -> Chain:
        """(a⊗w)(b⊗v) = (-1)^{|w||b|} ab⊗wv on the algebra carrier"""
        A, gens = self.algebra, self.gens
        result: Chain = {}
        for (a, w), x in u.items():
            wdeg = word_degree(gens, w)
            for (b, v_), y in v.items():
                word = w + v_
                if max_length is not None and len(word) > max_length:
                    continue
                product = A.product(a, b)
                if not product:
                    continue
                sign = koszul(wdeg * A.degree(b))
                for c, z in product.items():
                    chain_add_into(result, {(c, word): z}, sign * x * y)
        return result

    def act_left(self, u: Chain, t: Chain, max_length: Optional[int] = None) -> Chain:
        """(a⊗v)·(m⊗w) = (-1)^{|v||m|} am⊗vw"""
        if self.module is None:
            return self.mul(u, t, max_length)
        M, gens = self.module, self.gens
        result: Chain = {}
        for (a, v), x in u.items():
            vdeg = word_degree(gens, v)
            for (m, w), y in t.items():
                word = v + w
                if max_length is not None and len(word) > max_length:
                    continue
                sign = koszul(vdeg * M.degree(m))
                for c, z in M.act_left(a, m).items():
                    chain_add_into(result, {(c, word): z}, sign * x * y)
        return result

    def act_right(self, t: Chain, u: Chain, max_length: Optional[int] = None) -> Chain:
        """(m⊗w)·(a⊗v) = (-1)^{|w||a|} ma⊗wv"""
        if self.module is None:
            return self.mul(t, u, max_length)
        M, A, gens = self.module, self.algebra, self.gens
        result: Chain = {}
        for (m, w), y in t.items():
            wdeg = word_degree(gens, w)
            for (a, v), x in u.items():
                word = w + v
                if max_length is not None and len(word) > max_length:
                    continue
                sign = koszul(wdeg * A.degree(a))
                for c, z in M.act_right(m, a).items():
                    chain_add_into(result, {(c, word): z}, sign * x * y)
        return result

    def bracket(self, u: Chain, t: Chain, max_length: Optional[int] = None) -> Chain:
        """[u, t] = ut - (-1)^{|u||t|} tu for homogeneous u (algebra side), linear in t"""
        if not u or not t:
            return {}
        du = self.algebra_degree(u)
        if du is None:
            raise ValueError("bracket needs a homogeneous left argument")
        result = self.act_left(u, t, max_length)
        for key, c in t.items():
            sign = koszul(du * self.key_degree(key))
            chain_add_into(result, self.act_right({key: c}, u, max_length), Fraction(-sign))
        return result

    def algebra_degree(self, u: Chain) -> Optional[int]:
        A = self.algebra
        degrees = {A.degree(a) + word_degree(self.gens, w) for a, w in u}
        return degrees.pop() if len(degrees) == 1 else None

    # ---------- differentials ----------

    def d_carrier(self, t: Chain) -> Chain:
        carrier = self.module or self.algebra
        result: Chain = {}
        for (m, w), c in t.items():
            for k, z in carrier.diff[m].items():
                chain_add_into(result, {(k, w): z}, c)
        return result

    def eth(self, t: Chain, eth: Dict[int, Polynomial], max_length: Optional[int] = None) -> Chain:
        """ð(m⊗w) = (-1)^{|m|} m⊗ðw"""
        result: Chain = {}
        for (m, w), c in t.items():
            sign = koszul(self.carrier_degrees[m])
            for word, z in apply_derivation(self.gens, eth, w, max_length).items():
                chain_add_into(result, {(m, word): z}, sign * c)
        return result

    def map_carrier(self, t: Chain, images: Sequence[SparseVector]) -> Chain:
        """(φ⊗id)(t) for a linear map φ given on carrier basis vectors"""
        result: Chain = {}
        for (m, w), c in t.items():
            for k, z in images[m].items():
                chain_add_into(result, {(k, w): z}, c)
        return result


def algebra_space(A: DGAlgebra, gens: GeneratorSet) -> TensorSpace:
    return TensorSpace(ALGEBRA, A, gens)


def module_space(M: DGBimodule, gens: GeneratorSet) -> TensorSpace:
    return TensorSpace(MODULE, M.algebra, gens, M)


def elem_mul(space: TensorSpace, u: TwistedElement, v: TwistedElement) -> TwistedElement:
    if space.kind == MODULE:
        raise CarrierMismatchError("products are only defined on an algebra carrier")
    space.check(u, v)
    return space.element(space.mul(u.chain(), v.chain()))


def unit_element(space: TensorSpace) -> TwistedElement:
    return space.element({(space.algebra.unit, ()): Fraction(1)})


# ===================== TEXT AND JSON =====================

def element_to_json(space: TensorSpace, t: TwistedElement) -> List[dict]:
    names = space.carrier_names
    return [
        {"coeff": format_scalar(c), "carrier": names[m], "word": [space.gens.names[i] for i in w]}
        for (m, w), c in t.terms
    ]
