"""
Words in the free graded algebra k<X> and derivations of it.

A word is a tuple of generator indices; the empty tuple is the unit word.
Polynomials are sparse dicts {word: Fraction}.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from ..core.errors import UnknownGeneratorError

Word = Tuple[int, ...]
Polynomial = Dict[Word, Fraction]

EMPTY: Word = ()


@dataclass(frozen=True)
class GeneratorSet:
    """Generators x_i dual to the reduced cohomology classes e^i, |x_i| = 1 - |e^i|"""
    names: Tuple[str, ...]
    degrees: Tuple[int, ...]

    @classmethod
    def for_classes(cls, class_degrees: Sequence[int]) -> "GeneratorSet":
        if len(class_degrees) == 1:
            names = ("x",)
        else:
            names = tuple(f"x{i + 1}" for i in range(len(class_degrees)))
        return cls(names, tuple(1 - d for d in class_degrees))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownGeneratorError(f"unknown generator '{name}'") from None

    def letter_degree(self, i: int) -> int:
        if not 0 <= i < len(self.degrees):
            raise UnknownGeneratorError(f"unknown generator index {i}")
        return self.degrees[i]

    @property
    def simply_connected(self) -> bool:
        return all(d <= -1 for d in self.degrees)


def word_degree(gens: GeneratorSet, word: Word) -> int:
    return sum(gens.letter_degree(i) for i in word)


def word_names(gens: GeneratorSet, word: Word) -> List[str]:
    return [gens.names[i] for i in word]


def parse_word(gens: GeneratorSet, names: Iterable[str]) -> Word:
    return tuple(gens.index(n) for n in names)


@lru_cache(maxsize=None)
def words_of_degree(gens: GeneratorSet, degree: int, max_length: int) -> Tuple[Word, ...]:
    """
    All words of the given degree and length <= max_length, shortest first and
    lexicographic within a length. Requires every generator degree <= -1.
    """
    if degree > 0 or max_length < 0:
        return ()
    if degree == 0:
        return (EMPTY,)
    found: List[Word] = []
    for i, d in enumerate(gens.degrees):
        if max_length >= 1 and d >= degree:
            for tail in words_of_degree(gens, degree - d, max_length - 1):
                found.append((i,) + tail)
    return tuple(sorted(found, key=lambda w: (len(w), w)))


def count_words(gens: GeneratorSet, degree: int) -> int:
    """Number of words of a degree via the generating series 1/(1 - sum t^{|x_i|})"""
    if degree > 0:
        return 0
    counts = [1] + [0] * (-degree)
    for k in range(1, -degree + 1):
        counts[k] = sum(counts[k + d] for d in gens.degrees if k + d >= 0)
    return counts[-degree]


# ===================== POLYNOMIALS =====================

def poly_add_into(target: Polynomial, poly: Polynomial, scale: Fraction = Fraction(1)):
    for w, c in poly.items():
        value = target.get(w, 0) + scale * c
        if value:
            target[w] = value
        else:
            target.pop(w, None)


def apply_derivation(gens: GeneratorSet, eth: Dict[int, Polynomial], word: Word,
                     max_length: int = None) -> Polynomial:
    """
    Degree +1 derivation on a word:
    ð(x_{i1}...x_{im}) = sum_j (-1)^{|x_{i1}|+...+|x_{i(j-1)}|} x_{i1}..ð(x_ij)..x_{im}
    """
    result: Polynomial = {}
    prefix_degree = 0
    for j, letter in enumerate(word):
        image = eth.get(letter)
        if image:
            sign = -1 if prefix_degree % 2 else 1
            head, tail = word[:j], word[j + 1:]
            for w, c in image.items():
                new = head + w + tail
                if max_length is None or len(new) <= max_length:
                    poly_add_into(result, {new: c}, Fraction(sign))
        prefix_degree += gens.degrees[letter]
    return result


def apply_derivation_poly(gens: GeneratorSet, eth: Dict[int, Polynomial], poly: Polynomial,
                          max_length: int = None) -> Polynomial:
    result: Polynomial = {}
    for w, c in poly.items():
        poly_add_into(result, apply_derivation(gens, eth, w, max_length), c)
    return result
