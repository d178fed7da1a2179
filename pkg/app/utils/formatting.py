from fractions import Fraction
from typing import Dict, Sequence, Tuple


def format_scalar(c: Fraction) -> str:
    """Exact scalar as p or p/q"""
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _join(terms: Sequence[Tuple[Fraction, str]]) -> str:
    if not terms:
        return "0"
    parts = []
    for position, (c, label) in enumerate(terms):
        magnitude = abs(c)
        body = label if magnitude == 1 else f"{format_scalar(magnitude)}*{label}"
        if position == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f"{'-' if c < 0 else '+'} {body}")
    return " ".join(parts)


def format_vector(vector: Dict[int, Fraction], names: Sequence[str]) -> str:
    """Linear combination of basis names, e.g. 'h - 1/2*h2'"""
    return _join([(vector[i], names[i]) for i in sorted(vector)])


def format_word(word: Sequence[int], names: Sequence[str]) -> str:
    return ".".join(names[i] for i in word)


def format_key(key, carrier_names: Sequence[str], generator_names: Sequence[str]) -> str:
    carrier, word = key
    if not word:
        return carrier_names[carrier]
    return f"{carrier_names[carrier]}@{format_word(word, generator_names)}"


def format_chain(space, chain: Dict) -> str:
    """Element of carrier⊗k<X> as 'c*carrier@x1.x2 + ...' in canonical term order"""
    keys = sorted(chain, key=lambda k: (k[0], len(k[1]), k[1]))
    names, gens = space.carrier_names, space.gens.names
    return _join([(chain[k], format_key(k, names, gens)) for k in keys])


def format_element(space, element) -> str:
    return format_chain(space, element.chain())


def format_polynomial(poly: Dict, generator_names: Sequence[str]) -> str:
    keys = sorted(poly, key=lambda w: (len(w), w))
    return _join([(poly[w], format_word(w, generator_names) or "1") for w in keys])


def format_window(window: Tuple[int, int]) -> str:
    return f"{window[0]}..{window[1]}"


def format_seconds(seconds: float) -> str:
    return f"{seconds:.2f}s"
