"""
The model language: .dgm model sources, .dgmap morphism sources, element
text and model specs on the command line.

    # 2-sphere
    model sphere2 {
      basis: 1:0, v:2;
      unit: 1;
    }

    morphism linear { h -> h }

Expressions are rational combinations of basis names; a bare number is a
multiple of the unit. Unspecified differentials are zero, unspecified
products are zero except those with the unit. Elements of A⊗k<X> are
written carrier@word with letters separated by dots: `2*h2@x1.x2 - h`.
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import lark
from pydantic import ValidationError

from ..core.errors import (
    CarrierMismatchError,
    InputError,
    ModelSyntaxError,
    ModelValidationError,
    MorphismError,
    UnknownPresetError,
)
from ..core.linalg import SparseVector, add_into
from ..models.algebra import AlgebraMorphism, DGAlgebra, GradedBasis, scale, validate_dga
from ..models.element import MODULE, Chain, TensorSpace, TwistedElement, chain_add_into
from ..models.presets import preset
from ..models.schemas import BasisEntry, ModelDocument, MultEntry
from ..utils.formatting import format_scalar, format_vector
from .loops import require_morphism

grammar = r"""
model:    "model" MODEL_NAME "{" section* "}"
?section: basis | unit | diff | mult
basis:    "basis" ":" basis_entry ("," basis_entry)* ";"
basis_entry: label ":" SIGNED_INT
unit:     "unit" ":" label ";"
diff:     "diff" ":" diff_entry ("," diff_entry)* ";"
diff_entry: label "->" expr
mult:     "mult" ":" mult_entry ("," mult_entry)* ";"
mult_entry: label "*" label "=" expr

morphism: "morphism" MODEL_NAME "{" [mapping ("," mapping)*] "}"
mapping:  label "->" expr

element:  expr

expr:     [SIGN] term (SIGN term)*
term:     NUMBER "*" atom -> scaled
        | atom            -> plain
atom:     (NAME | NUMBER) ("@" word)?
word:     NAME ("." NAME)*
label:    NAME | NUMBER

MODEL_NAME: /[^\s{}#]+/
NAME:     /[A-Za-z_][A-Za-z0-9_']*/
NUMBER:   /\d+(\/\d+)?/
SIGN:     "+" | "-"
COMMENT:  /#[^\n]*/

%import common.SIGNED_INT
%import common.WS

%ignore WS
%ignore COMMENT
"""

spec_grammar = r"""
?spec: NAME                          -> bare
     | NAME ":" INT                  -> indexed
     | NAME "(" spec ("," spec)* ")" -> compound

NAME: /[A-Za-z_][A-Za-z0-9_]*/

%import common.INT
%import common.WS
%ignore WS
"""

ModelSpec = Tuple[str, tuple]

# Terms before resolution: (coefficient, label token or None for the unit, word tokens)
RawTerm = Tuple[Fraction, Optional[lark.Token], List[lark.Token]]


def _position(node) -> Tuple[Optional[int], Optional[int]]:
    if isinstance(node, lark.Token):
        return node.line, node.column
    meta = getattr(node, "meta", None)
    if meta is None or getattr(meta, "empty", True):
        return None, None
    return meta.line, meta.column


def _error(message: str, node) -> ModelSyntaxError:
    return ModelSyntaxError(message, *_position(node))


def _parse(source: str, start: str) -> lark.Tree:
    try:
        return _parse.parser.parse(source, start=start)
    except lark.exceptions.UnexpectedCharacters as err:
        raise ModelSyntaxError(f"unexpected character {source[err.pos_in_stream]!r}", err.line, err.column) from None
    except lark.exceptions.UnexpectedEOF:
        lines = source.splitlines() or [""]
        raise ModelSyntaxError("unexpected end of input", len(lines), len(lines[-1]) + 1) from None
    except lark.exceptions.UnexpectedToken as err:
        expected = ", ".join(sorted(err.expected))
        raise ModelSyntaxError(f"unexpected {str(err.token)!r}, expected one of {expected}", err.line, err.column) from None


_parse.parser = lark.Lark(
    grammar, parser="lalr", start=["model", "morphism", "element"], propagate_positions=True
)


def _scalar(token: lark.Token) -> Fraction:
    try:
        return Fraction(str(token))
    except ZeroDivisionError:
        raise _error(f"zero denominator in {token}", token) from None


def _raw_terms(expr: lark.Tree) -> List[RawTerm]:
    """Flatten an expression tree into signed terms"""
    terms: List[RawTerm] = []
    sign = 1
    for child in expr.children:
        if child is None:
            continue
        if isinstance(child, lark.Token):
            sign = -1 if child == "-" else 1
            continue
        if child.data == "scaled":
            coeff, atom = _scalar(child.children[0]), child.children[1]
        else:
            coeff, atom = Fraction(1), child.children[0]
        head = atom.children[0]
        word = list(atom.children[1].children) if len(atom.children) > 1 else []
        if head.type == "NUMBER":
            coeff, head = coeff * _scalar(head), None
        terms.append((sign * coeff, head, word))
        sign = 1
    return terms


def _label(tree: lark.Tree) -> lark.Token:
    token = tree.children[0]
    if token.type == "NUMBER" and str(token) != "1":
        raise _error(f"numeric basis label {token} (only the unit may be called 1)", token)
    return token


def _vector(expr: lark.Tree, names: Sequence[str], unit: int) -> SparseVector:
    result: SparseVector = {}
    for coeff, head, word in _raw_terms(expr):
        if word:
            raise _error("words are only allowed in elements", word[0])
        if head is None:
            index = unit
        elif str(head) in names:
            index = names.index(str(head))
        else:
            raise _error(f"unknown basis element '{head}'", head)
        add_into(result, {index: Fraction(1)}, coeff)
    return result


# ===================== MODELS =====================

def _build_model(tree: lark.Tree) -> DGAlgebra:
    name_token = tree.children[0]
    sections: Dict[str, lark.Tree] = {}
    for section in tree.children[1:]:
        if section.data in sections:
            raise _error(f"duplicate section '{section.data}'", section)
        sections[section.data] = section
    if "basis" not in sections:
        raise _error("basis required", name_token)

    names: List[str] = []
    degrees: List[int] = []
    for entry in sections["basis"].children:
        token = _label(entry.children[0])
        if str(token) in names:
            raise _error(f"duplicate basis element '{token}'", token)
        names.append(str(token))
        degrees.append(int(entry.children[1]))

    if "unit" not in sections:
        raise _error("unit required", name_token)
    unit_token = _label(sections["unit"].children[0])
    if str(unit_token) not in names:
        raise _error(f"unit '{unit_token}' is not a basis element", unit_token)
    unit = names.index(str(unit_token))
    if "1" in names and names[unit] != "1":
        raise _error("the basis element called 1 must be the unit", unit_token)

    def index_of(label_tree: lark.Tree) -> int:
        token = _label(label_tree)
        if str(token) not in names:
            raise _error(f"unknown basis element '{token}'", token)
        return names.index(str(token))

    diff: List[SparseVector] = [{} for _ in names]
    seen = set()
    for entry in sections["diff"].children if "diff" in sections else []:
        i = index_of(entry.children[0])
        if i in seen:
            raise _error(f"differential of '{names[i]}' given twice", entry)
        seen.add(i)
        diff[i] = _vector(entry.children[1], names, unit)

    mult: Dict[Tuple[int, int], SparseVector] = {}
    for entry in sections["mult"].children if "mult" in sections else []:
        key = (index_of(entry.children[0]), index_of(entry.children[1]))
        if key in mult:
            raise _error(f"product {names[key[0]]}*{names[key[1]]} given twice", entry)
        value = _vector(entry.children[2], names, unit)
        if value:
            mult[key] = value
        else:
            mult.setdefault(key, {})

    mult = {k: v for k, v in mult.items() if v}
    return DGAlgebra(str(name_token), GradedBasis(tuple(names), tuple(degrees)), unit, mult, diff)


def require_valid(A: DGAlgebra) -> DGAlgebra:
    report = validate_dga(A)
    if not report.ok:
        raise ModelValidationError(A.name, report)
    return A


def parse_model(source: str) -> DGAlgebra:
    """Parse a .dgm source and validate the resulting dg algebra"""
    return require_valid(_build_model(_parse(source, "model")))


def format_model(A: DGAlgebra) -> str:
    """Canonical .dgm text; parse_model(format_model(A)) reproduces A"""
    names = A.basis.names
    lines = [
        f"model {A.name} {{",
        "  basis: " + ", ".join(f"{n}:{d}" for n, d in zip(names, A.basis.degrees)) + ";",
        f"  unit: {names[A.unit]};",
    ]
    diffs = [f"{names[i]} -> {format_vector(v, names)}" for i, v in enumerate(A.diff) if v]
    if diffs:
        lines.append("  diff: " + ", ".join(diffs) + ";")
    products = [
        f"{names[i]}*{names[j]} = {format_vector(v, names)}" for (i, j), v in sorted(A.mult.items()) if v
    ]
    if products:
        lines.append("  mult: " + ",\n        ".join(products) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ===================== JSON =====================

def model_from_document(doc: ModelDocument) -> DGAlgebra:
    names = [entry.name for entry in doc.basis]
    if len(set(names)) != len(names):
        raise ModelSyntaxError(f"duplicate basis element in model '{doc.name}'")

    def index(name: str) -> int:
        if name not in names:
            raise ModelSyntaxError(f"unknown basis element '{name}' in model '{doc.name}'")
        return names.index(name)

    def vector(value: Dict[str, str]) -> SparseVector:
        result: SparseVector = {}
        for name, coeff in value.items():
            try:
                add_into(result, {index(name): Fraction(1)}, Fraction(coeff))
            except (ValueError, ZeroDivisionError):
                raise ModelSyntaxError(f"bad coefficient '{coeff}' in model '{doc.name}'") from None
        return result

    unit = index(doc.unit)
    diff: List[SparseVector] = [{} for _ in names]
    for name, value in doc.diff.items():
        diff[index(name)] = vector(value)
    mult = {}
    for entry in doc.mult:
        value = vector(entry.value)
        if value:
            mult[(index(entry.left), index(entry.right))] = value
    A = DGAlgebra(doc.name, GradedBasis(tuple(names), tuple(e.degree for e in doc.basis)), unit, mult, diff)
    return require_valid(A)


def model_from_json(text: str) -> DGAlgebra:
    try:
        doc = ModelDocument.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as err:
        raise ModelSyntaxError(f"invalid model document: {err}") from None
    return model_from_document(doc)


def model_to_document(A: DGAlgebra) -> ModelDocument:
    names = A.basis.names

    def value(v: SparseVector) -> Dict[str, str]:
        return {names[k]: format_scalar(c) for k, c in sorted(v.items())}

    return ModelDocument(
        name=A.name,
        basis=[BasisEntry(name=n, degree=d) for n, d in zip(names, A.basis.degrees)],
        unit=names[A.unit],
        diff={names[i]: value(v) for i, v in enumerate(A.diff) if v},
        mult=[MultEntry(left=names[i], right=names[j], value=value(v)) for (i, j), v in sorted(A.mult.items()) if v],
    )


# ===================== MORPHISMS =====================

def _expand_multiplicatively(S: DGAlgebra, T: DGAlgebra, images: Dict[int, SparseVector]):
    """Fill in images forced by f(ab) = f(a)f(b) until nothing changes"""
    progress = True
    while progress:
        progress = False
        for (i, j), value in sorted(S.mult.items()):
            if i not in images or j not in images:
                continue
            unknown = [k for k in value if k not in images]
            if len(unknown) != 1:
                continue
            k = unknown[0]
            rest = T.multiply(images[i], images[j])
            for other, c in value.items():
                if other != k:
                    add_into(rest, images[other], -c)
            images[k] = scale(rest, Fraction(1) / value[k])
            progress = True
    for k in range(len(S)):
        if k not in images and not T.basis.in_degree(S.degree(k)):
            images[k] = {}


def parse_morphism(source: str, A_M: DGAlgebra, A_Z: DGAlgebra) -> AlgebraMorphism:
    """
    Parse `morphism NAME { label -> expr, ... }` as f: A_M -> A_Z. Labels are
    basis elements of A_M, expressions live in A_Z. Images not given are
    expanded multiplicatively; the unit goes to the unit unless stated.
    """
    tree = _parse(source, "morphism")
    name_token = tree.children[0]
    images: Dict[int, SparseVector] = {}
    for mapping in tree.children[1:]:
        if mapping is None:
            continue
        token = _label(mapping.children[0])
        if str(token) not in A_M.basis.names:
            raise _error(f"unknown basis element '{token}' of {A_M.name}", token)
        i = A_M.basis.index(str(token))
        if i in images:
            raise _error(f"image of '{token}' given twice", token)
        images[i] = _vector(mapping.children[1], A_Z.basis.names, A_Z.unit)
    images.setdefault(A_M.unit, A_Z.unit_vector)
    _expand_multiplicatively(A_M, A_Z, images)

    missing = [A_M.basis.names[k] for k in range(len(A_M)) if k not in images]
    if missing:
        raise MorphismError("basis coverage", missing)
    f = AlgebraMorphism(str(name_token), A_M, A_Z, [images[k] for k in range(len(A_M))])
    require_morphism(f)
    return f


# ===================== ELEMENTS =====================

def parse_element(space: TensorSpace, text: str) -> TwistedElement:
    """Parse element text such as `h@x1 + 2*h2@x2` in the given tensor space"""
    tree = _parse(text, "element")
    names = space.carrier_names
    chain: Chain = {}
    for coeff, head, word in _raw_terms(tree.children[0]):
        if head is None:
            if space.kind == MODULE:
                raise CarrierMismatchError(f"a module carrier has no unit ({text!r})")
            carrier = space.algebra.unit
        elif str(head) in names:
            carrier = names.index(str(head))
        else:
            raise CarrierMismatchError(f"'{head}' is not a basis element of {space.tag}")
        key = (carrier, tuple(space.gens.index(str(letter)) for letter in word))
        chain_add_into(chain, {key: Fraction(1)}, coeff)
    return space.element(chain)


def parse_named(space: TensorSpace, named: Dict[str, str]) -> Dict[str, TwistedElement]:
    return {name: parse_element(space, text) for name, text in named.items()}


# ===================== MODEL SPECS =====================

def _spec_tree(tree) -> ModelSpec:
    if tree.data == "bare":
        return str(tree.children[0]), ()
    if tree.data == "indexed":
        return str(tree.children[0]), (int(tree.children[1]),)
    return str(tree.children[0]), tuple(_spec_tree(child) for child in tree.children[1:])


def parse_model_spec(spec: str) -> ModelSpec:
    """'cpn:2' -> ('cpn', (2,)); 'product(sphere:2,point)' -> ('product', (('sphere', (2,)), ('point', ())))"""
    try:
        return _spec_tree(parse_model_spec.parser.parse(spec))
    except lark.exceptions.UnexpectedInput:
        raise UnknownPresetError(f"malformed model spec '{spec}'") from None


parse_model_spec.parser = lark.Lark(spec_grammar, start="spec", parser="lalr")


def build_preset(spec: ModelSpec) -> DGAlgebra:
    name, params = spec
    resolved = [build_preset(p) if isinstance(p, tuple) else p for p in params]
    return require_valid(preset(name, resolved))


def is_model_file(spec: str) -> bool:
    return spec.endswith((".dgm", ".json"))


def load_model_spec(spec: str) -> DGAlgebra:
    """Resolve a preset spec, a .dgm path or a .json path"""
    if is_model_file(spec):
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as err:
            raise InputError(f"cannot read model file {spec}: {err.strerror}") from None
        return model_from_json(text) if spec.endswith(".json") else parse_model(text)
    return build_preset(parse_model_spec(spec))


def load_morphism(path: Union[str, Path], A_M: DGAlgebra, A_Z: DGAlgebra) -> AlgebraMorphism:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read morphism file {path}: {err.strerror}") from None
    return parse_morphism(text, A_M, A_Z)
