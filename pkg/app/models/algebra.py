"""
Finite-dimensional dg algebras, dg bimodules and algebra morphisms, given by
structure constants on a graded basis, together with their axiom checkers.

Degrees are cohomological. All structure constants are exact Fractions.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.linalg import SparseVector, add_into


def koszul(exponent: int) -> int:
    """(-1)^exponent"""
    return -1 if exponent % 2 else 1


def scale(vector: SparseVector, c) -> SparseVector:
    if not c:
        return {}
    return {i: c * v for i, v in vector.items()}


# ===================== GRADED BASIS =====================

@dataclass(frozen=True)
class GradedBasis:
    names: Tuple[str, ...]
    degrees: Tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def in_degree(self, d: int) -> List[int]:
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0


# ===================== VALIDATION REPORT =====================

@dataclass(frozen=True)
class ValidationFailure:
    axiom: str
    witness: Tuple[str, ...]

    def __str__(self):
        return f"{self.axiom} fails at ({', '.join(self.witness)})"


@dataclass
class ValidationReport:
    subject: str
    failures: List[ValidationFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, axiom: str, *witness: str):
        self.failures.append(ValidationFailure(axiom, tuple(witness)))

    def axioms_failed(self) -> List[str]:
        return sorted({f.axiom for f in self.failures})


# ===================== DG ALGEBRA =====================

@dataclass
class DGAlgebra:
    name: str
    basis: GradedBasis
    unit: int
    mult: Dict[Tuple[int, int], SparseVector]
    diff: List[SparseVector]

    def __len__(self):
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis.degrees[i]

    def product(self, i: int, j: int) -> SparseVector:
        if i == self.unit:
            return {j: Fraction(1)}
        if j == self.unit:
            return {i: Fraction(1)}
        return self.mult.get((i, j), {})

    def multiply(self, u: SparseVector, v: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for i, a in u.items():
            for j, b in v.items():
                add_into(result, self.product(i, j), a * b)
        return result

    def d(self, v: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for i, c in v.items():
            add_into(result, self.diff[i], c)
        return result

    def basis_vector(self, name: str) -> SparseVector:
        return {self.basis.index(name): Fraction(1)}

    @property
    def unit_vector(self) -> SparseVector:
        return {self.unit: Fraction(1)}

    @property
    def max_degree(self) -> int:
        return self.basis.max_degree

    def is_graded_commutative(self) -> bool:
        for i, j in cartesian(range(len(self)), repeat=2):
            sign = koszul(self.degree(i) * self.degree(j))
            if self.product(i, j) != scale(self.product(j, i), sign):
                return False
        return True

    def structurally_equal(self, other: "DGAlgebra") -> bool:
        return (
            self.basis == other.basis
            and self.unit == other.unit
            and {k: v for k, v in self.mult.items() if v} == {k: v for k, v in other.mult.items() if v}
            and self.diff == other.diff
        )


def validate_dga(A: DGAlgebra) -> ValidationReport:
    """
    Check d^2 = 0, degree homogeneity of d and of the product, graded Leibniz,
    associativity and the unit axioms. Never raises; failures carry a witness
    tuple of basis names.
    """
    report = ValidationReport(A.name)
    names, n = A.basis.names, len(A)

    if not 0 <= A.unit < n:
        report.fail("unit", "<missing>")
        return report
    if A.degree(A.unit) != 0:
        report.fail("unit", names[A.unit])
    for (i, j), value in A.mult.items():
        if A.unit in (i, j) and value and value != A.product(i, j):
            report.fail("unit", names[i], names[j])

    for i in range(n):
        if any(A.degree(k) != A.degree(i) + 1 for k in A.diff[i]):
            report.fail("degree-homogeneity", names[i])
        if A.d(A.diff[i]):
            report.fail("d^2=0", names[i])
    for (i, j), value in A.mult.items():
        if any(A.degree(k) != A.degree(i) + A.degree(j) for k in value):
            report.fail("degree-homogeneity", names[i], names[j])

    for i, j in cartesian(range(n), repeat=2):
        a, b = {i: Fraction(1)}, {j: Fraction(1)}
        lhs = A.d(A.product(i, j))
        rhs = A.multiply(A.diff[i], b)
        add_into(rhs, A.multiply(a, A.diff[j]), Fraction(koszul(A.degree(i))))
        if lhs != rhs:
            report.fail("Leibniz", names[i], names[j])

    for i, j, k in cartesian(range(n), repeat=3):
        left = A.multiply(A.product(i, j), {k: Fraction(1)})
        right = A.multiply({i: Fraction(1)}, A.product(j, k))
        if left != right:
            report.fail("associativity", names[i], names[j], names[k])
    return report


# ===================== DG BIMODULE =====================

@dataclass
class DGBimodule:
    """A dg bimodule M over a dg algebra A with left/right actions A⊗M→M, M⊗A→M"""
    name: str
    algebra: DGAlgebra
    basis: GradedBasis
    left: Dict[Tuple[int, int], SparseVector]
    right: Dict[Tuple[int, int], SparseVector]
    diff: List[SparseVector]

    def __len__(self):
        return len(self.basis)

    def degree(self, m: int) -> int:
        return self.basis.degrees[m]

    def act_left(self, a: int, m: int) -> SparseVector:
        if a == self.algebra.unit:
            return {m: Fraction(1)}
        return self.left.get((a, m), {})

    def act_right(self, m: int, a: int) -> SparseVector:
        if a == self.algebra.unit:
            return {m: Fraction(1)}
        return self.right.get((m, a), {})

    def left_multiply(self, a: SparseVector, m: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for i, x in a.items():
            for k, y in m.items():
                add_into(result, self.act_left(i, k), x * y)
        return result

    def right_multiply(self, m: SparseVector, a: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for k, y in m.items():
            for i, x in a.items():
                add_into(result, self.act_right(k, i), x * y)
        return result

    def d(self, v: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for i, c in v.items():
            add_into(result, self.diff[i], c)
        return result

    @property
    def max_degree(self) -> int:
        return self.basis.max_degree


def regular_bimodule(A: DGAlgebra) -> DGBimodule:
    """A as a bimodule over itself"""
    pairs = [(a, m) for a, m in cartesian(range(len(A)), repeat=2) if A.product(a, m)]
    left = {(a, m): A.product(a, m) for a, m in pairs}
    right = {(a, m): A.product(a, m) for a, m in pairs}
    return DGBimodule(A.name, A, A.basis, left, right, list(A.diff))


def validate_bimodule(M: DGBimodule) -> ValidationReport:
    report = ValidationReport(M.name)
    A, n = M.algebra, len(M)
    an, mn = A.basis.names, M.basis.names
    one = Fraction(1)

    for m in range(n):
        if any(M.degree(k) != M.degree(m) + 1 for k in M.diff[m]):
            report.fail("degree-homogeneity", mn[m])
        if M.d(M.diff[m]):
            report.fail("d^2=0", mn[m])

    for a, m in cartesian(range(len(A)), range(n)):
        ea, em = {a: one}, {m: one}
        if any(M.degree(k) != A.degree(a) + M.degree(m) for k in M.act_left(a, m)):
            report.fail("degree-homogeneity", an[a], mn[m])
        lhs = M.d(M.act_left(a, m))
        rhs = M.left_multiply(A.diff[a], em)
        add_into(rhs, M.left_multiply(ea, M.diff[m]), Fraction(koszul(A.degree(a))))
        if lhs != rhs:
            report.fail("left Leibniz", an[a], mn[m])
        lhs = M.d(M.act_right(m, a))
        rhs = M.right_multiply(M.diff[m], ea)
        add_into(rhs, M.right_multiply(em, A.diff[a]), Fraction(koszul(M.degree(m))))
        if lhs != rhs:
            report.fail("right Leibniz", mn[m], an[a])

    for a, b, m in cartesian(range(len(A)), range(len(A)), range(n)):
        ea, eb, em = {a: one}, {b: one}, {m: one}
        if M.left_multiply(A.product(a, b), em) != M.left_multiply(ea, M.act_left(b, m)):
            report.fail("left associativity", an[a], an[b], mn[m])
        if M.right_multiply(em, A.product(a, b)) != M.right_multiply(M.act_right(m, a), eb):
            report.fail("right associativity", mn[m], an[a], an[b])
        if M.right_multiply(M.act_left(a, m), eb) != M.left_multiply(ea, M.act_right(m, b)):
            report.fail("actions commute", an[a], mn[m], an[b])
    return report


# ===================== MORPHISMS =====================

@dataclass
class AlgebraMorphism:
    """f: source → target on the full basis (images are target vectors)"""
    name: str
    source: DGAlgebra
    target: DGAlgebra
    images: List[SparseVector]

    def apply(self, v: SparseVector) -> SparseVector:
        result: SparseVector = {}
        for i, c in v.items():
            add_into(result, self.images[i], c)
        return result


def identity_morphism(A: DGAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(f"id_{A.name}", A, A, [{i: Fraction(1)} for i in range(len(A))])


def validate_morphism(f: AlgebraMorphism) -> ValidationReport:
    report = ValidationReport(f.name)
    S, T = f.source, f.target
    names = S.basis.names
    if len(f.images) != len(S):
        report.fail("basis coverage", f"{len(f.images)} images for {len(S)} basis elements")
        return report
    for i in range(len(S)):
        if any(T.degree(k) != S.degree(i) for k in f.images[i]):
            report.fail("degree 0", names[i])
        if f.apply(S.diff[i]) != T.d(f.images[i]):
            report.fail("commutes with d", names[i])
    if f.images[S.unit] != T.unit_vector:
        report.fail("unit-preserving", names[S.unit])
    for i, j in cartesian(range(len(S)), repeat=2):
        if f.apply(S.product(i, j)) != T.multiply(f.images[i], f.images[j]):
            report.fail("multiplicative", names[i], names[j])
    return report


def restrict_along(f: AlgebraMorphism) -> DGBimodule:
    """The target algebra regarded as a dg bimodule over the source through f"""
    S, T = f.source, f.target
    left, right = {}, {}
    for a, z in cartesian(range(len(S)), range(len(T))):
        ez = {z: Fraction(1)}
        value = T.multiply(f.images[a], ez)
        if value:
            left[(a, z)] = value
        value = T.multiply(ez, f.images[a])
        if value:
            right[(z, a)] = value
    return DGBimodule(f"{T.name}|{f.name}", S, T.basis, left, right, list(T.diff))


# ===================== CONSTRUCTIONS =====================

def tensor_product(A: DGAlgebra, B: DGAlgebra, name: Optional[str] = None) -> DGAlgebra:
    """Graded tensor product: (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'"""
    pairs = [(i, j) for i in range(len(A)) for j in range(len(B))]
    index = {pair: k for k, pair in enumerate(pairs)}

    right = list(B.basis.names)

    def label(i, j):
        if j == B.unit:
            return A.basis.names[i]
        if i == A.unit:
            return right[j]
        return f"{A.basis.names[i]}{right[j]}"

    names = [label(i, j) for i, j in pairs]
    while len(set(names)) != len(names):
        right = [n if j == B.unit else n + "'" for j, n in enumerate(right)]
        names = [label(i, j) for i, j in pairs]
    degrees = [A.degree(i) + B.degree(j) for i, j in pairs]

    mult: Dict[Tuple[int, int], SparseVector] = {}
    for (i, j), (k, l) in cartesian(pairs, repeat=2):
        sign = koszul(B.degree(j) * A.degree(k))
        value: SparseVector = {}
        for p, x in A.product(i, k).items():
            for q, y in B.product(j, l).items():
                add_into(value, {index[(p, q)]: Fraction(1)}, sign * x * y)
        if value:
            mult[(index[(i, j)], index[(k, l)])] = value

    diff: List[SparseVector] = []
    for i, j in pairs:
        value: SparseVector = {}
        for p, x in A.diff[i].items():
            add_into(value, {index[(p, j)]: Fraction(1)}, x)
        for q, y in B.diff[j].items():
            add_into(value, {index[(i, q)]: Fraction(1)}, koszul(A.degree(i)) * y)
        diff.append(value)

    return DGAlgebra(
        name or f"product({A.name},{B.name})",
        GradedBasis(tuple(names), tuple(degrees)),
        index[(A.unit, B.unit)],
        mult,
        diff,
    )


def point_algebra() -> DGAlgebra:
    """The ground field as a one-dimensional dg algebra"""
    return DGAlgebra("point", GradedBasis(("1",), (0,)), 0, {}, [{}])
