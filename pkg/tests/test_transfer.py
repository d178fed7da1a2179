"""
Contraction onto cohomology and the induced Chen connection (ω, ð)
"""
from dataclasses import replace
from fractions import Fraction

import pytest

from app.core.errors import ModelValidationError, NotSimplyConnectedError
from app.models.algebra import DGAlgebra, GradedBasis
from app.models.presets import cpn, sphere
from app.services.model_io import parse_model
from app.services.transfer import (
    build_contraction,
    chen_connection,
    check_contraction,
    eth_in_square_ideal,
    eth_square,
    extend_connection,
    mc_residual,
)

FAKE_SPHERE = """
model fake_s2 {
  basis: 1:0, v:2, a:3, b:4;
  unit: 1;
  diff: a -> b;
  mult: v*v = b;
}
"""


def test_contraction_classes_unit_first():
    hd = build_contraction(cpn(2))
    assert hd.class_degrees == [0, 2, 4]
    assert hd.representatives[0] == {0: Fraction(1)}
    assert hd.reduced_classes == [1, 2]
    assert check_contraction(hd) == []


def test_contraction_with_homotopy():
    A = parse_model(FAKE_SPHERE)
    hd = build_contraction(A)
    a, b = A.basis.index("a"), A.basis.index("b")
    assert hd.class_degrees == [0, 2]
    assert hd.h({b: Fraction(1)}) == {a: Fraction(1)}
    assert hd.p({b: Fraction(1)}) == {}
    assert check_contraction(hd) == []
    assert check_contraction(build_contraction(A, pivot_order="highest")) == []


def test_contraction_rejects_bad_input():
    with pytest.raises(ValueError):
        build_contraction(cpn(1), pivot_order="middle")
    bad = DGAlgebra("bad", GradedBasis(("1", "a", "b"), (0, 2, 3)), 0, {}, [{}, {2: Fraction(1)}, {1: Fraction(1)}])
    with pytest.raises(ModelValidationError):
        build_contraction(bad)


def test_cp2_connection():
    A = cpn(2)
    conn = chen_connection(A, build_contraction(A), 6)
    assert conn.gens.names == ("x1", "x2")
    assert conn.gens.degrees == (-1, -3)
    # ð(x1) = 0, ð(x2) = -x1 x1
    assert conn.eth[0] == {}
    assert conn.eth[1] == {(0, 0): Fraction(-1)}
    # ω = h⊗x1 + h2⊗x2 and nothing longer
    assert conn.omega[1] == {(1, (0,)): Fraction(1), (2, (1,)): Fraction(1)}
    assert all(not conn.omega[k] for k in range(2, 7))


def test_cp3_eth_is_the_cup_coproduct():
    A = cpn(3)
    conn = chen_connection(A, build_contraction(A), 8)
    assert conn.eth[0] == {}
    assert conn.eth[1] == {(0, 0): Fraction(-1)}
    assert conn.eth[2] == {(0, 1): Fraction(-1), (1, 0): Fraction(-1)}


def test_sphere_connection_is_flat():
    for n in (2, 3, 4):
        A = sphere(n)
        conn = chen_connection(A, build_contraction(A), 8)
        assert conn.gens.degrees == (1 - n,)
        assert conn.eth == {0: {}}
        assert conn.omega[1] == {(1, (0,)): Fraction(1)}
        assert mc_residual(A, conn).is_zero


def test_gauge_term_from_homotopy():
    A = parse_model(FAKE_SPHERE)
    conn = chen_connection(A, build_contraction(A), 6)
    a = A.basis.index("a")
    # ω_2 = -h(v⊗x · v⊗x) = -a⊗x x
    assert conn.omega[2] == {(a, (0, 0)): Fraction(-1)}
    assert conn.eth == {0: {}}
    assert mc_residual(A, conn).is_zero


def test_residual_detects_a_flipped_gauge_term():
    A = parse_model(FAKE_SPHERE)
    conn = chen_connection(A, build_contraction(A), 6)
    a, b = A.basis.index("a"), A.basis.index("b")
    flipped = replace(conn, omega={**conn.omega, 2: {(a, (0, 0)): Fraction(1)}})
    # d(a⊗xx) and (v⊗x)(v⊗x) now add up instead of cancelling
    assert mc_residual(A, flipped).chain() == {(b, (0, 0)): Fraction(2)}


def test_flatness_identities():
    for A in (cpn(2), cpn(3), sphere(3), parse_model(FAKE_SPHERE)):
        conn = chen_connection(A, build_contraction(A), 7)
        assert mc_residual(A, conn).is_zero, A.name
        assert all(not p for p in eth_square(conn).values()), A.name
        assert eth_in_square_ideal(conn), A.name


def test_extend_matches_direct_computation():
    A = cpn(3)
    hd = build_contraction(A)
    short = chen_connection(A, hd, 4)
    extended = extend_connection(short, hd, 9)
    direct = chen_connection(A, hd, 9)
    assert extended.max_len == 9
    assert extended.omega == direct.omega
    assert extended.eth == direct.eth
    assert extend_connection(direct, hd, 5) is direct


def test_not_simply_connected():
    circle = DGAlgebra("circle", GradedBasis(("1", "a"), (0, 1)), 0, {}, [{}, {}])
    with pytest.raises(NotSimplyConnectedError) as info:
        chen_connection(circle, build_contraction(circle), 3)
    assert info.value.classes == ("[a]",)


def test_max_len_must_be_positive():
    A = sphere(2)
    with pytest.raises(ValueError):
        chen_connection(A, build_contraction(A), 0)
