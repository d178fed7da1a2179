"""
Brute-force bar complex against the twisted complexes
"""
from dataclasses import replace
from fractions import Fraction

import pytest

from app.core.errors import NotSimplyConnectedError, WindowError
from app.models.algebra import DGAlgebra, GradedBasis
from app.models.presets import cpn, preset, sphere
from app.services.loops import connection_for
from app.services.model_io import parse_model
from app.services.oracle import (
    BarCochain,
    bar_square_failures,
    cochain_differential,
    comparison_map,
    cup_bruteforce,
    hochschild_dims_bruteforce,
    inclusion_cochain,
    twisting_cochain_check,
    unit_cochain,
)
from app.services.transfer import build_contraction, chen_connection
from app.services.twisted import algebra_complex, cohomology, dualize, module_complex


def twisted_dims(A, window):
    hd, conn = connection_for(A, window)
    return cohomology(algebra_complex(conn, hd), window).dims()


def test_oracle_matches_twisted_complex():
    cases = ((sphere(2), (-4, 3)), (sphere(3), (-4, 4)), (cpn(1), (-4, 3)), (cpn(2), (-3, 5)),
             (preset("product", [sphere(2), sphere(3)]), (-2, 6)))
    for A, window in cases:
        brute = hochschild_dims_bruteforce(A, window)
        assert brute.dims == twisted_dims(A, window), A.name
        assert brute.window == window


def test_oracle_matches_dual_module():
    for A in (sphere(2), sphere(3), cpn(2)):
        window = (-6, 0)
        hd, conn = connection_for(A, window)
        twisted = cohomology(module_complex(conn, dualize(A), hd), window).dims()
        brute = hochschild_dims_bruteforce(A, window, module=dualize(A))
        assert brute.dims == twisted, A.name


def test_oracle_single_thread(sequential):
    A = cpn(2)
    assert hochschild_dims_bruteforce(A, (-3, 4), config=sequential).dims == hochschild_dims_bruteforce(A, (-3, 4)).dims


def test_bar_differential_squares_to_zero():
    for A in (sphere(2), sphere(3), cpn(2)):
        for t in range(-3, 3):
            assert bar_square_failures(A, t) == 0, (A.name, t)


def test_oracle_limits():
    with pytest.raises(WindowError):
        hochschild_dims_bruteforce(sphere(2), (-20, 0))
    with pytest.raises(WindowError):
        hochschild_dims_bruteforce(sphere(2), (2, 1))
    circle = DGAlgebra("circle", GradedBasis(("1", "a"), (0, 1)), 0, {}, [{}, {}])
    with pytest.raises(NotSimplyConnectedError):
        hochschild_dims_bruteforce(circle, (-2, 1))


def test_twisting_cochain_residual_vanishes():
    fake = parse_model("""
    model fake_s2 {
      basis: 1:0, v:2, a:3, b:4;
      unit: 1;
      diff: a -> b;
      mult: v*v = b;
    }
    """)
    for A in (sphere(2), sphere(3), cpn(2), cpn(3), fake):
        hd = build_contraction(A)
        conn = chen_connection(A, hd, 7)
        assert twisting_cochain_check(A, hd, conn).is_zero, A.name


def test_cup_with_unit():
    A = cpn(2)
    unit, omega = unit_cochain(A), inclusion_cochain(A)
    assert cup_bruteforce(A, unit, omega).values == omega.values
    assert cup_bruteforce(A, omega, unit).values == omega.values
    assert cochain_differential(A, unit).is_zero


def test_comparison_map():
    A = cpn(2)
    hd = build_contraction(A)
    conn = chen_connection(A, hd, 6)
    space = conn.space
    assert comparison_map(A, conn, unit_cochain(A)) == space.element({(A.unit, ()): 1})
    assert comparison_map(A, conn, inclusion_cochain(A)) == space.element(conn.omega_chain())


def test_twisting_cochain_detects_a_wrong_eth():
    A = cpn(2)
    conn = chen_connection(A, build_contraction(A), 5)
    broken = replace(conn, eth={0: {}, 1: {}})
    residual = twisting_cochain_check(A, build_contraction(A), broken)
    assert not residual.is_zero
    # h·h = h2 is no longer cancelled on the word x1 x1
    assert residual.values[(0, 0)] == {2: Fraction(-1)}


def test_cup_is_associative():
    A = cpn(3)
    f = BarCochain(1, {(1,): {1: Fraction(1)}})
    g = BarCochain(-1, {(1,): {0: Fraction(1)}})
    k = BarCochain(-1, {(2,): {1: Fraction(1)}})
    left = cup_bruteforce(A, cup_bruteforce(A, f, g), k)
    right = cup_bruteforce(A, f, cup_bruteforce(A, g, k))
    assert left.values == right.values
    assert left.values == {(1, 1, 2): {2: Fraction(-1)}}


def test_comparison_map_is_multiplicative_on_sphere2():
    A = sphere(2)
    conn = chen_connection(A, build_contraction(A), 4)
    space = conn.space
    f = inclusion_cochain(A)
    g = BarCochain(-1, {(1,): {0: Fraction(1)}})
    for left, right in ((f, g), (g, f)):
        cup = comparison_map(A, conn, cup_bruteforce(A, left, right))
        product = space.mul(comparison_map(A, conn, left).chain(), comparison_map(A, conn, right).chain())
        assert cup == space.element(product)
        assert cup == space.element({(1, (0, 0)): Fraction(1)})
