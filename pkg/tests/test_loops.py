"""
Free and based loop homology, the Chas-Sullivan ring and brane topology
"""
from fractions import Fraction
from itertools import product as cartesian

import pytest
from sympy import Matrix

from app.core.errors import MorphismError
from app.models.algebra import AlgebraMorphism, identity_morphism
from app.models.presets import cpn, cpn_brane_fixture, cpn_ring_fixture, preset, sphere, sphere_ring_fixture
from app.services.loops import (
    based_loop_ring,
    brane_homology,
    chas_sullivan_ring,
    connection_for,
    constant_loops_map,
    intersection_report,
    loop_homology,
    require_morphism,
)
from app.services.model_io import parse_morphism, parse_named
from app.services.twisted import brane_complex, word_complex


def test_free_loops_sphere3():
    report = loop_homology(sphere(3), 3, (-6, 3))
    # H_k(LS^3) = H^{3-k}
    assert report.betti[0] == 1
    assert report.betti[3] == 1
    assert report.betti[1] == 0
    assert report.shifted[-3] == 1
    assert report.nonzero_degrees()[:3] == [0, 2, 3]


def test_dual_route_agrees():
    for A, n in ((sphere(2), 2), (sphere(3), 3), (cpn(2), 4)):
        via_algebra = loop_homology(A, n, (-4, n))
        via_dual = loop_homology(A, n, (-4, n), route="dual")
        assert via_algebra.betti == via_dual.betti, A.name


def test_unknown_route():
    with pytest.raises(ValueError):
        loop_homology(sphere(2), 2, (-2, 2), route="sideways")


def test_sphere3_ring():
    A = sphere(3)
    hd, conn = connection_for(A, (-6, 3))
    named = parse_named(conn.space, sphere_ring_fixture(3))
    report = loop_homology(A, 3, (-6, 3), named, conn=conn, hd=hd)
    ring = report.ring
    assert ring.degrees == {"nu": 3, "x": -2}
    assert ring.products[("nu", "nu")] == {}
    assert ring.products[("nu", "x")] == ring.products[("x", "nu")]
    assert ring.describe(-4, ring.products[("x", "x")]) == "xx"
    assert ring.associativity_failures == []


def test_cp2_ring():
    A = cpn(2)
    hd, conn = connection_for(A, (-8, 4))
    named = parse_named(conn.space, cpn_ring_fixture(2))
    ring = loop_homology(A, 4, (-8, 4), named, conn=conn, hd=hd).ring
    assert ring.degrees == {"h": 2, "mu": 1, "nu": -4}
    assert ring.dependent == []
    assert ring.associativity_failures == []
    # h·h is the class of h2⊗1, which is not exact
    assert ring.products[("h", "h")]
    assert ring.describe(4, ring.products[("h", "h")]) == "hh"


def test_based_loops_sphere3():
    report = based_loop_ring(sphere(3), (-6, 0))
    assert report.betti == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1, 5: 0, 6: 1}


def test_based_loops_cp2():
    report = based_loop_ring(cpn(2), (-9, 0))
    nonzero = {0, 1, 4, 5, 8, 9}
    assert report.betti == {k: (1 if k in nonzero else 0) for k in range(10)}


def test_pontrjagin_ring_sphere3():
    A = sphere(3)
    hd, conn = connection_for(A, (-6, 0))
    named = parse_named(word_complex(conn).space, {"x": "1@x"})
    ring = based_loop_ring(A, (-6, 0), named, conn=conn, hd=hd).ring
    assert ring.degrees == {"x": -2}
    assert ring.products[("x", "x")]
    assert not ring.vanishes(["x", "x", "x"])


def test_constant_loops():
    A = sphere(2)
    report = loop_homology(A, 2, (-2, 2))
    assert constant_loops_map(report.table, {1: Fraction(1)})
    assert constant_loops_map(report.table, {0: Fraction(1)})


def linear_cp1():
    return parse_morphism("morphism linear { h -> h }", cpn(2), cpn(1))


def test_brane_cp1_in_cp2():
    f = linear_cp1()
    report = brane_homology(cpn(2), cpn(1), 2, f, (-8, 4))
    shifted = {-d: dim for d, dim in report.table.dims().items()}
    assert report.table.dims() == {d: (0 if d > 2 else 1) for d in range(-8, 5)}
    assert report.shifted == dict(sorted(shifted.items()))
    # H_k(L_f) = H^{p-k}
    assert report.betti[0] == 1
    assert report.betti[-2] == 0


def test_brane_along_identity_is_free_loops():
    A = sphere(3)
    free = loop_homology(A, 3, (-5, 3))
    brane = brane_homology(A, A, 3, identity_morphism(A), (-5, 3))
    assert brane.betti == free.betti


def test_brane_rejects_bad_morphism():
    broken = AlgebraMorphism("zero", cpn(2), cpn(1), [{}, {}, {}])
    with pytest.raises(MorphismError) as info:
        require_morphism(broken)
    assert info.value.axiom == "unit-preserving"
    with pytest.raises(MorphismError):
        brane_homology(cpn(2), cpn(2), 2, linear_cp1(), (-2, 2))


def test_intersection_cp1_in_cp2():
    A_M, A_Z = cpn(2), cpn(1)
    f = linear_cp1()
    window = (-8, 4)
    hd, conn = connection_for(A_M, window)
    loop_named = parse_named(conn.space, cpn_ring_fixture(2))
    loops = loop_homology(A_M, 4, window, loop_named, conn=conn, hd=hd)
    brane_named = parse_named(brane_complex(conn, f).space, cpn_brane_fixture(1, 2))
    brane = brane_homology(A_M, A_Z, 2, f, window, brane_named, conn=conn, hd=hd)

    report = intersection_report(f, loops.ring, brane.ring)
    assert report.images["h"] == "h"
    assert report.images["nu"] == "nu"
    assert report.images["mu"] == "hx"
    assert report.ring_map_failures == []


CP2_LETTERS = {"a": -1, "b": -3}
CP2_ETH = {"b": {"aa": -1}}
CP3_LETTERS = {"a": -1, "b": -3, "c": -5}
CP3_ETH = {"b": {"aa": -1}, "c": {"ab": -1, "ba": -1}}


def _based_dims_by_hand(letters, eth_of, lo):
    """Ranks of ð on words in the given letters, ð extended as a signed derivation, with sympy"""
    def words(d):
        found = []
        for length in range(0, -d + 1):
            for w in cartesian(sorted(letters), repeat=length):
                if sum(letters[c] for c in w) == d:
                    found.append("".join(w))
        return found

    def eth(w):
        image, prefix = {}, 0
        for j, c in enumerate(w):
            for replacement, coeff in eth_of.get(c, {}).items():
                new = w[:j] + replacement + w[j + 1:]
                image[new] = image.get(new, 0) + coeff * (-1) ** (prefix % 2)
            prefix += letters[c]
        return image

    def rank(d):
        source, target = words(d), words(d + 1)
        if not source or not target:
            return 0
        rows = {w: i for i, w in enumerate(target)}
        matrix = Matrix.zeros(len(target), len(source))
        for j, w in enumerate(source):
            for v, c in eth(w).items():
                matrix[rows[v], j] += c
        return matrix.rank()

    return {d: len(words(d)) - rank(d) - rank(d - 1) for d in range(lo, 1)}


def test_based_loops_cpn_against_hand_computation():
    assert based_loop_ring(cpn(2), (-8, 0)).table.dims() == _based_dims_by_hand(CP2_LETTERS, CP2_ETH, -8)
    assert based_loop_ring(cpn(3), (-8, 0)).table.dims() == _based_dims_by_hand(CP3_LETTERS, CP3_ETH, -8)


def test_brane_over_a_point_is_based_loops():
    A = cpn(2)
    squash = parse_morphism("morphism squash { }", A, preset("point"))
    brane = brane_homology(A, preset("point"), 0, squash, (-9, 0))
    assert brane.shifted == based_loop_ring(A, (-9, 0)).betti


def test_chas_sullivan_ring_sphere3():
    A = sphere(3)
    window = (-6, 4)
    hd, conn = connection_for(A, window)
    ring = chas_sullivan_ring(A, 3, window, parse_named(conn.space, sphere_ring_fixture(3)), conn=conn)
    assert ring.degrees == {"nu": 3, "x": -2}
    assert ring.products[("nu", "nu")] == {}
    assert ring.outside == []
    assert ring.describe(-4, ring.products[("x", "x")]) == "xx"


def test_brane_ring_cp1_in_cp2():
    A_M, A_Z = cpn(2), cpn(1)
    window = (-8, 4)
    hd, conn = connection_for(A_M, window)
    named = parse_named(brane_complex(conn, linear_cp1()).space, cpn_brane_fixture(1, 2))
    brane = brane_homology(A_M, A_Z, 2, linear_cp1(), window, named, conn=conn, hd=hd)
    entries = {(a, b): value for a, b, value in brane.ring_entries}
    # 1⊗x1x1 is cohomologous to 2h⊗(x1x2 + x2x1) - d(1⊗x2) ~ 3h⊗(x1x2 + x2x1), not zero
    assert entries[("x", "x")] == "3*hnu"
    assert entries[("h", "h")] == "0"
    assert brane.ring.associativity_failures == []


def test_intersection_cp1_in_cp3():
    A_M, A_Z = cpn(3), cpn(1)
    f = parse_morphism("morphism linear { h -> h }", A_M, A_Z)
    window = (-8, 6)
    hd, conn = connection_for(A_M, window)
    loops = loop_homology(A_M, 6, window, parse_named(conn.space, cpn_ring_fixture(3)), conn=conn, hd=hd)
    brane_named = parse_named(brane_complex(conn, f).space, cpn_brane_fixture(1, 3))
    brane = brane_homology(A_M, A_Z, 2, f, window, brane_named, conn=conn, hd=hd)

    report = intersection_report(f, loops.ring, brane.ring)
    assert report.images["h"] == "h"
    assert report.images["mu"] == "hx"
    assert report.images["nu"] != "0"
    assert report.ring_map_failures == []


def test_rescaled_morphism_gives_the_identity_brane():
    A = cpn(2)
    doubled = parse_morphism("morphism doubled { h -> 2*h }", A, A)
    assert doubled.images[2] == {2: Fraction(4)}
    window = (-6, 4)
    assert brane_homology(A, A, 4, doubled, window).betti == brane_homology(A, A, 4, identity_morphism(A), window).betti
