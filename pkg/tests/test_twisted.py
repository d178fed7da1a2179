"""
Twisted complexes, their cohomology and the Poincaré comparison map
"""
from fractions import Fraction

import pytest

from app.core.config import EngineConfig
from app.core.errors import (
    DegeneratePairingError,
    NotClosedError,
    ProductOutsideWindow,
    TruncationOverflow,
    WindowError,
)
from app.models.algebra import DGAlgebra, GradedBasis
from app.models.presets import cpn, sphere, sphere_ring_fixture
from app.services.loops import connection_for
from app.services.model_io import parse_element, parse_model, parse_named
from app.services.transfer import build_contraction, chen_connection
from app.services.twisted import (
    algebra_complex,
    check_poincare,
    class_coordinates,
    cohomology,
    complete_representative,
    d_squared_failures,
    dualize,
    euler_check,
    is_closed,
    module_complex,
    parse_window,
    ring_structure,
    top_class_trace,
)


def hochschild(A, window, config=None):
    hd, conn = connection_for(A, window)
    return cohomology(algebra_complex(conn, hd), window, config)


def test_parse_window():
    assert parse_window("-6..4") == (-6, 4)
    assert parse_window((1, 2)) == (1, 2)
    assert parse_window("0..0") == (0, 0)
    for bad in ("3", "4..1", "a..b", "1..2..3"):
        with pytest.raises(WindowError):
            parse_window(bad)


def test_sphere2_hochschild():
    table = hochschild(sphere(2), (-6, 4))
    expected = {d: 1 for d in range(-6, 3)}
    expected.update({3: 0, 4: 0})
    assert table.dims() == expected


def test_sphere3_hochschild():
    table = hochschild(sphere(3), (-6, 4))
    expected = {d: 1 for d in range(-6, 2)}
    expected.update({2: 0, 3: 1, 4: 0})
    assert table.dims() == expected


def test_cpn_hochschild():
    for n, lo in ((1, -5), (2, -5), (3, -6)):
        table = hochschild(cpn(n), (lo, 2 * n + 1))
        expected = {d: 1 for d in range(lo, 2 * n + 1)}
        expected[2 * n + 1] = 0
        assert table.dims() == expected, n


def test_cp1_agrees_with_sphere2():
    assert hochschild(cpn(1), (-4, 3)).dims() == hochschild(sphere(2), (-4, 3)).dims()


def test_gauge_invariance():
    fake = parse_model("""
    model fake_s2 {
      basis: 1:0, v:2, a:3, b:4;
      unit: 1;
      diff: a -> b;
      mult: v*v = b;
    }
    """)
    assert hochschild(fake, (-4, 4)).dims() == hochschild(sphere(2), (-4, 4)).dims()


def test_threads_do_not_change_results(sequential):
    A = cpn(2)
    assert hochschild(A, (-4, 4), sequential).dims() == hochschild(A, (-4, 4)).dims()


def test_d_squared_and_euler():
    for A in (sphere(2), sphere(3), cpn(2)):
        hd, conn = connection_for(A, (-5, 4))
        cx = algebra_complex(conn, hd)
        assert d_squared_failures(cx, (-5, 4)) == [], A.name
        table = cohomology(cx, (-5, 4))
        chains, homology = euler_check(table)
        assert chains == homology, A.name


def test_connection_is_extended_on_demand():
    A = sphere(2)
    hd = build_contraction(A)
    cx = algebra_complex(chen_connection(A, hd, 2), hd)
    table = cohomology(cx, (-6, 2))
    assert table.complex.conn.max_len >= 9
    assert table.dims() == {d: 1 for d in range(-6, 3)}


def test_truncation_overflow():
    A = sphere(2)
    hd = build_contraction(A)
    short = chen_connection(A, hd, 2)
    with pytest.raises(TruncationOverflow):
        cohomology(algebra_complex(short, hd), (-6, 2), EngineConfig(max_word_length_cap=3))
    # without homotopy data the connection cannot be extended
    with pytest.raises(TruncationOverflow):
        cohomology(algebra_complex(short), (-6, 2))


def test_class_coordinates_on_sphere2():
    table = hochschild(sphere(2), (-6, 2))
    space = table.complex.space
    exact = parse_element(space, "v@x.x")
    assert is_closed(table, exact)
    assert class_coordinates(table, exact) == {}
    odd = parse_element(space, "1@x")
    assert not is_closed(table, odd)
    with pytest.raises(NotClosedError):
        class_coordinates(table, odd)
    with pytest.raises(ProductOutsideWindow):
        class_coordinates(table, parse_element(space, "1@x.x.x.x.x.x.x.x"))
    tau = parse_element(space, "1@x.x")
    assert complete_representative(table, tau) == tau
    assert len(class_coordinates(table, tau)) == 1


def test_sphere2_ring():
    table = hochschild(sphere(2), (-6, 2))
    ring = ring_structure(table, parse_named(table.complex.space, sphere_ring_fixture(2)))
    assert ring.degrees == {"nu": 2, "mu": 1, "tau": -2}
    assert ring.products[("mu", "mu")] == {}
    assert ring.products[("nu", "tau")] == {}
    # degrees 3 and 4 lie above the top carrier degree, where the complex is zero
    assert ring.products[("nu", "mu")] == {}
    assert ring.products[("nu", "nu")] == {}
    assert ring.outside == []
    assert ring.vanishes(["nu", "nu", "tau"])
    assert ring.products[("mu", "tau")]
    assert ring.products[("mu", "tau")] == ring.products[("tau", "mu")]
    assert ring.associativity_failures == []
    assert ring.dependent == []
    assert ring.describe(2, ring.coordinates["nu"]) == "nu"
    assert ring.describe(2, {k: 3 * c for k, c in ring.coordinates["nu"].items()}) == "3*nu"
    assert ring.describe(0, {}) == "0"


def test_dual_module_complex():
    A = sphere(3)
    hd, conn = connection_for(A, (-8, 0))
    cx = module_complex(conn, dualize(A), hd)
    assert d_squared_failures(cx, (-8, 0)) == []
    table = cohomology(cx, (-8, 0))
    assert sum(table.dims().values()) > 0


def test_poincare_map():
    for A, n in ((sphere(2), 2), (sphere(3), 3), (cpn(2), 4)):
        hd, conn = connection_for(A, (-4, n))
        source = algebra_complex(conn, hd)
        target = module_complex(conn, dualize(A), hd)
        result = check_poincare(source, target, n, (-4, n))
        assert result.chain_map_failures == [], A.name
        assert result.ok, A.name


def test_degenerate_pairing():
    A = DGAlgebra("two_tops", GradedBasis(("1", "a", "b"), (0, 2, 2)), 0, {}, [{}, {}, {}])
    with pytest.raises(DegeneratePairingError):
        top_class_trace(A, 2)
    assert top_class_trace(cpn(2), 4) == {2: Fraction(1)}


def test_products_below_the_window_stay_outside():
    table = hochschild(sphere(2), (-3, 2))
    ring = ring_structure(table, parse_named(table.complex.space, sphere_ring_fixture(2)))
    assert ring.products[("tau", "tau")] is None
    assert ("tau", "tau") in ring.outside
    with pytest.raises(ProductOutsideWindow):
        ring.evaluate(["tau", "tau"])


def test_acceptance_windows():
    s3 = hochschild(sphere(3), (-8, 4)).dims()
    assert s3 == {d: (0 if d in (2, 4) else 1) for d in range(-8, 5)}
    cp3 = hochschild(cpn(3), (-10, 6)).dims()
    assert cp3 == {d: 1 for d in range(-10, 7)}
