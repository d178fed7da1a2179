from fractions import Fraction
from typing import Dict, Sequence

from ..core.errors import NotSimplyConnectedError, UnknownPresetError
from .algebra import DGAlgebra, GradedBasis, point_algebra, tensor_product


def sphere(n: int) -> DGAlgebra:
    """k[v]/(v^2), |v| = n"""
    if n < 2:
        raise NotSimplyConnectedError([f"[v] in degree {n} (sphere:{n})"])
    return DGAlgebra(f"sphere:{n}", GradedBasis(("1", "v"), (0, n)), 0, {}, [{}, {}])


def power_name(a: int) -> str:
    return "1" if a == 0 else ("h" if a == 1 else f"h{a}")


def cpn(n: int) -> DGAlgebra:
    """k[h]/(h^{n+1}), |h| = 2"""
    if n < 1:
        raise UnknownPresetError(f"cpn:{n} needs n >= 1")
    names = tuple(power_name(a) for a in range(n + 1))
    degrees = tuple(2 * a for a in range(n + 1))
    mult = {
        (a, b): {a + b: Fraction(1)}
        for a in range(1, n + 1)
        for b in range(1, n + 1)
        if a + b <= n
    }
    return DGAlgebra(f"cpn:{n}", GradedBasis(names, degrees), 0, mult, [{} for _ in names])


# ===================== PRESETS =====================
PRESETS = {
    "point": {
        "params": 0,
        "description": "the ground field; loops on a point",
        "build": lambda: point_algebra(),
    },
    "sphere": {
        "params": 1,
        "description": "sphere:n, k[v]/(v^2) with |v| = n >= 2",
        "build": sphere,
    },
    "cpn": {
        "params": 1,
        "description": "cpn:n, k[h]/(h^{n+1}) with |h| = 2",
        "build": cpn,
    },
    "product": {
        "params": 2,
        "description": "product(a,b), graded tensor product of two models",
        "build": lambda a, b: tensor_product(a, b, f"product({a.name},{b.name})"),
    },
}


def preset(name: str, params: Sequence = ()) -> DGAlgebra:
    info = PRESETS.get(name)
    if info is None:
        raise UnknownPresetError(f"unknown preset '{name}' (known: {', '.join(PRESETS)})")
    if len(params) != info["params"]:
        raise UnknownPresetError(f"preset '{name}' takes {info['params']} parameter(s), got {len(params)}")
    return info["build"](*params)


def get_presets_menu() -> str:
    """Return formatted list of the preset models"""
    lines = ["=" * 50, "📋 Preset models:", "=" * 50]
    for name, info in PRESETS.items():
        lines.append(f"  {name:8s} {info['description']}")
    lines.append("=" * 50)
    return "\n".join(lines)


# ===================== RING FIXTURES =====================

def _generator(n_gens: int, i: int) -> str:
    return "x" if n_gens == 1 else f"x{i}"


def sphere_ring_fixture(n: int) -> Dict[str, str]:
    """Leading terms of the named loop-homology generators of sphere:n"""
    if n % 2:
        return {"nu": "v", "x": "1@x"}
    return {"nu": "v", "mu": "v@x", "tau": "1@x.x"}


def cpn_ring_fixture(n: int) -> Dict[str, str]:
    """h ~ h⊗1, mu ~ Σ i h^i⊗x_i, nu ~ Σ_{i+j=n+1} 1⊗x_i x_j"""
    mu = " + ".join(
        (f"{i}*" if i > 1 else "") + f"{power_name(i)}@{_generator(n, i)}" for i in range(1, n + 1)
    )
    nu = " + ".join(f"1@{_generator(n, i)}.{_generator(n, n + 1 - i)}" for i in range(1, n + 1))
    return {"h": "h", "mu": mu, "nu": nu}


def cpn_brane_fixture(m: int, n: int) -> Dict[str, str]:
    """Named classes of the brane cpn:m -> cpn:n: h, x ~ 1⊗x_1 and nu as on cpn:n"""
    return {"h": "h", "x": f"1@{_generator(n, 1)}", "nu": cpn_ring_fixture(n)["nu"]}


def ring_fixture(name: str, params: Sequence[int]) -> Dict[str, str]:
    if name == "sphere":
        return sphere_ring_fixture(params[0])
    if name == "cpn":
        return cpn_ring_fixture(params[0])
    return {}


def based_fixture(name: str, params: Sequence[int]) -> Dict[str, str]:
    """The Pontrjagin generator of a sphere: the single letter x"""
    return {"x": "1@x"} if name == "sphere" else {}


def brane_fixture(model: tuple, sub: tuple) -> Dict[str, str]:
    if model[0] == "cpn" and sub[0] == "cpn":
        return cpn_brane_fixture(sub[1][0], model[1][0])
    return {}
