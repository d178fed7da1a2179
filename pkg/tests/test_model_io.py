"""
Model language, morphism files, element text, model specs and JSON models
"""
import json
import os
from fractions import Fraction

import pytest

from app.core.errors import (
    CarrierMismatchError,
    InputError,
    ModelSyntaxError,
    ModelValidationError,
    MorphismError,
    UnknownGeneratorError,
    UnknownPresetError,
)
from app.models.element import module_space
from app.models.presets import cpn, preset, sphere
from app.services.model_io import (
    format_model,
    load_model_spec,
    load_morphism,
    model_from_json,
    model_to_document,
    parse_element,
    parse_model,
    parse_model_spec,
    parse_morphism,
)
from app.services.transfer import build_contraction, chen_connection
from app.services.twisted import dualize


def test_parse_fixtures(models_dir):
    s2 = load_model_spec(os.path.join(models_dir, "s2.dgm"))
    assert s2.structurally_equal(sphere(2))
    cp2 = load_model_spec(os.path.join(models_dir, "cp2.dgm"))
    assert cp2.name == "cp2"
    assert cp2.structurally_equal(cpn(2))
    cp3 = load_model_spec(os.path.join(models_dir, "cp3.dgm"))
    assert cp3.structurally_equal(cpn(3))
    product = load_model_spec(os.path.join(models_dir, "s2xs3.json"))
    assert product.basis.names == ("1", "v", "w", "vw")
    assert product.is_graded_commutative()


def test_differential_and_rational_coefficients():
    A = parse_model("""
    # a contractible pair on top of S^2
    model lumpy {
      basis: 1:0, v:2, a:3, b:4;
      unit: 1;
      diff: a -> 1/2*b;
      mult: v*v = -3*b;
    }
    """)
    assert A.diff[2] == {3: Fraction(1, 2)}
    assert A.mult[(1, 1)] == {3: Fraction(-3)}


def test_unit_required():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("model m {\n  basis: 1:0, v:2;\n}")
    assert "unit required" in str(info.value)
    assert info.value.line == 1


def test_basis_required():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("model m { unit: 1; }")
    assert "basis required" in info.value.message


def test_syntax_error_position():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("model m {\n  basis: 1:0, v:2;\n  unit 1;\n}")
    assert info.value.line == 3
    assert info.value.column is not None


def test_semantic_errors():
    with pytest.raises(ModelSyntaxError):
        parse_model("model m { basis: 1:0, v:2, v:4; unit: 1; }")
    with pytest.raises(ModelSyntaxError):
        parse_model("model m { basis: 1:0, v:2; unit: 1; mult: v*w = v; }")
    with pytest.raises(ModelSyntaxError):
        parse_model("model m { basis: 1:0, e:0, v:2; unit: e; }")
    with pytest.raises(ModelSyntaxError):
        parse_model("model m { basis: 1:0, 2:2; unit: 1; }")


def test_invalid_algebra_is_rejected():
    with pytest.raises(ModelValidationError) as info:
        parse_model("model m { basis: 1:0, v:2, w:3; unit: 1; diff: v -> w, w -> v; }")
    assert "d^2=0" in info.value.report.axioms_failed()


def test_round_trip():
    for A in (sphere(2), cpn(3), preset("product", [sphere(2), sphere(3)])):
        again = parse_model(format_model(A))
        assert again.structurally_equal(A), A.name


def test_json_documents():
    A = cpn(2)
    doc = model_to_document(A)
    assert doc.unit == "1"
    assert model_from_json(doc.model_dump_json()).structurally_equal(A)
    with pytest.raises(ModelSyntaxError):
        model_from_json("{not json")
    with pytest.raises(ModelSyntaxError):
        model_from_json(json.dumps({"name": "m", "basis": [{"name": "1", "degree": 0}], "unit": "u"}))


def test_morphism_is_expanded_multiplicatively(models_dir):
    f = load_morphism(os.path.join(models_dir, "linear.dgmap"), cpn(2), cpn(1))
    assert f.name == "linear"
    assert f.images == [{0: Fraction(1)}, {1: Fraction(1)}, {}]

    g = parse_morphism("morphism squash { }", cpn(2), preset("point"))
    assert g.images == [{0: Fraction(1)}, {}, {}]


def test_morphism_errors():
    with pytest.raises(MorphismError):
        parse_morphism("morphism bad { h -> h2 }", cpn(2), cpn(2))
    with pytest.raises(MorphismError) as info:
        parse_morphism("morphism partial { }", sphere(2), sphere(2))
    assert info.value.axiom == "basis coverage"
    with pytest.raises(ModelSyntaxError):
        parse_morphism("morphism bad { q -> h }", cpn(2), cpn(1))
    with pytest.raises(InputError):
        load_morphism("/nonexistent/map.dgmap", cpn(2), cpn(1))


def test_parse_element():
    A = cpn(2)
    conn = chen_connection(A, build_contraction(A), 3)
    space = conn.space
    t = parse_element(space, "2*h2@x1.x2 - h + 1/3")
    assert t.chain() == {
        (2, (0, 1)): Fraction(2),
        (1, ()): Fraction(-1),
        (0, ()): Fraction(1, 3),
    }
    assert parse_element(space, "h@x1 - h@x1").is_zero
    with pytest.raises(UnknownGeneratorError):
        parse_element(space, "h@y")
    with pytest.raises(CarrierMismatchError):
        parse_element(space, "v@x1")
    with pytest.raises(CarrierMismatchError):
        parse_element(module_space(dualize(A), conn.gens), "1@x1")
    with pytest.raises(ModelSyntaxError):
        parse_element(space, "h@@x1")


def test_model_specs():
    assert parse_model_spec("cpn:2") == ("cpn", (2,))
    assert parse_model_spec("point") == ("point", ())
    assert parse_model_spec("product(sphere:2,point)") == ("product", (("sphere", (2,)), ("point", ())))
    assert load_model_spec("product(sphere:2, sphere:3)").basis.degrees == (0, 3, 2, 5)
    with pytest.raises(UnknownPresetError):
        parse_model_spec("cpn:")
    with pytest.raises(UnknownPresetError):
        load_model_spec("klein:2")
    with pytest.raises(InputError):
        load_model_spec("/nonexistent/model.dgm")
