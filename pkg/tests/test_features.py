import json

import pytest

from src.app.schemas.error import SchemaMismatchError
from src.app.schemas.metrics import ClassMetrics, ClassType, MethodMetrics
from src.app.services.feature_service import FEATURE_COUNT, FeatureService, feature_service


def test_schema_has_68_columns_in_canonical_order():
    names = feature_service.schema.names

    assert len(names) == FEATURE_COUNT == 68
    assert names[0] == "method_CBO"
    assert names[22] == "method_NOSI"
    assert names[23] == "class_CBO"
    assert names[60] == "class_visibleFieldsQty"
    assert names[61:] == [
        "constructor_False",
        "constructor_True",
        "type_class",
        "type_inner_class",
        "type_interface",
        "type_enum_type",
        "type_anonymous",
    ]


def test_schema_has_no_exception_handling_feature():
    for name in feature_service.schema.names:
        assert "try" not in name.lower()
        assert "catch" not in name.lower()


def test_schema_hash_depends_on_version_and_order():
    names = feature_service.schema.names

    assert FeatureService.build_schema(1).schema_hash == feature_service.schema.schema_hash
    assert FeatureService.build_schema(2).schema_hash != feature_service.schema.schema_hash
    assert FeatureService.hash_names(list(reversed(names)), 1) != feature_service.schema.schema_hash


def test_assemble_features_encodes_one_hots():
    method = MethodMetrics(WMC=3, SLOC=12, isConstructor=True)
    cls = ClassMetrics(DIT=2, WMC=9, classType=ClassType.INNER_CLASS)

    vector = feature_service.assemble_features(method, cls, True, ("A.java", "p.A.B", "B()"))
    values = dict(zip(feature_service.schema.names, vector.values))

    assert len(vector.values) == 68
    assert values["method_WMC"] == 3.0
    assert values["method_SLOC"] == 12.0
    assert values["class_DIT"] == 2.0
    assert values["class_WMC"] == 9.0
    assert (values["constructor_False"], values["constructor_True"]) == (0.0, 1.0)
    assert [values[f"type_{kind.value}"] for kind in ClassType] == [0.0, 1.0, 0.0, 0.0, 0.0]
    assert vector.label is True
    assert vector.identity == ("A.java", "p.A.B", "B()")


def test_categorical_mask_and_scope():
    mask = feature_service.categorical_mask()

    assert sum(mask) == 7
    assert mask[-7:] == [True] * 7
    assert feature_service.scope_of("method_RFC") == "method"
    assert feature_service.scope_of("class_LCOM") == "class"
    assert feature_service.scope_of("type_enum_type") == "class"
    assert feature_service.scope_of("nothing") == "unknown"


def test_check_hash_rejects_foreign_schema():
    feature_service.check_hash(feature_service.schema.schema_hash)

    with pytest.raises(SchemaMismatchError):
        feature_service.check_hash("0" * 64, "model")


def test_write_schema(tmp_path):
    path = feature_service.write_schema(tmp_path / "schema.json", {"seed": 7})
    payload = json.loads(path.read_text(encoding="utf-8"))

    assert payload["schema_hash"] == feature_service.schema.schema_hash
    assert len(payload["features"]) == 68
    assert payload["features"][0] == {"name": "method_CBO", "scope": "method", "metric": "CBO", "kind": "numeric"}
    assert payload["provenance"] == {"seed": 7}
