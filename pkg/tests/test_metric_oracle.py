from collections import defaultdict

import pytest
import yaml

from src.app.schemas.metrics import ClassMetrics, MethodMetrics
from src.app.services.java_parser_service import java_parser_service
from src.app.services.metrics_service import metrics_service
from tests.conftest import FIXTURES

METRICS_ROOT = FIXTURES / "metrics"
EXPECTED = yaml.safe_load((METRICS_ROOT / "expected.yaml").read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def measured():
    """Class and method metrics of every type of the fixture corpus, keyed by fqn"""
    units = [
        java_parser_service.parse_unit(path.read_bytes(), path.relative_to(METRICS_ROOT).as_posix())
        for path in sorted(METRICS_ROOT.rglob("*.java"))
    ]
    hierarchy = metrics_service.build_hierarchy(units)
    classes = {}
    methods = defaultdict(dict)
    for unit in units:
        for decl in unit.types:
            classes[decl.fqn] = metrics_service.class_metrics(unit, decl, hierarchy)
        for method in java_parser_service.method_nodes(unit):
            methods[method.owner.fqn][method.signature] = metrics_service.method_metrics(unit, method)
    return classes, methods


def test_corpus_is_fully_described(measured):
    classes, methods = measured
    assert len(classes) >= 20
    assert set(classes) == set(EXPECTED)
    for fqn, expected in EXPECTED.items():
        assert set(methods.get(fqn, {})) == set(expected["methods"]), fqn


@pytest.mark.parametrize("fqn", sorted(EXPECTED))
def test_class_metrics_match_hand_computed_values(measured, fqn):
    classes, _ = measured
    expected = ClassMetrics(**EXPECTED[fqn]["class"])
    assert classes[fqn].model_dump() == expected.model_dump()


@pytest.mark.parametrize(
    "fqn,signature",
    [(fqn, signature) for fqn in sorted(EXPECTED) for signature in sorted(EXPECTED[fqn]["methods"])],
)
def test_method_metrics_match_hand_computed_values(measured, fqn, signature):
    _, methods = measured
    expected = MethodMetrics(**EXPECTED[fqn]["methods"][signature])
    assert methods[fqn][signature].model_dump() == expected.model_dump()


def test_method_type_parameters_do_not_couple_the_class():
    unit = java_parser_service.parse_unit(
        "class Holder { <K> K pick(K key) { return key; } Widget widget; }"
    )
    decl = unit.types[0]
    assert metrics_service.class_metrics(unit, decl).CBO == 1
