import pytest

from src.app.services.extraction_service import extraction_service
from src.app.services.feature_service import feature_service

ORDER_SERVICE = "src/main/java/org/acme/shop/OrderService.java"
CACHE = "src/main/java/org/acme/shop/Cache.java"


@pytest.fixture
def shop_result(shop_root):
    return extraction_service.extract(shop_root)


def _row(dataset, identity):
    values = dataset.X[dataset.identities.index(identity)]
    return dict(zip(dataset.feature_names, values))


def test_shop_dataset_rows_and_labels(shop_result):
    dataset = extraction_service.to_dataset(shop_result)

    assert len(dataset) == 8
    assert dataset.positives == 3
    assert dataset.identities == sorted(dataset.identities)
    assert dataset.schema_hash == feature_service.schema.schema_hash
    labeled = {identity[2] for identity, label in zip(dataset.identities, dataset.y) if label}
    assert labeled == {"load(String)", "retry()", "get(String)"}
    assert (ORDER_SERVICE, "org.acme.shop.OrderService", "OrderService(OrderRepository)") in dataset.identities


def test_features_are_measured_on_log_free_code(shop_result):
    dataset = extraction_service.to_dataset(shop_result)

    load = _row(dataset, (ORDER_SERVICE, "org.acme.shop.OrderService", "load(String)"))
    retry = _row(dataset, (ORDER_SERVICE, "org.acme.shop.OrderService", "retry()"))
    get = _row(dataset, (CACHE, "org.acme.shop.Cache", "get(String)"))

    assert load["method_methodsInvokedQty"] == 1.0
    assert load["method_stringLiteralsQty"] == 0.0
    assert retry["method_methodsInvokedQty"] == 1.0
    assert get["method_methodsInvokedQty"] == 1.0
    assert get["method_WMC"] == 1.0


def test_class_features_use_the_corpus_hierarchy(shop_result):
    dataset = extraction_service.to_dataset(shop_result)

    constructor = _row(dataset, (ORDER_SERVICE, "org.acme.shop.OrderService", "OrderService(OrderRepository)"))
    put = _row(dataset, (CACHE, "org.acme.shop.Cache", "put(String,String)"))

    assert constructor["class_DIT"] == 2.0
    assert (constructor["constructor_False"], constructor["constructor_True"]) == (0.0, 1.0)
    assert put["class_DIT"] == 1.0
    assert put["type_class"] == 1.0


def test_removal_summary(shop_result):
    summary = extraction_service.removal_summary(shop_result)
    units = {unit["path"]: unit for unit in summary["units"]}

    assert summary["logs_before"] == 4
    assert summary["logs_after"] == 0
    assert summary["residual_ratio"] == 0.0
    assert units[ORDER_SERVICE] == {"path": ORDER_SERVICE, "logs_before": 3, "logs_after": 0, "guards_removed": 0}
    assert units[CACHE]["guards_removed"] == 1
    assert summary["parse_failures"] == {}
    assert "warning" not in summary
    extraction_service.check_residual(shop_result)


def test_shadow_tree_holds_log_free_sources(shop_root, tmp_path):
    extraction_service.extract(shop_root, shadow_dir=tmp_path / "shadow")

    order_service = (tmp_path / "shadow" / ORDER_SERVICE).read_text(encoding="utf-8")
    cache = (tmp_path / "shadow" / CACHE).read_text(encoding="utf-8")

    assert "LOG.debug" not in order_service
    assert "LOG.error" not in order_service
    assert "repository.flush();" in order_service
    assert "isLoggable" not in cache
    assert "return entries.get(key);" in cache
    assert not (tmp_path / "shadow" / "docs").exists()


def test_extraction_does_not_depend_on_worker_count(shop_root):
    serial = extraction_service.to_dataset(extraction_service.extract(shop_root, jobs=1))
    parallel = extraction_service.to_dataset(extraction_service.extract(shop_root, jobs=2))

    assert serial == parallel


def test_unparsable_files_are_skipped_and_reported(tmp_path):
    (tmp_path / "Good.java").write_text("class Good {\n    int f() {\n        return 1;\n    }\n}\n")
    (tmp_path / "Bad.java").write_text("class Bad { void f( }\n")

    result = extraction_service.extract(tmp_path)
    summary = extraction_service.removal_summary(result)

    assert result.method_count == 1
    assert list(result.failures) == ["Bad.java"]
    assert "warning" in summary
