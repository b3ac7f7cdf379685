import numpy as np
import pytest

from src.app.models.dataset import Dataset
from src.app.schemas.dataset import SplitSpec
from src.app.schemas.error import (
    DataError,
    DatasetFormatError,
    LeakageError,
    SchemaMismatchError,
    StratificationError,
)
from src.app.services.dataset_service import dataset_service
from src.app.services.feature_service import feature_service
from tests.conftest import make_dataset


def _imbalanced(n: int = 100, positives: int = 10) -> Dataset:
    X = np.arange(n * 2, dtype=float).reshape(n, 2)
    y = np.zeros(n, dtype=int)
    y[np.linspace(0, n - 1, positives).astype(int)] = 1
    return make_dataset(X, y)


def test_dataset_rejects_bad_input():
    with pytest.raises(DataError):
        make_dataset([[1.0], [2.0]], [0, 2])
    with pytest.raises(DataError):
        make_dataset([[1.0], [np.nan]], [0, 1])
    with pytest.raises(DataError):
        Dataset(X=[[1.0], [2.0]], y=[0, 1], identities=[("a", "b", "c")] * 2, feature_names=["f"], schema_hash="h")


def test_dataset_is_read_only():
    dataset = _imbalanced()

    with pytest.raises(ValueError):
        dataset.X[0, 0] = 5.0


def test_stratified_split_preserves_prevalence():
    dataset = _imbalanced(100, 10)

    train, test = dataset_service.stratified_split(dataset, SplitSpec(test_fraction=0.2, seed=3))

    assert len(test) == 20
    assert test.positives == 2
    assert train.positives == 8
    assert set(train.identities).isdisjoint(test.identities)
    assert sorted(train.identities + test.identities) == sorted(dataset.identities)


def test_stratified_split_is_deterministic_and_ordered():
    dataset = _imbalanced(50, 12)
    spec = SplitSpec(test_fraction=0.3, seed=11)

    first = dataset_service.stratified_split(dataset, spec)
    second = dataset_service.stratified_split(dataset, spec)

    assert first[0] == second[0]
    assert first[1] == second[1]
    position = {identity: i for i, identity in enumerate(dataset.identities)}
    test_positions = [position[identity] for identity in first[1].identities]
    assert test_positions == sorted(test_positions)


def test_stratified_split_needs_two_rows_per_class():
    dataset = make_dataset([[0.0], [1.0], [2.0]], [0, 0, 1])

    with pytest.raises(StratificationError):
        dataset_service.stratified_split(dataset, SplitSpec(seed=0))


def test_kfold_partitions_the_dataset():
    dataset = _imbalanced(53, 11)

    folds = dataset_service.stratified_kfold(dataset, 5, seed=2)

    combined = np.concatenate(folds)
    assert sorted(combined.tolist()) == list(range(53))
    assert all(len(np.intersect1d(a, b)) == 0 for i, a in enumerate(folds) for b in folds[i + 1:])
    sizes = [len(fold) for fold in folds]
    assert max(sizes) - min(sizes) <= 1
    positives = [int(dataset.y[fold].sum()) for fold in folds]
    assert max(positives) - min(positives) <= 1


def test_fold_partitions_never_share_rows():
    dataset = _imbalanced(40, 10)

    for train_index, val_index in dataset_service.fold_partitions(dataset, 4, seed=0):
        assert len(np.intersect1d(train_index, val_index)) == 0
        assert len(train_index) + len(val_index) == 40


def test_kfold_needs_k_rows_per_class():
    dataset = _imbalanced(30, 3)

    with pytest.raises(StratificationError):
        dataset_service.stratified_kfold(dataset, 5, seed=0)


def _real_schema_dataset(rows: int = 4) -> Dataset:
    names = feature_service.schema.names
    X = np.zeros((rows, len(names)))
    X[:, 0] = np.arange(rows) + 0.1
    X[:, 1] = 1.0 / 3.0
    return Dataset(
        X=X,
        y=[i % 2 for i in range(rows)],
        identities=[("src/A.java", "p.A", f"m{i}(int,String)") for i in range(rows)],
        feature_names=names,
        schema_hash=feature_service.schema.schema_hash,
        categorical=feature_service.categorical_mask(),
        provenance={"tool": "wherelog/0.1.0", "seed": 5},
    )


def test_write_then_read_dataset(tmp_path):
    dataset = _real_schema_dataset()
    path = dataset_service.write_dataset(dataset, tmp_path / "project.csv")

    text = path.read_text(encoding="utf-8")
    assert text.startswith("# rows=4\n")
    assert "\r" not in text
    assert '"m0(int,String)"' in text

    loaded = dataset_service.read_dataset(path, expected_schema_hash=feature_service.schema.schema_hash)
    assert loaded == dataset
    assert loaded.X[0, 1] == 1.0 / 3.0
    assert loaded.provenance["seed"] == "5"
    assert loaded.categorical.sum() == 7


def test_read_dataset_reports_the_bad_line(tmp_path):
    path = dataset_service.write_dataset(_real_schema_dataset(), tmp_path / "project.csv")
    lines = path.read_text(encoding="utf-8").split("\n")
    header = next(i for i, line in enumerate(lines) if line.startswith("file_path"))
    cells = lines[header + 2].split(",")
    cells[-2] = "oops"
    lines[header + 2] = ",".join(cells)
    path.write_text("\n".join(lines), encoding="utf-8")

    with pytest.raises(DatasetFormatError) as error:
        dataset_service.read_dataset(path)

    assert error.value.line == header + 3


def test_read_dataset_rejects_bad_labels(tmp_path):
    path = dataset_service.write_dataset(_real_schema_dataset(), tmp_path / "project.csv")
    lines = path.read_text(encoding="utf-8").split("\n")
    header = next(i for i, line in enumerate(lines) if line.startswith("file_path"))
    cells = lines[header + 1].split(",")
    cells[-1] = "3"
    lines[header + 1] = ",".join(cells)
    path.write_text("\n".join(lines), encoding="utf-8")

    with pytest.raises(DatasetFormatError) as error:
        dataset_service.read_dataset(path)

    assert error.value.line == header + 2


def test_read_dataset_needs_schema_hash(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("file_path,class_fqn,method_signature,f0,label\na,b,c,1,0\n", encoding="utf-8")

    with pytest.raises(DatasetFormatError):
        dataset_service.read_dataset(path)


def test_read_dataset_rejects_foreign_schema(tmp_path):
    toy = make_dataset([[1.0, 2.0], [3.0, 4.0]], [0, 1])
    path = dataset_service.write_dataset(toy, tmp_path / "toy.csv")

    assert dataset_service.read_dataset(path) == toy
    with pytest.raises(SchemaMismatchError):
        dataset_service.read_dataset(path, expected_schema_hash=feature_service.schema.schema_hash)


def test_read_dataset_detects_dropped_column(tmp_path):
    path = dataset_service.write_dataset(_real_schema_dataset(), tmp_path / "project.csv")
    lines = path.read_text(encoding="utf-8").split("\n")
    trimmed = [line if line.startswith("#") or not line else ",".join(line.split(",")[:4] + line.split(",")[5:]) for line in lines]
    path.write_text("\n".join(trimmed), encoding="utf-8")

    with pytest.raises(SchemaMismatchError):
        dataset_service.read_dataset(path)


def test_manifest_round_trip_rebuilds_the_split(tmp_path):
    dataset = _imbalanced(60, 15)
    spec = SplitSpec(test_fraction=0.25, seed=9)
    train, test = dataset_service.stratified_split(dataset, spec)

    manifest = dataset_service.build_manifest(test, spec, {"seed": 9})
    path = dataset_service.write_manifest(manifest, tmp_path / "split_manifest.json")
    rebuilt_train, rebuilt_test = dataset_service.apply_manifest(dataset, dataset_service.read_manifest(path))

    assert rebuilt_train == train
    assert rebuilt_test == test


def test_manifest_with_unknown_rows_is_rejected():
    dataset = _imbalanced(20, 5)
    _, test = dataset_service.stratified_split(dataset, SplitSpec(seed=1))
    manifest = dataset_service.build_manifest(test, SplitSpec(seed=1))
    dropped = dataset.identities.index(test.identities[0])
    smaller = dataset.subset([i for i in range(len(dataset)) if i != dropped])

    with pytest.raises(DataError):
        dataset_service.apply_manifest(smaller, manifest)


def test_assert_disjoint():
    dataset = _imbalanced(20, 5)
    dataset_service.assert_disjoint(dataset.subset([0, 1]), dataset.subset([2, 3]))

    with pytest.raises(LeakageError):
        dataset_service.assert_disjoint(dataset.subset([0, 1]), dataset.subset([1, 2]))


def test_concat_requires_one_schema():
    first = make_dataset([[1.0]], [0], prefix="a")
    second = make_dataset([[2.0]], [1], names=["other"], prefix="b")

    with pytest.raises(SchemaMismatchError):
        Dataset.concat([first, second])
    assert len(Dataset.concat([first, make_dataset([[3.0]], [1], prefix="c")])) == 2
