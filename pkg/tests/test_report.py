import json

import pytest

from src.app.schemas.error import DataError
from src.app.schemas.evaluation import ConfusionMatrix, DeltaRow, EvalReport
from src.app.schemas.learn import RankingRow
from src.app.services.corpus_service import corpus_service
from src.app.services.graph_service import graph_service, png_metadata
from src.app.services.report_service import report_service

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _report(model_id, sampler="none", **overrides):
    values = dict(cm=ConfusionMatrix(TP=8, FP=2, TN=80, FN=10), BA=0.82, Pr=0.8, Rec=0.44,
                  model_id=model_id, sampler=sampler)
    values.update(overrides)
    return EvalReport(**values)


def test_scores_table_marks_failures_and_undefined_ratios():
    table = report_service.scores_table([
        _report("decision_tree[none]"),
        _report("adaboost[none]", cm=ConfusionMatrix(TN=90, FN=10), BA=0.5, Pr=0.0, Rec=0.0, undefined=["Pr"]),
        _report("extra_trees[none]", cm=ConfusionMatrix(), failed=True, error="boom"),
    ])
    lines = table.splitlines()

    assert lines[0].split() == ["model", "TN", "FP", "FN", "TP", "BA", "Pr", "Rec"]
    assert lines[1].split() == ["decision_tree[none]", "80", "2", "10", "8", "0.82", "0.80", "0.44"]
    assert "0.00*" in lines[2]
    assert "failed" in lines[3]


def test_delta_and_ranking_tables():
    deltas = report_service.delta_table([
        DeltaRow(model_id="decision_tree[rus]", sampler="rus", BA=0.05, Pr=-0.2, Rec=0.3, FP=40, FN=-6)
    ])
    ranking = report_service.ranking_table([
        RankingRow(feature="class_LCOM", scope="class", positions=[3, 1], total=4),
        RankingRow(feature="method_SLOC", scope="method", positions=[0, 2], total=2),
    ])

    assert deltas.splitlines()[1].split() == ["decision_tree[rus]", "rus", "+0.05", "-0.20", "+0.30", "+40", "-6"]
    assert ranking.splitlines()[0].split() == ["feature", "scope", "#1", "#2", "total"]
    assert ranking.splitlines()[1].split() == ["class_LCOM", "class", "3", "1", "4"]
    assert report_service.ranking_table([]) == "(no rows)"


def test_render_experiment_bundle():
    bundle = {
        "kind": "experiment",
        "reports": [
            _report("decision_tree[none]").model_dump(mode="json"),
            _report("decision_tree[smote]", sampler="smote", BA=0.85).model_dump(mode="json"),
        ],
        "baselines": [_report("random_guess", BA=0.5).model_dump(mode="json")],
        "deltas": [
            DeltaRow(model_id="decision_tree[smote]", sampler="smote", BA=0.03, Pr=0.0, Rec=0.1, FP=1, FN=-1)
            .model_dump(mode="json")
        ],
        "ranking": [RankingRow(feature="method_RFC", scope="method", positions=[2], total=2).model_dump(mode="json")],
        "provenance": {"tool": "wherelog/0.1.0", "seed": 42},
    }

    text = report_service.render(bundle)

    assert "Models without sampling and baselines" in text
    assert "Models with sampling" in text
    assert "Sampling gain against no sampling" in text
    assert "Most recurrent top features across models" in text
    assert "random_guess" in text
    assert text.rstrip().splitlines()[-1] == "provenance: seed=42, tool=wherelog/0.1.0"


def test_render_scan_bundle(shop_root):
    bundle = {
        "kind": "scan",
        "projects": {"shop": corpus_service.scan_report(corpus_service.scan_corpus(shop_root))},
        "distribution": {},
        "provenance": {"tool": "wherelog/0.1.0"},
    }

    text = report_service.render(bundle)

    assert "shop: corpus summary" in text
    assert "shop: log statements by enclosing context" in text
    assert "37.5%" in text
    assert "if_else" in text
    assert "Distribution across projects" not in text


def test_render_transfer_bundle():
    bundle = {
        "kind": "transfer",
        "algorithm": "random_forest",
        "reports": [
            _report("random_forest[none]", train_id="all sources", train_size=900).model_dump(mode="json"),
            _report("random_forest[none]", train_id="beta", cm=ConfusionMatrix(), failed=True).model_dump(mode="json"),
        ],
        "provenance": {},
    }

    text = report_service.render(bundle)

    assert "Transfer to the fixed test set (random_forest" in text
    assert "all sources" in text
    assert "900" in text
    assert "failed" in text


def test_render_rejects_unknown_kinds():
    with pytest.raises(DataError):
        report_service.render({"kind": "mystery"})


def test_read_bundle(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"kind": "model"}), encoding="utf-8")

    with pytest.raises(DataError):
        report_service.read_bundle(broken)
    with pytest.raises(DataError):
        report_service.read_bundle(other)
    with pytest.raises(DataError):
        report_service.read_bundle(tmp_path / "absent.json")


def test_write_bundle_writes_json_and_text(tmp_path):
    bundle = {"kind": "transfer", "algorithm": "decision_tree", "reports": [], "provenance": {"seed": 1}}

    path = report_service.write_bundle(bundle, tmp_path, "transfer")

    assert json.loads(path.read_text(encoding="utf-8")) == bundle
    assert path.read_text(encoding="utf-8").endswith("}\n")
    text = (tmp_path / "transfer.txt").read_text(encoding="utf-8")
    assert "(no rows)" in text
    assert report_service.read_bundle(path) == bundle


def test_charts_are_png_with_provenance():
    density = graph_service.generate_density_boxplot([1, 1, 2, 3, 8], provenance={"seed": 5})
    importance = graph_service.generate_importance_chart([("method_SLOC", 0.4), ("class_CBO", 0.1)], provenance={"seed": 5})
    empty = graph_service.generate_density_boxplot([])

    for image in (density, importance, empty):
        assert image.startswith(PNG_SIGNATURE)
    assert b"Description" in density
    assert png_metadata({"seed": 5}) == {"Software": None, "Description": '{"seed":5}'}
