import pytest

from src.app.schemas.corpus import LogContext
from src.app.schemas.error import ResidualLogError
from src.app.schemas.java import RemovalReport
from src.app.services.extraction_service import ExtractionResult, extraction_service
from src.app.services.java_parser_service import java_parser_service
from src.app.services.log_detection_service import LogDetectionService, log_detection_service

CONTEXTS = """
class Worker {
    void run(int n) {
        log.info("start");
        if (n > 0) {
            log.debug("positive");
        } else {
            log.debug("not positive");
        }
        for (int i = 0; i < n; i++) {
            log.trace("step");
        }
        try {
            log.info("trying");
        } catch (RuntimeException e) {
            log.error("failed", e);
        } finally {
            log.info("done");
        }
        synchronized (this) {
            log.warn("locked");
        }
    }
}
"""


def _labels(unit):
    return {record.signature: record for record in log_detection_service.label_methods(unit)}


def test_every_context_is_classified(parse):
    record = _labels(parse(CONTEXTS))["run(int)"]

    assert [statement.context for statement in record.log_statements] == [
        LogContext.METHOD_DECLARATION,
        LogContext.IF_ELSE,
        LogContext.IF_ELSE,
        LogContext.LOOP_STATEMENT,
        LogContext.TRY_STATEMENT,
        LogContext.CATCH_CLAUSE,
        LogContext.TRY_STATEMENT,
        LogContext.OTHER,
    ]
    assert record.label is True


def test_multi_line_and_fluent_statements_count_once(parse):
    unit = parse(
        """
class Worker {
    void run() {
        logger.atInfo()
              .addKeyValue("k", 1)
              .log("message");
        LOGGER.info(
            "spread over {} lines",
            3);
    }

    int quiet(int a) {
        return a + 1;
    }
}
"""
    )
    labels = _labels(unit)

    assert len(labels["run()"].log_statements) == 2
    assert labels["quiet(int)"].label is False
    assert labels["quiet(int)"].log_statements == []


def test_logs_in_nested_types_belong_to_their_own_method(parse):
    unit = parse(
        """
class Outer {
    void outer() {
        Runnable r = new Runnable() {
            public void run() {
                log.info("inner");
            }
        };
    }
}
"""
    )
    records = {(record.class_fqn, record.signature): record for record in log_detection_service.label_methods(unit)}

    assert records[("Outer", "outer()")].label is False
    assert records[("Outer$1", "run()")].label is True


def test_strict_mode_needs_word_boundaries(parse):
    source = """
class Catalog {
    void index() {
        catalogue.refresh();
        logger.info("indexed");
    }
}
"""
    lenient = LogDetectionService(strict=False).label_methods(parse(source))[0]
    strict = LogDetectionService(strict=True).label_methods(parse(source))[0]

    assert len(lenient.log_statements) == 2
    assert len(strict.log_statements) == 1


def test_non_invocation_statements_are_never_logs(parse):
    record = _labels(parse("class A {\n    void f() {\n        logCount = logCount + 1;\n    }\n}\n"))["f()"]

    assert record.label is False


REMOVAL = """class Service {
    private final Logger log = Logger.get(Service.class);

    int compute(int a) {
        log.debug("compute " + a);
        if (log.isDebugEnabled()) {
            log.debug("detail");
        }
        if (log.isTraceEnabled()) {
            if (log.isDebugEnabled()) {
                log.debug("nested");
            }
        }
        int b = a * 2;
        if (b > 10)
            log.warn("large");
        return b;
    }
}
"""


def test_remove_logs_strips_statements_and_guards(parse):
    modified, report = log_detection_service.remove_logs(parse(REMOVAL, "src/Service.java"))
    text = modified.source.decode("utf-8")

    assert report == RemovalReport(path="src/Service.java", logs_before=4, logs_after=0, guards_removed=3)
    assert "log.debug" not in text
    assert "isDebugEnabled" not in text
    assert "isTraceEnabled" not in text
    assert "int b = a * 2;" in text
    assert "return b;" in text
    # the unbraced if keeps an empty block as its body
    assert "if (b > 10)" in text


@pytest.mark.parametrize(
    "body",
    [
        'switch (x) { case 1 -> LOG.info("one"); default -> work(); }',
        'switch (x) { case 1: LOG.info("one"); break; default: work(); }',
        'if (x > 0) LOG.info("positive"); else work();',
        'if (x > 0) work(); else LOG.info("negative");',
        'for (int i = 0; i < x; i++) LOG.info("tick"); work();',
        'while (x-- > 0) LOG.info("tick"); work();',
        'do LOG.info("tick"); while (x-- > 0); work();',
        'outer: LOG.info("labeled"); work();',
    ],
)
def test_removal_keeps_code_valid_outside_blocks(parse, body):
    source = f"class A {{\n    void f(int x) {{\n        {body}\n    }}\n    void work() {{}}\n}}\n"

    modified, report = log_detection_service.remove_logs(parse(source, "src/A.java"))
    text = modified.source.decode("utf-8")

    assert (report.logs_before, report.logs_after) == (1, 0)
    assert "LOG." not in text
    assert "work();" in text
    assert java_parser_service.enumerate_methods(modified)[0].signature == "f(int)"


def test_removal_is_idempotent(parse):
    once, _ = log_detection_service.remove_logs(parse(REMOVAL))
    twice, report = log_detection_service.remove_logs(once)

    assert twice.source == once.source
    assert report.logs_before == 0
    assert report.guards_removed == 0


def test_guard_with_else_or_other_work_is_kept(parse):
    source = """class Service {
    void f(int a) {
        if (log.isDebugEnabled()) {
            log.debug("a");
        } else {
            a++;
        }
        if (log.isInfoEnabled()) {
            log.info("b");
            a--;
        }
    }
}
"""
    modified, report = log_detection_service.remove_logs(parse(source))
    text = modified.source.decode("utf-8")

    assert report.guards_removed == 0
    assert text.count("if (log.is") == 2
    assert "a--;" in text


def test_side_effecting_logs_are_retained(parse):
    source = """class Service {
    void f(int a) {
        log.info("count " + (a = a + 1));
        log.info("next " + a++);
        log.debug(() -> { return expensive(); });
        log.info("plain");
    }
}
"""
    modified, report = log_detection_service.remove_logs(parse(source))

    assert report.logs_before == 4
    assert report.logs_after == 3
    assert report.residual_ratio == pytest.approx(0.75)
    assert "plain" not in modified.source.decode("utf-8")


def test_labels_stay_on_the_original_source(parse):
    unit = parse(REMOVAL)
    before = log_detection_service.label_methods(unit)
    modified, _ = log_detection_service.remove_logs(unit)
    after = log_detection_service.label_methods(modified)

    assert [record.identity for record in before] == [record.identity for record in after]
    assert before[0].label is True
    assert after[0].label is False


def _many_logs(total: int, retained: int) -> str:
    lines = ["class Busy {", "    int counter;", "    void f() {"]
    for i in range(total):
        if i < retained:
            lines.append(f'        log.info("value " + (counter = {i}));')
        else:
            lines.append(f'        log.info("value {i}");')
    lines += ["    }", "}", ""]
    return "\n".join(lines)


def _result(reports):
    return ExtractionResult(vectors=[], reports=reports, failures={}, production_files=1)


def test_residual_gate_boundary(parse):
    _, at_threshold = log_detection_service.remove_logs(parse(_many_logs(200, 1)))
    _, above = log_detection_service.remove_logs(parse(_many_logs(200, 2)))

    assert (at_threshold.logs_before, at_threshold.logs_after) == (200, 1)
    extraction_service.check_residual(_result([at_threshold]), threshold=0.005)

    with pytest.raises(ResidualLogError):
        extraction_service.check_residual(_result([above]), threshold=0.005)
    extraction_service.check_residual(_result([above]), force=True, threshold=0.005)


def test_residual_ratio_aggregates_over_units():
    reports = [
        RemovalReport(path="a", logs_before=10, logs_after=1),
        RemovalReport(path="b", logs_before=30, logs_after=0),
        RemovalReport(path="c"),
    ]

    assert LogDetectionService.removal_residual_ratio(reports) == pytest.approx(1 / 40)
    assert LogDetectionService.removal_residual_ratio([]) == 0.0
    assert LogDetectionService.aggregate(reports).logs_before == 40
