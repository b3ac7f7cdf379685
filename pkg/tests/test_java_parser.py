import pytest

from src.app.schemas.error import SourceParseError
from src.app.schemas.metrics import ClassType
from src.app.services.java_parser_service import erase_type, java_parser_service

NESTING = """
package org.acme;

import java.util.List;
import java.util.Map;

public class Outer {
    static class Nested {
        void run() {}
    }

    interface Callback {
        void done(int code);
    }

    enum Mode { ON, OFF }

    public Outer() {}

    void work(Map<String, List<Integer>> data, int[] codes, String... names) {
        class Local {
            void go() {}
        }
        Runnable r = new Runnable() {
            public void run() {}
        };
        Runnable s = new Runnable() {
            public void run() {}
        };
    }
}
"""


def test_header_is_read(parse):
    unit = parse(NESTING)

    assert unit.package == "org.acme"
    assert unit.imports == {"List": "java.util.List", "Map": "java.util.Map"}


def test_type_names_follow_nesting_rules(parse):
    unit = parse(NESTING)
    kinds = {decl.fqn: decl.class_type for decl in unit.types}

    assert kinds == {
        "org.acme.Outer": ClassType.CLASS,
        "org.acme.Outer.Nested": ClassType.INNER_CLASS,
        "org.acme.Outer.Callback": ClassType.INTERFACE,
        "org.acme.Outer.Mode": ClassType.ENUM_TYPE,
        "org.acme.Outer$Local": ClassType.INNER_CLASS,
        "org.acme.Outer$1": ClassType.ANONYMOUS,
        "org.acme.Outer$2": ClassType.ANONYMOUS,
    }


def test_anonymous_classes_remember_their_base(parse):
    unit = parse(NESTING)
    anonymous = [decl for decl in unit.types if decl.class_type == ClassType.ANONYMOUS]

    assert [decl.superclass for decl in anonymous] == ["Runnable", "Runnable"]
    assert unit.declared_type_names == {"Outer", "Nested", "Callback", "Mode", "Local"}


def test_methods_are_enumerated_in_source_order(parse):
    records = java_parser_service.enumerate_methods(parse(NESTING))

    assert [(record.class_fqn, record.signature) for record in records] == [
        ("org.acme.Outer.Nested", "run()"),
        ("org.acme.Outer.Callback", "done(int)"),
        ("org.acme.Outer", "Outer()"),
        ("org.acme.Outer", "work(Map,int[],String...)"),
        ("org.acme.Outer$Local", "go()"),
        ("org.acme.Outer$1", "run()"),
        ("org.acme.Outer$2", "run()"),
    ]
    assert [record.is_constructor for record in records].count(True) == 1
    assert all(record.file_path == "src/Sample.java" for record in records)


def test_anonymous_classes_are_numbered_per_enclosing_type(parse):
    unit = parse(
        "package p;\n"
        "class Outer {\n"
        "    class Inner {\n"
        "        void m() { new Runnable() { public void run() {} }; }\n"
        "    }\n"
        "    void m() { new Runnable() { public void run() {} }; }\n"
        "}\n"
    )
    types = {decl.fqn: decl for decl in unit.types}

    assert sorted((fqn, decl.class_type) for fqn, decl in types.items()) == [
        ("p.Outer", ClassType.CLASS),
        ("p.Outer$1", ClassType.ANONYMOUS),
        ("p.Outer.Inner", ClassType.INNER_CLASS),
        ("p.Outer.Inner$1", ClassType.ANONYMOUS),
    ]
    assert types["p.Outer"].anonymous_count == 1
    assert types["p.Outer.Inner"].anonymous_count == 1
    assert types["p.Outer$1"].parent is types["p.Outer"]


def test_method_span_uses_one_based_lines(parse):
    unit = parse("class A {\n    void f() {\n        int x = 1;\n    }\n}\n")
    record = java_parser_service.enumerate_methods(unit)[0]

    assert (record.span.start_line, record.span.end_line) == (2, 4)


def test_enum_constant_with_body_is_anonymous(parse):
    unit = parse("enum Op {\n    PLUS {\n        int apply() { return 1; }\n    };\n    int apply() { return 0; }\n}\n")
    records = java_parser_service.enumerate_methods(unit)

    assert [(record.class_fqn, record.signature) for record in records] == [
        ("Op$1", "apply()"),
        ("Op", "apply()"),
    ]


def test_syntax_error_raises(parse):
    with pytest.raises(SourceParseError) as error:
        parse("class Broken { void f( }", "src/Broken.java")

    assert error.value.details == {"path": "src/Broken.java"}


@pytest.mark.parametrize(
    "written, erased",
    [
        ("Map<K, List<V>>", "Map"),
        ("java.util.List<String>", "java.util.List"),
        ("Entry< K , V >[]", "Entry[]"),
        ("int", "int"),
    ],
)
def test_erase_type(written, erased):
    assert erase_type(written) == erased
