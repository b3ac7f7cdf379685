import pytest

from src.app.schemas.metrics import ClassType
from src.app.services.java_parser_service import java_parser_service
from src.app.services.metrics_service import HierarchyIndex, metrics_service

CALCULATOR = """package org.acme.calc;

import java.util.List;

public class Calculator extends Base {
    public static final int LIMIT = 10;
    private int count;
    protected String name;
    double ratio;

    // builds a calculator
    public Calculator(String name) {
        this.name = name;
    }

    public int sum(List<Integer> values, int offset) {
        int total = offset;
        for (int value : values) {
            if (value > LIMIT && value != 0) {
                total = total + value * 2;
            }
        }
        return total;
    }

    private static int twice(int x) {
        return x * 2;
    }

    int compute(int a) {
        count = count + 1;
        return helper(a) + Math.abs(a);
    }

    int helper(int a) {
        return twice(a);
    }

    public synchronized void reset() {
        count = 0;
        Runnable r = () -> name = "x";
    }
}

class Base {
}
"""


def _methods(unit):
    return {method.signature: method for method in java_parser_service.method_nodes(unit)}


def _decl(unit, fqn):
    return next(decl for decl in unit.types if decl.fqn == fqn)


@pytest.fixture
def calculator(parse):
    return parse(CALCULATOR, "src/org/acme/calc/Calculator.java")


def test_method_metrics_of_a_loop_with_branches(calculator):
    metrics = metrics_service.method_metrics(calculator, _methods(calculator)["sum(List,int)"])

    assert metrics.WMC == 4
    assert metrics.CBO == 1
    assert metrics.RFC == 0
    assert metrics.SLOC == 9
    assert metrics.parametersQty == 2
    assert metrics.variablesQty == 2
    assert metrics.returnsQty == 1
    assert metrics.loopQty == 1
    assert metrics.comparisonsQty == 2
    assert metrics.maxNestedBlocksQty == 2
    assert metrics.numbersQty == 2
    assert metrics.assignmentsQty == 2
    assert metrics.mathOperationsQty == 2
    assert metrics.stringLiteralsQty == 0
    assert metrics.parenthesizedExpsQty == 0
    assert metrics.methodsInvokedQty == 0
    assert metrics.isConstructor is False


def test_method_metrics_of_local_and_static_calls(calculator):
    methods = _methods(calculator)
    compute = metrics_service.method_metrics(calculator, methods["compute(int)"])
    helper = metrics_service.method_metrics(calculator, methods["helper(int)"])

    assert compute.RFC == 2
    assert compute.methodsInvokedQty == 2
    assert compute.methodsInvokedLocalQty == 1
    assert compute.methodsInvokedIndirectLocalQty == 1
    assert compute.NOSI == 1
    assert compute.CBO == 0
    assert compute.uniqueWordsQty == 6
    assert compute.mathOperationsQty == 2

    assert helper.methodsInvokedLocalQty == 1
    assert helper.methodsInvokedIndirectLocalQty == 0
    assert helper.uniqueWordsQty == 3


def test_method_metrics_of_lambdas_and_constructors(calculator):
    methods = _methods(calculator)
    reset = metrics_service.method_metrics(calculator, methods["reset()"])
    constructor = metrics_service.method_metrics(calculator, methods["Calculator(String)"])

    assert reset.lambdasQty == 1
    assert reset.assignmentsQty == 3
    assert reset.variablesQty == 1
    assert reset.stringLiteralsQty == 1
    assert reset.WMC == 1

    assert constructor.isConstructor is True
    assert constructor.parametersQty == 1
    assert constructor.assignmentsQty == 1
    assert constructor.SLOC == 3


def test_class_metrics(calculator):
    metrics = metrics_service.class_metrics(calculator, _decl(calculator, "org.acme.calc.Calculator"))

    assert metrics.classType == ClassType.CLASS
    assert metrics.DIT == 2
    assert metrics.CBO == 2
    assert metrics.WMC == 9
    assert metrics.RFC == 7
    assert metrics.LCOM == 8
    assert metrics.NOSI == 1
    assert metrics.SLOC == 32
    assert metrics.loopQty == 1
    assert metrics.comparisonsQty == 2
    assert metrics.maxNestedBlocksQty == 2
    assert metrics.lambdasQty == 1
    assert metrics.numbersQty == 6
    assert metrics.stringLiteralsQty == 1
    assert metrics.assignmentsQty == 7
    assert metrics.mathOperationsQty == 5
    assert metrics.variablesQty == 3
    assert metrics.returnsQty == 4


def test_class_method_and_field_counts(calculator):
    metrics = metrics_service.class_metrics(calculator, _decl(calculator, "org.acme.calc.Calculator"))

    assert metrics.totalMethodsQty == 6
    assert metrics.publicMethodsQty == 3
    assert metrics.privateMethodsQty == 1
    assert metrics.protectedMethodsQty == 0
    assert metrics.defaultMethodsQty == 2
    assert metrics.staticMethodsQty == 1
    assert metrics.synchronizedMethodsQty == 1
    assert metrics.abstractMethodsQty == 0
    assert metrics.finalMethodsQty == 0

    assert metrics.totalFieldsQty == 4
    assert metrics.staticFieldsQty == 1
    assert metrics.publicFieldsQty == 1
    assert metrics.privateFieldsQty == 1
    assert metrics.protectedFieldsQty == 1
    assert metrics.defaultFieldsQty == 1
    assert metrics.finalFieldsQty == 1
    assert metrics.visibleFieldsQty == 2


def test_interface_members_are_implicitly_public(parse):
    unit = parse(
        """
interface Shape {
    int SIDES = 4;
    double area();
    default String label() { return "shape"; }
    static Shape unit() { return null; }
}
"""
    )
    metrics = metrics_service.class_metrics(unit, unit.types[0])

    assert metrics.classType == ClassType.INTERFACE
    assert metrics.DIT == 1
    assert metrics.publicMethodsQty == 3
    assert metrics.abstractMethodsQty == 1
    assert metrics.staticMethodsQty == 1
    assert metrics.defaultMethodsQty == 0
    assert metrics.totalFieldsQty == 1
    assert metrics.visibleFieldsQty == 1
    assert metrics.finalFieldsQty == 1


def test_bodyless_method_keeps_unit_complexity(parse):
    unit = parse("abstract class Job {\n    abstract void run();\n}\n")
    method = java_parser_service.method_nodes(unit)[0]
    metrics = metrics_service.method_metrics(unit, method)

    assert metrics.WMC == 1
    assert metrics.SLOC == 1
    assert metrics.maxNestedBlocksQty == 0
    assert metrics_service.class_metrics(unit, unit.types[0]).abstractMethodsQty == 1


def test_switch_cases_and_ternaries_are_decisions(parse):
    unit = parse(
        """
class Picker {
    int pick(int k) {
        switch (k) {
            case 1: return 10;
            case 2: return 20;
            default: return 0;
        }
    }

    int sign(int a, boolean b) {
        return (a > 0 || b) ? 1 : 2;
    }
}
"""
    )
    methods = _methods(unit)
    pick = metrics_service.method_metrics(unit, methods["pick(int)"])
    sign = metrics_service.method_metrics(unit, methods["sign(int,boolean)"])

    assert pick.WMC == 3
    assert pick.returnsQty == 3
    assert pick.parenthesizedExpsQty == 0
    assert pick.maxNestedBlocksQty == 1

    assert sign.WMC == 3
    assert sign.parenthesizedExpsQty == 1
    assert sign.comparisonsQty == 1


def test_static_invocations_need_a_known_type(parse):
    unit = parse(
        """
import java.util.Collections;
import java.util.List;

class Sorter {
    void f(List<String> list) {
        Collections.sort(list);
        list.size();
        Unknown.call();
        System.out.println("x");
    }
}
"""
    )
    metrics = metrics_service.method_metrics(unit, java_parser_service.method_nodes(unit)[0])

    assert metrics.NOSI == 1
    assert metrics.RFC == 4
    assert metrics.methodsInvokedQty == 4
    assert metrics.CBO == 2


def test_nested_types_are_counted_not_entered(parse):
    unit = parse(
        """
class Holder {
    void f() {
        class Local {
            int g() { return 1 + 2; }
        }
        Runnable r = new Runnable() {
            public void run() { int x = 3; }
        };
    }
}
"""
    )
    holder = _decl(unit, "Holder")
    method = next(method for method in java_parser_service.method_nodes(unit) if method.owner is holder)
    method_metrics = metrics_service.method_metrics(unit, method)
    class_metrics = metrics_service.class_metrics(unit, holder)

    assert method_metrics.innerClassesQty == 1
    assert method_metrics.anonymousClassesQty == 1
    assert method_metrics.mathOperationsQty == 0
    assert method_metrics.variablesQty == 1
    assert class_metrics.innerClassesQty == 1
    assert class_metrics.anonymousClassesQty == 1
    assert class_metrics.totalMethodsQty == 1


def test_depth_of_inheritance(parse):
    unit = parse(
        """
class A {}
class B extends A {}
class C extends B {}
class D extends java.util.ArrayList<String> {}
class E {
    void f() {
        Object known = new B() {};
        Object unknown = new Runnable() { public void run() {} };
    }
}
"""
    )
    hierarchy = metrics_service.build_hierarchy([unit])
    depth = {decl.fqn: hierarchy.depth(decl) for decl in unit.types}

    assert depth["A"] == 1
    assert depth["B"] == 2
    assert depth["C"] == 3
    assert depth["D"] == 2
    assert depth["E$1"] == 3
    assert depth["E$2"] == 1


def test_hierarchy_first_declaration_wins():
    index = HierarchyIndex()
    index.add("Base", ClassType.CLASS, None)
    index.add("Base", ClassType.CLASS, "Other")
    index.add("Api", ClassType.INTERFACE, None)

    assert index.superclasses == {"Base": None}
    assert index.root_types == {"Api"}


def test_sloc_ignores_blank_and_comment_lines(parse):
    unit = parse(
        "class A {\n    void f() {\n        // note\n\n        int x = 1; /* trailing */\n        /*\n         * block\n         */\n    }\n}\n"
    )
    method = java_parser_service.method_nodes(unit)[0]

    assert metrics_service.sloc(unit, method.node) == 3
