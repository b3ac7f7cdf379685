"""
Service for computing method-scope and class-scope code metrics on log-free units
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

import tree_sitter

from src.app.schemas.metrics import ClassMetrics, ClassType, MethodMetrics
from src.app.services.java_parser_service import (
    CONSTRUCTOR_NODES,
    NAMED_TYPE_NODES,
    MethodNode,
    ParsedUnit,
    TypeDecl,
    erase_type,
    iter_nodes,
    modifier_keywords,
    within_member,
)
from src.app.utils.string_utils import unique_words

logger = logging.getLogger(__name__)

JAVA_LANG_TYPES = {
    "AbstractMethodError", "Appendable", "ArithmeticException", "ArrayIndexOutOfBoundsException",
    "AssertionError", "AutoCloseable", "Boolean", "Byte", "CharSequence", "Character", "Class",
    "ClassCastException", "ClassLoader", "ClassNotFoundException", "CloneNotSupportedException",
    "Cloneable", "Comparable", "Deprecated", "Double", "Enum", "Error", "Exception", "Float",
    "FunctionalInterface", "IllegalAccessException", "IllegalArgumentException",
    "IllegalStateException", "IndexOutOfBoundsException", "InheritableThreadLocal", "Integer",
    "InterruptedException", "Iterable", "LinkageError", "Long", "Math", "NegativeArraySizeException",
    "NoSuchFieldException", "NoSuchMethodException", "NullPointerException", "Number",
    "NumberFormatException", "Object", "OutOfMemoryError", "Override", "Process", "ProcessBuilder",
    "Readable", "Record", "ReflectiveOperationException", "Runnable", "Runtime", "RuntimeException",
    "SafeVarargs", "SecurityException", "Short", "StackOverflowError", "StrictMath", "String",
    "StringBuffer", "StringBuilder", "StringIndexOutOfBoundsException", "SuppressWarnings", "System",
    "Thread", "ThreadGroup", "ThreadLocal", "Throwable", "TypeNotPresentException",
    "UnsupportedOperationException", "Void",
}

LOOP_NODES = {"for_statement", "enhanced_for_statement", "while_statement", "do_statement"}
BRANCH_NODES = {"if_statement", "catch_clause", "ternary_expression"} | LOOP_NODES
BLOCK_NODES = {"block", "switch_block"}
NUMBER_NODES = {
    "decimal_integer_literal", "hex_integer_literal", "octal_integer_literal",
    "binary_integer_literal", "decimal_floating_point_literal", "hex_floating_point_literal",
}
COMPARISON_OPERATORS = {"==", "!=", "<", ">", "<=", ">="}
MATH_OPERATORS = {"+", "-", "*", "/", "%"}
LOGICAL_OPERATORS = {"&&", "||"}
CONDITION_OWNERS = {"if_statement", "while_statement", "do_statement", "switch_expression",
                    "switch_statement", "synchronized_statement"}
COMMENT_NODES = {"line_comment", "block_comment", "comment"}

CallKey = Tuple[str, int]


@dataclass
class Tally:
    """Node frequencies collected over one scope"""
    decisions: int = 0
    loops: int = 0
    comparisons: int = 0
    math: int = 0
    numbers: int = 0
    strings: int = 0
    assignments: int = 0
    variables: int = 0
    returns: int = 0
    lambdas: int = 0
    parenthesized: int = 0
    anonymous_classes: int = 0
    inner_classes: int = 0
    invocations: int = 0
    static_invocations: int = 0
    call_keys: Set[CallKey] = field(default_factory=set)
    local_calls: Set[str] = field(default_factory=set)
    referenced_types: Set[str] = field(default_factory=set)
    identifiers: List[str] = field(default_factory=list)


@dataclass
class TypeContext:
    """Per-declaration lookups shared by all its methods"""
    decl: TypeDecl
    method_names: Set[str]
    call_graph: Dict[str, Set[str]]
    field_names: Set[str]
    type_parameters: Set[str]


@dataclass
class HierarchyIndex:
    """
    Simple type name -> declared superclass name, built sequentially before the
    parallel metric pass and shared read-only afterwards
    """
    superclasses: Dict[str, Optional[str]] = field(default_factory=dict)
    root_types: Set[str] = field(default_factory=set)

    def add(self, simple_name: str, class_type: ClassType, superclass: Optional[str]) -> None:
        if class_type == ClassType.ANONYMOUS:
            return
        # first declaration wins on simple-name collisions
        if simple_name in self.superclasses or simple_name in self.root_types:
            return
        if class_type in (ClassType.INTERFACE, ClassType.ENUM_TYPE):
            self.root_types.add(simple_name)
        else:
            self.superclasses[simple_name] = superclass

    def add_unit(self, unit: ParsedUnit) -> None:
        for decl in unit.types:
            self.add(decl.simple_name, decl.class_type, decl.superclass)

    def depth(self, decl: TypeDecl) -> int:
        """
        Length of the superclass chain to Object. A written extends edge always
        counts; the walk continues only through known declarations. The base of
        an anonymous class counts only when it is a known class.
        """
        if decl.class_type in (ClassType.INTERFACE, ClassType.ENUM_TYPE):
            return 1
        anonymous = decl.class_type == ClassType.ANONYMOUS
        depth = 1
        current = decl.superclass
        seen = set() if anonymous else {decl.simple_name}
        while current and current != "Object" and current not in seen:
            if current in self.root_types:
                break
            if anonymous and depth == 1 and current not in self.superclasses:
                break
            depth += 1
            seen.add(current)
            current = self.superclasses.get(current)
        return depth


class MetricsService:
    """
    Service for lexical/syntactic code metrics
    """

    def build_hierarchy(self, units: Iterable[ParsedUnit]) -> HierarchyIndex:
        index = HierarchyIndex()
        for unit in units:
            index.add_unit(unit)
        return index

    def type_context(self, unit: ParsedUnit, decl: TypeDecl) -> TypeContext:
        """Local method names, local call graph, field names and type parameters of a declaration"""
        method_names = set()
        for node in decl.method_nodes:
            if node.type in CONSTRUCTOR_NODES:
                continue
            name_node = node.child_by_field_name("name")
            if name_node is not None:
                method_names.add(unit.text(name_node))

        type_parameters: Set[str] = set()
        owner: Optional[TypeDecl] = decl
        while owner is not None:
            type_parameters |= _type_parameters(unit, owner.node)
            owner = owner.parent

        context = TypeContext(
            decl=decl,
            method_names=method_names,
            call_graph={},
            field_names={name for name, _ in self._fields(unit, decl)},
            type_parameters=type_parameters,
        )
        for node in decl.method_nodes:
            if node.type in CONSTRUCTOR_NODES:
                continue
            name_node = node.child_by_field_name("name")
            if name_node is None:
                continue
            tally = self._tally(unit, node, context)
            context.call_graph.setdefault(unit.text(name_node), set()).update(tally.local_calls)
        return context

    def method_metrics(
        self,
        unit: ParsedUnit,
        method: MethodNode,
        context: Optional[TypeContext] = None,
    ) -> MethodMetrics:
        """
        Metrics of one method of a log-free unit

        Args:
            unit: Log-free parsed unit
            method: Method to measure
            context: Precomputed declaration context (built when omitted)

        Returns:
            MethodMetrics; bodyless methods keep WMC 1 and zero body counts
        """
        context = context or self.type_context(unit, method.owner)
        tally = self._tally(unit, method.node, context)
        type_parameters = context.type_parameters | _type_parameters(unit, method.node)
        indirect = self._closure(tally.local_calls, context.call_graph) - tally.local_calls

        return MethodMetrics(
            CBO=len(_coupled(tally.referenced_types, type_parameters, method.owner)),
            WMC=1 + tally.decisions,
            RFC=len(tally.call_keys),
            SLOC=self.sloc(unit, method.node),
            parametersQty=_parameter_count(method.node),
            variablesQty=tally.variables,
            returnsQty=tally.returns,
            loopQty=tally.loops,
            comparisonsQty=tally.comparisons,
            maxNestedBlocksQty=self.max_nested_blocks(method.body),
            anonymousClassesQty=tally.anonymous_classes,
            innerClassesQty=tally.inner_classes,
            lambdasQty=tally.lambdas,
            uniqueWordsQty=len(unique_words(tally.identifiers)),
            numbersQty=tally.numbers,
            assignmentsQty=tally.assignments,
            mathOperationsQty=tally.math,
            stringLiteralsQty=tally.strings,
            parenthesizedExpsQty=tally.parenthesized,
            methodsInvokedQty=tally.invocations,
            methodsInvokedLocalQty=len(tally.local_calls),
            methodsInvokedIndirectLocalQty=len(indirect),
            NOSI=tally.static_invocations,
            isConstructor=method.is_constructor,
        )

    def class_metrics(
        self,
        unit: ParsedUnit,
        decl: TypeDecl,
        hierarchy: Optional[HierarchyIndex] = None,
        context: Optional[TypeContext] = None,
    ) -> ClassMetrics:
        """
        Metrics of one type declaration of a log-free unit

        Args:
            unit: Log-free parsed unit
            decl: Declaration to measure
            hierarchy: Type index for DIT (unit-local when omitted)
            context: Precomputed declaration context

        Returns:
            ClassMetrics
        """
        if hierarchy is None:
            hierarchy = self.build_hierarchy([unit])
        context = context or self.type_context(unit, decl)

        root = decl.node if decl.class_type != ClassType.ANONYMOUS else decl.body
        tally = self._tally(unit, root, context, own_body=decl.body)
        referenced = set(tally.referenced_types)
        if decl.class_type == ClassType.ANONYMOUS and decl.superclass:
            referenced.add(decl.superclass)

        wmc = 0
        max_nested = 0
        call_keys = set(tally.call_keys)
        type_parameters = set(context.type_parameters)
        counts = Counter()
        for node in decl.method_nodes:
            type_parameters |= _type_parameters(unit, node)
            method_tally = self._tally(unit, node, context)
            wmc += 1 + method_tally.decisions
            max_nested = max(max_nested, self.max_nested_blocks(node.child_by_field_name("body")))
            name_node = node.child_by_field_name("name")
            name = unit.text(name_node) if name_node is not None else decl.simple_name
            call_keys.add((name, _parameter_count(node)))
            counts.update(self._method_flags(node, decl))

        field_counts = Counter()
        for _, flags in self._fields(unit, decl):
            field_counts.update(flags)

        return ClassMetrics(
            CBO=len(_coupled(referenced, type_parameters, decl)),
            DIT=hierarchy.depth(decl),
            WMC=wmc,
            RFC=len(call_keys),
            LCOM=self.lcom(unit, decl, context),
            NOSI=tally.static_invocations,
            SLOC=self.sloc(unit, root),
            loopQty=tally.loops,
            comparisonsQty=tally.comparisons,
            maxNestedBlocksQty=max_nested,
            anonymousClassesQty=tally.anonymous_classes,
            innerClassesQty=tally.inner_classes,
            lambdasQty=tally.lambdas,
            uniqueWordsQty=len(unique_words(tally.identifiers)),
            numbersQty=tally.numbers,
            assignmentsQty=tally.assignments,
            mathOperationsQty=tally.math,
            stringLiteralsQty=tally.strings,
            parenthesizedExpsQty=tally.parenthesized,
            variablesQty=tally.variables,
            returnsQty=tally.returns,
            totalMethodsQty=len(decl.method_nodes),
            staticMethodsQty=counts["static"],
            publicMethodsQty=counts["public"],
            privateMethodsQty=counts["private"],
            protectedMethodsQty=counts["protected"],
            defaultMethodsQty=counts["default"],
            abstractMethodsQty=counts["abstract"],
            finalMethodsQty=counts["final"],
            synchronizedMethodsQty=counts["synchronized"],
            totalFieldsQty=sum(1 for _ in self._fields(unit, decl)),
            staticFieldsQty=field_counts["static"],
            publicFieldsQty=field_counts["public"],
            privateFieldsQty=field_counts["private"],
            protectedFieldsQty=field_counts["protected"],
            defaultFieldsQty=field_counts["default"],
            finalFieldsQty=field_counts["final"],
            visibleFieldsQty=field_counts["public"] + field_counts["default"],
            classType=decl.class_type,
        )

    def sloc(self, unit: ParsedUnit, node: tree_sitter.Node) -> int:
        """Non-blank lines of the node span once comments are blanked out"""
        start, end = node.start_byte, node.end_byte
        text = bytearray(unit.source[start:end])
        for comment in iter_nodes(node):
            if comment.type in COMMENT_NODES:
                for offset in range(comment.start_byte - start, comment.end_byte - start):
                    if text[offset] not in (0x0A, 0x0D):
                        text[offset] = 0x20
        return sum(1 for line in bytes(text).splitlines() if line.strip())

    def max_nested_blocks(self, body: Optional[tree_sitter.Node]) -> int:
        """Deepest block nesting below a method body (the body itself is depth 0)"""
        if body is None:
            return 0
        deepest = 0
        stack = [(child, 0) for child in body.children]
        while stack:
            node, depth = stack.pop()
            if not within_member(node):
                continue
            if node.type in BLOCK_NODES:
                depth += 1
                deepest = max(deepest, depth)
            stack.extend((child, depth) for child in node.children)
        return deepest

    def lcom(self, unit: ParsedUnit, decl: TypeDecl, context: TypeContext) -> int:
        """Method pairs sharing no field minus pairs sharing one, floored at 0"""
        usages = []
        for node in decl.method_nodes:
            if node.type in CONSTRUCTOR_NODES:
                continue
            names = {
                unit.text(part) for part in iter_nodes(node, within_member)
                if part.type == "identifier"
            }
            usages.append(names & context.field_names)
        disjoint = shared = 0
        for i in range(len(usages)):
            for j in range(i + 1, len(usages)):
                if usages[i] & usages[j]:
                    shared += 1
                else:
                    disjoint += 1
        return max(disjoint - shared, 0)

    @staticmethod
    def _closure(start: Set[str], graph: Dict[str, Set[str]]) -> Set[str]:
        reached = set(start)
        frontier = list(start)
        while frontier:
            name = frontier.pop()
            for callee in graph.get(name, ()):
                if callee not in reached:
                    reached.add(callee)
                    frontier.append(callee)
        return reached

    def _tally(
        self,
        unit: ParsedUnit,
        root: tree_sitter.Node,
        context: TypeContext,
        own_body: Optional[tree_sitter.Node] = None,
    ) -> Tally:
        """Walk one scope without entering nested type bodies (own_body excepted)"""
        own_key = _key(own_body) if own_body is not None else None

        def descend(node: tree_sitter.Node) -> bool:
            return _key(node) == own_key or within_member(node)

        tally = Tally()
        static_owners = set(unit.imports) | unit.declared_type_names | JAVA_LANG_TYPES
        for node in iter_nodes(root, descend):
            kind = node.type
            if node is not root and _key(node) != own_key:
                if kind in NAMED_TYPE_NODES:
                    tally.inner_classes += 1
                    continue
                if kind == "class_body":
                    if node.parent is not None and node.parent.type == "object_creation_expression":
                        tally.anonymous_classes += 1
                    continue

            if kind in BRANCH_NODES:
                tally.decisions += 1
            if kind in LOOP_NODES:
                tally.loops += 1
            if kind == "enhanced_for_statement":
                tally.variables += 1
            elif kind == "switch_label" and unit.text(node).startswith("case"):
                tally.decisions += 1
            elif kind == "binary_expression":
                operator = node.child_by_field_name("operator")
                symbol = operator.type if operator is not None else ""
                if symbol in LOGICAL_OPERATORS:
                    tally.decisions += 1
                elif symbol in COMPARISON_OPERATORS:
                    tally.comparisons += 1
                elif symbol in MATH_OPERATORS:
                    tally.math += 1
            elif kind in NUMBER_NODES:
                tally.numbers += 1
            elif kind == "string_literal":
                tally.strings += 1
            elif kind == "assignment_expression":
                tally.assignments += 1
            elif kind == "variable_declarator" and node.parent is not None \
                    and node.parent.type == "local_variable_declaration":
                tally.variables += 1
                if node.child_by_field_name("value") is not None:
                    tally.assignments += 1
            elif kind == "return_statement":
                tally.returns += 1
            elif kind == "lambda_expression":
                tally.lambdas += 1
            elif kind == "parenthesized_expression":
                if node.parent is None or node.parent.type not in CONDITION_OWNERS:
                    tally.parenthesized += 1
            elif kind == "type_identifier":
                tally.referenced_types.add(unit.text(node))
                tally.identifiers.append(unit.text(node))
            elif kind == "identifier":
                tally.identifiers.append(unit.text(node))
            elif kind == "method_invocation":
                self._invocation(unit, node, context, static_owners, tally)
        return tally

    @staticmethod
    def _invocation(
        unit: ParsedUnit,
        node: tree_sitter.Node,
        context: TypeContext,
        static_owners: Set[str],
        tally: Tally,
    ) -> None:
        tally.invocations += 1
        name_node = node.child_by_field_name("name")
        arguments = node.child_by_field_name("arguments")
        name = unit.text(name_node) if name_node is not None else ""
        arity = len(arguments.named_children) if arguments is not None else 0
        tally.call_keys.add((name, arity))

        target = node.child_by_field_name("object")
        if target is None or target.type == "this":
            if name in context.method_names:
                tally.local_calls.add(name)
            return
        if target.type == "identifier":
            qualifier = unit.text(target)
            if qualifier in static_owners and qualifier[:1].isupper():
                tally.static_invocations += 1
                tally.referenced_types.add(qualifier)

    @staticmethod
    def _method_flags(node: tree_sitter.Node, decl: TypeDecl) -> List[str]:
        modifiers = modifier_keywords(node)
        visibility = modifiers & {"public", "private", "protected"}
        flags = []
        if decl.is_interface:
            if "private" not in visibility:
                flags.append("public")
            if node.child_by_field_name("body") is None and not modifiers & {"static", "default", "private"}:
                flags.append("abstract")
        else:
            flags.extend(visibility if visibility else ["default"])
            if "abstract" in modifiers:
                flags.append("abstract")
        if decl.is_interface and "private" in visibility:
            flags.append("private")
        flags.extend(modifiers & {"static", "final", "synchronized"})
        return flags

    def _fields(self, unit: ParsedUnit, decl: TypeDecl) -> List[Tuple[str, List[str]]]:
        """(name, flags) per field declarator"""
        fields = []
        for member in decl.member_nodes:
            if member.type not in ("field_declaration", "constant_declaration"):
                continue
            modifiers = modifier_keywords(member)
            if decl.is_interface:
                flags = ["public", "static", "final"]
            else:
                visibility = modifiers & {"public", "private", "protected"}
                flags = list(visibility) if visibility else ["default"]
                flags.extend(modifiers & {"static", "final"})
            for declarator in member.named_children:
                if declarator.type != "variable_declarator":
                    continue
                name_node = declarator.child_by_field_name("name")
                fields.append((unit.text(name_node) if name_node is not None else "", flags))
        return fields


def _key(node: tree_sitter.Node) -> Tuple[int, int, str]:
    return (node.start_byte, node.end_byte, node.type)


def _parameter_count(node: tree_sitter.Node) -> int:
    parameters = node.child_by_field_name("parameters")
    if parameters is None:
        return 0
    return sum(1 for part in parameters.named_children if part.type in ("formal_parameter", "spread_parameter"))


def _type_parameters(unit: ParsedUnit, node: tree_sitter.Node) -> Set[str]:
    names = set()
    parameters = node.child_by_field_name("type_parameters")
    if parameters is None:
        return names
    for parameter in parameters.named_children:
        for part in parameter.named_children:
            if part.type in ("type_identifier", "identifier"):
                names.add(unit.text(part))
                break
    return names


def _coupled(referenced: Set[str], type_parameters: Set[str], decl: TypeDecl) -> Set[str]:
    names = {erase_type(name) for name in referenced}
    return names - JAVA_LANG_TYPES - type_parameters - {decl.simple_name, "var"}


# Global instance
metrics_service = MetricsService()
