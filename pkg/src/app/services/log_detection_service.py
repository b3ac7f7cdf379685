"""
Service for lexical log statement detection, placement context classification
and leakage-safe log removal
"""

import logging
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import tree_sitter

from src.app.schemas.corpus import LogContext
from src.app.schemas.java import LogStatement, MethodRecord, RemovalReport
from src.app.services.java_parser_service import (
    METHOD_NODES,
    ParsedUnit,
    iter_nodes,
    java_parser_service,
    span_of,
    within_member,
)

logger = logging.getLogger(__name__)

LOG_PATTERNS = (r"log(ger)?", r"(error|warn|info|debug)")
STRICT_LOG_PATTERNS = (r"\blog(ger)?\b", r"\b(error|warn|info|debug)\b")
GUARD_PATTERNS = (r"log(ger)?", r"(is)?(trace|debug|info|warn|error).*enabled")
STRICT_GUARD_PATTERNS = (r"\blog(ger)?\b", r"(is)?(trace|debug|info|warn|error).*enabled")

LOOP_NODES = {"for_statement", "enhanced_for_statement", "while_statement", "do_statement"}
TRY_NODES = {"try_statement", "try_with_resources_statement", "finally_clause"}
TRANSPARENT_NODES = {"block", "labeled_statement"}
STATEMENT_LIST_NODES = {"block", "constructor_body", "switch_block_statement_group", "program"}
SIDE_EFFECT_NODES = {"assignment_expression", "update_expression"}

Edit = Tuple[int, int, bytes]


@dataclass
class LogPatterns:
    """Compiled detection and guard patterns for one regex mode"""
    statement: Tuple[re.Pattern, ...]
    guard: Tuple[re.Pattern, ...]

    @classmethod
    def build(cls, strict: bool = False) -> "LogPatterns":
        statement = STRICT_LOG_PATTERNS if strict else LOG_PATTERNS
        guard = STRICT_GUARD_PATTERNS if strict else GUARD_PATTERNS
        return cls(
            statement=tuple(re.compile(pattern, re.DOTALL) for pattern in statement),
            guard=tuple(re.compile(pattern, re.DOTALL) for pattern in guard),
        )

    def is_log(self, expression_text: str) -> bool:
        lowered = expression_text.lower()
        return any(pattern.search(lowered) for pattern in self.statement)

    def is_guard(self, condition_text: str) -> bool:
        lowered = condition_text.lower()
        return any(pattern.search(lowered) for pattern in self.guard)


class LogDetectionService:
    """
    Service for detecting and removing log statements
    """

    def __init__(self, strict: bool = False):
        self.patterns = LogPatterns.build(strict)

    def configure(self, strict: bool) -> None:
        """Switch between the lenient and word-boundary regex modes"""
        self.patterns = LogPatterns.build(strict)

    def log_statement_nodes(
        self,
        unit: ParsedUnit,
        root: tree_sitter.Node,
        stay_in_member: bool = True,
    ) -> List[tree_sitter.Node]:
        """
        Expression statements whose expression is a method invocation matching
        a log pattern. Multi-line statements and fluent chains count once.

        Args:
            unit: Parsed unit owning the node
            root: Method node (or the unit root)
            stay_in_member: Skip nested type declarations below root
        """
        descend = within_member if stay_in_member else None
        found = []
        for node in iter_nodes(root, descend):
            if node.type != "expression_statement":
                continue
            expression = node.named_children[0] if node.named_children else None
            if expression is None or expression.type != "method_invocation":
                continue
            if self.patterns.is_log(unit.text(expression)):
                found.append(node)
        return found

    def detect_log_statements(self, unit: ParsedUnit, method: tree_sitter.Node) -> List[LogStatement]:
        """
        Log statements of one method body, each with its enclosing context
        """
        return [
            LogStatement(
                span=span_of(node),
                context=self.classify_enclosing_context(node),
                text=unit.text(node),
            )
            for node in self.log_statement_nodes(unit, method)
        ]

    def label_methods(self, unit: ParsedUnit) -> List[MethodRecord]:
        """Method records of a unit, labeled from its original (pre-removal) source"""
        return [
            MethodRecord(
                file_path=unit.path,
                class_fqn=method.owner.fqn,
                signature=method.signature,
                is_constructor=method.is_constructor,
                span=span_of(method.node),
                log_statements=self.detect_log_statements(unit, method.node),
            )
            for method in java_parser_service.method_nodes(unit)
        ]

    def classify_enclosing_context(self, statement: tree_sitter.Node) -> LogContext:
        """
        Innermost enclosing construct of a statement (plain blocks and labels are transparent)
        """
        node = statement.parent
        while node is not None:
            kind = node.type
            if kind in TRANSPARENT_NODES:
                node = node.parent
                continue
            if kind == "if_statement":
                return LogContext.IF_ELSE
            if kind == "catch_clause":
                return LogContext.CATCH_CLAUSE
            if kind in TRY_NODES:
                return LogContext.TRY_STATEMENT
            if kind in LOOP_NODES:
                return LogContext.LOOP_STATEMENT
            if kind in METHOD_NODES or kind == "constructor_body":
                return LogContext.METHOD_DECLARATION
            return LogContext.OTHER
        return LogContext.OTHER

    def is_retained(self, statement: tree_sitter.Node) -> bool:
        """
        A log statement stays when deleting it would also delete non-log behavior:
        side-effecting arguments or embedded block lambdas / anonymous classes
        """
        for node in iter_nodes(statement):
            if node.type in SIDE_EFFECT_NODES:
                return True
            if node.type == "lambda_expression":
                body = node.child_by_field_name("body")
                if body is not None and body.type == "block":
                    return True
            if node.type == "class_body":
                return True
        return False

    def _guards(self, unit: ParsedUnit, removed: set) -> List[tree_sitter.Node]:
        """Else-less level-check ifs whose body is empty once logs are gone, inner first"""
        if_nodes = [node for node in iter_nodes(unit.root) if node.type == "if_statement"]
        guards = []
        for node in reversed(if_nodes):
            if node.child_by_field_name("alternative") is not None:
                continue
            condition = node.child_by_field_name("condition")
            consequence = node.child_by_field_name("consequence")
            if condition is None or consequence is None:
                continue
            if not self.patterns.is_guard(unit.text(condition)):
                continue
            if self._empties(consequence, removed):
                removed.add(_key(node))
                guards.append(node)
        return guards

    @staticmethod
    def _empties(statement: tree_sitter.Node, removed: set) -> bool:
        if _key(statement) in removed:
            return True
        if statement.type != "block":
            return False
        children = [child for child in statement.named_children if "comment" not in child.type]
        return bool(children) and all(_key(child) in removed for child in children)

    def remove_logs(self, unit: ParsedUnit) -> Tuple[ParsedUnit, RemovalReport]:
        """
        Delete log statements and their guards across the whole unit

        Args:
            unit: Original parsed unit

        Returns:
            The re-parsed log-free unit and its removal report
        """
        statements = self.log_statement_nodes(unit, unit.root, stay_in_member=False)
        removable = [node for node in statements if not self.is_retained(node)]
        removed = {_key(node) for node in removable}
        guards = self._guards(unit, removed)

        gone = sorted(removable + guards, key=lambda node: (node.start_byte, -node.end_byte))
        top_level = _outermost(gone)
        modified_source = _apply_edits(unit.source, [_edit_for(unit.source, node) for node in top_level])

        modified = java_parser_service.parse_unit(modified_source, unit.path)
        logs_after = len(self.log_statement_nodes(modified, modified.root, stay_in_member=False))
        report = RemovalReport(
            path=unit.path,
            logs_before=len(statements),
            logs_after=logs_after,
            guards_removed=len(guards),
        )
        if logs_after:
            logger.warning(f"{unit.path}: {logs_after} of {len(statements)} log statements could not be removed")
        return modified, report

    @staticmethod
    def removal_residual_ratio(reports: Iterable[RemovalReport]) -> float:
        """Aggregate logs_after / logs_before over a corpus (0 without logs)"""
        before = after = 0
        for report in reports:
            before += report.logs_before
            after += report.logs_after
        return after / before if before else 0.0

    @staticmethod
    def aggregate(reports: Iterable[RemovalReport], path: str = "<corpus>") -> RemovalReport:
        reports = list(reports)
        return RemovalReport(
            path=path,
            logs_before=sum(report.logs_before for report in reports),
            logs_after=sum(report.logs_after for report in reports),
            guards_removed=sum(report.guards_removed for report in reports),
        )


def _key(node: tree_sitter.Node) -> Tuple[int, int, str]:
    return (node.start_byte, node.end_byte, node.type)


def _outermost(nodes: List[tree_sitter.Node]) -> List[tree_sitter.Node]:
    """Drop nodes nested in an earlier node (input sorted by start, widest first)"""
    kept: List[tree_sitter.Node] = []
    for node in nodes:
        if kept and node.start_byte >= kept[-1].start_byte and node.end_byte <= kept[-1].end_byte:
            continue
        kept.append(node)
    return kept


def _edit_for(source: bytes, node: tree_sitter.Node) -> Edit:
    """
    Deletion in a statement list, whole lines when the statement owns them.
    Elsewhere (if, loop, label and switch-rule bodies) an empty block takes its
    place; a bare `;` is not a valid switch-rule body.
    """
    parent: Optional[tree_sitter.Node] = node.parent
    if parent is None or parent.type not in STATEMENT_LIST_NODES:
        return (node.start_byte, node.end_byte, b"{}")

    line_start = source.rfind(b"\n", 0, node.start_byte) + 1
    line_end = source.find(b"\n", node.end_byte)
    line_end = len(source) if line_end == -1 else line_end
    if not source[line_start:node.start_byte].strip() and not source[node.end_byte:line_end].strip():
        return (line_start, min(line_end + 1, len(source)), b"")
    return (node.start_byte, node.end_byte, b"")


def _apply_edits(source: bytes, edits: List[Edit]) -> bytes:
    for start, end, replacement in sorted(edits, key=lambda edit: edit[0], reverse=True):
        source = source[:start] + replacement + source[end:]
    return source


# Global instance
log_detection_service = LogDetectionService()
