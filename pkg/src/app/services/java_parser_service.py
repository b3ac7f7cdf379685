"""
Service for parsing Java compilation units with tree-sitter
Enumerates type declarations (top-level, nested, local, anonymous) and their methods
"""

import logging
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Union

import tree_sitter
import tree_sitter_java

from src.app.schemas.error import SourceParseError
from src.app.schemas.java import MethodRecord, SourceSpan
from src.app.schemas.metrics import ClassType

logger = logging.getLogger(__name__)

NAMED_TYPE_NODES = {
    "class_declaration",
    "interface_declaration",
    "enum_declaration",
    "record_declaration",
    "annotation_type_declaration",
}
TYPE_BODY_NODES = {
    "class_body",
    "interface_body",
    "enum_body",
    "annotation_type_body",
}
METHOD_NODES = {"method_declaration", "constructor_declaration", "compact_constructor_declaration"}
CONSTRUCTOR_NODES = {"constructor_declaration", "compact_constructor_declaration"}

_TYPE_ARGUMENTS = re.compile(r"<[^<>]*>")
_WHITESPACE = re.compile(r"\s+")


def create_java_parser() -> tree_sitter.Parser:
    """
    Create a Tree-sitter parser configured for Java.

    Supports both the modern bindings (Parser(language)) and older releases
    that expect set_language.
    """
    language = tree_sitter.Language(tree_sitter_java.language())
    try:
        parser = tree_sitter.Parser(language)
    except TypeError:
        parser = tree_sitter.Parser()
        parser.set_language(language)
    return parser


def node_text(node: tree_sitter.Node, source_bytes: bytes) -> str:
    """Decode the bytes that correspond to a node."""
    return source_bytes[node.start_byte:node.end_byte].decode("utf-8", errors="replace")


def iter_nodes(
    root: tree_sitter.Node,
    descend: Optional[Callable[[tree_sitter.Node], bool]] = None,
) -> Iterator[tree_sitter.Node]:
    """
    Iterative preorder traversal of the syntax tree.

    Args:
        root: Node to start from (always yielded)
        descend: When given, children of a non-root node are visited only if
            descend(node) is true
    """
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if descend is not None and node is not root and not descend(node):
            continue
        stack.extend(reversed(node.children))


def is_nested_type(node: tree_sitter.Node) -> bool:
    """True for the body of a nested named or anonymous type"""
    return node.type in TYPE_BODY_NODES or node.type in NAMED_TYPE_NODES


def within_member(node: tree_sitter.Node) -> bool:
    """Traversal predicate that stays out of nested type declarations"""
    return not is_nested_type(node)


def span_of(node: tree_sitter.Node) -> SourceSpan:
    return SourceSpan(
        start_byte=node.start_byte,
        end_byte=node.end_byte,
        start_line=node.start_point[0] + 1,
        end_line=node.end_point[0] + 1,
    )


def modifier_keywords(node: tree_sitter.Node) -> set[str]:
    """Keyword modifiers (public, static, final, ...) of a declaration"""
    for child in node.children:
        if child.type == "modifiers":
            return {grandchild.type for grandchild in child.children if not grandchild.is_named}
    return set()


def erase_type(type_text: str) -> str:
    """Drop type arguments and whitespace: 'Map<K, List<V>>' -> 'Map'"""
    previous = None
    while previous != type_text:
        previous = type_text
        type_text = _TYPE_ARGUMENTS.sub("", type_text)
    return _WHITESPACE.sub("", type_text)


@dataclass
class TypeDecl:
    """A named or anonymous type declaration in a unit"""
    node: tree_sitter.Node
    body: Optional[tree_sitter.Node]
    fqn: str
    simple_name: str
    class_type: ClassType
    parent: Optional["TypeDecl"] = None
    superclass: Optional[str] = None
    anonymous_count: int = 0

    @property
    def member_nodes(self) -> List[tree_sitter.Node]:
        """Direct members of the body (enum body declarations flattened)"""
        if self.body is None:
            return []
        members = []
        for child in self.body.named_children:
            if child.type == "enum_body_declarations":
                members.extend(child.named_children)
            else:
                members.append(child)
        return members

    @property
    def method_nodes(self) -> List[tree_sitter.Node]:
        return [member for member in self.member_nodes if member.type in METHOD_NODES]

    @property
    def is_interface(self) -> bool:
        return self.class_type == ClassType.INTERFACE


@dataclass
class MethodNode:
    """A method declaration node bound to its enclosing type"""
    node: tree_sitter.Node
    owner: TypeDecl
    name: str
    signature: str
    is_constructor: bool

    @property
    def body(self) -> Optional[tree_sitter.Node]:
        return self.node.child_by_field_name("body")


@dataclass
class ParsedUnit:
    """A parsed compilation unit"""
    path: str
    source: bytes
    tree: tree_sitter.Tree
    package: str = ""
    imports: Dict[str, str] = field(default_factory=dict)
    types: List[TypeDecl] = field(default_factory=list)

    @property
    def root(self) -> tree_sitter.Node:
        return self.tree.root_node

    def text(self, node: tree_sitter.Node) -> str:
        return node_text(node, self.source)

    @property
    def declared_type_names(self) -> set[str]:
        return {decl.simple_name for decl in self.types if decl.class_type != ClassType.ANONYMOUS}


class JavaParserService:
    """
    Service for turning Java source into traversable trees
    """

    def __init__(self):
        self._local = threading.local()

    @property
    def parser(self) -> tree_sitter.Parser:
        """One parser per thread; tree-sitter parsers are not shareable"""
        parser = getattr(self._local, "parser", None)
        if parser is None:
            parser = create_java_parser()
            self._local.parser = parser
        return parser

    def parse_unit(self, source: Union[str, bytes], path: str = "<memory>") -> ParsedUnit:
        """
        Parse a compilation unit

        Args:
            source: Java source text
            path: Relative path used in identities and diagnostics

        Returns:
            ParsedUnit with package, imports and all type declarations

        Raises:
            SourceParseError: when the unit contains syntax errors
        """
        source_bytes = source.encode("utf-8") if isinstance(source, str) else source
        tree = self.parser.parse(source_bytes)
        if tree.root_node.has_error:
            raise SourceParseError(f"Syntax error in {path}", details={"path": path})

        unit = ParsedUnit(path=path, source=source_bytes, tree=tree)
        self._read_header(unit)
        unit.types = self._collect_types(unit)
        return unit

    def _read_header(self, unit: ParsedUnit) -> None:
        for child in unit.root.named_children:
            if child.type == "package_declaration":
                for part in child.named_children:
                    if part.type in ("scoped_identifier", "identifier"):
                        unit.package = unit.text(part)
            elif child.type == "import_declaration":
                text = unit.text(child)
                is_static = " static " in f" {text} "
                target = [part for part in child.named_children if part.type in ("scoped_identifier", "identifier")]
                if not target or "*" in text:
                    continue
                qualified = unit.text(target[0])
                simple = qualified.rsplit(".", 1)[-1]
                if is_static:
                    # static member import: the owning type is the qualifier
                    owner = qualified.rsplit(".", 1)[0]
                    unit.imports.setdefault(owner.rsplit(".", 1)[-1], owner)
                else:
                    unit.imports[simple] = qualified

    def _collect_types(self, unit: ParsedUnit) -> List[TypeDecl]:
        types: List[TypeDecl] = []

        def visit(node: tree_sitter.Node, enclosing: Optional[TypeDecl], in_member: bool) -> None:
            for child in node.children:
                decl = None
                if child.type in NAMED_TYPE_NODES:
                    decl = self._named_type(unit, child, enclosing, in_member)
                elif child.type == "object_creation_expression" and self._anonymous_body(child) is not None:
                    decl = self._anonymous_type(unit, child, enclosing)
                elif child.type == "enum_constant" and child.child_by_field_name("body") is not None:
                    decl = self._anonymous_type(unit, child, enclosing)

                if decl is not None:
                    types.append(decl)
                    # arguments of `new T(...) {}` belong to the enclosing scope
                    for part in child.children:
                        if part == decl.body:
                            visit(part, decl, False)
                        else:
                            visit(part, enclosing, in_member)
                    continue

                member_scope = in_member or child.type in METHOD_NODES or child.type in (
                    "field_declaration", "static_initializer", "block",
                )
                if child.type in TYPE_BODY_NODES or child.type == "enum_body_declarations":
                    member_scope = False
                visit(child, enclosing, member_scope)

        visit(unit.root, None, False)
        return types

    @staticmethod
    def _anonymous_body(node: tree_sitter.Node) -> Optional[tree_sitter.Node]:
        for child in node.named_children:
            if child.type == "class_body":
                return child
        return None

    def _named_type(
        self,
        unit: ParsedUnit,
        node: tree_sitter.Node,
        enclosing: Optional[TypeDecl],
        in_member: bool,
    ) -> TypeDecl:
        name_node = node.child_by_field_name("name")
        name = unit.text(name_node) if name_node is not None else "<unnamed>"
        if enclosing is None:
            fqn = f"{unit.package}.{name}" if unit.package else name
        elif in_member:
            fqn = f"{enclosing.fqn}${name}"
        else:
            fqn = f"{enclosing.fqn}.{name}"

        if node.type in ("interface_declaration", "annotation_type_declaration"):
            class_type = ClassType.INTERFACE
        elif node.type == "enum_declaration":
            class_type = ClassType.ENUM_TYPE
        elif enclosing is None:
            class_type = ClassType.CLASS
        else:
            class_type = ClassType.INNER_CLASS

        superclass = None
        superclass_node = node.child_by_field_name("superclass")
        if superclass_node is not None:
            for part in superclass_node.named_children:
                superclass = erase_type(unit.text(part)).rsplit(".", 1)[-1]

        return TypeDecl(
            node=node,
            body=node.child_by_field_name("body"),
            fqn=fqn,
            simple_name=name,
            class_type=class_type,
            parent=enclosing,
            superclass=superclass,
        )

    def _anonymous_type(self, unit: ParsedUnit, node: tree_sitter.Node, enclosing: Optional[TypeDecl]) -> TypeDecl:
        if node.type == "enum_constant":
            body = node.child_by_field_name("body")
            base = enclosing.simple_name if enclosing else None
        else:
            body = self._anonymous_body(node)
            type_node = node.child_by_field_name("type")
            base = erase_type(unit.text(type_node)).rsplit(".", 1)[-1] if type_node is not None else None

        if enclosing is None:
            # anonymous class outside any type cannot occur in valid Java
            owner_fqn = unit.package or "<unit>"
            index = 1
        else:
            enclosing.anonymous_count += 1
            owner_fqn = enclosing.fqn
            index = enclosing.anonymous_count

        return TypeDecl(
            node=node,
            body=body,
            fqn=f"{owner_fqn}${index}",
            simple_name=str(index),
            class_type=ClassType.ANONYMOUS,
            parent=enclosing,
            superclass=base,
        )

    def method_nodes(self, unit: ParsedUnit) -> List[MethodNode]:
        """All methods and constructors of every type in the unit, in source order"""
        methods = []
        for decl in unit.types:
            for node in decl.method_nodes:
                name_node = node.child_by_field_name("name")
                name = unit.text(name_node) if name_node is not None else decl.simple_name
                methods.append(MethodNode(
                    node=node,
                    owner=decl,
                    name=name,
                    signature=self.signature(unit, node, name),
                    is_constructor=node.type in CONSTRUCTOR_NODES,
                ))
        methods.sort(key=lambda method: method.node.start_byte)
        return methods

    def signature(self, unit: ParsedUnit, node: tree_sitter.Node, name: str) -> str:
        """Method name plus erased parameter types as written"""
        parameters = node.child_by_field_name("parameters")
        types = []
        if parameters is not None:
            for parameter in parameters.named_children:
                if parameter.type == "formal_parameter":
                    type_node = parameter.child_by_field_name("type")
                    type_name = erase_type(unit.text(type_node))
                    for part in parameter.named_children:
                        if part.type == "dimensions":
                            type_name += erase_type(unit.text(part))
                    types.append(type_name)
                elif parameter.type == "spread_parameter":
                    type_nodes = [part for part in parameter.named_children
                                  if part.type not in ("modifiers", "variable_declarator")]
                    if type_nodes:
                        types.append(erase_type(unit.text(type_nodes[0])) + "...")
        return f"{name}({','.join(types)})"

    def enumerate_methods(self, unit: ParsedUnit) -> List[MethodRecord]:
        """
        Method records (without log statements) for every method of the unit
        """
        return [
            MethodRecord(
                file_path=unit.path,
                class_fqn=method.owner.fqn,
                signature=method.signature,
                is_constructor=method.is_constructor,
                span=span_of(method.node),
            )
            for method in self.method_nodes(unit)
        ]


# Global instance
java_parser_service = JavaParserService()
