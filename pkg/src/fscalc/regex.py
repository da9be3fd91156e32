"""Extended regular expressions: lexer, parser, printer and compiler.

Operator precedence, tightest first::

    postfix   A*  A+  A/B  A./.B  A.r  A.i  A.u  A.l
    prefix    ~A  $A
    concat    A B
    minus     A - B
    and       A & B
    or        A | B
    rules     U -> L || l _ r, ...   and   {...}, {...}
    cross     A .x. B
    compose   A .o. B

Single characters are symbols.  A bare multi-character name refers to a
defined network or to a declared multi-character symbol; ``"quoted"`` text
is always one symbol and ``%`` escapes a special character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Union

from . import algebra as alg
from .errors import (RegexSyntaxError, UnboundVariable, UnbalancedBracket,
                     UnknownOperator)
from .fsm import (BOUNDARY, EPSILON, UNKNOWN, Network, any_symbol, epsilon,
                  minimize, symbol)
from .replace import ReplaceClause, compile_ruleset


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolLit:
    name: str


@dataclass(frozen=True)
class PairLit:
    upper: str   # EPSILON / UNKNOWN allowed
    lower: str


@dataclass(frozen=True)
class EpsilonLit:
    pass


@dataclass(frozen=True)
class AnyLit:
    pass


@dataclass(frozen=True)
class BoundaryLit:
    pass


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class DotBracketed:
    inner: "Node | None"


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class RuleClause:
    uppers: tuple
    lowers: tuple
    contexts: tuple = ()     # of (left or None, right or None)


@dataclass(frozen=True)
class RuleBlock:
    clauses: tuple
    orientation: str = "upward"
    optional: bool = False
    direction: str = "forward"


@dataclass(frozen=True)
class Rules:
    blocks: tuple


Node = Union[SymbolLit, PairLit, EpsilonLit, AnyLit, BoundaryLit, VarRef,
             DotBracketed, Unary, Binary, Rules]

ARROWS = {
    "->": (False, "forward"), "(->)": (True, "forward"),
    "<-": (False, "inverse"), "(<-)": (True, "inverse"),
    "<->": (False, "bidirectional"), "(<->)": (True, "bidirectional"),
}
ORIENTATION_MARKS = {"||": "upward", "//": "right", "\\\\": "left", "\\/": "downward"}
POSTFIX = {"*": "star", "+": "plus", ".r": "reverse", ".i": "invert",
           ".u": "project_upper", ".l": "project_lower"}


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str      # "sym", "qsym", "op", "eof"
    value: str
    pos: int


_MULTI_OPS = sorted([
    ".#.", ".x.", ".o.", "./.", "(<->)", "(->)", "(<-)", "<->", "->", "<-",
    "||", "//", "\\\\", "\\/", "<=>", "=>", "<=", "@->", "->@",
], key=len, reverse=True)
_SINGLE_OPS = set("[]{}()|&-*+~$/:,;?")
_POSTFIX_RE = re.compile(r"\.[riul](?![A-Za-z0-9_])")
_DOTCLOSE_RE = re.compile(r"\.\s*\]")
_DOTOPEN_RE = re.compile(r"\[\s*\.(?![#xo/]\.?)")
_TWO_LEVEL = {"=>", "<=>", "<="}


def _op_at(src: str, i: int) -> str | None:
    m = _DOTOPEN_RE.match(src, i)
    if m:
        return "[."
    m = _DOTCLOSE_RE.match(src, i)
    if m:
        return ".]"
    for op in _MULTI_OPS:
        if src.startswith(op, i):
            return op
    m = _POSTFIX_RE.match(src, i)
    if m:
        return m.group(0)
    return None


def tokenize(src: str) -> list[Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in "#!":
            while i < n and src[i] != "\n":
                i += 1
            continue
        op = _op_at(src, i)
        if op is not None:
            if op == "[.":
                end = _DOTOPEN_RE.match(src, i).end()
            elif op == ".]":
                end = _DOTCLOSE_RE.match(src, i).end()
            else:
                end = i + len(op)
            if op in _TWO_LEVEL:
                raise UnknownOperator(
                    f"two-level rule operator {op!r} is not supported; "
                    "write a replacement rule (->, <-, <->) instead", i, src)
            if op in ("@->", "->@"):
                raise UnknownOperator(f"directed replacement {op!r} is not supported", i, src)
            tokens.append(Token("op", op, i))
            i = end
            continue
        if c in _SINGLE_OPS:
            tokens.append(Token("op", c, i))
            i += 1
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and src[j] != '"':
                if src[j] == "\\" and j + 1 < n:
                    j += 1
                buf.append(src[j])
                j += 1
            if j >= n:
                raise RegexSyntaxError("unterminated quoted symbol", i, src)
            tokens.append(Token("qsym", "".join(buf), i))
            i = j + 1
            continue
        if c == "%":
            if i + 1 >= n:
                raise RegexSyntaxError("dangling escape", i, src)
            tokens.append(Token("qsym", src[i + 1], i))
            i += 2
            continue
        if c == "\\" or c == "=" or c == "@" and src.startswith("@->", i):
            raise UnknownOperator(f"unknown operator starting with {c!r}", i, src)
        j = i
        while j < n:
            ch = src[j]
            if ch.isspace() or ch in _SINGLE_OPS or ch in '"%':
                break
            if j > i and ch in ".<=\\" and _op_at(src, j) is not None:
                break
            j += 1
        word = src[i:j]
        tokens.append(Token("op" if word == "_" else "sym", word, i))
        i = j
    tokens.append(Token("eof", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    # helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *values: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in values

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, value: str, opener: Token | None = None) -> Token:
        if not self.at(value):
            if opener is not None:
                raise UnbalancedBracket(
                    f"expected {value!r} to close {opener.value!r} opened at offset "
                    f"{opener.pos}, found {self.describe()}", self.tok.pos, self.src)
            raise RegexSyntaxError(f"expected {value!r}, found {self.describe()}",
                                   self.tok.pos, self.src)
        return self.advance()

    def describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.value)

    def error(self, message: str):
        return RegexSyntaxError(message, self.tok.pos, self.src)

    # grammar
    def parse(self) -> Node:
        if self.tok.kind == "eof":
            raise self.error("empty expression")
        node = self.parse_compose()
        if self.at(";"):
            self.advance()
        if self.tok.kind != "eof":
            if self.at("]", ")", "}", ".]"):
                raise UnbalancedBracket(f"unmatched {self.tok.value!r}", self.tok.pos, self.src)
            raise self.error(f"unexpected {self.describe()}")
        return node

    def parse_compose(self) -> Node:
        node = self.parse_cross()
        while self.at(".o."):
            self.advance()
            node = Binary("compose", node, self.parse_cross())
        return node

    def parse_cross(self) -> Node:
        node = self.parse_rule()
        while self.at(".x."):
            self.advance()
            node = Binary("crossproduct", node, self.parse_rule())
        return node

    def parse_rule(self) -> Node:
        if self.at("{"):
            return self.parse_blocks()
        node = self.parse_union()
        if self.at(*ARROWS):
            block = self.parse_block_body(node)
            return Rules((replace(block, orientation=block.orientation or "upward"),))
        return node

    def parse_blocks(self) -> Rules:
        blocks = []
        while True:
            opener = self.expect("{")
            first = self.parse_union()
            blocks.append(self.parse_block_body(first))
            self.expect("}", opener)
            if self.at(",") and self.peek().kind == "op" and self.peek().value == "{":
                self.advance()
                continue
            break
        first = blocks[0]
        for b in blocks[1:]:
            if (b.optional, b.direction) != (first.optional, first.direction):
                raise self.error("all blocks of a parallel rule set must use the same arrow")
        # blocks without contexts take the orientation of the others
        marks = {b.orientation for b in blocks if b.orientation is not None}
        if len(marks) > 1:
            raise self.error("all blocks of a parallel rule set must use the same orientation")
        orientation = marks.pop() if marks else "upward"
        return Rules(tuple(replace(b, orientation=orientation) for b in blocks))

    def parse_block_body(self, first_upper: Node) -> RuleBlock:
        clauses = []
        arrow = None
        orientation = None
        upper = first_upper
        while True:
            uppers, lowers = [], []
            # replacement pairs
            while True:
                if not self.at(*ARROWS):
                    raise self.error(f"expected a replacement arrow, found {self.describe()}")
                tok = self.advance()
                if arrow is None:
                    arrow = tok.value
                elif tok.value != arrow:
                    raise RegexSyntaxError("mixed replacement arrows in one rule set",
                                           tok.pos, self.src)
                uppers.append(upper)
                lowers.append(self.parse_union())
                if self.at(",") and not self._comma_starts_block():
                    self.advance()
                    upper = self.parse_union()
                    continue
                break
            contexts = []
            next_upper = None
            if self.at(*ORIENTATION_MARKS):
                tok = self.advance()
                mark = ORIENTATION_MARKS[tok.value]
                if orientation is None:
                    orientation = mark
                elif orientation != mark:
                    raise RegexSyntaxError("mixed context orientations in one rule set",
                                           tok.pos, self.src)
                left = None if self.at("_") else self.parse_union()
                while True:
                    self.expect("_")
                    right = self.parse_union() if self.starts_operand() else None
                    contexts.append((left, right))
                    if not self.at(",") or self._comma_starts_block():
                        break
                    self.advance()
                    if self.at("_"):
                        left = None
                        continue
                    item = self.parse_union()
                    if self.at("_"):
                        left = item
                        continue
                    if self.at(*ARROWS):
                        next_upper = item
                        break
                    raise self.error(f"expected '_' or an arrow, found {self.describe()}")
            clauses.append(RuleClause(tuple(uppers), tuple(lowers), tuple(contexts)))
            if next_upper is None:
                break
            upper = next_upper
        optional, direction = ARROWS[arrow]
        return RuleBlock(tuple(clauses), orientation, optional, direction)

    def _comma_starts_block(self) -> bool:
        nxt = self.peek()
        return nxt.kind == "op" and nxt.value == "{"

    def starts_operand(self) -> bool:
        tok = self.tok
        if tok.kind in ("sym", "qsym"):
            return True
        return tok.kind == "op" and tok.value in ("[", "(", "[.", "?", ".#.", "~", "$")

    def parse_union(self) -> Node:
        node = self.parse_intersect()
        while self.at("|"):
            self.advance()
            node = Binary("union", node, self.parse_intersect())
        return node

    def parse_intersect(self) -> Node:
        node = self.parse_minus()
        while self.at("&"):
            self.advance()
            node = Binary("intersect", node, self.parse_minus())
        return node

    def parse_minus(self) -> Node:
        node = self.parse_concat()
        while self.at("-"):
            self.advance()
            node = Binary("minus", node, self.parse_concat())
        return node

    def parse_concat(self) -> Node:
        if not self.starts_operand():
            if self.at(*ARROWS):
                raise self.error("missing upper side before replacement arrow")
            raise self.error(f"expected an expression, found {self.describe()}")
        node = self.parse_prefix()
        while self.starts_operand():
            node = Binary("concat", node, self.parse_prefix())
        return node

    def parse_prefix(self) -> Node:
        if self.at("~"):
            self.advance()
            return Unary("complement", self.parse_prefix())
        if self.at("$"):
            self.advance()
            return Unary("contains", self.parse_prefix())
        return self.parse_postfix()

    def parse_postfix(self) -> Node:
        node = self.parse_atom()
        while True:
            if self.at(*POSTFIX):
                node = Unary(POSTFIX[self.advance().value], node)
            elif self.at("/"):
                self.advance()
                node = Binary("ignore", node, self.parse_atom())
            elif self.at("./."):
                self.advance()
                node = Binary("ignore_inside", node, self.parse_atom())
            else:
                return node

    def parse_atom(self) -> Node:
        node = self.parse_primary()
        if self.at(":"):
            colon = self.advance()
            other = self.parse_primary()
            up, low = _pair_side(node), _pair_side(other)
            if up is not None and low is not None:
                return PairLit(up, low)
            if isinstance(node, (DotBracketed, BoundaryLit)) or \
                    isinstance(other, (DotBracketed, BoundaryLit)):
                raise RegexSyntaxError("invalid operand of ':'", colon.pos, self.src)
            return Binary("crossproduct", node, other)
        return node

    def parse_primary(self) -> Node:
        tok = self.tok
        if tok.kind == "sym":
            self.advance()
            if tok.value == "0":
                return EpsilonLit()
            if len(tok.value) == 1:
                return SymbolLit(tok.value)
            return VarRef(tok.value)
        if tok.kind == "qsym":
            self.advance()
            return SymbolLit(tok.value)
        if tok.kind == "op":
            if tok.value == "?":
                self.advance()
                return AnyLit()
            if tok.value == ".#.":
                self.advance()
                return BoundaryLit()
            if tok.value == "[":
                self.advance()
                if self.at("]"):
                    self.advance()
                    return EpsilonLit()
                node = self.parse_compose()
                self.expect("]", tok)
                return node
            if tok.value == "(":
                self.advance()
                node = self.parse_compose()
                self.expect(")", tok)
                return Unary("option", node)
            if tok.value == "[.":
                self.advance()
                if self.at(".]"):
                    self.advance()
                    return DotBracketed(None)
                node = self.parse_compose()
                self.expect(".]", tok)
                return DotBracketed(node)
            if tok.value == "_":
                raise RegexSyntaxError("context slot '_' outside a rule", tok.pos, self.src)
            if tok.value in ("]", ")", "}", ".]"):
                raise UnbalancedBracket(f"unmatched {tok.value!r}", tok.pos, self.src)
        if tok.kind == "eof":
            raise RegexSyntaxError("unexpected end of input", tok.pos, self.src)
        raise self.error(f"unexpected {self.describe()}")


def _pair_side(node) -> str | None:
    if isinstance(node, SymbolLit):
        return node.name
    if isinstance(node, EpsilonLit):
        return EPSILON
    if isinstance(node, AnyLit):
        return UNKNOWN
    return None


def parse(src: str) -> Node:
    return Parser(src).parse()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PLAIN = re.compile(r"[^\s\[\]{}()|&\-*+~$/:,;?\"%#!.<>=\\0_]")

_BINARY_OPS = {"union": " | ", "intersect": " & ", "minus": " - ", "concat": " ",
               "crossproduct": " .x. ", "compose": " .o. ", "ignore": "/",
               "ignore_inside": "./."}
_POSTFIX_TEXT = {v: k for k, v in POSTFIX.items()}
_ARROW_TEXT = {v: k for k, v in ARROWS.items()}
_MARK_TEXT = {v: k for k, v in ORIENTATION_MARKS.items()}


def _symbol_text(name: str) -> str:
    if name == EPSILON:
        return "0"
    if name == UNKNOWN:
        return "?"
    if len(name) == 1:
        return name if _PLAIN.fullmatch(name) else "%" + name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_text(node: Node) -> str:
    """Fully bracketed rendering that parses back to an equal tree."""
    if isinstance(node, SymbolLit):
        return _symbol_text(node.name)
    if isinstance(node, VarRef):
        return node.name
    if isinstance(node, PairLit):
        return f"{_symbol_text(node.upper)}:{_symbol_text(node.lower)}"
    if isinstance(node, EpsilonLit):
        return "0"
    if isinstance(node, AnyLit):
        return "?"
    if isinstance(node, BoundaryLit):
        return ".#."
    if isinstance(node, DotBracketed):
        return "[. .]" if node.inner is None else f"[. {to_text(node.inner)} .]"
    if isinstance(node, Unary):
        inner = to_text(node.arg)
        if node.op == "option":
            return f"({inner})"
        if node.op == "complement":
            return f"[~{inner}]"
        if node.op == "contains":
            return f"[${inner}]"
        return f"[{inner}{_POSTFIX_TEXT[node.op]}]"
    if isinstance(node, Binary):
        if node.op in ("ignore", "ignore_inside"):
            return f"[{to_text(node.left)}{_BINARY_OPS[node.op]}[{to_text(node.right)}]]"
        return f"[{to_text(node.left)}{_BINARY_OPS[node.op]}{to_text(node.right)}]"
    if isinstance(node, Rules):
        return "[" + ", ".join(_block_text(b) for b in node.blocks) + "]"
    raise TypeError(f"not an AST node: {node!r}")


def _block_text(block: RuleBlock) -> str:
    arrow = _ARROW_TEXT[(block.optional, block.direction)]
    mark = _MARK_TEXT[block.orientation]
    clauses = []
    for clause in block.clauses:
        pairs = ", ".join(f"[{to_text(u)}] {arrow} [{to_text(l)}]"
                          for u, l in zip(clause.uppers, clause.lowers))
        if clause.contexts:
            ctx = ", ".join(
                ("" if l is None else f"[{to_text(l)}] ") + "_" +
                ("" if r is None else f" [{to_text(r)}]")
                for l, r in clause.contexts)
            pairs += f" {mark} {ctx}"
        clauses.append(pairs)
    return "{ " + ", ".join(clauses) + " }"


# ---------------------------------------------------------------------------
# Compiler
# ---------------------------------------------------------------------------

@dataclass
class Environment:
    bindings: dict[str, Network] = field(default_factory=dict)
    symbols: set[str] = field(default_factory=set)
    debug: dict | None = None

    def define(self, name: str, net: Network) -> None:
        self.bindings[name] = net

    def lookup(self, name: str) -> Network:
        if name in self.bindings:
            return self.bindings[name]
        if name in self.symbols:
            return symbol(name)
        raise UnboundVariable(name)


class _Compiler:
    def __init__(self, env: Environment):
        self.env = env

    def compile(self, node: Node, in_context: bool = False) -> Network:
        return minimize(self._compile(node, in_context))

    def _compile(self, node: Node, in_context: bool) -> Network:
        if isinstance(node, SymbolLit):
            # a defined name shadows the one-character symbol it spells
            if node.name in self.env.bindings:
                return self.env.bindings[node.name]
            return symbol(node.name)
        if isinstance(node, VarRef):
            return self.env.lookup(node.name)
        if isinstance(node, EpsilonLit):
            return epsilon()
        if isinstance(node, AnyLit):
            return any_symbol()
        if isinstance(node, BoundaryLit):
            if not in_context:
                raise RegexSyntaxError(".#. may only appear in a rule context")
            return symbol(BOUNDARY)
        if isinstance(node, PairLit):
            return alg.pair(node.upper, node.lower)
        if isinstance(node, DotBracketed):
            raise RegexSyntaxError("[. .] may only appear as the upper side of a rule")
        if isinstance(node, Unary):
            return alg.apply_op(node.op, [self.compile(node.arg, in_context)])
        if isinstance(node, Binary):
            return alg.apply_op(node.op, [self.compile(node.left, in_context),
                                          self.compile(node.right, in_context)])
        if isinstance(node, Rules):
            return self.compile_rules(node)
        raise TypeError(f"not an AST node: {node!r}")

    def compile_rules(self, rules: Rules) -> Network:
        clauses = []
        for block in rules.blocks:
            for clause in block.clauses:
                uppers, dotted = [], []
                for u in clause.uppers:
                    if isinstance(u, DotBracketed):
                        uppers.append(epsilon() if u.inner is None else self.compile(u.inner))
                        dotted.append(True)
                    else:
                        uppers.append(self.compile(u))
                        dotted.append(False)
                lowers = [self.compile(l) for l in clause.lowers]
                contexts = tuple(
                    (None if l is None else self.compile(l, True),
                     None if r is None else self.compile(r, True))
                    for l, r in clause.contexts)
                for side in (*uppers, *lowers):
                    if side.is_relation:
                        raise alg.RelationOperandError(
                            "replacement sides must denote languages")
                clauses.append(ReplaceClause(tuple(uppers), tuple(lowers), contexts,
                                             tuple(dotted)))
        first = rules.blocks[0]
        return compile_ruleset(clauses, first.orientation, first.optional,
                               first.direction, self.env.debug)


def compile(node: Node | str, env: Environment | None = None) -> Network:
    """Compile an AST (or source text) to a minimal network."""
    if isinstance(node, str):
        node = parse(node)
    return _Compiler(env or Environment()).compile(node)


def compile_regex(src: str, env: Environment | None = None) -> Network:
    return compile(parse(src), env)
