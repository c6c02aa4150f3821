"""Concrete syntax and AST for knowledge bases.

A knowledge-base file is line-oriented with ``#`` comments and these
statements (the ``algebra`` header must come first):

    algebra chain 3
    algebra lattice { elem 0 p q 1 ; edge 0 < p ; ... }
    obj P1 P2
    feat y1 y4
    box RB
    dia RD
    concept C1 C3 C5
    tbox C5 == C1 & C3
    tbox C8 <= C1 | C3            # subsumption sugar, introduces _sub1
    abox 1/2 <= P3 : [RB]C1
    abox not 1/2 <= RB(P3, y4)    # also: abox 1/2 !<= RB(P3, y4)
    abox RB(P3, y4) < 1/2         # strict sugar, linear algebras only
    model { obj ... feat ... I row = v v v ... concept C extent = ... }

Concept connectives: ``&`` (meet), ``|`` (join, binds weaker), ``[R]C`` and
``<R>C`` for the modal operators, parentheses as usual.  Relational terms are
``I(a,x)``, ``R(a,x)`` for box roles and ``R(x,a)`` for diamond roles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .heyting import Algebra, AlgebraError, make_chain, make_lattice


class KbError(Exception):
    """Base error for knowledge-base text handling."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line else ""
        super().__init__(message + where)


class KbSyntaxError(KbError):
    pass


class KbSortError(KbError):
    pass


class KbNameError(KbError):
    pass


class KbElementError(KbError):
    pass


# -- concepts ----------------------------------------------------------------


class Concept:
    """Base class for concept AST nodes; subclasses are frozen and interned
    by structural equality with a cached hash."""

    __slots__ = ()


def _cached_hash(cls):
    orig_hash = cls.__hash__

    def __hash__(self):
        h = getattr(self, "_h", None)
        if h is None:
            h = orig_hash(self)
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True)
class Prim(Concept):
    name: str
    __slots__ = ("name", "_h")


@_cached_hash
@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept
    __slots__ = ("left", "right", "_h")


@_cached_hash
@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept
    __slots__ = ("left", "right", "_h")


@_cached_hash
@dataclass(frozen=True)
class Box(Concept):
    role: str
    arg: Concept
    __slots__ = ("role", "arg", "_h")


@_cached_hash
@dataclass(frozen=True)
class Dia(Concept):
    role: str
    arg: Concept
    __slots__ = ("role", "arg", "_h")


def concept_size(c: Concept) -> int:
    if isinstance(c, Prim):
        return 1
    if isinstance(c, (Box, Dia)):
        return 1 + concept_size(c.arg)
    return 1 + concept_size(c.left) + concept_size(c.right)


def _prec(c: Concept) -> int:
    if isinstance(c, Or):
        return 1
    if isinstance(c, And):
        return 2
    return 3


def concept_text(c: Concept) -> str:
    """Canonical rendering; parses back to a structurally identical tree."""
    if isinstance(c, Prim):
        return c.name
    if isinstance(c, Box):
        arg = concept_text(c.arg)
        if _prec(c.arg) < 3:
            arg = f"({arg})"
        return f"[{c.role}]{arg}"
    if isinstance(c, Dia):
        arg = concept_text(c.arg)
        if _prec(c.arg) < 3:
            arg = f"({arg})"
        return f"<{c.role}>{arg}"
    if isinstance(c, And):
        left = concept_text(c.left)
        if _prec(c.left) < 2:
            left = f"({left})"
        right = concept_text(c.right)
        if _prec(c.right) <= 2:
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(c, Or):
        left = concept_text(c.left)
        if _prec(c.left) < 1:
            left = f"({left})"
        right = concept_text(c.right)
        if _prec(c.right) <= 1:
            right = f"({right})"
        return f"{left} | {right}"
    raise TypeError(f"not a concept: {c!r}")


def subformulas(c: Concept, out: dict) -> None:
    """Post-order subformula collection into an insertion-ordered dict."""
    if isinstance(c, (And, Or)):
        subformulas(c.left, out)
        subformulas(c.right, out)
    elif isinstance(c, (Box, Dia)):
        subformulas(c.arg, out)
    out.setdefault(c, None)


# -- ABox terms, assertions, axioms ------------------------------------------


@_cached_hash
@dataclass(frozen=True)
class Member:
    """a : C  (the individual may be a name or a tableau constant)."""
    obj: object
    concept: Concept
    __slots__ = ("obj", "concept", "_h")


@_cached_hash
@dataclass(frozen=True)
class Describes:
    """x :: C."""
    feat: object
    concept: Concept
    __slots__ = ("feat", "concept", "_h")


@_cached_hash
@dataclass(frozen=True)
class Inc:
    """I(a, x)."""
    obj: object
    feat: object
    __slots__ = ("obj", "feat", "_h")


@_cached_hash
@dataclass(frozen=True)
class BoxRel:
    """R(a, x) for a box role."""
    role: str
    obj: object
    feat: object
    __slots__ = ("role", "obj", "feat", "_h")


@_cached_hash
@dataclass(frozen=True)
class DiaRel:
    """R(x, a) for a diamond role."""
    role: str
    feat: object
    obj: object
    __slots__ = ("role", "feat", "obj", "_h")


ABoxTerm = (Member, Describes, Inc, BoxRel, DiaRel)


@dataclass(frozen=True)
class Assertion:
    positive: bool
    bound: int
    term: object


@dataclass(frozen=True)
class TBoxAxiom:
    left: Concept
    right: Concept


def term_text(term, render=str) -> str:
    if isinstance(term, Member):
        return f"{render(term.obj)} : {concept_text(term.concept)}"
    if isinstance(term, Describes):
        return f"{render(term.feat)} :: {concept_text(term.concept)}"
    if isinstance(term, Inc):
        return f"I({render(term.obj)}, {render(term.feat)})"
    if isinstance(term, BoxRel):
        return f"{term.role}({render(term.obj)}, {render(term.feat)})"
    if isinstance(term, DiaRel):
        return f"{term.role}({render(term.feat)}, {render(term.obj)})"
    raise TypeError(f"not an ABox term: {term!r}")


def assertion_text(a: Assertion, alg: Algebra, render=str) -> str:
    head = "" if a.positive else "not "
    return f"{head}{alg.render(a.bound)} <= {term_text(a.term, render)}"


def axiom_text(ax: TBoxAxiom) -> str:
    return f"{concept_text(ax.left)} == {concept_text(ax.right)}"


# -- knowledge bases ---------------------------------------------------------


@dataclass
class KnowledgeBase:
    algebra: Algebra
    objects: tuple[str, ...] = ()
    features: tuple[str, ...] = ()
    box_roles: tuple[str, ...] = ()
    dia_roles: tuple[str, ...] = ()
    concept_names: tuple[str, ...] = ()
    abox: tuple[Assertion, ...] = ()
    tbox: tuple[TBoxAxiom, ...] = ()

    def role_sort(self, name: str) -> str:
        if name in self.box_roles:
            return "box"
        if name in self.dia_roles:
            return "dia"
        raise KbNameError(f"undeclared role {name!r}")

    def replace(self, **kw) -> "KnowledgeBase":
        data = {f: getattr(self, f) for f in (
            "algebra", "objects", "features", "box_roles", "dia_roles",
            "concept_names", "abox", "tbox")}
        data.update(kw)
        return KnowledgeBase(**data)


def subconcepts(kb: KnowledgeBase) -> tuple[Concept, ...]:
    """All subformulas of concepts appearing in ABox assertions, in
    deterministic first-occurrence post-order."""
    out: dict = {}
    for assertion in kb.abox:
        term = assertion.term
        if isinstance(term, (Member, Describes)):
            subformulas(term.concept, out)
    return tuple(out.keys())


# -- tokenizer ---------------------------------------------------------------

KEYWORDS = frozenset({
    "algebra", "chain", "lattice", "elem", "edge", "obj", "feat", "box",
    "dia", "concept", "tbox", "abox", "model", "not", "bind", "extent",
    "intent", "I",
})

_TOKEN_RE = re.compile(r"""
      (?P<ws>[ \t\r]+)
    | (?P<comment>\#[^\n]*)
    | (?P<nl>\n)
    | (?P<elem>[0-9][A-Za-z0-9_]*(?:/[A-Za-z0-9_]+)?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>!<=|<=|==|::|[{}()\[\]<>=:,&|;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # "elem", "ident", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise KbSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            if kind not in ("ws", "comment"):
                tokens.append(Token(kind, chunk, line, col))
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- parser ------------------------------------------------------------------


@dataclass
class ModelBlock:
    """Raw contents of a ``model { ... }`` block, before semantic assembly."""
    objects: list[str] = field(default_factory=list)
    features: list[str] = field(default_factory=list)
    rows: list[tuple[str, str, list[int], int, int]] = field(default_factory=list)
    concept_rows: list[tuple[str, str, list[int], int, int]] = field(default_factory=list)
    binds: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class Document:
    kb: KnowledgeBase
    interpretation: Optional[object] = None  # fca.Interpretation when present


class _Parser:
    def __init__(self, text: str, infer_declarations: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.infer = infer_declarations
        self.algebra: Optional[Algebra] = None
        self.decls: dict[str, str] = {}  # name -> kind
        self.order: dict[str, list[str]] = {
            "obj": [], "feat": [], "box": [], "dia": [], "concept": []}
        self.abox: list[Assertion] = []
        self.abox_seen: set[tuple] = set()
        self.tbox: list[TBoxAxiom] = []
        self.model: Optional[ModelBlock] = None
        self.fresh_counter = 0

    # token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.next()
        if tok.kind != "op" or tok.text != text:
            raise KbSyntaxError(f"expected {text!r}, found {tok.text!r}",
                                tok.line, tok.col)
        return tok

    def expect_ident(self, what: str = "name") -> Token:
        tok = self.next()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise KbSyntaxError(f"expected {what}, found {tok.text!r}",
                                tok.line, tok.col)
        return tok

    # declarations

    def declare(self, name: str, kind: str, tok: Token, user: bool = True) -> None:
        if user and name.startswith("_"):
            raise KbNameError(
                f"names starting with '_' are reserved, got {name!r}",
                tok.line, tok.col)
        old = self.decls.get(name)
        if old == kind:
            return
        if old is not None:
            raise KbNameError(
                f"{name!r} already declared as {old}", tok.line, tok.col)
        self.decls[name] = kind
        self.order[kind].append(name)

    def lookup(self, name: str, kinds: tuple[str, ...], tok: Token,
               infer_as: Optional[str] = None) -> str:
        kind = self.decls.get(name)
        if kind is None:
            if self.infer and infer_as is not None:
                self.declare(name, infer_as, tok, user=False)
                return infer_as
            raise KbNameError(f"undeclared name {name!r}", tok.line, tok.col)
        if kind not in kinds:
            raise KbSortError(
                f"{name!r} is a {kind} name, expected {' or '.join(kinds)}",
                tok.line, tok.col)
        return kind

    def need_algebra(self, tok: Token) -> Algebra:
        if self.algebra is None:
            raise KbSyntaxError("the algebra header must come first",
                                tok.line, tok.col)
        return self.algebra

    def parse_bound(self) -> int:
        tok = self.next()
        if tok.kind not in ("elem", "ident"):
            raise KbSyntaxError(f"expected an algebra element, found {tok.text!r}",
                                tok.line, tok.col)
        return self.resolve_element(tok)

    def resolve_element(self, tok: Token) -> int:
        alg = self.need_algebra(tok)
        try:
            return alg.element(tok.text)
        except AlgebraError:
            pass
        if alg.description[0] == "chain":
            n = alg.description[1]
            m = re.fullmatch(r"(\d+)(?:/(\d+))?", tok.text)
            if m:
                num = int(m.group(1))
                den = int(m.group(2)) if m.group(2) else 1
                if den > 0 and num * (n - 1) % den == 0:
                    code = num * (n - 1) // den
                    if 0 <= code < n:
                        return code
        raise KbElementError(
            f"{tok.text!r} is not an element of the algebra",
            tok.line, tok.col)

    # grammar

    def parse(self) -> Document:
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.kind != "ident":
                raise KbSyntaxError(f"expected a statement, found {tok.text!r}",
                                    tok.line, tok.col)
            if tok.text == "algebra":
                self.parse_algebra(tok)
            elif tok.text in ("obj", "feat", "box", "dia", "concept"):
                self.parse_decl(tok.text)
            elif tok.text == "tbox":
                self.parse_tbox()
            elif tok.text == "abox":
                self.parse_abox()
            elif tok.text == "model":
                self.parse_model(tok)
            else:
                raise KbSyntaxError(f"unknown statement {tok.text!r}",
                                    tok.line, tok.col)
        return self.finish()

    def parse_algebra(self, tok: Token) -> None:
        if self.algebra is not None:
            raise KbSyntaxError("duplicate algebra header", tok.line, tok.col)
        kind = self.next()
        if kind.text == "chain":
            size = self.next()
            if size.kind == "eof" or not size.text.isdigit():
                raise KbSyntaxError("expected chain size", size.line, size.col)
            try:
                self.algebra = make_chain(int(size.text))
            except AlgebraError as exc:
                raise KbElementError(str(exc), size.line, size.col) from exc
        elif kind.text == "lattice":
            self.expect_op("{")
            elems: list[str] = []
            edges: list[tuple[str, str]] = []
            while True:
                tok = self.next()
                if tok.kind == "op" and tok.text == "}":
                    break
                if tok.kind == "op" and tok.text == ";":
                    continue
                if tok.text == "elem":
                    while self.peek().kind in ("ident", "elem") and \
                            self.peek().text not in KEYWORDS:
                        elems.append(self.next().text)
                elif tok.text == "edge":
                    low = self.next()
                    self.expect_op("<")
                    high = self.next()
                    edges.append((low.text, high.text))
                else:
                    raise KbSyntaxError(
                        f"expected 'elem', 'edge' or '}}', found {tok.text!r}",
                        tok.line, tok.col)
            try:
                self.algebra = make_lattice(elems, edges)
            except AlgebraError as exc:
                raise KbElementError(str(exc), tok.line, tok.col) from exc
        else:
            raise KbSyntaxError(
                f"expected 'chain' or 'lattice', found {kind.text!r}",
                kind.line, kind.col)

    def parse_decl(self, kind: str) -> None:
        count = 0
        while self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
            tok = self.next()
            self.declare(tok.text, kind, tok)
            count += 1
        if count == 0:
            tok = self.peek()
            raise KbSyntaxError(f"empty {kind} declaration", tok.line, tok.col)

    def fresh_concept(self) -> Prim:
        self.fresh_counter += 1
        name = f"_sub{self.fresh_counter}"
        self.decls[name] = "concept"
        self.order["concept"].append(name)
        return Prim(name)

    def parse_tbox(self) -> None:
        left = self.parse_concept_expr()
        tok = self.next()
        if tok.kind != "op" or tok.text not in ("==", "<="):
            raise KbSyntaxError(f"expected '==' or '<=', found {tok.text!r}",
                                tok.line, tok.col)
        right = self.parse_concept_expr()
        if tok.text == "<=":
            right = And(right, self.fresh_concept())
        self.tbox.append(TBoxAxiom(left, right))

    def parse_abox(self) -> None:
        first = self.peek()
        if first.kind == "ident" and first.text == "not":
            self.next()
            bound = self.parse_bound()
            self.expect_op("<=")
            term = self.parse_term()
            self.add_assertion(Assertion(False, bound, term))
            return
        after = self.peek(1)
        if after.kind == "op" and after.text in ("<=", "!<="):
            bound = self.parse_bound()
            op = self.next()
            term = self.parse_term()
            self.add_assertion(Assertion(op.text == "<=", bound, term))
            return
        # sugar: TERM < BOUND means "not BOUND <= TERM" on linear algebras
        term = self.parse_term()
        tok = self.expect_op("<")
        alg = self.need_algebra(tok)
        if not alg.is_linear:
            raise KbElementError(
                "the strict-bound sugar 'term < a' needs a linear algebra",
                tok.line, tok.col)
        bound = self.parse_bound()
        self.add_assertion(Assertion(False, bound, term))

    def add_assertion(self, a: Assertion) -> None:
        key = (a.positive, a.bound, a.term)
        if key in self.abox_seen:
            return
        self.abox_seen.add(key)
        self.abox.append(a)

    def parse_term(self):
        tok = self.next()
        if tok.text == "I" or (tok.kind == "ident" and
                               self.decls.get(tok.text) in ("box", "dia") and
                               self.peek().text == "("):
            return self.parse_relational(tok)
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise KbSyntaxError(f"expected an ABox term, found {tok.text!r}",
                                tok.line, tok.col)
        sep = self.next()
        if sep.kind != "op" or sep.text not in (":", "::"):
            raise KbSyntaxError(f"expected ':' or '::', found {sep.text!r}",
                                sep.line, sep.col)
        concept = self.parse_concept_expr()
        if sep.text == ":":
            self.lookup(tok.text, ("obj",), tok, infer_as="obj")
            return Member(tok.text, concept)
        self.lookup(tok.text, ("feat",), tok, infer_as="feat")
        return Describes(tok.text, concept)

    def parse_relational(self, head: Token):
        self.expect_op("(")
        first = self.expect_ident("individual")
        self.expect_op(",")
        second = self.expect_ident("individual")
        self.expect_op(")")
        if head.text == "I":
            self.lookup(first.text, ("obj",), first, infer_as="obj")
            self.lookup(second.text, ("feat",), second, infer_as="feat")
            return Inc(first.text, second.text)
        sort = self.lookup(head.text, ("box", "dia"), head)
        if sort == "box":
            self.lookup(first.text, ("obj",), first, infer_as="obj")
            self.lookup(second.text, ("feat",), second, infer_as="feat")
            return BoxRel(head.text, first.text, second.text)
        self.lookup(first.text, ("feat",), first, infer_as="feat")
        self.lookup(second.text, ("obj",), second, infer_as="obj")
        return DiaRel(head.text, second.text, first.text)

    def parse_concept_expr(self) -> Concept:
        left = self.parse_concept_conj()
        while self.peek().kind == "op" and self.peek().text == "|":
            self.next()
            left = Or(left, self.parse_concept_conj())
        return left

    def parse_concept_conj(self) -> Concept:
        left = self.parse_concept_unary()
        while self.peek().kind == "op" and self.peek().text == "&":
            self.next()
            left = And(left, self.parse_concept_unary())
        return left

    def parse_concept_unary(self) -> Concept:
        tok = self.next()
        if tok.kind == "op" and tok.text == "[":
            role = self.expect_ident("role name")
            self.lookup(role.text, ("box",), role)
            self.expect_op("]")
            return Box(role.text, self.parse_concept_unary())
        if tok.kind == "op" and tok.text == "<":
            role = self.expect_ident("role name")
            self.lookup(role.text, ("dia",), role)
            self.expect_op(">")
            return Dia(role.text, self.parse_concept_unary())
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse_concept_expr()
            self.expect_op(")")
            return inner
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.lookup(tok.text, ("concept",), tok, infer_as="concept")
            return Prim(tok.text)
        raise KbSyntaxError(f"expected a concept, found {tok.text!r}",
                            tok.line, tok.col)

    # model blocks

    def parse_model(self, head: Token) -> None:
        if self.model is not None:
            raise KbSyntaxError("duplicate model block", head.line, head.col)
        self.need_algebra(head)
        self.expect_op("{")
        block = ModelBlock()
        declared_here: set[str] = set()
        while True:
            tok = self.next()
            if tok.kind == "op" and tok.text == "}":
                break
            if tok.kind == "eof":
                raise KbSyntaxError("unterminated model block", tok.line, tok.col)
            if tok.text in ("obj", "feat"):
                target = block.objects if tok.text == "obj" else block.features
                while self.peek().kind in ("ident", "elem") and \
                        self.peek().text not in KEYWORDS:
                    name = self.next().text
                    if name in declared_here:
                        raise KbNameError(f"duplicate model element {name!r}",
                                          tok.line, tok.col)
                    declared_here.add(name)
                    target.append(name)
            elif tok.text == "concept":
                name = self.expect_ident("concept name")
                self.lookup(name.text, ("concept",), name, infer_as="concept")
                side = self.next()
                if side.text not in ("extent", "intent"):
                    raise KbSyntaxError(
                        f"expected 'extent' or 'intent', found {side.text!r}",
                        side.line, side.col)
                self.expect_op("=")
                width = len(block.objects if side.text == "extent"
                            else block.features)
                values = self.parse_value_row(width, side)
                block.concept_rows.append(
                    (name.text, side.text, values, side.line, side.col))
            elif tok.text == "bind":
                name = self.expect_ident("individual name")
                self.expect_op("=")
                element = self.next()
                block.binds.append((name.text, element.text))
            elif tok.kind == "ident" and (tok.text == "I" or
                                          self.decls.get(tok.text) in ("box", "dia")):
                row_head = self.next()
                if row_head.kind not in ("ident", "elem"):
                    raise KbSyntaxError(
                        f"expected a row element, found {row_head.text!r}",
                        row_head.line, row_head.col)
                self.expect_op("=")
                # rows come after the block's obj/feat lines, so widths are known
                width = len(block.objects if self.decls.get(tok.text) == "dia"
                            else block.features)
                values = self.parse_value_row(width, tok)
                block.rows.append(
                    (tok.text, row_head.text, values, tok.line, tok.col))
            else:
                raise KbSyntaxError(
                    f"unexpected token {tok.text!r} in model block",
                    tok.line, tok.col)
        self.model = block

    def parse_value_row(self, width: int, at: Token) -> list[int]:
        if width == 0:
            raise KbSyntaxError(
                "relation and concept rows must come after the model's "
                "obj/feat lines", at.line, at.col)
        values = []
        for _ in range(width):
            tok = self.next()
            if tok.kind not in ("elem", "ident") or tok.text in KEYWORDS:
                raise KbSyntaxError(
                    f"expected {width} algebra elements in the row",
                    tok.line, tok.col)
            values.append(self.resolve_element(tok))
        return values

    # assembly

    def finish(self) -> Document:
        if self.algebra is None:
            raise KbSyntaxError("missing algebra header", 1, 1)
        kb = KnowledgeBase(
            algebra=self.algebra,
            objects=tuple(self.order["obj"]),
            features=tuple(self.order["feat"]),
            box_roles=tuple(self.order["box"]),
            dia_roles=tuple(self.order["dia"]),
            concept_names=tuple(self.order["concept"]),
            abox=tuple(self.abox),
            tbox=tuple(self.tbox),
        )
        interp = self.build_interpretation(kb) if self.model else None
        return Document(kb, interp)

    def build_interpretation(self, kb: KnowledgeBase):
        from . import fca

        block = self.model
        alg = kb.algebra
        import numpy as np

        n_obj, n_feat = len(block.objects), len(block.features)
        obj_at = {w: i for i, w in enumerate(block.objects)}
        feat_at = {w: i for i, w in enumerate(block.features)}
        mats: dict[str, np.ndarray] = {"I": np.full((n_obj, n_feat), alg.bot,
                                                    dtype=np.int64)}
        for role in kb.box_roles:
            mats[role] = np.full((n_obj, n_feat), alg.bot, dtype=np.int64)
        for role in kb.dia_roles:
            mats[role] = np.full((n_feat, n_obj), alg.bot, dtype=np.int64)
        for rel, row_name, values, line, col in block.rows:
            dia = rel in kb.dia_roles
            row_at, col_at = (feat_at, obj_at) if dia else (obj_at, feat_at)
            if row_name not in row_at:
                raise KbNameError(f"row element {row_name!r} is not a declared "
                                  f"{'feature' if dia else 'object'}", line, col)
            width = n_obj if dia else n_feat
            if len(values) != width:
                raise KbSyntaxError(
                    f"row for {rel} {row_name} has {len(values)} entries, "
                    f"expected {width}", line, col)
            mats[rel][row_at[row_name], :] = values
        ctx = fca.Context(
            alg, block.objects, block.features, mats["I"],
            box={r: mats[r] for r in kb.box_roles},
            dia={r: mats[r] for r in kb.dia_roles})

        primitives: dict[str, fca.FuzzyConcept] = {}
        extents: dict[str, list[int]] = {}
        intents: dict[str, list[int]] = {}
        for name, side, values, line, col in block.concept_rows:
            width = n_obj if side == "extent" else n_feat
            if len(values) != width:
                raise KbSyntaxError(
                    f"{side} row for concept {name} has {len(values)} entries, "
                    f"expected {width}", line, col)
            (extents if side == "extent" else intents)[name] = values
        for name, ext in extents.items():
            ext_set = ctx.object_set(ext)
            if name in intents:
                int_set = ctx.feature_set(intents[name])
            else:
                int_set = ctx.feature_set(ctx.up(ext_set))
            primitives[name] = fca.FuzzyConcept(ext_set, int_set)
        for name in intents:
            if name not in extents:
                int_set = ctx.feature_set(intents[name])
                primitives[name] = fca.FuzzyConcept(
                    ctx.object_set(ctx.down(int_set)), int_set)

        individuals = {w: w for w in (*block.objects, *block.features)}
        for name, element in block.binds:
            if element not in obj_at and element not in feat_at:
                raise KbNameError(f"bind target {element!r} is not a model "
                                  f"element", 0, 0)
            individuals[name] = element
        return fca.Interpretation(ctx, primitives, individuals)


def parse_document(text: str, infer_declarations: bool = False) -> Document:
    return _Parser(text, infer_declarations).parse()


def parse_kb(text: str, infer_declarations: bool = False) -> KnowledgeBase:
    return parse_document(text, infer_declarations).kb


# -- printing ----------------------------------------------------------------


def algebra_header(alg: Algebra) -> str:
    kind = alg.description[0]
    if kind == "chain":
        return f"algebra chain {alg.description[1]}"
    _, names, edges = alg.description
    parts = ["elem " + " ".join(names)]
    parts += [f"edge {low} < {high}" for low, high in edges]
    return "algebra lattice { " + " ; ".join(parts) + " }"


def print_kb(kb: KnowledgeBase) -> str:
    """Canonical text; parsing it back gives a structurally identical KB."""
    lines = [algebra_header(kb.algebra)]
    for kind, names in (("obj", kb.objects), ("feat", kb.features),
                        ("box", kb.box_roles), ("dia", kb.dia_roles),
                        ("concept", kb.concept_names)):
        if names:
            lines.append(f"{kind} " + " ".join(names))
    for axiom in kb.tbox:
        lines.append(f"tbox {axiom_text(axiom)}")
    for a in kb.abox:
        lines.append(f"abox {assertion_text(a, kb.algebra)}")
    return "\n".join(lines) + "\n"


def print_model(interp, kb: KnowledgeBase, legend: Optional[dict] = None) -> str:
    """Render an interpretation as a re-importable ``model { ... }`` block."""
    ctx = interp.context
    alg = ctx.algebra
    lines = ["model {"]
    if legend:
        for name in (*ctx.objects, *ctx.features):
            if name in legend and legend[name] != name:
                lines.append(f"  # {name} = {legend[name]}")
    if ctx.objects:
        lines.append("  obj " + " ".join(ctx.objects))
    if ctx.features:
        lines.append("  feat " + " ".join(ctx.features))

    def rows(rel_name, matrix, row_names):
        for i, row_name in enumerate(row_names):
            vals = " ".join(alg.render(int(v)) for v in matrix[i])
            lines.append(f"  {rel_name} {row_name} = {vals}")

    rows("I", ctx.incidence, ctx.objects)
    for role in kb.box_roles:
        rows(role, ctx.box[role], ctx.objects)
    for role in kb.dia_roles:
        rows(role, ctx.dia[role], ctx.features)
    for name in sorted(interp.primitives):
        c = interp.primitives[name]
        ext = " ".join(alg.render(int(v)) for v in c.extent.codes)
        intent = " ".join(alg.render(int(v)) for v in c.intent.codes)
        lines.append(f"  concept {name} extent = {ext}")
        lines.append(f"  concept {name} intent = {intent}")
    for name in sorted(interp.individuals):
        element = interp.individuals[name]
        if name != element:
            lines.append(f"  bind {name} = {element}")
    lines.append("}")
    return "\n".join(lines) + "\n"
