"""Text formats for programs and default theories.

Program syntax (``.elp``)::

    % comment
    fact.
    head :- a, not b, -c.
    p(X, T+1) :- q(X, T), not -p(X, T).

Default theory syntax (``.dl``)::

    fact.
    a1 & a2 -> b.          % material implication
    a : b.                 % normal default
    a : b [c1, c2].        % semi-normal default
    : b.                   % prerequisite-free default

``-`` is strong negation and binds tighter than ``not``; ``not -p`` is
default negation of a strongly negated literal.  Offsets ``T+1`` / ``T-1``
are written infix, in argument positions only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Application,
    ArithOffset,
    Constant,
    DefaultKind,
    DefaultRule,
    DefaultTheory,
    Integer,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
    literal_key,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


_PUNCT = {
    ":-": "IMPLIED_BY",
    "->": "ARROW",
    ":": "COLON",
    ".": "DOT",
    ",": "COMMA",
    "&": "AMP",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    "+": "PLUS",
    "-": "MINUS",
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _lex(text: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    n = len(text)
    pos = 0
    while pos < n:
        ch = text[pos]
        span = SourceSpan(filename, line, col)
        if ch == "\n":
            pos, line, col = pos + 1, line + 1, 1
            continue
        if ch.isspace():
            pos, col = pos + 1, col + 1
            continue
        if ch == "%":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        if text.startswith(":-", pos):
            tokens.append(_Token("IMPLIED_BY", ":-", span))
            pos, col = pos + 2, col + 2
            continue
        if text.startswith("->", pos):
            tokens.append(_Token("ARROW", "->", span))
            pos, col = pos + 2, col + 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, span))
            pos, col = pos + 1, col + 1
            continue
        if ch.isdigit():
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            word = text[start:pos]
            tokens.append(_Token("INT", word, span))
            col += pos - start
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            word = text[start:pos]
            kind = "NOT" if word == "not" else "NAME"
            tokens.append(_Token(kind, word, span))
            col += pos - start
            continue
        raise ParseError(f"unexpected character {ch!r}", span)
    tokens.append(_Token("EOF", "", SourceSpan(filename, line, col)))
    return tokens


class _Parser:
    def __init__(self, text: str, filename: str):
        self.tokens = _lex(text, filename)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text!r}", tok.span)
        return self.next()

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.peek().span)

    # terms -----------------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "MINUS":
            self.next()
            value = self.expect("INT")
            return Integer(-int(value.text))
        if tok.kind == "INT":
            self.next()
            base: Term = Integer(int(tok.text))
            return self._maybe_offset(base)
        # 'not' is a keyword at the literal level but a legal functor inside
        # terms (the property constructor not(...)).
        if tok.kind == "NAME" or (
            tok.kind == "NOT" and self.tokens[self.pos + 1].kind == "LPAREN"
        ):
            self.next()
            if tok.text[0].isupper() or tok.text[0] == "_":
                return self._maybe_offset(Variable(tok.text))
            if self.peek().kind == "LPAREN":
                self.next()
                args = [self.term()]
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.term())
                self.expect("RPAREN")
                try:
                    return Application(tok.text, tuple(args))
                except ValueError as exc:
                    raise ParseError(str(exc), tok.span) from exc
            return Constant(tok.text)
        raise self.fail(f"expected a term, found {tok.text!r}")

    def _maybe_offset(self, base: Term) -> Term:
        tok = self.peek()
        if tok.kind not in ("PLUS", "MINUS"):
            return base
        self.next()
        amount = int(self.expect("INT").text)
        offset = amount if tok.kind == "PLUS" else -amount
        if isinstance(base, Integer):
            return Integer(base.value + offset)
        return ArithOffset(base, offset)

    # literals --------------------------------------------------------------

    def literal(self) -> Literal:
        strong = False
        if self.peek().kind == "MINUS":
            self.next()
            strong = True
        name = self.expect("NAME")
        if name.text == "not":
            raise ParseError("'not' is not a predicate name", name.span)
        args: tuple[Term, ...] = ()
        if self.peek().kind == "LPAREN":
            self.next()
            collected = [self.term()]
            while self.peek().kind == "COMMA":
                self.next()
                collected.append(self.term())
            self.expect("RPAREN")
            args = tuple(collected)
        return Literal(name.text, args, strong)

    # program rules ----------------------------------------------------------

    def program(self) -> Program:
        rules = []
        while self.peek().kind != "EOF":
            rules.append(self.rule())
        return Program(tuple(rules))

    def rule(self) -> Rule:
        head = self.literal()
        body_pos: list[Literal] = []
        body_neg: list[Literal] = []
        if self.peek().kind == "IMPLIED_BY":
            self.next()
            while True:
                if self.peek().kind == "NOT":
                    self.next()
                    body_neg.append(self.literal())
                else:
                    body_pos.append(self.literal())
                if self.peek().kind != "COMMA":
                    break
                self.next()
        self.expect("DOT")
        return Rule(head, frozenset(body_pos), frozenset(body_neg))

    # default theories --------------------------------------------------------

    def theory(self) -> DefaultTheory:
        facts: list[Literal] = []
        rules: list[DefaultRule] = []
        while self.peek().kind != "EOF":
            item = self.theory_statement()
            if isinstance(item, Literal):
                facts.append(item)
            else:
                rules.append(item)
        return DefaultTheory(tuple(facts), tuple(rules))

    def theory_statement(self) -> Literal | DefaultRule:
        prerequisites: list[Literal] = []
        if self.peek().kind != "COLON":
            prerequisites.append(self.literal())
            while self.peek().kind == "AMP":
                self.next()
                prerequisites.append(self.literal())
        tok = self.peek()
        if tok.kind == "DOT":
            if len(prerequisites) != 1:
                raise self.fail("a fact is a single literal")
            self.next()
            return prerequisites[0]
        if tok.kind == "ARROW":
            self.next()
            consequent = self.literal()
            self.expect("DOT")
            if not prerequisites:
                raise ParseError("implication needs prerequisites", tok.span)
            return DefaultRule(DefaultKind.IMPLICATION, tuple(prerequisites), consequent)
        if tok.kind == "COLON":
            self.next()
            consequent = self.literal()
            if self.peek().kind == "LBRACKET":
                open_tok = self.next()
                if self.peek().kind == "RBRACKET":
                    raise ParseError("constraint list cannot be empty", open_tok.span)
                constraints = [self.literal()]
                while self.peek().kind == "COMMA":
                    self.next()
                    constraints.append(self.literal())
                self.expect("RBRACKET")
                self.expect("DOT")
                return DefaultRule(
                    DefaultKind.SEMI_NORMAL, tuple(prerequisites), consequent, tuple(constraints)
                )
            self.expect("DOT")
            return DefaultRule(DefaultKind.NORMAL, tuple(prerequisites), consequent)
        raise self.fail(f"expected '.', '->' or ':', found {tok.text!r}")


def parse_program(text: str, filename: str = "<string>") -> Program:
    return _Parser(text, filename).program()


def parse_default_theory(text: str, filename: str = "<string>") -> DefaultTheory:
    return _Parser(text, filename).theory()


def parse_literal(text: str, filename: str = "<string>") -> Literal:
    parser = _Parser(text, filename)
    l = parser.literal()
    parser.expect("EOF")
    return l


def parse_term(text: str, filename: str = "<string>") -> Term:
    parser = _Parser(text, filename)
    t = parser.term()
    parser.expect("EOF")
    return t


# serialization ---------------------------------------------------------------


def serialize_literal(l: Literal) -> str:
    return str(l)


def serialize_rule(r: Rule) -> str:
    if r.is_fact:
        return f"{r.head}."
    parts = [str(l) for l in sorted(r.body_pos, key=literal_key)]
    parts += [f"not {l}" for l in sorted(r.body_neg, key=literal_key)]
    return f"{r.head} :- {', '.join(parts)}."


def serialize_program(p: Program) -> str:
    return "".join(serialize_rule(r) + "\n" for r in p.rules)


def serialize_default_rule(d: DefaultRule) -> str:
    return str(d)


def serialize_default_theory(t: DefaultTheory) -> str:
    lines = [f"{f}." for f in t.facts]
    lines += [str(r) for r in t.rules]
    return "".join(line + "\n" for line in lines)
