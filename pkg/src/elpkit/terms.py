"""Core term and rule model.

Terms follow the usual logic-programming lexical convention: variables start
with an uppercase letter, constants and functors with a lowercase letter.
The only arithmetic is an integer offset on a single base (``T+1``, ``T-1``),
evaluated when the base becomes an integer.  Function nesting depth is capped
so the set of ground terms reachable by instantiation stays finite.

Everything here is immutable; values can be shared freely across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

DEFAULT_MAX_DEPTH = 3
_max_depth = DEFAULT_MAX_DEPTH


class TermError(ValueError):
    """Malformed term (bad lexical class, nesting too deep, bad offset base)."""


def max_term_depth() -> int:
    return _max_depth


def set_max_term_depth(depth: int) -> None:
    """Process-wide nesting cap; keeps the ground-term universe finite."""
    global _max_depth
    if depth < 1:
        raise TermError("nesting cap must be at least 1")
    _max_depth = depth


def _is_variable_name(name: str) -> bool:
    return bool(name) and (name[0].isupper() or name[0] == "_")


def _is_constant_name(name: str) -> bool:
    return bool(name) and name[0].islower()


@dataclass(frozen=True)
class Constant:
    name: str

    def __post_init__(self) -> None:
        if not _is_constant_name(self.name):
            raise TermError(f"constant name must start lowercase: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Integer:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self) -> None:
        if not _is_variable_name(self.name):
            raise TermError(f"variable name must start uppercase: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Application:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not _is_constant_name(self.functor):
            raise TermError(f"functor must start lowercase: {self.functor!r}")
        if not self.args:
            raise TermError(f"application {self.functor!r} needs at least one argument")
        if term_depth(self) > _max_depth:
            raise TermError(f"term {self} exceeds nesting depth {_max_depth}")

    def __str__(self) -> str:
        return f"{self.functor}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class ArithOffset:
    """``base + offset`` where base is a variable or integer."""

    base: "Term"
    offset: int

    def __post_init__(self) -> None:
        if not isinstance(self.base, (Variable, Integer)):
            raise TermError(f"offset base must be a variable or integer: {self.base}")

    def __str__(self) -> str:
        sign = "+" if self.offset >= 0 else "-"
        return f"{self.base}{sign}{abs(self.offset)}"


Term = Union[Constant, Integer, Variable, Application, ArithOffset]

_KIND_RANK = {Integer: 0, Constant: 1, Variable: 2, Application: 3, ArithOffset: 4}


def term_depth(t: Term) -> int:
    """Number of nested applications along the deepest path (constants are 0)."""
    if isinstance(t, Application):
        return 1 + max(term_depth(a) for a in t.args)
    if isinstance(t, ArithOffset):
        return term_depth(t.base)
    return 0


def term_key(t: Term):
    """Total order over terms: by kind, then name/value, then arguments."""
    rank = _KIND_RANK[type(t)]
    if isinstance(t, Integer):
        return (rank, t.value)
    if isinstance(t, (Constant, Variable)):
        return (rank, t.name)
    if isinstance(t, Application):
        return (rank, t.functor, tuple(term_key(a) for a in t.args))
    return (rank, term_key(t.base), t.offset)


def is_ground(t: Term) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, Application):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, ArithOffset):
        return is_ground(t.base)
    return True


def term_variables(t: Term) -> Iterator[str]:
    if isinstance(t, Variable):
        yield t.name
    elif isinstance(t, Application):
        for a in t.args:
            yield from term_variables(a)
    elif isinstance(t, ArithOffset):
        yield from term_variables(t.base)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Application):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, ArithOffset):
        yield from subterms(t.base)


@dataclass(frozen=True)
class Literal:
    """An atom with optional strong negation."""

    predicate: str
    args: tuple[Term, ...] = ()
    strong_negation: bool = False

    def __post_init__(self) -> None:
        if not _is_constant_name(self.predicate):
            raise TermError(f"predicate must start lowercase: {self.predicate!r}")

    def __str__(self) -> str:
        sign = "-" if self.strong_negation else ""
        if not self.args:
            return f"{sign}{self.predicate}"
        return f"{sign}{self.predicate}({', '.join(str(a) for a in self.args)})"


def literal_key(l: Literal):
    return (l.predicate, tuple(term_key(a) for a in l.args), l.strong_negation)


def complement(l: Literal) -> Literal:
    """Flip strong negation; predicate and arguments are untouched."""
    return Literal(l.predicate, l.args, not l.strong_negation)


def literal_variables(l: Literal) -> set[str]:
    out: set[str] = set()
    for a in l.args:
        out.update(term_variables(a))
    return out


def literal_is_ground(l: Literal) -> bool:
    return all(is_ground(a) for a in l.args)


@dataclass(frozen=True)
class Rule:
    """``head :- body_pos, not body_neg``; a fact has both bodies empty."""

    head: Literal
    body_pos: frozenset[Literal] = frozenset()
    body_neg: frozenset[Literal] = frozenset()

    @property
    def is_fact(self) -> bool:
        return not self.body_pos and not self.body_neg

    def literals(self) -> Iterator[Literal]:
        yield self.head
        yield from self.body_pos
        yield from self.body_neg

    def variables(self) -> set[str]:
        out: set[str] = set()
        for l in self.literals():
            out.update(literal_variables(l))
        return out

    def is_ground(self) -> bool:
        return all(literal_is_ground(l) for l in self.literals())

    def __str__(self) -> str:
        if self.is_fact:
            return f"{self.head}."
        parts = [str(l) for l in sorted(self.body_pos, key=literal_key)]
        parts += [f"not {l}" for l in sorted(self.body_neg, key=literal_key)]
        return f"{self.head} :- {', '.join(parts)}."


def rule_key(r: Rule):
    return (
        literal_key(r.head),
        tuple(sorted(literal_key(l) for l in r.body_pos)),
        tuple(sorted(literal_key(l) for l in r.body_neg)),
    )


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = ()

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def facts(self) -> Iterator[Rule]:
        return (r for r in self.rules if r.is_fact)


class DefaultKind(Enum):
    IMPLICATION = "implication"
    NORMAL = "normal"
    SEMI_NORMAL = "semi_normal"


@dataclass(frozen=True)
class DefaultRule:
    """Strict implication, normal default, or semi-normal default.

    Semi-normal defaults carry justification constraints; the other kinds
    must not.
    """

    kind: DefaultKind
    prerequisites: tuple[Literal, ...]
    consequent: Literal
    constraints: tuple[Literal, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is DefaultKind.SEMI_NORMAL:
            if not self.constraints:
                raise TermError("semi-normal default needs at least one constraint")
        elif self.constraints:
            raise TermError(f"{self.kind.value} rule cannot carry constraints")

    def __str__(self) -> str:
        pre = " & ".join(str(l) for l in self.prerequisites)
        if self.kind is DefaultKind.IMPLICATION:
            return f"{pre} -> {self.consequent}."
        body = f"{pre} : {self.consequent}" if pre else f": {self.consequent}"
        if self.kind is DefaultKind.NORMAL:
            return f"{body}."
        cons = ", ".join(str(c) for c in self.constraints)
        return f"{body} [{cons}]."


@dataclass(frozen=True)
class DefaultTheory:
    facts: tuple[Literal, ...] = ()
    rules: tuple[DefaultRule, ...] = ()


@dataclass(frozen=True)
class Substitution:
    """Finite map from variable names to ground terms."""

    bindings: Mapping[str, Term] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, t in self.bindings.items():
            if not _is_variable_name(name):
                raise TermError(f"substitution key is not a variable name: {name!r}")
            if not is_ground(t):
                raise TermError(f"substitution value is not ground: {t}")

    def get(self, name: str) -> Term | None:
        return self.bindings.get(name)

    def __str__(self) -> str:
        items = ", ".join(f"{k}->{v}" for k, v in sorted(self.bindings.items()))
        return "{" + items + "}"


def evaluate_offset(base: Term, offset: int) -> Term:
    if isinstance(base, Integer):
        return Integer(base.value + offset)
    if isinstance(base, Variable):
        return ArithOffset(base, offset) if offset else base
    raise TermError(f"arithmetic on a non-integer base: {base}")


def substitute_term(t: Term, s: Substitution) -> Term:
    if isinstance(t, Variable):
        bound = s.get(t.name)
        return bound if bound is not None else t
    if isinstance(t, Application):
        return Application(t.functor, tuple(substitute_term(a, s) for a in t.args))
    if isinstance(t, ArithOffset):
        return evaluate_offset(substitute_term(t.base, s), t.offset)
    return t


def substitute_literal(l: Literal, s: Substitution) -> Literal:
    return Literal(l.predicate, tuple(substitute_term(a, s) for a in l.args), l.strong_negation)


def substitute_rule(r: Rule, s: Substitution) -> Rule:
    return Rule(
        substitute_literal(r.head, s),
        frozenset(substitute_literal(l, s) for l in r.body_pos),
        frozenset(substitute_literal(l, s) for l in r.body_neg),
    )


def apply_substitution(x, s: Substitution):
    """Instantiate a term, literal, or rule; integer-based offsets evaluate."""
    if isinstance(x, Literal):
        return substitute_literal(x, s)
    if isinstance(x, Rule):
        return substitute_rule(x, s)
    return substitute_term(x, s)


def _match_term(pattern: Term, ground: Term, bindings: dict[str, Term]) -> bool:
    if isinstance(pattern, Variable):
        seen = bindings.get(pattern.name)
        if seen is None:
            bindings[pattern.name] = ground
            return True
        return seen == ground
    if isinstance(pattern, Application):
        return (
            isinstance(ground, Application)
            and pattern.functor == ground.functor
            and len(pattern.args) == len(ground.args)
            and all(_match_term(p, g, bindings) for p, g in zip(pattern.args, ground.args))
        )
    if isinstance(pattern, ArithOffset):
        # T+1 matches the integer n by binding T to n-1.
        if not isinstance(ground, Integer):
            return False
        return _match_term(pattern.base, Integer(ground.value - pattern.offset), bindings)
    return pattern == ground


def match(pattern: Literal, ground: Literal) -> Substitution | None:
    """One-sided matching: the unique substitution taking pattern to ground."""
    if not literal_is_ground(ground):
        raise TermError(f"match target must be ground: {ground}")
    if (
        pattern.predicate != ground.predicate
        or pattern.strong_negation != ground.strong_negation
        or len(pattern.args) != len(ground.args)
    ):
        return None
    bindings: dict[str, Term] = {}
    for p, g in zip(pattern.args, ground.args):
        if not _match_term(p, g, bindings):
            return None
    return Substitution(bindings)


# Shorthand constructors, used heavily by the knowledge base and tests.

def c(name: str) -> Constant:
    return Constant(name)


def v(name: str) -> Variable:
    return Variable(name)


def i(value: int) -> Integer:
    return Integer(value)


def app(functor: str, *args: Term) -> Application:
    return Application(functor, tuple(args))


def _coerce(arg) -> Term:
    if isinstance(arg, int):
        return Integer(arg)
    if isinstance(arg, str):
        return Variable(arg) if _is_variable_name(arg) else Constant(arg)
    return arg


def lit(predicate: str, *args, neg: bool = False) -> Literal:
    return Literal(predicate, tuple(_coerce(a) for a in args), neg)


def rule(head: Literal, body_pos: Iterable[Literal] = (), body_neg: Iterable[Literal] = ()) -> Rule:
    return Rule(head, frozenset(body_pos), frozenset(body_neg))


def fresh_variables(prefix: str = "V") -> Iterator[Variable]:
    for n in itertools.count():
        yield Variable(f"{prefix}{n}")
