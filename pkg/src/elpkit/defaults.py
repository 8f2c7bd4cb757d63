"""Compile default theories into extended logic programs.

The translation, per item:

* fact ``a``                      -> one rule with an empty body
* implication ``a1 & .. & an -> b`` -> the direct rule plus n contrapositives,
  none of which use default negation
* normal default ``a1 & .. & an : b`` -> ``b :- a1, .., an, not -b``
* semi-normal ``a : b [c1, .., ck]`` -> the normal translation extended with
  ``not -c1, .., not -ck``

Provenance is kept per produced rule so compiled output can be traced back
to its source statement.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    DefaultKind,
    DefaultRule,
    DefaultTheory,
    Literal,
    Program,
    Rule,
    complement,
)


@dataclass(frozen=True)
class Provenance:
    """Index and kind of the source statement behind one compiled rule."""

    index: int
    kind: str  # "fact" or a DefaultKind value
    role: str  # "fact", "direct" or "contrapositive"


@dataclass(frozen=True)
class CompilationReport:
    produced_rules: Program
    rule_provenance: tuple[Provenance, ...]

    def __post_init__(self) -> None:
        assert len(self.produced_rules.rules) == len(self.rule_provenance)


def compile_fact(l: Literal) -> Rule:
    return Rule(l)


def compile_implication(d: DefaultRule) -> tuple[Rule, ...]:
    """Direct rule plus one contrapositive per prerequisite."""
    if d.kind is not DefaultKind.IMPLICATION:
        raise ValueError(f"not an implication: {d}")
    if not d.prerequisites:
        return (compile_fact(d.consequent),)
    direct = Rule(d.consequent, frozenset(d.prerequisites))
    rules = [direct]
    for idx, prereq in enumerate(d.prerequisites):
        others = d.prerequisites[:idx] + d.prerequisites[idx + 1:]
        rules.append(
            Rule(complement(prereq), frozenset(others) | {complement(d.consequent)})
        )
    return tuple(rules)


def compile_normal_default(d: DefaultRule) -> Rule:
    if d.kind is not DefaultKind.NORMAL:
        raise ValueError(f"not a normal default: {d}")
    return Rule(
        d.consequent,
        frozenset(d.prerequisites),
        frozenset({complement(d.consequent)}),
    )


def compile_seminormal_default(d: DefaultRule) -> Rule:
    if d.kind is not DefaultKind.SEMI_NORMAL:
        raise ValueError(f"not a semi-normal default: {d}")
    blocked = {complement(d.consequent)}
    blocked.update(complement(constraint) for constraint in d.constraints)
    return Rule(d.consequent, frozenset(d.prerequisites), frozenset(blocked))


def compile_theory(t: DefaultTheory) -> CompilationReport:
    rules: list[Rule] = []
    provenance: list[Provenance] = []
    index = 0
    for fact in t.facts:
        rules.append(compile_fact(fact))
        provenance.append(Provenance(index, "fact", "fact"))
        index += 1
    for d in t.rules:
        if d.kind is DefaultKind.IMPLICATION:
            produced = compile_implication(d)
            rules.extend(produced)
            provenance.append(Provenance(index, d.kind.value, "direct"))
            provenance.extend(
                Provenance(index, d.kind.value, "contrapositive")
                for _ in produced[1:]
            )
        elif d.kind is DefaultKind.NORMAL:
            rules.append(compile_normal_default(d))
            provenance.append(Provenance(index, d.kind.value, "direct"))
        else:
            rules.append(compile_seminormal_default(d))
            provenance.append(Provenance(index, d.kind.value, "direct"))
        index += 1
    return CompilationReport(Program(tuple(rules)), tuple(provenance))
