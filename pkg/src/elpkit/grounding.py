"""Typed instantiation of programs with variables.

Variables guarded by a sort atom in the positive body (``vehicle(A)``,
``time(T)``, ...) range over that sort's domain; the domains of the
non-time sorts are read off the program's facts, the time sort is the
integer range ``0..horizon``.  Unguarded variables range over every ground
term occurring in the program, which reproduces plain replace-every-variable
instantiation for programs that do not use sorts at all.

Sort predicates are extensional here: a rule may not derive a positive sort
atom, otherwise the typed restriction would be unsound.

Arithmetic offsets evaluate during instantiation.  An instance whose head or
positive body mentions a time-sorted offset outside ``0..horizon`` can never
fire and is dropped; a default-negated literal with such an offset is
trivially satisfied and is removed from the instance instead.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .terms import (
    Application,
    TermError,
    ArithOffset,
    Integer,
    Literal,
    Program,
    Rule,
    Substitution,
    Term,
    Variable,
    complement,
    is_ground,
    literal_is_ground,
    literal_key,
    literal_variables,
    rule_key,
    substitute_literal,
    subterms,
    term_key,
)

RESERVED_SORTS = ("vehicle", "object", "time", "property", "action")
TIME_SORT = "time"


class GroundingError(ValueError):
    pass


class SafetyError(GroundingError):
    pass


@dataclass(frozen=True)
class DomainMap:
    """Per-sort ground-term domains plus the fallback term universe."""

    sorts: dict[str, frozenset[Term]]
    universe: frozenset[Term]
    horizon: int

    def domain(self, sort: str) -> frozenset[Term]:
        return self.sorts.get(sort, frozenset())


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple[Rule, ...]
    literal_base: frozenset[Literal]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def make_ground_program(rules) -> GroundProgram:
    """Canonically ordered, deduplicated, with a complement-closed base."""
    unique = sorted(set(rules), key=rule_key)
    base: set[Literal] = set()
    for r in unique:
        for l in r.literals():
            if not literal_is_ground(l):
                raise GroundingError(f"non-ground literal in ground program: {l}")
            base.add(l)
            base.add(complement(l))
    return GroundProgram(tuple(unique), frozenset(base))


def auto_horizon(p: Program) -> int:
    """One step past the largest integer mentioned in the facts."""
    largest = -1
    for r in p.facts():
        for arg in r.head.args:
            for t in subterms(arg):
                if isinstance(t, Integer):
                    largest = max(largest, t.value)
    return largest + 1


def derive_domains(
    p: Program,
    horizon: int,
    sort_predicates: tuple[str, ...] = RESERVED_SORTS,
) -> DomainMap:
    if horizon < 0:
        raise GroundingError("horizon must be nonnegative")
    sorts: dict[str, set[Term]] = {name: set() for name in sort_predicates}
    universe: set[Term] = set()
    uses_time = False
    for r in p:
        for l in r.literals():
            if l.predicate == TIME_SORT:
                uses_time = True
            for arg in l.args:
                for t in subterms(arg):
                    if is_ground(t) and not isinstance(t, ArithOffset):
                        universe.add(t)
        if r.is_fact and r.head.predicate in sorts and not r.head.strong_negation:
            if len(r.head.args) == 1 and is_ground(r.head.args[0]):
                sorts[r.head.predicate].add(r.head.args[0])
    time_range = frozenset(Integer(t) for t in range(horizon + 1))
    sorts[TIME_SORT] = set(time_range)
    if uses_time:
        universe |= time_range
    return DomainMap(
        {name: frozenset(values) for name, values in sorts.items()},
        frozenset(universe),
        horizon,
    )


def check_safety(r: Rule) -> list[str]:
    """Variables that are not bound by a plain positive body literal."""
    bound: set[str] = set()
    for l in r.body_pos:
        for arg in l.args:
            if isinstance(arg, Variable):
                bound.add(arg.name)
            elif not isinstance(arg, ArithOffset):
                for t in subterms(arg):
                    if isinstance(t, Variable):
                        bound.add(t.name)
    needed: set[str] = set()
    for l in (r.head, *r.body_neg):
        for arg in l.args:
            for t in subterms(arg):
                if isinstance(t, Variable):
                    needed.add(t.name)
    for l in r.body_pos:
        for arg in l.args:
            if isinstance(arg, ArithOffset) and isinstance(arg.base, Variable):
                needed.add(arg.base.name)
    return sorted(needed - bound)


def _sort_guards(r: Rule, sort_names) -> dict[str, list[str]]:
    """Variable name -> sort predicates guarding it in the positive body."""
    guards: dict[str, list[str]] = {}
    for l in r.body_pos:
        if (
            not l.strong_negation
            and l.predicate in sort_names
            and len(l.args) == 1
            and isinstance(l.args[0], Variable)
        ):
            guards.setdefault(l.args[0].name, []).append(l.predicate)
    return guards


def _offsets_in_range(source: Term, ground_t: Term, time_vars: set[str], time_domain) -> bool:
    """Walk the source and instantiated term in parallel; every arithmetic
    offset on a time-sorted variable must have evaluated into the time domain."""
    if isinstance(source, ArithOffset):
        if isinstance(source.base, Variable) and source.base.name in time_vars:
            return ground_t in time_domain
        return True
    if isinstance(source, Application):
        return all(
            _offsets_in_range(s, g, time_vars, time_domain)
            for s, g in zip(source.args, ground_t.args)
        )
    return True


def _literal_in_range(source: Literal, ground_l: Literal, time_vars, time_domain) -> bool:
    return all(
        _offsets_in_range(s, g, time_vars, time_domain)
        for s, g in zip(source.args, ground_l.args)
    )


def _arith_variables(r: Rule) -> set[str]:
    out: set[str] = set()
    for l in r.literals():
        for arg in l.args:
            for t in subterms(arg):
                if isinstance(t, ArithOffset) and isinstance(t.base, Variable):
                    out.add(t.base.name)
    return out


def _instances(r: Rule, d: DomainMap, sort_names) -> list[Rule]:
    violations = check_safety(r)
    if violations:
        raise SafetyError(f"unsafe rule {r} (unbound variables: {', '.join(violations)})")
    guards = _sort_guards(r, sort_names)
    arith_vars = _arith_variables(r)
    variables = sorted(r.variables())
    domains: list[list[Term]] = []
    for name in variables:
        if name in guards:
            candidates: frozenset[Term] | None = None
            for sort in guards[name]:
                dom = d.domain(sort)
                if not dom:
                    raise GroundingError(f"sort '{sort}' has an empty domain (rule: {r})")
                candidates = dom if candidates is None else candidates & dom
        else:
            candidates = d.universe
        if name in arith_vars:
            # arithmetic is only defined on integers
            candidates = frozenset(t for t in candidates if isinstance(t, Integer))
        domains.append(sorted(candidates, key=term_key))
    time_vars = {name for name, sorts in guards.items() if TIME_SORT in sorts}
    time_domain = d.domain(TIME_SORT)
    body_pos_src = sorted(r.body_pos, key=literal_key)
    body_neg_src = sorted(r.body_neg, key=literal_key)

    out = []
    for assignment in itertools.product(*domains):
        sub = Substitution(dict(zip(variables, assignment)))
        head = substitute_literal(r.head, sub)
        if not _literal_in_range(r.head, head, time_vars, time_domain):
            continue
        body_pos = [substitute_literal(l, sub) for l in body_pos_src]
        if not all(
            _literal_in_range(s, g, time_vars, time_domain)
            for s, g in zip(body_pos_src, body_pos)
        ):
            continue
        kept_neg = [
            g
            for s, g in zip(body_neg_src, (substitute_literal(l, sub) for l in body_neg_src))
            if _literal_in_range(s, g, time_vars, time_domain)
        ]
        out.append(Rule(head, frozenset(body_pos), frozenset(kept_neg)))
    return out


def ground(
    p: Program,
    d: DomainMap,
    sort_predicates: tuple[str, ...] = RESERVED_SORTS,
    max_workers: int = 1,
    restrict_to_derivable: bool = False,
) -> GroundProgram:
    """Instantiate every rule; the result is canonical regardless of schedule.

    With ``restrict_to_derivable`` the instantiation is driven bottom-up by
    matching positive bodies against the atoms derivable when default
    negation is ignored.  Instances whose positive body can never be proven
    are not emitted, and default-negated literals that can never be derived
    are dropped as trivially satisfied.  Answer sets are unchanged: every
    answer set only contains derivable atoms, so the suppressed instances
    could never fire and the suppressed negations could never block.
    """
    sort_names = frozenset(sort_predicates)
    for r in p:
        if (
            not r.is_fact
            and not r.head.strong_negation
            and r.head.predicate in sort_names
        ):
            raise GroundingError(
                f"sort predicate '{r.head.predicate}' may not be derived by a rule: {r}"
            )
    time_facts = []
    if any(l.predicate == TIME_SORT for r in p for l in r.literals()):
        time_facts = [Rule(Literal(TIME_SORT, (t,))) for t in d.domain(TIME_SORT)]
    if restrict_to_derivable:
        rules = _ground_derivable(p, d, sort_names, time_facts, max_workers)
    else:
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                chunks = list(pool.map(lambda r: _instances(r, d, sort_names), p.rules))
        else:
            chunks = [_instances(r, d, sort_names) for r in p.rules]
        rules = [instance for chunk in chunks for instance in chunk]
        rules.extend(time_facts)
    return make_ground_program(rules)


def _match_body(
    body: list[Literal],
    idx: int,
    bindings: dict[str, Term],
    matched: list[Literal],
    by_pred: dict[tuple[str, bool, int], list[Literal]],
    out: list[tuple[dict[str, Term], tuple[Literal, ...]]],
) -> None:
    if idx == len(body):
        out.append((dict(bindings), tuple(matched)))
        return
    pattern = body[idx]
    for atom in by_pred.get((pattern.predicate, pattern.strong_negation, len(pattern.args)), ()):
        trail: list[str] = []
        ok = True
        for p_arg, g_arg in zip(pattern.args, atom.args):
            if not _match_arg(p_arg, g_arg, bindings, trail):
                ok = False
                break
        if ok:
            matched.append(atom)
            _match_body(body, idx + 1, bindings, matched, by_pred, out)
            matched.pop()
        for name in trail:
            del bindings[name]


def _subst_term_fast(t: Term, bindings: dict[str, Term]) -> Term:
    if isinstance(t, Variable):
        return bindings.get(t.name, t)
    if isinstance(t, Application):
        return Application(t.functor, tuple(_subst_term_fast(a, bindings) for a in t.args))
    if isinstance(t, ArithOffset):
        base = _subst_term_fast(t.base, bindings)
        if isinstance(base, Integer):
            return Integer(base.value + t.offset)
        if isinstance(base, Variable):
            return ArithOffset(base, t.offset) if t.offset else base
        raise TermError(f"arithmetic on a non-integer base: {base}")
    return t


def _subst_literal_fast(l: Literal, bindings: dict[str, Term]) -> Literal:
    return Literal(
        l.predicate,
        tuple(_subst_term_fast(a, bindings) for a in l.args),
        l.strong_negation,
    )


def _match_arg(pattern: Term, ground_t: Term, bindings: dict[str, Term], trail: list[str]) -> bool:
    if isinstance(pattern, Variable):
        seen = bindings.get(pattern.name)
        if seen is None:
            bindings[pattern.name] = ground_t
            trail.append(pattern.name)
            return True
        return seen == ground_t
    if isinstance(pattern, ArithOffset):
        if not isinstance(ground_t, Integer):
            return False
        return _match_arg(pattern.base, Integer(ground_t.value - pattern.offset), bindings, trail)
    if isinstance(pattern, Application):
        if not (
            isinstance(ground_t, Application)
            and pattern.functor == ground_t.functor
            and len(pattern.args) == len(ground_t.args)
        ):
            return False
        return all(
            _match_arg(pa, ga, bindings, trail)
            for pa, ga in zip(pattern.args, ground_t.args)
        )
    return pattern == ground_t


def _ground_derivable(
    p: Program, d: DomainMap, sort_names, time_facts: list[Rule], max_workers: int
) -> list[Rule]:
    for r in p:
        if not r.is_fact:
            violations = check_safety(r)
            if violations:
                raise SafetyError(
                    f"unsafe rule {r} (unbound variables: {', '.join(violations)})"
                )
            for l in r.body_pos:
                if l.predicate in sort_names and not d.domain(l.predicate):
                    raise GroundingError(
                        f"sort '{l.predicate}' has an empty domain (rule: {r})"
                    )
    time_domain = d.domain(TIME_SORT)
    derivable: set[Literal] = set()
    by_pred: dict[tuple[str, bool, int], list[Literal]] = {}
    fresh_keys: set[tuple[str, bool, int]] = set()

    def add_atom(l: Literal) -> bool:
        if l in derivable:
            return False
        derivable.add(l)
        key = (l.predicate, l.strong_negation, len(l.args))
        by_pred.setdefault(key, []).append(l)
        fresh_keys.add(key)
        return True

    schemas: list[Rule] = []
    instances: set[Rule] = set()
    for r in list(p.rules) + time_facts:
        if r.is_fact:
            add_atom(r.head)
            instances.add(r)
        else:
            schemas.append(r)

    schema_body: list[list[Literal]] = []
    schema_keys: list[set[tuple[str, bool, int]]] = []
    schema_time_vars: list[set[str]] = []
    for r in schemas:
        guards = _sort_guards(r, sort_names)
        schema_time_vars.append(
            {name for name, sorts in guards.items() if TIME_SORT in sorts}
        )
        body = sorted(r.body_pos, key=lambda l: len(literal_variables(l)))
        schema_body.append(body)
        schema_keys.append(
            {(l.predicate, l.strong_negation, len(l.args)) for l in r.body_pos}
        )

    def instantiate(idx: int) -> list[Rule]:
        r = schemas[idx]
        time_vars = schema_time_vars[idx]
        matches: list[tuple[dict[str, Term], tuple[Literal, ...]]] = []
        _match_body(schema_body[idx], 0, {}, [], by_pred, matches)
        produced = []
        for bindings, matched_atoms in matches:
            try:
                head = _subst_literal_fast(r.head, bindings)
                if not _literal_in_range(r.head, head, time_vars, time_domain):
                    continue
                kept_neg = frozenset(
                    g
                    for s in r.body_neg
                    for g in (_subst_literal_fast(s, bindings),)
                    if _literal_in_range(s, g, time_vars, time_domain)
                )
            except TermError:
                # ill-typed arithmetic for this binding: no ground instance
                continue
            produced.append(Rule(head, frozenset(matched_atoms), kept_neg))
        return produced

    pending = list(range(len(schemas)))
    while pending:
        fresh_keys.clear()
        if max_workers > 1:
            # batch mode: atoms publish between rounds; the fixpoint reached
            # is the same regardless of schedule
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                produced_chunks = list(pool.map(instantiate, pending))
            for chunk in produced_chunks:
                for instance in chunk:
                    instances.add(instance)
                    add_atom(instance.head)
        else:
            # publish immediately so later schemas in the same round see
            # new atoms; cuts the number of rounds to the fixpoint
            for i in pending:
                for instance in instantiate(i):
                    instances.add(instance)
                    add_atom(instance.head)
        # only rules whose positive body mentions a predicate with new atoms
        # can produce anything new next round
        pending = [
            i for i in range(len(schemas)) if schema_keys[i] & fresh_keys
        ]
    # negated-body literals that never became derivable are trivially
    # satisfied and disappear from the instance.
    final = []
    for r in instances:
        kept = frozenset(l for l in r.body_neg if l in derivable)
        final.append(Rule(r.head, r.body_pos, kept) if kept != r.body_neg else r)
    return final
