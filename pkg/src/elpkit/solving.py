"""Answer-set computation for ground extended logic programs.

Semantics: A is an answer set of P iff A = Cn(P^A), where P^A is the reduct
(drop rules whose default-negated body meets A, strip default negation from
the rest) and Cn is the least closed literal set of a definite program, or
the whole literal base when that set is contradictory.

``solve`` picks its strategy:

* A contradictory answer set (the whole base) can only exist when the
  default-negation-free fragment already explodes, and is then the unique
  answer set; it is checked once, up front.
* Syntactically stratified programs are evaluated stratum by stratum.
* Everything else goes through a backtracking search that branches only on
  literals occurring under default negation (the reduct depends on nothing
  else).  Between branches, two propagation passes run to a joint fixpoint:
  forced-true derivation (positive body proven, negated body refuted) and
  forced-false detection (no potentially applicable rule left, in the style
  of an unfounded-set check).  Every candidate that survives is re-verified
  against the reduct/Cn definition before it is emitted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

from .grounding import GroundProgram
from .terms import Literal, Rule, complement, literal_key, term_key

BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True)
class Interpretation:
    literals: frozenset[Literal]
    contradictory: bool = False

    def __contains__(self, l: Literal) -> bool:
        return l in self.literals

    def sort_key(self):
        return tuple(sorted(literal_key(l) for l in self.literals))


@dataclass(frozen=True)
class SolveStats:
    branches: int = 0
    propagations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    answer_sets: tuple[Interpretation, ...]
    stats: SolveStats = field(default_factory=SolveStats)

    def __len__(self) -> int:
        return len(self.answer_sets)


def reduct(g: GroundProgram, a: frozenset[Literal]) -> GroundProgram:
    """P^A: keep rules whose negated body misses A, stripped of negation."""
    kept = tuple(
        Rule(r.head, r.body_pos)
        for r in g.rules
        if not (r.body_neg & a)
    )
    return GroundProgram(kept, g.literal_base)


def consequences(g: GroundProgram) -> Interpretation:
    """Least closed set of a definite program; whole base if contradictory."""
    remaining: list[int] = []
    by_premise: dict[Literal, list[int]] = {}
    agenda: list[Literal] = []
    for idx, r in enumerate(g.rules):
        if r.body_neg:
            raise ValueError(f"consequences needs a definite program, got: {r}")
        remaining.append(len(r.body_pos))
        if r.body_pos:
            for l in r.body_pos:
                by_premise.setdefault(l, []).append(idx)
        else:
            agenda.append(r.head)
    derived: set[Literal] = set()
    while agenda:
        l = agenda.pop()
        if l in derived:
            continue
        if complement(l) in derived:
            return Interpretation(g.literal_base, contradictory=True)
        derived.add(l)
        for idx in by_premise.get(l, ()):
            remaining[idx] -= 1
            if remaining[idx] == 0:
                agenda.append(g.rules[idx].head)
    return Interpretation(frozenset(derived))


def is_answer_set(g: GroundProgram, a: frozenset[Literal]) -> bool:
    if not a <= g.literal_base:
        return False
    m = consequences(reduct(g, a))
    return a == m.literals


def stratify(g: GroundProgram) -> dict[Literal, int] | None:
    """Literal-level stratification, or None when a cycle crosses negation.

    Edges run head -> body literal; a strongly connected component containing
    a negative edge blocks stratification.  Levels are longest paths in the
    component condensation, counting negative edges as strict steps.
    """
    literals = sorted(g.literal_base, key=literal_key)
    pos_edges: dict[Literal, set[Literal]] = {l: set() for l in literals}
    neg_edges: dict[Literal, set[Literal]] = {l: set() for l in literals}
    for r in g.rules:
        pos_edges[r.head].update(r.body_pos)
        neg_edges[r.head].update(r.body_neg)

    component = _tarjan_components(literals, pos_edges, neg_edges)
    for r in g.rules:
        for l in r.body_neg:
            if component[r.head] == component[l]:
                return None

    levels: dict[int, int] = {}
    order = sorted(set(component.values()))
    # components are numbered in reverse topological order by Tarjan; a
    # head's component never precedes its dependencies.
    for comp in order:
        levels.setdefault(comp, 0)
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            head_c = component[r.head]
            for l in r.body_pos:
                if levels[head_c] < levels[component[l]]:
                    levels[head_c] = levels[component[l]]
                    changed = True
            for l in r.body_neg:
                if levels[head_c] <= levels[component[l]]:
                    levels[head_c] = levels[component[l]] + 1
                    changed = True
    return {l: levels[component[l]] for l in literals}


def _tarjan_components(nodes, pos_edges, neg_edges) -> dict[Literal, int]:
    index: dict[Literal, int] = {}
    low: dict[Literal, int] = {}
    on_stack: set[Literal] = set()
    stack: list[Literal] = []
    component: dict[Literal, int] = {}
    counter = [0]
    comp_counter = [0]

    for start in nodes:
        if start in index:
            continue
        work = [(start, iter(sorted(pos_edges[start] | neg_edges[start], key=literal_key)))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, edges = work[-1]
            advanced = False
            for succ in edges:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append(
                        (succ, iter(sorted(pos_edges[succ] | neg_edges[succ], key=literal_key)))
                    )
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component[member] = comp_counter[0]
                    if member == node:
                        break
                comp_counter[0] += 1
    return component


def _evaluate_stratified(g: GroundProgram, levels: dict[Literal, int]) -> Interpretation | None:
    """Perfect model; None signals a contradiction during evaluation."""
    derived: set[Literal] = set()
    for level in sorted(set(levels.values())):
        layer = [r for r in g.rules if levels[r.head] == level]
        changed = True
        while changed:
            changed = False
            for r in layer:
                if r.head in derived:
                    continue
                if r.body_pos <= derived and not (r.body_neg & derived):
                    if complement(r.head) in derived:
                        return None
                    derived.add(r.head)
                    changed = True
    return Interpretation(frozenset(derived))


class _Search:
    """Backtracking enumeration over the default-negation signature."""

    def __init__(self, g: GroundProgram):
        self.g = g
        self.signature = sorted(
            {l for r in g.rules for l in r.body_neg}, key=literal_key
        )
        self.models: set[frozenset[Literal]] = set()
        self.branches = 0
        self.propagations = 0

    def run(self) -> list[frozenset[Literal]]:
        self._explore(frozenset(), frozenset())
        return sorted(self.models, key=lambda m: tuple(sorted(literal_key(l) for l in m)))

    # A literal is "true" when committed to the candidate answer set and
    # "false" when committed to its complement set.  Rules die once a
    # positive premise is false or a negated premise is true.

    def _propagate(self, true: frozenset[Literal], false: frozenset[Literal]):
        true_s, false_s = set(true), set(false)
        while True:
            self.propagations += 1
            changed = False
            supported: set[Literal] = set()
            for r in self.g.rules:
                if r.body_pos & false_s or r.body_neg & true_s:
                    continue
                if r.body_pos <= true_s and r.body_neg <= false_s:
                    supported.add(r.head)
            for l in supported - true_s:
                true_s.add(l)
                changed = True
            # forced-false: anything outside the closure of still-alive rules
            # can never become supported, no matter how the rest is decided.
            reachable = _possibly_derivable(self.g, true_s, false_s)
            for l in list(true_s):
                if l not in reachable:
                    return None
            for l in self.g.literal_base:
                if l not in reachable and l not in false_s:
                    false_s.add(l)
                    changed = True
            if true_s & false_s:
                return None
            if any(complement(l) in true_s for l in true_s):
                return None
            if not changed:
                return frozenset(true_s), frozenset(false_s)

    def _explore(self, true: frozenset[Literal], false: frozenset[Literal]):
        propagated = self._propagate(true, false)
        if propagated is None:
            return
        true, false = propagated
        unassigned = [l for l in self.signature if l not in true and l not in false]
        if not unassigned:
            self._check_leaf(true)
            return
        pick = unassigned[0]
        self.branches += 1
        self._explore(true, false | {pick})
        self._explore(true | {pick}, false)

    def _check_leaf(self, true: frozenset[Literal]):
        guessed = frozenset(l for l in self.signature if l in true)
        candidate = consequences(
            GroundProgram(
                tuple(
                    Rule(r.head, r.body_pos)
                    for r in self.g.rules
                    if not (r.body_neg & guessed)
                ),
                self.g.literal_base,
            )
        )
        if candidate.contradictory:
            return
        model = candidate.literals
        if {l for l in self.signature if l in model} != set(guessed):
            return
        if is_answer_set(self.g, model):
            self.models.add(model)


def _possibly_derivable(
    g: GroundProgram, true_s: set[Literal], false_s: set[Literal]
) -> set[Literal]:
    """Closure of rules that are not yet dead, ignoring default negation."""
    remaining = []
    by_premise: dict[Literal, list[int]] = {}
    agenda: list[Literal] = []
    rules = []
    for r in g.rules:
        if (r.body_pos & false_s) or (r.body_neg & true_s):
            continue
        idx = len(rules)
        rules.append(r)
        remaining.append(len(r.body_pos))
        if r.body_pos:
            for l in r.body_pos:
                by_premise.setdefault(l, []).append(idx)
        else:
            agenda.append(r.head)
    reachable: set[Literal] = set()
    while agenda:
        l = agenda.pop()
        if l in reachable:
            continue
        reachable.add(l)
        for idx in by_premise.get(l, ()):
            remaining[idx] -= 1
            if remaining[idx] == 0:
                agenda.append(rules[idx].head)
    return reachable


def solve(g: GroundProgram, max_models: int | None = None) -> SolveResult:
    started = time.perf_counter()
    branches = 0
    propagations = 0

    # A contradictory answer set requires the negation-free fragment alone to
    # explode, and is then the only answer set.
    if is_answer_set(g, g.literal_base):
        model = Interpretation(g.literal_base, contradictory=True)
        return SolveResult(
            (model,), SolveStats(0, 0, time.perf_counter() - started)
        )

    models: list[Interpretation] = []
    levels = stratify(g)
    if levels is not None:
        perfect = _evaluate_stratified(g, levels)
        if perfect is not None:
            assert is_answer_set(g, perfect.literals), (
                "stratified evaluation produced a non-answer-set"
            )
            models = [perfect]
    else:
        search = _Search(g)
        found = search.run()
        branches, propagations = search.branches, search.propagations
        models = [Interpretation(m) for m in found]

    models.sort(key=Interpretation.sort_key)
    _assert_emitted_invariants(g, models)
    if max_models is not None:
        models = models[:max_models]
    return SolveResult(
        tuple(models),
        SolveStats(branches, propagations, time.perf_counter() - started),
    )


def _assert_emitted_invariants(g: GroundProgram, models: list[Interpretation]) -> None:
    for m in models:
        if not m.contradictory:
            assert is_supported(g, m.literals), f"unsupported model {sorted(map(str, m.literals))}"
    for a, b in combinations(models, 2):
        if not a.contradictory and not b.contradictory:
            assert not (a.literals < b.literals or b.literals < a.literals), (
                "answer sets are not an antichain"
            )


def is_supported(g: GroundProgram, model: frozenset[Literal]) -> bool:
    """Every literal has a firing rule with satisfied body."""
    for l in model:
        if not any(
            r.head == l and r.body_pos <= model and not (r.body_neg & model)
            for r in g.rules
        ):
            return False
    return True


def brute_force_answer_sets(g: GroundProgram) -> list[Interpretation]:
    """Test oracle: try every subset of the literal base.

    Only consistent subsets and the full base can pass the reduct/Cn check
    (Cn is consistent or total), so enumeration walks consistent sets by
    choosing a sign or absence per atom, plus the full base; this covers all
    subsets that could possibly be answer sets.
    """
    base = sorted(g.literal_base, key=literal_key)
    if len(base) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"literal base of {len(base)} exceeds brute-force limit {BRUTE_FORCE_LIMIT}"
        )
    atoms = sorted(
        {(l.predicate, l.args) for l in base},
        key=lambda a: (a[0], tuple(term_key(t) for t in a[1])),
    )
    found: list[Interpretation] = []
    for signs in _sign_choices(len(atoms)):
        subset = frozenset(
            Literal(pred, args, sign)
            for (pred, args), sign in zip(atoms, signs)
            if sign is not None
        )
        if is_answer_set(g, subset):
            found.append(Interpretation(subset))
    if is_answer_set(g, g.literal_base):
        found.append(Interpretation(g.literal_base, contradictory=True))
    found.sort(key=Interpretation.sort_key)
    return found


def _sign_choices(n: int):
    if n == 0:
        yield ()
        return
    for rest in _sign_choices(n - 1):
        for choice in (None, False, True):
            yield (*rest, choice)
