"""Brute-force extension enumerator for variable-free default theories.

This is a test oracle: it computes default-logic extensions directly from
the fixpoint definition, with classical entailment decided by truth tables
over the (small) atom universe.  It shares no code with the compiler or the
answer-set solver, so agreement between the two routes is meaningful.

An extension E is characterised by its set of satisfying valuations.  Every
candidate is generated as Th(W ∪ C) for a subset C of default consequents,
then confirmed by recomputing the applied-defaults fixpoint against E:

* a default fires once its prerequisites are entailed by the stage so far,
  provided each justification is individually consistent with E;
* normal ``A : B`` has justification B, semi-normal ``A : B [C1..Ck]`` has
  justifications B, C1, .., Ck.

The inconsistent theory has exactly one extension (everything), mirrored on
the answer-set side by the contradictory whole-base model.
"""

from __future__ import annotations

from itertools import combinations

from .terms import DefaultKind, DefaultRule, DefaultTheory, Literal

MAX_ATOMS = 12

Atom = tuple  # (predicate, args)
Valuation = frozenset  # set of true atoms
ModelSet = frozenset  # set of valuations


class OracleLimitError(ValueError):
    """Theory too large for exhaustive enumeration."""


def _atom(l: Literal) -> Atom:
    return (l.predicate, l.args)


def _theory_atoms(t: DefaultTheory) -> list[Atom]:
    atoms: set[Atom] = set()
    for f in t.facts:
        atoms.add(_atom(f))
    for d in t.rules:
        for l in (*d.prerequisites, d.consequent, *d.constraints):
            atoms.add(_atom(l))
    return sorted(atoms)


def _all_valuations(atoms: list[Atom]) -> list[Valuation]:
    out = []
    for k in range(len(atoms) + 1):
        for chosen in combinations(atoms, k):
            out.append(frozenset(chosen))
    return out


def _satisfies(v: Valuation, l: Literal) -> bool:
    return (_atom(l) in v) != l.strong_negation


def _models_of_literal(valuations: list[Valuation], l: Literal) -> ModelSet:
    return frozenset(v for v in valuations if _satisfies(v, l))


def _models_of_implication(
    valuations: list[Valuation], prereqs: tuple[Literal, ...], consequent: Literal
) -> ModelSet:
    return frozenset(
        v
        for v in valuations
        if not all(_satisfies(v, p) for p in prereqs) or _satisfies(v, consequent)
    )


def _justifications(d: DefaultRule) -> tuple[Literal, ...]:
    return (d.consequent, *d.constraints)


def enumerate_extensions(t: DefaultTheory) -> list[frozenset[Literal]]:
    """All extensions, each projected to the literals it entails.

    The inconsistent extension projects to the full literal base (every
    literal over the theory's atoms, both signs).
    """
    atoms = _theory_atoms(t)
    if len(atoms) > MAX_ATOMS:
        raise OracleLimitError(f"{len(atoms)} atoms exceeds oracle limit {MAX_ATOMS}")
    valuations = _all_valuations(atoms)
    everything = frozenset(valuations)

    classical = everything
    for f in t.facts:
        classical &= _models_of_literal(valuations, f)
    defaults = []
    for d in t.rules:
        if d.kind is DefaultKind.IMPLICATION:
            classical &= _models_of_implication(valuations, d.prerequisites, d.consequent)
        else:
            defaults.append(d)

    def entails(models: ModelSet, l: Literal) -> bool:
        return all(_satisfies(v, l) for v in models)

    def consistent_with(models: ModelSet, l: Literal) -> bool:
        return any(_satisfies(v, l) for v in models)

    def gamma(candidate: ModelSet) -> ModelSet:
        stage = classical
        remaining = list(defaults)
        changed = True
        while changed:
            changed = False
            for d in list(remaining):
                if not all(consistent_with(candidate, j) for j in _justifications(d)):
                    continue
                if all(entails(stage, p) for p in d.prerequisites):
                    stage &= _models_of_literal(valuations, d.consequent)
                    remaining.remove(d)
                    changed = True
        return stage

    extensions: set[ModelSet] = set()
    for k in range(len(defaults) + 1):
        for chosen in combinations(defaults, k):
            candidate = classical
            for d in chosen:
                candidate &= _models_of_literal(valuations, d.consequent)
            if candidate in extensions:
                continue
            if gamma(candidate) == candidate:
                extensions.add(candidate)

    literal_base = [
        Literal(pred, args, sign) for (pred, args) in atoms for sign in (False, True)
    ]
    ordered = sorted(extensions, key=lambda ms: sorted(sorted(map(repr, v)) for v in ms))
    return [frozenset(l for l in literal_base if entails(ext, l)) for ext in ordered]
