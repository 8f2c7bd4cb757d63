"""Norm-based accident analysis.

A report is a set of ground facts describing what a crash narrative made
explicit: sort declarations (``vehicle``, ``object``) and timed ``holds`` /
``-holds`` observations.  The knowledge base encodes road norms — what
normally happens — as a default theory; compiling, grounding, and solving it
together with the report yields one answer set, from which anomalies (norm
violations) are read off:

* a primary anomaly is a duty the agent was able to fulfil and violated
  anyway, or an unavoidable disruptive factor; it is the most plausible
  cause of the accident;
* a derived anomaly is a violated duty the agent was not able to fulfil.

Property vocabulary is reified: ``holds(combine(bump, B), A, T)`` says A
bumps B at time T, ``neg(P)`` is the negated property, ``must``/``able``
carry deontic and capacity modalities, and ``pcb(Act, P)`` links an action
to the property it can bring about.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .defaults import compile_theory
from .grounding import GroundProgram, derive_domains, ground
from .parser import ParseError, parse_program, parse_term
from .solving import Interpretation, solve
from .terms import (
    Application,
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
    complement,
    is_ground,
    literal_key,
    term_key,
)

# Kernel property vocabulary in which anomalies are expressed.  Only the
# persistent pair carries rules in the published norm set; the rest are
# reserved names that reports and future rules may use.
KERNEL_PROPERTIES = (
    "control",
    "stop",
    "moves_back",
    "starts",
    "drives_slowly",
    "disruptive_factor",
)

_REPORT_SORTS = ("vehicle", "object")


class ReportError(ValueError):
    """Report file failed validation."""


class KbConfigError(ValueError):
    """Knowledge-base configuration is inconsistent."""


class AnalysisError(RuntimeError):
    pass


class InconsistentReportError(AnalysisError):
    """Report plus knowledge base has no answer set."""


class AmbiguousReportError(AnalysisError):
    """More than one answer set; the report underdetermines the scene."""


def _c(name: str) -> Constant:
    return Constant(name)


def _v(name: str) -> Variable:
    return Variable(name)


def _app(functor: str, *args: Term) -> Application:
    return Application(functor, tuple(args))


def _lit(pred: str, *args: Term, neg: bool = False) -> Literal:
    return Literal(pred, tuple(args), neg)


@dataclass(frozen=True)
class KbConfig:
    """Tunable parts of the knowledge base.

    ``persistent_properties`` get frame rules (their truth values carry
    forward in time until contradicted) plus a negated-form vocabulary and
    incompatibility facts.  ``pcb_facts`` is the static action/property
    relation behind the capacity rules.  ``horizon`` of None means one step
    past the last time mentioned in the report.
    """

    horizon: int | None = None
    persistent_properties: tuple[str, ...] = ("control", "stop")
    extra_incompatible: tuple[tuple[Term, Term], ...] = ()
    pcb_facts: tuple[tuple[Term, Term], ...] = (
        (_c("brake"), _c("stop")),
        (_app("combine", _c("keep_state"), _c("control")), _c("control")),
    )

    def base_properties(self) -> tuple[Term, ...]:
        """Declared simple properties, before negated forms are added."""
        out: list[Term] = [_c(name) for name in self.persistent_properties]
        for _, prop in self.pcb_facts:
            if prop not in out:
                out.append(prop)
        for pair in self.extra_incompatible:
            for side in pair:
                if not (isinstance(side, Application) and side.functor == "neg"):
                    if side not in out:
                        out.append(side)
        return tuple(out)


# Rule variables, shared across the schema builders below.
_A, _B, _C_, _X, _P, _Q, _T, _ACT = (
    _v("A"),
    _v("B"),
    _v("C"),
    _v("X"),
    _v("P"),
    _v("Q"),
    _v("T"),
    _v("Act"),
)


def _implication(prereqs, consequent) -> DefaultRule:
    return DefaultRule(DefaultKind.IMPLICATION, tuple(prereqs), consequent)


def _normal(prereqs, consequent) -> DefaultRule:
    return DefaultRule(DefaultKind.NORMAL, tuple(prereqs), consequent)


def _semi_normal(prereqs, consequent, constraints) -> DefaultRule:
    return DefaultRule(
        DefaultKind.SEMI_NORMAL, tuple(prereqs), consequent, tuple(constraints)
    )


def _offset(base: Variable, k: int) -> Term:
    from .terms import ArithOffset

    return ArithOffset(base, k)


def build_kb(cfg: KbConfig = KbConfig()) -> DefaultTheory:
    """The norm knowledge base as a default theory.

    Strict norms are material implications (their contrapositives are part
    of the compiled program); defeasible norms are normal or semi-normal
    defaults whose justification constraints give inhibiting situations
    priority over the default conclusion.
    """
    base_props = cfg.base_properties()
    declared = set(base_props)
    for act, prop in cfg.pcb_facts:
        if prop not in declared:
            raise KbConfigError(f"pcb target {prop} is not a declared property")
        if not is_ground(act) or not is_ground(prop):
            raise KbConfigError(f"pcb pair ({act}, {prop}) must be ground")
    for left, right in cfg.extra_incompatible:
        if not is_ground(left) or not is_ground(right):
            raise KbConfigError(f"incompatible pair ({left}, {right}) must be ground")

    facts: list[Literal] = []
    for prop in base_props:
        facts.append(_lit("property", prop))
        facts.append(_lit("property", _app("neg", prop)))
    for act, prop in cfg.pcb_facts:
        facts.append(_lit("action", act))
        facts.append(_lit("pcb", act, prop))
    pairs: set[tuple[Term, Term]] = set()
    for prop in base_props:
        pairs.add((prop, _app("neg", prop)))
    pairs.update(cfg.extra_incompatible)
    for left, right in sorted(pairs, key=lambda p: (term_key(p[0]), term_key(p[1]))):
        facts.append(_lit("incompatible", left, right))
        facts.append(_lit("incompatible", right, left))

    rules: list[DefaultRule] = []
    veh_a = _lit("vehicle", _A)
    time_t = _lit("time", _T)

    # Every vehicle starts out under control.
    rules.append(_implication([veh_a], _lit("holds", _c("control"), _A, Integer(0))))

    # A vehicle that bumps something is not stopped at that moment.
    bump_ab = _lit("holds", _app("combine", _c("bump"), _B), _A, _T)
    rules.append(
        _implication(
            [veh_a, _lit("object", _B), time_t, bump_ab],
            _lit("holds", _c("stop"), _A, _T, neg=True),
        )
    )

    # A bump is a shock, and shocks are symmetric.
    rules.append(
        _implication(
            [veh_a, _lit("object", _B), time_t, bump_ab],
            _lit("holds", _app("combine", _c("shock"), _B), _A, _T),
        )
    )
    rules.append(
        _implication(
            [
                _lit("object", _A),
                _lit("object", _B),
                time_t,
                _lit("holds", _app("combine", _c("shock"), _B), _A, _T),
            ],
            _lit("holds", _app("combine", _c("shock"), _A), _B, _T),
        )
    )

    # Two shocks in consecutive moments mean the driver lost control after
    # the first one.
    rules.append(
        _implication(
            [
                veh_a,
                _lit("object", _B),
                _lit("object", _C_),
                time_t,
                _lit("holds", _app("combine", _c("shock"), _A), _B, _T),
                _lit("holds", _app("combine", _c("shock"), _A), _C_, _offset(_T, 1)),
            ],
            _lit("holds", _c("control"), _A, _T, neg=True),
        )
    )

    # Negated-form vocabulary: holds(neg(p), A, T) and -holds(p, A, T) are
    # interchangeable, per declared simple property.
    obj_a = _lit("object", _A)
    for prop in base_props:
        plain = _lit("holds", prop, _A, _T)
        negated_form = _lit("holds", _app("neg", prop), _A, _T)
        rules.append(_implication([obj_a, time_t, complement(plain)], negated_form))
        rules.append(_implication([obj_a, time_t, negated_form], complement(plain)))

    # In general, a shock at T reveals an obstacle the moment before.
    rules.append(
        _normal(
            [
                _lit("object", _A),
                _lit("vehicle", _B),
                time_t,
                _lit("holds", _app("combine", _c("shock"), _A), _B, _T),
            ],
            _lit("holds", _app("combine", _c("obstacle"), _A), _B, _offset(_T, -1)),
        )
    )

    # An obstacle whose own driver has lost control is unpredictable.
    rules.append(
        _implication(
            [
                _lit("vehicle", _B),
                veh_a,
                time_t,
                _lit("holds", _app("combine", _c("obstacle"), _B), _A, _T),
                _lit("holds", _c("control"), _B, _T, neg=True),
            ],
            _lit("predictable", _app("combine", _c("obstacle"), _B), _A, _T, neg=True),
        )
    )

    # In general, a vehicle that bumps you counts as an unpredictable
    # obstacle.
    rules.append(
        _normal(
            [
                veh_a,
                _lit("vehicle", _B),
                time_t,
                _lit("holds", _app("combine", _c("bump"), _A), _B, _T),
            ],
            _lit("predictable", _app("combine", _c("obstacle"), _B), _A, _T, neg=True),
        )
    )

    # A driver who has already lost control cannot react: any obstacle is
    # unpredictable for them, unless they are in the middle of a collision
    # at that very moment (the live-emergency duties then stand).
    rules.append(
        _semi_normal(
            [
                veh_a,
                _lit("object", _B),
                time_t,
                _lit("holds", _app("combine", _c("obstacle"), _B), _A, _T),
                _lit("holds", _c("control"), _A, _T, neg=True),
            ],
            _lit("predictable", _app("combine", _c("obstacle"), _B), _A, _T, neg=True),
            [_lit("in_collision", _A, _T, neg=True)],
        )
    )
    rules.append(
        _implication(
            [
                veh_a,
                _lit("object", _B),
                time_t,
                _lit("holds", _app("combine", _c("shock"), _B), _A, _T),
            ],
            _lit("in_collision", _A, _T),
        )
    )

    # In general, one must keep control of one's vehicle.
    rules.append(
        _semi_normal(
            [veh_a, time_t],
            _lit("must", _c("control"), _A, _T),
            [_lit("holds", _c("control"), _A, _T)],
        )
    )

    # One must avoid any obstacle.
    rules.append(
        _implication(
            [
                veh_a,
                _lit("object", _X),
                time_t,
                _lit("holds", _app("combine", _c("obstacle"), _X), _A, _T),
            ],
            _lit("must", _app("combine", _c("avoid"), _X), _A, _T),
        )
    )

    # In general, the duty to avoid an obstacle one is about to hit turns
    # into the duty to stop; a number of situations inhibit this.
    rules.append(
        _semi_normal(
            [
                veh_a,
                _lit("object", _B),
                time_t,
                _lit("must", _app("combine", _c("avoid"), _B), _A, _T),
                _lit("holds", _app("combine", _c("shock"), _B), _A, _offset(_T, 1)),
            ],
            _lit("must", _c("stop"), _A, _T),
            [
                _lit("must", _c("drive_slowly"), _A, _T, neg=True),
                _lit("holds", _c("stop"), _A, _T, neg=True),
                _lit("holds", _app("combine", _c("follow"), _A), _B, _T, neg=True),
                _lit("must", _app("not", _c("backwards")), _A, _offset(_T, -1), neg=True),
                _lit("must", _app("not", _c("move_off")), _A, _offset(_T, -1), neg=True),
                _lit("predictable", _app("combine", _c("obstacle"), _B), _A, _T),
            ],
        )
    )

    # Capacity: an agent is able to reach a property iff some action that
    # can bring it about is available.  Encoded as defaults so no
    # contrapositives arise; the consistency guards they add can never
    # block, since available/-available cannot both be derived.
    pcb_guards = [
        veh_a,
        time_t,
        _lit("action", _ACT),
        _lit("property", _P),
        _lit("pcb", _ACT, _P),
    ]
    rules.append(
        _normal(
            pcb_guards + [_lit("available", _ACT, _P, _A, _T)],
            _lit("able", _P, _A, _T),
        )
    )
    rules.append(
        _normal(
            pcb_guards + [_lit("available", _ACT, _P, _A, _T, neg=True)],
            _lit("able", _P, _A, _T, neg=True),
        )
    )

    # A chain collision starts at T when the agent is in shocks at both T
    # and T+1.
    chain = _lit("chain_collision", _A, _T)
    rules.append(
        _implication(
            [
                veh_a,
                _lit("object", _B),
                _lit("object", _C_),
                time_t,
                _lit("holds", _app("combine", _c("shock"), _A), _B, _T),
                _lit("holds", _app("combine", _c("shock"), _A), _C_, _offset(_T, 1)),
            ],
            chain,
        )
    )

    # By default, actions are available to agents.  The default yields to
    # the two inhibitors below: it does not apply once control is lost, nor
    # in the moment before a chain collision.  Making the inhibitors'
    # preconditions constraints of the default orders the rules and keeps
    # the answer set unique; the inhibitors themselves stay directional
    # (encoded as defaults, so no contrapositive lets a default-available
    # action re-establish control).
    rules.append(
        _semi_normal(
            pcb_guards,
            _lit("available", _ACT, _P, _A, _T),
            [
                _lit("holds", _c("control"), _A, _T),
                _lit("chain_collision", _A, _offset(_T, 1), neg=True),
            ],
        )
    )

    # Losing control in a chain collision makes keeping control unavailable
    # the moment before.
    keep_control = _app("combine", _c("keep_state"), _c("control"))
    rules.append(
        _normal(
            [veh_a, time_t, _lit("chain_collision", _A, _offset(_T, 1))],
            _lit("available", keep_control, _c("control"), _A, _T, neg=True),
        )
    )

    # A vehicle not under control has no actions available to its driver.
    rules.append(
        _normal(
            pcb_guards + [_lit("holds", _c("control"), _A, _T, neg=True)],
            _lit("available", _ACT, _P, _A, _T, neg=True),
        )
    )

    # Persistence: the truth value of a persistent property carries forward
    # until contradicted.
    for name in cfg.persistent_properties:
        prop = _c(name)
        for sign in (False, True):
            now = _lit("holds", prop, _A, _T, neg=sign)
            nxt = _lit("holds", prop, _A, _offset(_T, 1), neg=sign)
            rules.append(_normal([veh_a, time_t, now], nxt))

    # Anomaly recognition.  Primary: violated duty with capacity, or a
    # disruptive factor; derived: violated duty without capacity.
    anomaly_guards = [
        _lit("property", _P),
        _lit("property", _Q),
        veh_a,
        time_t,
        _lit("must", _P, _A, _T),
        _lit("holds", _Q, _A, _offset(_T, 1)),
        _lit("incompatible", _P, _Q),
    ]
    rules.append(
        _implication(
            anomaly_guards + [_lit("able", _P, _A, _T)],
            _lit("primary_an", _P, _A, _T),
        )
    )
    rules.append(
        _implication(
            [
                _lit("object", _X),
                veh_a,
                time_t,
                _lit("holds", _app("combine", _c("disruptive_factor"), _X), _A, _T),
            ],
            _lit("primary_an", _app("combine", _c("disruptive_factor"), _X), _A, _T),
        )
    )
    rules.append(
        _implication(
            anomaly_guards + [_lit("able", _P, _A, _T, neg=True)],
            _lit("derived_an", _P, _A, _T),
        )
    )

    return DefaultTheory(tuple(facts), tuple(rules))


# --- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class ReportFacts:
    facts: tuple[Literal, ...]
    source: str
    auto_horizon: int

    def agents(self) -> tuple[Term, ...]:
        return tuple(
            f.args[0]
            for f in self.facts
            if f.predicate in _REPORT_SORTS and not f.strong_negation
        )


def load_report(path: str | Path) -> ReportFacts:
    path = Path(path)
    return parse_report(path.read_text(encoding="utf-8"), str(path))


def parse_report(text: str, source: str = "<report>") -> ReportFacts:
    program = parse_program(text, source)
    facts: list[Literal] = []
    declared: set[Term] = set()
    max_time = -1
    for r in program:
        if not r.is_fact:
            raise ReportError(f"{source}: report statements must be facts: {r}")
        f = r.head
        if not all(is_ground(a) for a in f.args):
            raise ReportError(f"{source}: report fact is not ground: {f}")
        if f.predicate in _REPORT_SORTS:
            if f.strong_negation or len(f.args) != 1:
                raise ReportError(f"{source}: bad sort declaration: {f}")
            declared.add(f.args[0])
        elif f.predicate == "holds":
            if len(f.args) != 3:
                raise ReportError(f"{source}: holds takes (property, agent, time): {f}")
            t = f.args[2]
            if not isinstance(t, Integer) or t.value < 0:
                raise ReportError(f"{source}: time must be a nonnegative integer: {f}")
            max_time = max(max_time, t.value)
        else:
            raise ReportError(
                f"{source}: only vehicle/object declarations and holds facts "
                f"are allowed, found: {f}"
            )
        facts.append(f)
    vehicles = [
        f for f in facts if f.predicate == "vehicle" and not f.strong_negation
    ]
    if not vehicles:
        raise ReportError(f"{source}: no vehicle declared")
    for f in facts:
        if f.predicate == "holds":
            agent = f.args[1]
            if agent not in declared:
                raise ReportError(
                    f"{source}: agent {agent} is not declared as vehicle or object"
                )
    return ReportFacts(tuple(facts), source, max(max_time, 0) + 1)


# --- analysis ----------------------------------------------------------------


@dataclass(frozen=True)
class Anomaly:
    kind: str  # "primary" or "derived"
    property: Term
    agent: Term
    time: int

    def sort_key(self):
        return (self.time, term_key(self.agent), term_key(self.property))


@dataclass(frozen=True)
class AnomalyReport:
    anomalies: tuple[Anomaly, ...]
    cause_sentence: str | None
    model: Interpretation

    @property
    def primary(self) -> tuple[Anomaly, ...]:
        return tuple(a for a in self.anomalies if a.kind == "primary")

    @property
    def derived(self) -> tuple[Anomaly, ...]:
        return tuple(a for a in self.anomalies if a.kind == "derived")

    def to_json_dict(self) -> dict:
        def entry(a: Anomaly) -> dict:
            return {"property": str(a.property), "agent": str(a.agent), "time": a.time}

        return {
            "primary": [entry(a) for a in self.primary],
            "derived": [entry(a) for a in self.derived],
            "cause": self.cause_sentence or "",
            "model_size": len(self.model.literals),
        }

    def to_text(self) -> str:
        lines = []
        for a in self.anomalies:
            lines.append(f"{a.kind} anomaly: {a.property} of {render_agent(a.agent)} at time {a.time}")
        if self.cause_sentence:
            lines.append(f"cause: {self.cause_sentence}")
        else:
            lines.append("cause: none (no primary anomaly)")
        return "\n".join(lines)


def render_agent(agent: Term) -> str:
    """``veh_b`` reads as "vehicle B"; anything else keeps its name."""
    if isinstance(agent, Constant) and agent.name.startswith("veh_"):
        suffix = agent.name[len("veh_"):]
        if suffix.isalnum():
            return f"vehicle {suffix.upper()}"
    return str(agent)


def render_cause(a: Anomaly) -> str:
    agent = render_agent(a.agent)
    if a.property == _c("control"):
        return f"the loss of control of {agent} at time {a.time}"
    return f"the violation of {a.property} of {agent} at time {a.time}"


def report_program(report: ReportFacts, cfg: KbConfig = KbConfig()) -> Program:
    compiled = compile_theory(build_kb(cfg)).produced_rules
    report_rules = tuple(Rule(f) for f in report.facts)
    return Program(compiled.rules + report_rules)


def ground_report(
    report: ReportFacts, cfg: KbConfig = KbConfig(), max_workers: int = 1
) -> GroundProgram:
    program = report_program(report, cfg)
    horizon = cfg.horizon if cfg.horizon is not None else report.auto_horizon
    domains = derive_domains(program, horizon)
    return ground(
        program, domains, max_workers=max_workers, restrict_to_derivable=True
    )


def unique_model(
    report: ReportFacts, cfg: KbConfig = KbConfig(), max_workers: int = 1
) -> tuple[GroundProgram, Interpretation]:
    gp = ground_report(report, cfg, max_workers=max_workers)
    result = solve(gp)
    consistent = [m for m in result.answer_sets if not m.contradictory]
    if any(m.contradictory for m in result.answer_sets):
        raise InconsistentReportError(
            f"{report.source}: the report contradicts the knowledge base "
            "(the facts alone derive a literal and its complement)"
        )
    if not consistent:
        raise InconsistentReportError(
            f"{report.source}: no answer set; the report is inconsistent with the norms"
        )
    if len(consistent) > 1:
        diff = consistent[0].literals ^ consistent[1].literals
        sample = ", ".join(str(l) for l in sorted(diff, key=literal_key)[:8])
        raise AmbiguousReportError(
            f"{report.source}: {len(consistent)} answer sets; "
            f"differing atoms include: {sample}"
        )
    return gp, consistent[0]


def analyze(
    report: ReportFacts, cfg: KbConfig = KbConfig(), max_workers: int = 1
) -> AnomalyReport:
    """Run the full pipeline and extract the anomaly verdict."""
    _, model = unique_model(report, cfg, max_workers=max_workers)
    anomalies = extract_anomalies(model)
    primaries = [a for a in anomalies if a.kind == "primary"]
    cause = None
    if primaries:
        cause = render_cause(min(primaries, key=Anomaly.sort_key))
    return AnomalyReport(tuple(anomalies), cause, model)


def extract_anomalies(model: Interpretation) -> tuple[Anomaly, ...]:
    out = []
    for l in model.literals:
        if l.strong_negation or l.predicate not in ("primary_an", "derived_an"):
            continue
        kind = "primary" if l.predicate == "primary_an" else "derived"
        prop, agent, t = l.args
        if not isinstance(t, Integer):
            continue
        out.append(Anomaly(kind, prop, agent, t.value))
    out.sort(key=lambda a: (a.kind != "primary", a.sort_key()))
    return tuple(out)


# --- derivation traces -------------------------------------------------------


@dataclass(frozen=True)
class DerivationNode:
    literal: Literal
    rule: Rule | None  # None only for report/config facts
    children: tuple["DerivationNode", ...]

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        label = f"{pad}{self.literal}"
        if self.rule is not None and not self.rule.is_fact:
            label += f"   [{self.rule}]"
        lines = [label]
        for child in self.children:
            lines.append(child.render(indent + 1))
        return "\n".join(lines)


def trace(
    report: ReportFacts,
    target: Literal,
    cfg: KbConfig = KbConfig(),
    max_workers: int = 1,
) -> DerivationNode:
    """Supporting derivation of a literal in the unique answer set,
    following rules whose bodies were established strictly earlier."""
    gp, model = unique_model(report, cfg, max_workers=max_workers)
    if target not in model.literals:
        raise AnalysisError(f"{target} is not in the answer set")
    ranks = _derivation_ranks(gp, model)
    return _build_trace(gp, model, ranks, target)


def _derivation_ranks(gp: GroundProgram, model: Interpretation) -> dict[Literal, int]:
    alive = [
        Rule(r.head, r.body_pos)
        for r in gp.rules
        if not (r.body_neg & model.literals)
    ]
    ranks: dict[Literal, int] = {}
    rank = 0
    derived: set[Literal] = set()
    while True:
        layer = [
            r.head
            for r in alive
            if r.head not in derived and r.body_pos <= derived
        ]
        if not layer:
            return ranks
        for head in layer:
            ranks[head] = rank
            derived.add(head)
        rank += 1


def _build_trace(gp, model, ranks, target: Literal) -> DerivationNode:
    support = None
    for r in sorted(gp.rules, key=lambda r: len(r.body_pos)):
        if r.head != target:
            continue
        if r.body_neg & model.literals:
            continue
        if not (r.body_pos <= model.literals):
            continue
        if all(ranks.get(b, 10**9) < ranks[target] for b in r.body_pos):
            support = r
            break
    if support is None or support.is_fact:
        return DerivationNode(target, support, ())
    children = tuple(
        _build_trace(gp, model, ranks, b)
        for b in sorted(support.body_pos, key=literal_key)
    )
    return DerivationNode(target, support, children)


# --- configuration files -----------------------------------------------------


def load_kb_config(path: str | Path) -> KbConfig:
    """Read a plain-text config.

    Format (INI style, one ``[kb]`` section, all keys optional)::

        [kb]
        horizon = auto
        persistent = control, stop
        pcb = brake -> stop; combine(keep_state, control) -> control
        incompatible = p ~ q; r ~ s
    """
    parser = configparser.ConfigParser()
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string(text, source=str(path))
    if not parser.has_section("kb"):
        raise KbConfigError(f"{path}: missing [kb] section")
    section = parser["kb"]

    horizon: int | None = None
    raw_horizon = section.get("horizon", "auto").strip()
    if raw_horizon != "auto":
        try:
            horizon = int(raw_horizon)
        except ValueError as exc:
            raise KbConfigError(f"{path}: horizon must be an integer or 'auto'") from exc
        if horizon < 0:
            raise KbConfigError(f"{path}: horizon must be nonnegative")

    persistent = tuple(
        name.strip()
        for name in section.get("persistent", "control, stop").split(",")
        if name.strip()
    )

    def parse_pairs(raw: str, sep: str) -> tuple[tuple[Term, Term], ...]:
        pairs = []
        for chunk in raw.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if sep not in chunk:
                raise KbConfigError(f"{path}: expected '{sep}' in pair: {chunk!r}")
            left, right = chunk.split(sep, 1)
            try:
                pairs.append((parse_term(left.strip()), parse_term(right.strip())))
            except ParseError as exc:
                raise KbConfigError(f"{path}: bad term in pair {chunk!r}: {exc}") from exc
        return tuple(pairs)

    kwargs: dict = {"horizon": horizon, "persistent_properties": persistent}
    if "pcb" in section:
        kwargs["pcb_facts"] = parse_pairs(section["pcb"], "->")
    if "incompatible" in section:
        kwargs["extra_incompatible"] = parse_pairs(section["incompatible"], "~")
    return KbConfig(**kwargs)
