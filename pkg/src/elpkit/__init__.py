"""Non-monotonic reasoning toolchain: extended logic programs, default
theories, answer-set solving, and a norm-based accident-analysis KB."""

from .defaults import (
    CompilationReport,
    compile_fact,
    compile_implication,
    compile_normal_default,
    compile_seminormal_default,
    compile_theory,
)
from .extensions import enumerate_extensions
from .grounding import (
    DomainMap,
    GroundProgram,
    GroundingError,
    SafetyError,
    auto_horizon,
    check_safety,
    derive_domains,
    ground,
    make_ground_program,
)
from .parser import (
    ParseError,
    SourceSpan,
    parse_default_theory,
    parse_literal,
    parse_program,
    parse_term,
    serialize_program,
)
from .solving import (
    Interpretation,
    SolveResult,
    brute_force_answer_sets,
    consequences,
    is_answer_set,
    is_supported,
    reduct,
    solve,
    stratify,
)
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
    Substitution,
    Term,
    Variable,
    apply_substitution,
    complement,
    match,
)

__version__ = "0.1.0"
