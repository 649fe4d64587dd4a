"""Task goals as variations over typed environment states.

Defines environments of typed instances, represents goal states as subsets
of value domains (variations), builds them interactively from a single
before/after demonstration, and plans/executes pour sequences that bring an
environment into the goal.
"""

from .comparison import (
    Comparison,
    EnvironmentComparison,
    Predicate,
    PropertyDifference,
    Reason,
    ReasonKind,
    compare_environment,
    compare_to_variation,
    compare_values,
    evaluate_predicate,
)
from .defaults import (
    MILK_POUR_ANSWERS,
    bench_environment,
    default_ontology,
    default_registry,
    make_container,
    make_table,
    milk_pour_snapshots,
)
from .errors import (
    CycleError,
    DocumentError,
    DomainMismatchError,
    DuplicatePropertyError,
    EmptyVariationError,
    InvalidAnswerError,
    InvariantError,
    NoChangesDetectedError,
    PreconditionViolatedError,
    StaleVersionError,
    UnknownConceptError,
    UnknownInstanceError,
    UnknownParentError,
    UnknownPropertyError,
    VarplanError,
)
from .executor import ExecutionTrace, TraceEntry, Verdict, execute
from .kb import (
    EPS,
    BooleanValue,
    CollectionValue,
    Concept,
    ConceptValue,
    EnvironmentState,
    EnvironmentValue,
    Instance,
    InstanceRefValue,
    InstanceValue,
    IntegerValue,
    Kind,
    KnowledgeBase,
    LocationValue,
    NumberValue,
    Pose,
    PoseValue,
    PropertyDef,
    Value,
    get_value,
    set_value,
    values_equal,
)
from .planner import (
    Cell,
    ExecutionPlan,
    NoSolution,
    PlanResult,
    SkillAlternative,
    SkillAlternativeSet,
    SolutionMatrix,
    build_matrix,
    plan,
    select_solutions,
    solve_content_level,
)
from .session import (
    DemonstrationDiff,
    Question,
    Session,
    answer,
    compute_diff,
    question_bound,
    run_script,
    start_session,
)
from .skills import (
    ActionTemplate,
    ParamSpec,
    SkillInstance,
    SkillRegistry,
    SkillTemplate,
    apply_effects,
    check_preconditions,
    recognize_skills,
)
from .variation import (
    CollectionSubsetVariation,
    ConceptVariation,
    EmptyVariation,
    EnvironmentVariation,
    FixedVariation,
    InstancePropertiesVariation,
    IntersectionVariation,
    IntervalVariation,
    LocationBallVariation,
    MatchResult,
    PoseBallVariation,
    UnionVariation,
    Variation,
    WholeVariation,
    collection_member,
    contains,
    nearest_targets,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
