"""swarmamp: deterministic human-swarm joint-agent simulation and evaluation.

A local-rule robot swarm acts as an embodied extension of a human operator;
the evaluation harness measures decision-making competence (effectiveness
times resource efficiency) over sampled situation spaces and tests whether
the joint operator-swarm system outperforms either side acting alone.
"""

from .competence import (
    BrittlenessMap,
    CompetenceReport,
    JointnessVerdict,
    brittleness_sweep,
    build_report,
    compare_allocations,
    competence,
    estimate_effectiveness,
    wilson_interval,
)
from .episode import (
    CommandRecord,
    DecisionMatrix,
    EpisodeTrace,
    GroupDecisionMatrix,
    Outcome,
    StepState,
    run_episode,
)
from .goals import Budget, GoalSpec, ResourceLedger, normalize_resources, register_metric
from .situations import (
    ContinuousRange,
    DiscreteRange,
    Sampler,
    Situation,
    SituationSpace,
    Variable,
    sample_situations,
)
from .swarm import (
    Contract,
    Disperse,
    ExtendLimb,
    FieldEntry,
    FollowGradient,
    Hold,
    HumanAvatar,
    PostureCommand,
    SwarmConfig,
    SwarmState,
    SwarmUnit,
    communication_graph,
    gradient_readout,
    posture_step,
    update_fusion_field,
)
from .world import (
    Action,
    AgentBody,
    AgentKind,
    Broadcast,
    MarkGoalClaim,
    Move,
    NoOp,
    ObjectOfInterest,
    Obstacle,
    Percept,
    Rect,
    WorldState,
    perceive,
    step,
)

__version__ = "0.1.0"
