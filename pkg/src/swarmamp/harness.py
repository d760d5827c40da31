"""Experiment orchestration: config ingestion, episode batches, reports.

A config file names the scenario, situation space, goal, swarm geometry, and
three policy arms (nat: operator alone, arti: swarm alone, joint: both).
Running the experiment produces competence reports per arm, a jointness
verdict, and deterministic CSV / JSONL / trace artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import rng as rnd
from .competence import (
    BrittlenessMap,
    CompetenceReport,
    JointnessVerdict,
    brittleness_sweep,
    build_report,
    compare_allocations,
)
from .episode import DecisionMatrix, EpisodeTrace, run_episode
from .errors import ConfigError
from .goals import Budget, GoalSpec, metric_names
from .policies import (
    DiscreteRandomWalkPolicy,
    FairCoinPolicy,
    GradientFollowerPolicy,
    InertPolicy,
    RandomWalkPolicy,
    SupervisorScriptPolicy,
    TrustModel,
)
from .rng import Substream, derive_key
from .scenarios import build_scenario, scenario_names
from .situations import (
    ContinuousRange,
    DiscreteRange,
    Sampler,
    Situation,
    SituationSpace,
    Variable,
    sample_situations,
)
from .swarm import PostureGains, SwarmConfig, SwarmUnit
from .trace_io import write_trace
from .world import AgentBody, AgentKind

SCHEMA_VERSION = 1
ARM_NAMES = ("nat", "arti", "joint")


@dataclass(frozen=True)
class ExperimentConfig:
    schema_version: int
    scenario: str
    seed: int
    episodes: int
    output_dir: str
    space: SituationSpace
    goal: GoalSpec
    budget: Budget
    swarm: SwarmConfig
    scenario_params: Mapping[str, Any]
    arms: Mapping[str, Mapping[str, Any]]
    workers: int = 1
    trace_episodes: int = 2
    sweep_defaults: Mapping[str, Any] = field(default_factory=dict)

    @property
    def space_id(self) -> str:
        """Fingerprint of (scenario, situation space, goal); identifies an
        evaluation context across reports."""
        payload = {
            "scenario": self.scenario,
            "variables": [
                [
                    v.name,
                    list(v.range.values)
                    if isinstance(v.range, DiscreteRange)
                    else [v.range.lo, v.range.hi],
                ]
                for v in self.space.variables
            ],
            "sampler": self.space.sampler.value,
            "metric": self.goal.metric,
            "range": list(self.goal.tolerated_range),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:12]


# --- config parsing -----------------------------------------------------------


def _parse_space(raw: Mapping[str, Any], violations: list[str]) -> SituationSpace | None:
    variables = []
    for i, var in enumerate(raw.get("variables", [])):
        name = var.get("name")
        if not name:
            violations.append(f"situation_space.variables[{i}]: missing name")
            continue
        try:
            if "values" in var:
                variables.append(Variable(name, DiscreteRange(tuple(var["values"]))))
            elif "lo" in var and "hi" in var:
                variables.append(Variable(name, ContinuousRange(float(var["lo"]), float(var["hi"]))))
            else:
                violations.append(f"situation_space.variables[{i}] ({name}): needs values or lo/hi")
        except Exception as exc:
            violations.append(f"situation_space.variables[{i}] ({name}): {exc}")
    sampler_name = raw.get("sampler", "uniform")
    try:
        sampler = Sampler(sampler_name)
    except ValueError:
        violations.append(f"situation_space.sampler: unknown sampler {sampler_name!r}")
        sampler = Sampler.UNIFORM
    if not variables:
        violations.append("situation_space: needs at least one variable")
        return None
    try:
        return SituationSpace(tuple(variables), sampler)
    except Exception as exc:
        violations.append(f"situation_space: {exc}")
        return None


def _parse_swarm(raw: Mapping[str, Any], violations: list[str]) -> SwarmConfig | None:
    gains = {}
    for posture, g in (raw.get("posture_gains") or {}).items():
        gains[posture] = PostureGains(
            cohesion=float(g.get("cohesion", 0.0)),
            separation=float(g.get("separation", 0.0)),
            target=float(g.get("target", 0.0)),
        )
    try:
        kwargs = dict(
            n_robots=int(raw.get("n_robots", 12)),
            comm_radius=float(raw.get("comm_radius", 4.0)),
            sense_radius=float(raw.get("sense_radius", 2.5)),
            decay=float(raw.get("decay", 0.7)),
            separation_distance=float(raw.get("separation_distance", 1.5)),
        )
        if gains:
            kwargs["posture_gains"] = gains
        return SwarmConfig(**kwargs)
    except Exception as exc:
        violations.append(f"swarm: {exc}")
        return None


KNOWN_POLICY_KINDS = {
    "inert",
    "random_walk",
    "discrete_random_walk",
    "fair_coin",
    "gradient_follower",
    "supervisor",
    "swarm",
}


def _check_policy_spec(path: str, spec: Any, violations: list[str]) -> None:
    if not isinstance(spec, Mapping) or "kind" not in spec:
        violations.append(f"{path}: policy spec needs a kind")
        return
    kind = spec["kind"]
    if kind not in KNOWN_POLICY_KINDS:
        violations.append(f"{path}: unknown policy kind {kind!r}")
    if kind == "supervisor":
        for key in ("trust", "bucket_variable", "probes", "inner", "fallback"):
            if key not in spec:
                violations.append(f"{path}: supervisor spec missing {key!r}")
        if "inner" in spec:
            _check_policy_spec(f"{path}.inner", spec["inner"], violations)
        if "fallback" in spec:
            _check_policy_spec(f"{path}.fallback", spec["fallback"], violations)


def validate_config(text: str) -> tuple[ExperimentConfig | None, list[str]]:
    """Parse and validate a YAML experiment config.

    Collects every violation instead of failing fast; returns the built
    config only when the list is empty.
    """
    violations: list[str] = []
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark else ""
        return None, [f"parse error{where}: {getattr(exc, 'problem', exc)}"]
    if not isinstance(raw, Mapping):
        return None, ["config must be a mapping"]

    if raw.get("schema_version") != SCHEMA_VERSION:
        violations.append(f"schema_version: must be {SCHEMA_VERSION}")

    scenario = raw.get("scenario")
    if scenario not in scenario_names():
        violations.append(f"scenario: unknown scenario id {scenario!r}")

    episodes = raw.get("episodes", 0)
    if not isinstance(episodes, int) or episodes < 1:
        violations.append("episodes: n >= 1 required")

    seed = raw.get("seed")
    if not isinstance(seed, int):
        violations.append("seed: integer required")
        seed = 0

    space = _parse_space(raw.get("situation_space") or {}, violations)
    swarm = _parse_swarm(raw.get("swarm") or {}, violations)

    goal = None
    goal_raw = raw.get("goal") or {}
    metric = goal_raw.get("metric")
    if metric not in metric_names():
        violations.append(f"goal.metric: unknown metric {metric!r}")
    else:
        try:
            lo, hi = goal_raw["range"]
            goal = GoalSpec(metric=metric, tolerated_range=(float(lo), float(hi)))
        except Exception as exc:
            violations.append(f"goal.range: {exc}")

    budget = None
    budget_raw = raw.get("budget") or {}
    try:
        budget = Budget(
            steps=int(budget_raw.get("steps", -1)),
            distance=None if budget_raw.get("distance") is None else float(budget_raw["distance"]),
            messages=None if budget_raw.get("messages") is None else int(budget_raw["messages"]),
        )
    except Exception as exc:
        violations.append(f"budget: {exc}")

    arms = raw.get("arms") or {}
    for arm in ARM_NAMES:
        if arm not in arms:
            violations.append(f"arms.{arm}: missing")
            continue
        for role in ("human", "robots"):
            if role not in arms[arm]:
                violations.append(f"arms.{arm}.{role}: missing policy spec")
            else:
                _check_policy_spec(f"arms.{arm}.{role}", arms[arm][role], violations)

    if violations or space is None or swarm is None or goal is None or budget is None:
        return None, violations

    config = ExperimentConfig(
        schema_version=SCHEMA_VERSION,
        scenario=scenario,
        seed=seed,
        episodes=episodes,
        output_dir=str(raw.get("output_dir", "out")),
        space=space,
        goal=goal,
        budget=budget,
        swarm=swarm,
        scenario_params=dict(raw.get("scenario_params") or {}),
        arms={k: dict(v) for k, v in arms.items()},
        workers=int(raw.get("workers", 1)),
        trace_episodes=int(raw.get("trace_episodes", 2)),
        sweep_defaults=dict(raw.get("sweep") or {}),
    )
    return config, []


def load_config(path: str | Path) -> ExperimentConfig:
    config, violations = validate_config(Path(path).read_text())
    if config is None:
        raise ConfigError(violations)
    return config


# --- policy construction --------------------------------------------------------


def _build_policy(spec: Mapping[str, Any], situation: Situation) -> DecisionMatrix:
    kind = spec["kind"]
    if kind == "inert":
        return InertPolicy()
    if kind == "random_walk":
        return RandomWalkPolicy(speed=float(spec.get("speed", 1.0)))
    if kind == "discrete_random_walk":
        return DiscreteRandomWalkPolicy()
    if kind == "fair_coin":
        return FairCoinPolicy()
    if kind == "gradient_follower":
        return GradientFollowerPolicy(
            threshold=float(spec.get("threshold", 0.1)), speed=float(spec.get("speed", 1.0))
        )
    if kind == "supervisor":
        trust_raw = spec["trust"]
        trust = TrustModel(
            bucket_edges=tuple(float(x) for x in trust_raw["edges"]),
            believed_competence=tuple(float(x) for x in trust_raw["believed"]),
            deploy_threshold=float(trust_raw["threshold"]),
        )
        bucket_value = float(situation.assignment[spec["bucket_variable"]])
        probes = [float(x) for x in spec["probes"]]
        probe = probes[trust.bucket_for(bucket_value)]
        return SupervisorScriptPolicy(
            trust,
            bucket_value=bucket_value,
            true_probe=probe,
            inner=_build_policy(spec["inner"], situation),
            fallback=_build_policy(spec["fallback"], situation),
        )
    raise ConfigError([f"unknown policy kind {kind!r}"])


def make_policies(
    arm_spec: Mapping[str, Any],
    bodies: Mapping[str, AgentBody],
    situation: Situation,
    swarm: SwarmConfig,
) -> dict[str, DecisionMatrix]:
    """Expand an arm's {human, robots} policy specs over the scenario's agents."""
    policies: dict[str, DecisionMatrix] = {}
    robot_spec = arm_spec["robots"]
    if robot_spec["kind"] == "swarm":
        unit = SwarmUnit(swarm)
        for agent_id, body in bodies.items():
            if body.kind is AgentKind.ROBOT:
                policies[agent_id] = unit
    else:
        for agent_id, body in bodies.items():
            if body.kind is AgentKind.ROBOT:
                policies[agent_id] = _build_policy(robot_spec, situation)
    for agent_id, body in bodies.items():
        if body.kind is AgentKind.HUMAN:
            policies[agent_id] = _build_policy(arm_spec["human"], situation)
        elif agent_id not in policies:
            policies[agent_id] = InertPolicy()
    return policies


def merged_params(config: ExperimentConfig) -> dict[str, Any]:
    params = dict(config.scenario_params)
    params.setdefault("n_robots", config.swarm.n_robots)
    params.setdefault("comm_radius", config.swarm.comm_radius)
    params.setdefault("robot_sense_radius", config.swarm.sense_radius)
    params.setdefault("separation_distance", config.swarm.separation_distance)
    return params


def run_one_episode(
    config: ExperimentConfig, arm: str, situation: Situation, seed: int
) -> EpisodeTrace:
    params = merged_params(config)
    merged = dict(params)
    merged.update(situation.assignment)
    _, bodies = build_scenario(config.scenario, merged, Substream(seed, rnd.INIT))
    policies = make_policies(config.arms[arm], bodies, situation, config.swarm)
    return run_episode(situation, policies, config.goal, config.budget, seed, params=params)


# --- parallel execution ----------------------------------------------------------

_WORKER_CONFIG: ExperimentConfig | None = None


def _init_worker(config: ExperimentConfig) -> None:
    global _WORKER_CONFIG
    _WORKER_CONFIG = config


def _run_task(task: tuple[str, int, Situation, int]) -> tuple[str, int, EpisodeTrace]:
    arm, index, situation, seed = task
    assert _WORKER_CONFIG is not None
    return arm, index, run_one_episode(_WORKER_CONFIG, arm, situation, seed)


def _run_batch(
    config: ExperimentConfig, tasks: list[tuple[str, int, Situation, int]], workers: int
) -> list[tuple[str, int, EpisodeTrace]]:
    if workers <= 1:
        _init_worker(config)
        return [_run_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(config,)
    ) as pool:
        return list(pool.map(_run_task, tasks, chunksize=chunk))


# --- experiment ------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentResult:
    reports: Mapping[str, CompetenceReport]
    verdict: JointnessVerdict
    files: tuple[str, ...]
    aborted: int


def episode_seed(root_seed: int, arm: str, index: int) -> int:
    return derive_key(root_seed, rnd.ARM, ARM_NAMES.index(arm), index)


def run_experiment(
    config: ExperimentConfig,
    workers: int | None = None,
    out_dir: str | Path | None = None,
) -> ExperimentResult:
    """Run all three arms over a shared situation sample and compare them.

    Deterministic for a given config: arm seeds are derived disjointly from
    the root seed, episodes are reduced in seed order regardless of worker
    count, and every output file is byte-stable.
    """
    workers = config.workers if workers is None else workers
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "traces").mkdir(exist_ok=True)

    situations = sample_situations(
        config.space, config.episodes, config.seed, scenario=config.scenario
    )
    tasks = [
        (arm, j, situations[j], episode_seed(config.seed, arm, j))
        for arm in ARM_NAMES
        for j in range(config.episodes)
    ]
    results = _run_batch(config, tasks, workers)

    traces: dict[str, list[EpisodeTrace]] = {arm: [None] * config.episodes for arm in ARM_NAMES}  # type: ignore[list-item]
    for arm, index, trace in results:
        traces[arm][index] = trace

    files: list[str] = []
    reports: dict[str, CompetenceReport] = {}
    for arm in ARM_NAMES:
        reports[arm] = build_report(
            traces[arm], config.goal, config.budget, config.space_id, arm
        )
        for j in range(min(config.trace_episodes, config.episodes)):
            path = out / "traces" / f"{arm}_{j:04d}.jsonl"
            with open(path, "w") as fh:
                write_trace(traces[arm][j], fh)
            files.append(str(path))

    verdict = compare_allocations(reports["nat"], reports["arti"], reports["joint"])

    report_csv = out / "reports.csv"
    _write_reports_csv(report_csv, reports)
    files.append(str(report_csv))

    report_jsonl = out / "reports.jsonl"
    with open(report_jsonl, "w") as fh:
        for arm in ARM_NAMES:
            fh.write(json.dumps({"arm": arm, **reports[arm].as_dict()}, sort_keys=True) + "\n")
    files.append(str(report_jsonl))

    verdict_json = out / "verdict.json"
    with open(verdict_json, "w") as fh:
        json.dump(
            {
                "verdict": verdict.verdict,
                "c_nat": reports["nat"].c_hat,
                "c_arti": reports["arti"].c_hat,
                "c_joint": reports["joint"].c_hat,
                "space_id": config.space_id,
            },
            fh,
            sort_keys=True,
            indent=2,
        )
        fh.write("\n")
    files.append(str(verdict_json))

    aborted = sum(reports[a].aborted for a in ARM_NAMES)
    return ExperimentResult(reports, verdict, tuple(files), aborted)


REPORT_COLUMNS = [
    "arm",
    "policy_id",
    "space_id",
    "n",
    "p_hat",
    "p_ci_lo",
    "p_ci_hi",
    "r",
    "c_hat",
    "c_ci_lo",
    "c_ci_hi",
    "aborted",
]


def _write_reports_csv(path: Path, reports: Mapping[str, CompetenceReport]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for arm in ARM_NAMES:
            rp = reports[arm]
            writer.writerow(
                [
                    arm,
                    rp.policy_id,
                    rp.space_id,
                    rp.n,
                    repr(rp.p_hat),
                    repr(rp.ci[0]),
                    repr(rp.ci[1]),
                    repr(rp.r),
                    repr(rp.c_hat),
                    repr(rp.c_ci[0]),
                    repr(rp.c_ci[1]),
                    rp.aborted,
                ]
            )


def read_reports_csv(path: str | Path) -> dict[str, CompetenceReport]:
    """Round-trip loader for reports.csv; values parse back to exact floats."""
    out: dict[str, CompetenceReport] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["arm"]] = CompetenceReport(
                p_hat=float(row["p_hat"]),
                ci=(float(row["p_ci_lo"]), float(row["p_ci_hi"])),
                r=float(row["r"]),
                c_hat=float(row["c_hat"]),
                c_ci=(float(row["c_ci_lo"]), float(row["c_ci_hi"])),
                n=int(row["n"]),
                space_id=row["space_id"],
                policy_id=row["policy_id"],
                aborted=int(row["aborted"]),
            )
    return out


# --- brittleness sweep -------------------------------------------------------------


def run_sweep(
    config: ExperimentConfig,
    axis: str,
    arm: str = "joint",
    per_cell_n: int | None = None,
    n_cells: int | None = None,
    out_dir: str | Path | None = None,
    workers: int | None = None,
) -> tuple[BrittlenessMap, tuple[str, ...]]:
    """Thin wrapper over the competence sweep, persisting CSV + JSONL files."""
    defaults = config.sweep_defaults
    per_cell_n = per_cell_n or int(defaults.get("per_cell_n", 40))
    n_cells = n_cells or int(defaults.get("cells", 10))
    threshold = float(defaults.get("cliff_threshold", 0.2))
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def runner(situation: Situation, seed: int) -> EpisodeTrace:
        bound = Situation(situation.assignment, scenario=config.scenario)
        return run_one_episode(config, arm, bound, seed)

    bmap = brittleness_sweep(
        config.space,
        axis,
        runner,
        config.goal,
        config.budget,
        per_cell_n=per_cell_n,
        seed=derive_key(config.seed, rnd.ARM, 97),
        n_cells=n_cells,
        cliff_threshold=threshold,
        space_id=config.space_id,
        policy_id=arm,
    )

    cells_csv = out / f"sweep_{axis}.csv"
    with open(cells_csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "value"] + REPORT_COLUMNS[3:])
        for value, rp in bmap.cells:
            writer.writerow(
                [
                    axis,
                    repr(value) if isinstance(value, float) else value,
                    rp.n,
                    repr(rp.p_hat),
                    repr(rp.ci[0]),
                    repr(rp.ci[1]),
                    repr(rp.r),
                    repr(rp.c_hat),
                    repr(rp.c_ci[0]),
                    repr(rp.c_ci[1]),
                    rp.aborted,
                ]
            )

    cliffs_csv = out / f"sweep_{axis}_cliffs.csv"
    with open(cliffs_csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "left_index", "right_index", "left_value", "right_value", "delta"])
        for cliff in bmap.cliffs:
            writer.writerow(
                [
                    axis,
                    cliff.left_index,
                    cliff.right_index,
                    cliff.left_value,
                    cliff.right_value,
                    repr(cliff.delta),
                ]
            )

    sweep_jsonl = out / f"sweep_{axis}.jsonl"
    with open(sweep_jsonl, "w") as fh:
        for value, rp in bmap.cells:
            fh.write(json.dumps({"axis": axis, "value": value, **rp.as_dict()}, sort_keys=True) + "\n")

    return bmap, (str(cells_csv), str(cliffs_csv), str(sweep_jsonl))
