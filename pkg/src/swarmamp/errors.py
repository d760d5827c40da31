"""Exception types shared across the simulator and the evaluation harness."""

from __future__ import annotations


class SwarmAmpError(Exception):
    """Base class for all package errors."""


class UnknownAgentId(SwarmAmpError):
    pass


class InvalidAction(SwarmAmpError):
    pass


class PolicyFailure(SwarmAmpError):
    def __init__(self, agent_id: str, cause: BaseException | None = None):
        super().__init__(f"policy for agent {agent_id!r} failed: {cause!r}")
        self.agent_id = agent_id
        self.cause = cause


class EmptyRange(SwarmAmpError):
    pass


class GridTooCoarse(SwarmAmpError):
    pass


class EmptyTraceSet(SwarmAmpError):
    pass


class ZeroLimit(SwarmAmpError):
    pass


class OutOfRange(SwarmAmpError):
    pass


class MismatchedSpace(SwarmAmpError):
    pass


class UnknownAxis(SwarmAmpError):
    pass


class UnknownBucket(SwarmAmpError):
    pass


class LoaViolation(SwarmAmpError):
    pass


class UnknownMetric(SwarmAmpError):
    pass


class UnknownScenario(SwarmAmpError):
    pass


class ConfigError(SwarmAmpError):
    """Raised when an experiment config cannot be used. Carries all violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations
