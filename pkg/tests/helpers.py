from __future__ import annotations

from swarmamp.world import AgentBody, AgentKind, Rect, WorldState


def make_world(size: float = 10.0, objects=(), obstacles=(), sigma: float = 0.0, time: int = 0):
    return WorldState(
        time=time,
        arena=Rect(0.0, 0.0, size, size),
        objects=tuple(objects),
        obstacles=tuple(obstacles),
        env_params={"sensor_noise_sigma": sigma},
    )


def make_robot(
    agent_id: str,
    position,
    max_speed: float = 1.0,
    sense_radius: float = 2.0,
    comm_radius: float = 3.0,
    kind: AgentKind = AgentKind.ROBOT,
):
    return AgentBody(
        id=agent_id,
        kind=kind,
        position=tuple(position),
        max_speed=max_speed,
        sense_radius=sense_radius,
        comm_radius=comm_radius,
    )
