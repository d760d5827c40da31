// User input to outbound command frames. MoveHuman is throttled to the tick
// rate so command bandwidth stays O(1) regardless of how fast keys repeat;
// a limb drag of zero length sends nothing.

import type { CommandPayload, Posture, PostureName, Vec2 } from "./schema.js";
import { Camera, screenToWorld } from "./transform.js";

export type SendFn = (frame: string) => void;
export type Clock = () => number; // milliseconds

export class CommandDispatcher {
    private lastMoveAt = -Infinity;
    private lastVelocity: Vec2 = [0, 0];
    private clientTick = 0;

    constructor(
        private readonly send: SendFn,
        private readonly tickRateHz: number,
        private readonly now: Clock = () => performance.now(),
    ) {}

    private frame(payload: CommandPayload): string {
        return JSON.stringify({ type: "command", tick: this.clientTick++, payload });
    }

    posture(name: PostureName, extras: Partial<Posture> = {}): void {
        const posture: Posture = { posture: name, ...extras };
        this.send(this.frame({ op: "posture", posture }));
    }

    /** Standing velocity from held arrow keys; at most one message per tick
     * period, and only when the velocity actually changes. */
    moveHuman(velocity: Vec2): boolean {
        const unchanged =
            velocity[0] === this.lastVelocity[0] && velocity[1] === this.lastVelocity[1];
        if (unchanged) return false;
        const period = 1000 / this.tickRateHz;
        const t = this.now();
        const stopping = velocity[0] === 0 && velocity[1] === 0;
        if (!stopping && t - this.lastMoveAt < period) return false;
        this.lastMoveAt = t;
        this.lastVelocity = velocity;
        this.send(this.frame({ op: "move_human", velocity }));
        return true;
    }

    /** Drag on the canvas defines an extended limb: bearing from the drag
     * direction, length from its world-space extent. Zero-length drags are
     * ignored. */
    dragLimb(startPx: Vec2, endPx: Vec2, camera: Camera): boolean {
        const a = screenToWorld(camera, startPx);
        const b = screenToWorld(camera, endPx);
        const dx = b[0] - a[0];
        const dy = b[1] - a[1];
        const length = Math.hypot(dx, dy);
        if (length === 0) return false;
        this.posture("extend_limb", { bearing: Math.atan2(dy, dx), length });
        return true;
    }

    pause(): void {
        this.send(this.frame({ op: "pause" }));
    }

    resume(): void {
        this.send(this.frame({ op: "resume" }));
    }

    reset(seed: number): void {
        this.send(this.frame({ op: "reset", seed }));
    }
}

export function velocityFromKeys(keys: Set<string>, speed: number): Vec2 {
    let vx = 0;
    let vy = 0;
    if (keys.has("ArrowLeft") || keys.has("a")) vx -= 1;
    if (keys.has("ArrowRight") || keys.has("d")) vx += 1;
    if (keys.has("ArrowUp") || keys.has("w")) vy += 1;
    if (keys.has("ArrowDown") || keys.has("s")) vy -= 1;
    const norm = Math.hypot(vx, vy);
    if (norm === 0) return [0, 0];
    return [(vx / norm) * speed, (vy / norm) * speed];
}
