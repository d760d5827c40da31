// Wire protocol types and validators for the bridge WebSocket.
// Mirrors bridge_schema.json (schema_version 1); the fixture-based
// conformance test keeps the two in agreement.

export type Vec2 = [number, number];

export type PostureName =
    | "contract"
    | "disperse"
    | "extend_limb"
    | "follow_gradient"
    | "hold";

export interface Posture {
    posture: PostureName;
    bearing?: number;
    length?: number;
}

export interface RobotView {
    id: string;
    position: Vec2;
    fusion: number;
    direction?: Vec2 | null;
}

export interface ObjectView {
    position: Vec2;
    strength: number;
    discovered: boolean;
}

export interface SnapshotPayload {
    schema_version: 1;
    paused: boolean;
    human: { position: Vec2; heading: number };
    robots: RobotView[];
    objects: ObjectView[];
    posture: Posture | null;
    resources: { steps: number; distance: number; messages: number };
    goal: { metric: string; value: number; reached: boolean };
    arena?: [number, number, number, number];
}

export type CommandPayload =
    | { op: "posture"; posture: Posture }
    | { op: "move_human"; velocity: Vec2 }
    | { op: "pause" }
    | { op: "resume" }
    | { op: "reset"; seed: number };

export interface SnapshotMessage {
    type: "snapshot";
    tick: number;
    payload: SnapshotPayload;
}

export interface CommandMessage {
    type: "command";
    tick: number;
    payload: CommandPayload;
}

export interface AckMessage {
    type: "ack";
    tick: number;
    payload: { client_tick: number; op: string };
}

export interface ErrorMessage {
    type: "error";
    tick: number;
    payload: { message: string };
}

export type Message = SnapshotMessage | CommandMessage | AckMessage | ErrorMessage;

const POSTURES = new Set(["contract", "disperse", "extend_limb", "follow_gradient", "hold"]);

function isVec2(x: unknown): x is Vec2 {
    return (
        Array.isArray(x) &&
        x.length === 2 &&
        typeof x[0] === "number" &&
        typeof x[1] === "number" &&
        Number.isFinite(x[0]) &&
        Number.isFinite(x[1])
    );
}

function isObject(x: unknown): x is Record<string, unknown> {
    return typeof x === "object" && x !== null && !Array.isArray(x);
}

function isTick(x: unknown): x is number {
    return typeof x === "number" && Number.isInteger(x) && x >= 0;
}

function hasOnlyKeys(x: Record<string, unknown>, keys: string[]): boolean {
    return Object.keys(x).every((k) => keys.includes(k));
}

export function isPosture(x: unknown): x is Posture {
    if (!isObject(x) || typeof x.posture !== "string" || !POSTURES.has(x.posture)) return false;
    if (!hasOnlyKeys(x, ["posture", "bearing", "length"])) return false;
    if ("bearing" in x && typeof x.bearing !== "number") return false;
    if ("length" in x && (typeof x.length !== "number" || x.length < 0)) return false;
    return true;
}

function isCommandPayload(x: unknown): x is CommandPayload {
    if (!isObject(x) || typeof x.op !== "string") return false;
    switch (x.op) {
        case "posture":
            return hasOnlyKeys(x, ["op", "posture"]) && isPosture(x.posture);
        case "move_human":
            return hasOnlyKeys(x, ["op", "velocity"]) && isVec2(x.velocity);
        case "pause":
        case "resume":
            return hasOnlyKeys(x, ["op"]);
        case "reset":
            return hasOnlyKeys(x, ["op", "seed"]) && Number.isInteger(x.seed);
        default:
            return false;
    }
}

function isRobotView(x: unknown): x is RobotView {
    if (!isObject(x)) return false;
    if (!hasOnlyKeys(x, ["id", "position", "fusion", "direction"])) return false;
    if (typeof x.id !== "string" || !isVec2(x.position)) return false;
    if (typeof x.fusion !== "number" || x.fusion < 0 || x.fusion > 1) return false;
    if ("direction" in x && x.direction !== null && !isVec2(x.direction)) return false;
    return true;
}

function isObjectView(x: unknown): x is ObjectView {
    return (
        isObject(x) &&
        hasOnlyKeys(x, ["position", "strength", "discovered"]) &&
        isVec2(x.position) &&
        typeof x.strength === "number" &&
        x.strength >= 0 &&
        x.strength <= 1 &&
        typeof x.discovered === "boolean"
    );
}

function isSnapshotPayload(x: unknown): x is SnapshotPayload {
    if (!isObject(x)) return false;
    const keys = [
        "schema_version",
        "paused",
        "human",
        "robots",
        "objects",
        "posture",
        "resources",
        "goal",
        "arena",
    ];
    if (!hasOnlyKeys(x, keys)) return false;
    if (x.schema_version !== 1 || typeof x.paused !== "boolean") return false;
    if (!isObject(x.human) || !isVec2(x.human.position) || typeof x.human.heading !== "number")
        return false;
    if (!Array.isArray(x.robots) || !x.robots.every(isRobotView)) return false;
    if (!Array.isArray(x.objects) || !x.objects.every(isObjectView)) return false;
    if (x.posture !== null && !isPosture(x.posture)) return false;
    const res = x.resources;
    if (
        !isObject(res) ||
        !isTick(res.steps) ||
        typeof res.distance !== "number" ||
        res.distance < 0 ||
        !isTick(res.messages)
    )
        return false;
    const goal = x.goal;
    if (
        !isObject(goal) ||
        typeof goal.metric !== "string" ||
        typeof goal.value !== "number" ||
        typeof goal.reached !== "boolean"
    )
        return false;
    if ("arena" in x) {
        const a = x.arena;
        if (!Array.isArray(a) || a.length !== 4 || !a.every((v) => typeof v === "number"))
            return false;
    }
    return true;
}

export function validateMessage(data: unknown): Message | null {
    if (!isObject(data) || !isTick(data.tick)) return null;
    switch (data.type) {
        case "snapshot":
            return isSnapshotPayload(data.payload) ? (data as unknown as SnapshotMessage) : null;
        case "command":
            return isCommandPayload(data.payload) ? (data as unknown as CommandMessage) : null;
        case "ack": {
            const p = data.payload;
            return isObject(p) &&
                hasOnlyKeys(p, ["client_tick", "op"]) &&
                Number.isInteger(p.client_tick) &&
                typeof p.op === "string"
                ? (data as unknown as AckMessage)
                : null;
        }
        case "error": {
            const p = data.payload;
            return isObject(p) && hasOnlyKeys(p, ["message"]) && typeof p.message === "string"
                ? (data as unknown as ErrorMessage)
                : null;
        }
        default:
            return null;
    }
}

export function parseMessage(text: string): Message | null {
    try {
        return validateMessage(JSON.parse(text));
    } catch {
        return null;
    }
}
