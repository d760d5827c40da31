// Scene construction and canvas painting. buildScene is pure (snapshot in,
// draw list out) so rendering rules are testable without a DOM.

import { convexHull } from "./hull.js";
import type { SnapshotMessage, Vec2 } from "./schema.js";
import { Camera, worldToScreen } from "./transform.js";

export interface Dot {
    at: Vec2;
    radius: number;
    color: string;
}

export interface Arrow {
    from: Vec2;
    to: Vec2;
    opacity: number;
}

export interface Scene {
    grid: { step: number };
    hull: Vec2[];
    robots: Dot[];
    arrows: Arrow[];
    objects: Dot[];
    human: { at: Vec2; heading: number } | null;
    status: string;
}

const ARROW_LENGTH_PX = 18;

export function buildScene(
    snapshot: SnapshotMessage | null,
    camera: Camera,
): Scene {
    if (snapshot === null) {
        return {
            grid: { step: 50 },
            hull: [],
            robots: [],
            arrows: [],
            objects: [],
            human: null,
            status: "waiting for snapshots",
        };
    }
    const p = snapshot.payload;
    const robots: Dot[] = p.robots.map((r) => ({
        at: worldToScreen(camera, r.position),
        radius: 4,
        color: "#3a7bd5",
    }));
    // fusion arrows: opacity proportional to the fusion value, none at zero
    const arrows: Arrow[] = [];
    for (const r of p.robots) {
        if (r.fusion > 0 && r.direction != null) {
            const from = worldToScreen(camera, r.position);
            arrows.push({
                from,
                to: [from[0] + r.direction[0] * ARROW_LENGTH_PX, from[1] - r.direction[1] * ARROW_LENGTH_PX],
                opacity: Math.min(1, r.fusion),
            });
        }
    }
    const hull = p.robots.length >= 3
        ? convexHull(p.robots.map((r) => worldToScreen(camera, r.position)))
        : [];
    const objects: Dot[] = p.objects.map((o) => ({
        at: worldToScreen(camera, o.position),
        radius: 6,
        color: o.discovered ? "#27ae60" : "#e67e22",
    }));
    const goal = p.goal.reached ? "goal reached" : `goal ${p.goal.metric}=${p.goal.value.toFixed(2)}`;
    const status =
        `tick ${snapshot.tick}${p.paused ? " (paused)" : ""} | ` +
        `${goal} | steps ${p.resources.steps} msgs ${p.resources.messages}`;
    return {
        grid: { step: 50 },
        hull,
        robots,
        arrows,
        objects,
        human: { at: worldToScreen(camera, p.human.position), heading: p.human.heading },
        status,
    };
}

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    ctx.strokeStyle = "#e8e8e8";
    ctx.lineWidth = 1;
    for (let x = 0; x <= width; x += scene.grid.step) {
        ctx.beginPath();
        ctx.moveTo(x, 0);
        ctx.lineTo(x, height);
        ctx.stroke();
    }
    for (let y = 0; y <= height; y += scene.grid.step) {
        ctx.beginPath();
        ctx.moveTo(0, y);
        ctx.lineTo(width, y);
        ctx.stroke();
    }
    if (scene.hull.length >= 3) {
        ctx.beginPath();
        ctx.moveTo(scene.hull[0][0], scene.hull[0][1]);
        for (const p of scene.hull.slice(1)) ctx.lineTo(p[0], p[1]);
        ctx.closePath();
        ctx.fillStyle = "rgba(58, 123, 213, 0.12)";
        ctx.fill();
    }
    for (const arrow of scene.arrows) {
        ctx.strokeStyle = `rgba(231, 76, 60, ${arrow.opacity})`;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(arrow.from[0], arrow.from[1]);
        ctx.lineTo(arrow.to[0], arrow.to[1]);
        ctx.stroke();
    }
    for (const dot of scene.objects.concat(scene.robots)) {
        ctx.beginPath();
        ctx.arc(dot.at[0], dot.at[1], dot.radius, 0, 2 * Math.PI);
        ctx.fillStyle = dot.color;
        ctx.fill();
    }
    if (scene.human) {
        const { at, heading } = scene.human;
        ctx.beginPath();
        ctx.arc(at[0], at[1], 8, 0, 2 * Math.PI);
        ctx.fillStyle = "#8e44ad";
        ctx.fill();
        ctx.strokeStyle = "#8e44ad";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(at[0], at[1]);
        ctx.lineTo(at[0] + 14 * Math.cos(heading), at[1] - 14 * Math.sin(heading));
        ctx.stroke();
    }
    ctx.fillStyle = "#333";
    ctx.font = "13px monospace";
    ctx.fillText(scene.status, 10, height - 8);
}
