import { describe, expect, it } from "vitest";

import { buildScene } from "../src/render.js";
import type { SnapshotMessage } from "../src/schema.js";
import { fitArena, worldToScreen } from "../src/transform.js";

const camera = fitArena([0, 0, 10, 10], 520, 520, 10);

function snapshotWith(robots: SnapshotMessage["payload"]["robots"]): SnapshotMessage {
    return {
        type: "snapshot",
        tick: 5,
        payload: {
            schema_version: 1,
            paused: false,
            human: { position: [5, 5], heading: 0 },
            robots,
            objects: [],
            posture: null,
            resources: { steps: 5, distance: 1.25, messages: 10 },
            goal: { metric: "min_human_object_distance", value: 4.2, reached: false },
            arena: [0, 0, 10, 10],
        },
    };
}

describe("scene construction", () => {
    it("renders only the grid with no snapshot", () => {
        const scene = buildScene(null, camera);
        expect(scene.robots).toEqual([]);
        expect(scene.arrows).toEqual([]);
        expect(scene.objects).toEqual([]);
        expect(scene.human).toBeNull();
        expect(scene.grid.step).toBeGreaterThan(0);
    });

    it("zero fusion everywhere means no arrows", () => {
        const scene = buildScene(
            snapshotWith([
                { id: "r0", position: [1, 1], fusion: 0, direction: null },
                { id: "r1", position: [2, 2], fusion: 0, direction: [1, 0] },
            ]),
            camera,
        );
        expect(scene.arrows).toEqual([]);
        expect(scene.robots.length).toBe(2);
    });

    it("arrow opacity tracks the fusion value", () => {
        const scene = buildScene(
            snapshotWith([
                { id: "r0", position: [1, 1], fusion: 0.25, direction: [1, 0] },
                { id: "r1", position: [2, 2], fusion: 0.9, direction: [0, 1] },
            ]),
            camera,
        );
        expect(scene.arrows.map((a) => a.opacity)).toEqual([0.25, 0.9]);
    });

    it("robot dots land where the camera transform puts them", () => {
        const positions: [number, number][] = [
            [1, 1],
            [2.5, 7],
            [9, 0.5],
        ];
        const scene = buildScene(
            snapshotWith(
                positions.map((p, i) => ({
                    id: `r${i}`,
                    position: p,
                    fusion: 0,
                    direction: null,
                })),
            ),
            camera,
        );
        positions.forEach((p, i) => {
            expect(scene.robots[i].at).toEqual(worldToScreen(camera, p));
        });
    });

    it("hull appears once three robots exist", () => {
        const two = buildScene(
            snapshotWith([
                { id: "r0", position: [1, 1], fusion: 0, direction: null },
                { id: "r1", position: [2, 2], fusion: 0, direction: null },
            ]),
            camera,
        );
        expect(two.hull).toEqual([]);
        const three = buildScene(
            snapshotWith([
                { id: "r0", position: [1, 1], fusion: 0, direction: null },
                { id: "r1", position: [2, 2], fusion: 0, direction: null },
                { id: "r2", position: [1, 3], fusion: 0, direction: null },
            ]),
            camera,
        );
        expect(three.hull.length).toBe(3);
    });

    it("status line reflects pause and goal state", () => {
        const snapshot = snapshotWith([]);
        snapshot.payload.paused = true;
        snapshot.payload.goal.reached = true;
        const scene = buildScene(snapshot, camera);
        expect(scene.status).toContain("paused");
        expect(scene.status).toContain("goal reached");
    });
});
