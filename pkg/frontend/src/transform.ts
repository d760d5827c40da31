// Camera transform between world coordinates (meters, y up) and canvas
// pixels (y down). Pure functions so the mapping is unit-testable.

import type { Vec2 } from "./schema.js";

export interface Camera {
    scale: number; // pixels per meter
    originX: number; // pixel x of world x = 0
    originY: number; // pixel y of world y = 0 (canvas y grows downward)
}

export function fitArena(
    arena: [number, number, number, number],
    width: number,
    height: number,
    margin = 20,
): Camera {
    const [xmin, ymin, xmax, ymax] = arena;
    const spanX = xmax - xmin;
    const spanY = ymax - ymin;
    const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
    return {
        scale,
        originX: margin - xmin * scale,
        originY: height - margin + ymin * scale,
    };
}

export function worldToScreen(camera: Camera, p: Vec2): Vec2 {
    return [camera.originX + p[0] * camera.scale, camera.originY - p[1] * camera.scale];
}

export function screenToWorld(camera: Camera, p: Vec2): Vec2 {
    return [(p[0] - camera.originX) / camera.scale, (camera.originY - p[1]) / camera.scale];
}
