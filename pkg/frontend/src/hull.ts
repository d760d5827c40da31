// Convex hull via Andrew's monotone chain; shades the swarm's collective pose.

import type { Vec2 } from "./schema.js";

function cross(o: Vec2, a: Vec2, b: Vec2): number {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

export function convexHull(points: Vec2[]): Vec2[] {
    if (points.length <= 2) return [...points];
    const sorted = [...points].sort((p, q) => (p[0] - q[0]) || (p[1] - q[1]));
    const lower: Vec2[] = [];
    for (const p of sorted) {
        while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0)
            lower.pop();
        lower.push(p);
    }
    const upper: Vec2[] = [];
    for (let i = sorted.length - 1; i >= 0; i--) {
        const p = sorted[i];
        while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0)
            upper.pop();
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    return lower.concat(upper);
}
