import { describe, expect, it } from "vitest";

import { convexHull } from "../src/hull.js";

describe("convex hull", () => {
    it("passes through degenerate inputs", () => {
        expect(convexHull([])).toEqual([]);
        expect(convexHull([[1, 2]])).toEqual([[1, 2]]);
        expect(convexHull([[1, 2], [3, 4]])).toEqual([[1, 2], [3, 4]]);
    });

    it("drops interior points", () => {
        const hull = convexHull([
            [0, 0],
            [4, 0],
            [4, 4],
            [0, 4],
            [2, 2],
            [1, 3],
        ]);
        expect(hull.length).toBe(4);
        const set = new Set(hull.map((p) => p.join(",")));
        expect(set.has("2,2")).toBe(false);
        expect(set.has("1,3")).toBe(false);
    });

    it("handles collinear points", () => {
        const hull = convexHull([
            [0, 0],
            [1, 0],
            [2, 0],
            [3, 0],
        ]);
        expect(hull.length).toBe(2);
    });
});
