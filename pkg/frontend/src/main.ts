// Cockpit entry point: connect, render loop, input handlers.

import { connect, defaultBridgeUrl } from "./client.js";
import { CommandDispatcher, velocityFromKeys } from "./dispatch.js";
import { buildScene, drawScene } from "./render.js";
import type { PostureName, Vec2 } from "./schema.js";
import { applyMessage, initialViewState, logCommand, ViewState } from "./state.js";
import { Camera, fitArena } from "./transform.js";

const TICK_RATE_HZ = 20;
const HUMAN_SPEED = 0.45;

function main(): void {
    const canvas = document.getElementById("arena") as HTMLCanvasElement;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");

    let view: ViewState = initialViewState();
    let camera: Camera = { scale: 20, originX: 20, originY: canvas.height - 20 };

    const client = connect(
        defaultBridgeUrl(),
        (message) => {
            view = applyMessage(view, message);
            if (message.type === "snapshot" && message.payload.arena) {
                camera = fitArena(message.payload.arena, canvas.width, canvas.height);
            }
        },
        (status) => {
            view = { ...view, status };
            const el = document.getElementById("status");
            if (el) el.textContent = status;
        },
    );

    const dispatcher = new CommandDispatcher(
        (frame) => {
            client.send(frame);
            view = logCommand(view, `sent ${JSON.parse(frame).payload.op}`);
        },
        TICK_RATE_HZ,
    );

    for (const name of ["contract", "disperse", "follow_gradient", "hold"] as PostureName[]) {
        const button = document.getElementById(`btn-${name}`);
        button?.addEventListener("click", () => {
            view = { ...view, selectedPosture: name };
            dispatcher.posture(name);
        });
    }
    document.getElementById("btn-pause")?.addEventListener("click", () => dispatcher.pause());
    document.getElementById("btn-resume")?.addEventListener("click", () => dispatcher.resume());
    document.getElementById("btn-reset")?.addEventListener("click", () => {
        const seed = Number((document.getElementById("seed") as HTMLInputElement)?.value ?? "1");
        dispatcher.reset(Number.isInteger(seed) ? seed : 1);
    });

    const held = new Set<string>();
    window.addEventListener("keydown", (e) => {
        held.add(e.key);
    });
    window.addEventListener("keyup", (e) => {
        held.delete(e.key);
    });

    let dragStart: Vec2 | null = null;
    canvas.addEventListener("pointerdown", (e) => {
        dragStart = [e.offsetX, e.offsetY];
    });
    canvas.addEventListener("pointerup", (e) => {
        if (dragStart) {
            const sent = dispatcher.dragLimb(dragStart, [e.offsetX, e.offsetY], camera);
            if (sent) view = { ...view, selectedPosture: "extend_limb" };
            dragStart = null;
        }
    });

    function frame(): void {
        dispatcher.moveHuman(velocityFromKeys(held, HUMAN_SPEED));
        const scene = buildScene(view.snapshot, camera);
        drawScene(ctx!, scene, canvas.width, canvas.height);
        const log = document.getElementById("log");
        if (log) log.textContent = [view.lastError ? `error: ${view.lastError}` : null]
            .concat(view.commandLog.slice(0, 8))
            .filter((line): line is string => line !== null)
            .join("\n");
        requestAnimationFrame(frame);
    }
    requestAnimationFrame(frame);
}

main();
