// WebSocket wiring: connect to the bridge, feed validated messages to a
// callback, report connection status changes.

import { Message, parseMessage } from "./schema.js";

export interface BridgeClient {
    send: (frame: string) => void;
    close: () => void;
}

export function connect(
    url: string,
    onMessage: (message: Message) => void,
    onStatus: (status: "connecting" | "open" | "closed") => void,
): BridgeClient {
    onStatus("connecting");
    const socket = new WebSocket(url);
    socket.onopen = () => onStatus("open");
    socket.onclose = () => onStatus("closed");
    socket.onerror = () => onStatus("closed");
    socket.onmessage = (event) => {
        const message = parseMessage(String(event.data));
        if (message !== null) onMessage(message);
    };
    return {
        send: (frame) => {
            if (socket.readyState === WebSocket.OPEN) socket.send(frame);
        },
        close: () => socket.close(),
    };
}

export function defaultBridgeUrl(): string {
    const params = new URLSearchParams(window.location.search);
    const port = params.get("ws") ?? "8765";
    const host = window.location.hostname || "127.0.0.1";
    return `ws://${host}:${port}`;
}
