// Client view state: the latest snapshot plus UI bookkeeping. The client
// never simulates; everything rendered comes from the last snapshot.

import type { Message, PostureName, SnapshotMessage } from "./schema.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ViewState {
    snapshot: SnapshotMessage | null;
    status: ConnectionStatus;
    selectedPosture: PostureName | null;
    commandLog: string[];
    lastError: string | null;
}

export function initialViewState(): ViewState {
    return {
        snapshot: null,
        status: "connecting",
        selectedPosture: null,
        commandLog: [],
        lastError: null,
    };
}

const LOG_LIMIT = 30;

export function applyMessage(state: ViewState, message: Message): ViewState {
    switch (message.type) {
        case "snapshot":
            return { ...state, snapshot: message };
        case "ack":
            return {
                ...state,
                commandLog: [
                    `tick ${message.tick}: ack ${message.payload.op} (#${message.payload.client_tick})`,
                    ...state.commandLog,
                ].slice(0, LOG_LIMIT),
            };
        case "error":
            return { ...state, lastError: message.payload.message };
        default:
            return state;
    }
}

export function logCommand(state: ViewState, description: string): ViewState {
    return { ...state, commandLog: [description, ...state.commandLog].slice(0, LOG_LIMIT) };
}
