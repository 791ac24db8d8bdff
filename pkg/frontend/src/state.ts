/** Pure session state machine for the judging screen.
 *
 * The state is a fold over service responses and local submission events,
 * so replaying the same inputs always rebuilds the same screen. The app
 * advances optimistically when a grade is pressed; a rejected submission
 * rolls the screen back to the task that was being judged.
 */

import type { NextResponse, Task } from "./types.js";

export type Screen = "connecting" | "judging" | "done";

export interface UiState {
  assessor: string;
  screen: Screen;
  task: Task | null;
  rollback: Task | null;
  judged: number;
  total: number;
  banner: string | null;
  lastSeq: number | null;
}

export type UiEvent =
  | { kind: "next"; response: NextResponse }
  | { kind: "graded" }
  | { kind: "ack"; seq: number }
  | { kind: "rejected"; detail: string }
  | { kind: "offline"; message: string }
  | { kind: "online" };

export function initialState(assessor: string): UiState {
  return {
    assessor,
    screen: "connecting",
    task: null,
    rollback: null,
    judged: 0,
    total: 0,
    banner: null,
    lastSeq: null,
  };
}

export function reduce(state: UiState, event: UiEvent): UiState {
  switch (event.kind) {
    case "next": {
      const r = event.response;
      if (r.done) {
        return {
          ...state,
          screen: "done",
          task: null,
          judged: r.judged,
          total: r.total,
          banner: null,
        };
      }
      return {
        ...state,
        screen: "judging",
        task: r,
        judged: r.judged,
        total: r.total,
        banner: null,
      };
    }
    case "graded":
      // optimistic advance: clear the card, remember where to roll back to
      return {
        ...state,
        task: null,
        rollback: state.task ?? state.rollback,
      };
    case "ack":
      return { ...state, rollback: null, lastSeq: event.seq, banner: null };
    case "rejected":
      return {
        ...state,
        screen: state.rollback ? "judging" : state.screen,
        task: state.rollback ?? state.task,
        rollback: null,
        banner: `submission rejected: ${event.detail}`,
      };
    case "offline":
      // keep whatever was on screen; unacknowledged grades stay queued
      return {
        ...state,
        task: state.task ?? state.rollback,
        banner: event.message,
      };
    case "online":
      return { ...state, banner: null };
  }
}
