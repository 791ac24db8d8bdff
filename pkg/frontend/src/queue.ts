/** Local queue of unacknowledged judgment submissions.
 *
 * An event stays queued until the server acknowledges it, so a network
 * failure never drops a grade; at most one event is in flight at a time
 * and an event is removed exactly once (on ack or rejection), so a
 * reconnect delivers each queued judgment exactly once. Queueing a new
 * grade for a triple that is already pending replaces the old grade,
 * mirroring the server's latest-wins journal.
 */

import type { JudgmentEvent } from "./types.js";

export interface PendingEvent extends JudgmentEvent {
  clientId: number;
}

function sameTriple(a: JudgmentEvent, b: JudgmentEvent): boolean {
  return (
    a.topic_id === b.topic_id &&
    a.item_id === b.item_id &&
    a.assessor === b.assessor
  );
}

export class SubmissionQueue {
  private pending: PendingEvent[] = [];
  private nextId = 1;
  private inFlight: number | null = null;

  get size(): number {
    return this.pending.length;
  }

  /** Queue a grade; a pending grade for the same triple is replaced in place. */
  enqueue(event: JudgmentEvent): PendingEvent {
    const queued: PendingEvent = { ...event, clientId: this.nextId++ };
    const at = this.pending.findIndex((p) => sameTriple(p, event));
    if (at >= 0 && this.inFlight !== this.pending[at].clientId) {
      this.pending[at] = queued;
    } else {
      this.pending.push(queued);
    }
    return queued;
  }

  /** Next event to send, or null when empty or one is already in flight. */
  takeNext(): PendingEvent | null {
    if (this.inFlight !== null || this.pending.length === 0) {
      return null;
    }
    this.inFlight = this.pending[0].clientId;
    return this.pending[0];
  }

  /** Server acknowledged the event: remove it for good. */
  acknowledge(clientId: number): void {
    this.remove(clientId);
  }

  /** Transient failure: keep the event queued for a later retry. */
  fail(clientId: number): void {
    if (this.inFlight === clientId) {
      this.inFlight = null;
    }
  }

  /** Permanent rejection (bad grade, unknown item): drop, do not retry. */
  reject(clientId: number): void {
    this.remove(clientId);
  }

  private remove(clientId: number): void {
    this.pending = this.pending.filter((p) => p.clientId !== clientId);
    if (this.inFlight === clientId) {
      this.inFlight = null;
    }
  }

  /** Serializable view of the unacknowledged events, for page-reload survival. */
  snapshot(): JudgmentEvent[] {
    return this.pending.map(({ topic_id, item_id, assessor, grade }) => ({
      topic_id,
      item_id,
      assessor,
      grade,
    }));
  }

  restore(events: JudgmentEvent[]): void {
    for (const event of events) {
      this.enqueue(event);
    }
  }
}
