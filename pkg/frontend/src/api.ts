/** Thin typed client over the assessment service JSON API. */

import type { Ack, JudgmentEvent, NextResponse, Progress, TopicSummary } from "./types.js";

/** Raised for HTTP error statuses; .permanent marks 4xx rejections. */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }

  get permanent(): boolean {
    return this.status >= 400 && this.status < 500;
  }
}

async function request<T>(
  input: string,
  init?: RequestInit,
  fetchImpl: typeof fetch = fetch,
): Promise<T> {
  const response = await fetchImpl(input, init);
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) {
        detail = body.detail;
      }
    } catch {
      // body was not JSON; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  getTopics(): Promise<TopicSummary[]> {
    return request(`${this.base}/topics`, undefined, this.fetchImpl);
  }

  getNext(assessor: string, topic?: string): Promise<NextResponse> {
    const params = new URLSearchParams({ assessor });
    if (topic) {
      params.set("topic", topic);
    }
    return request(`${this.base}/next?${params}`, undefined, this.fetchImpl);
  }

  postJudgment(event: JudgmentEvent): Promise<Ack> {
    return request(
      `${this.base}/judgments`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(event),
      },
      this.fetchImpl,
    );
  }

  getProgress(): Promise<Progress> {
    return request(`${this.base}/progress`, undefined, this.fetchImpl);
  }
}
