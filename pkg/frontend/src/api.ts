/**
 * Typed client for the annotation service API. All calls go through an
 * injectable fetch so tests can point the app at a live server or a stub.
 */

export type LabelName = "bokmal" | "nynorsk" | "dialect" | "mixed";

export const LABEL_ORDER: LabelName[] = ["bokmal", "nynorsk", "dialect", "mixed"];

export interface TweetPayload {
  id: string;
  text: string;
  matched_terms: string[];
  source: string | null;
}

export interface Suggestion {
  label: LabelName;
  scores: Record<LabelName, number | null>;
}

export interface Task {
  tweet: TweetPayload;
  suggestion: Suggestion | null;
}

export interface AgreementSummary {
  status: "ok" | "insufficient";
  n_doubly_annotated: number;
  kappa: number | null;
}

export interface StatsSummary {
  nLabeled: number;
  total: number;
}

export type SubmitStatus = "accepted" | "duplicate";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  private readonly fetchImpl: typeof fetch;

  constructor(readonly baseUrl: string = "", fetchImpl?: typeof fetch) {
    this.fetchImpl = (fetchImpl ?? globalThis.fetch).bind(globalThis);
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(detail, response.status);
    }
    return response.json();
  }

  async next(annotator: string): Promise<Task | null> {
    const body = (await this.request(
      `/api/next?annotator=${encodeURIComponent(annotator)}`,
    )) as { status: string; task: Task | null };
    return body.status === "ok" ? body.task : null;
  }

  async submitLabel(tweetId: string, label: LabelName, annotator: string): Promise<SubmitStatus> {
    const body = (await this.request("/api/labels", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ tweet_id: tweetId, label, annotator }),
    })) as { status: SubmitStatus };
    return body.status;
  }

  async agreement(): Promise<AgreementSummary> {
    return (await this.request("/api/agreement")) as AgreementSummary;
  }

  async stats(): Promise<StatsSummary> {
    const body = (await this.request("/api/stats")) as {
      n_labeled: number;
      totals: { total: number };
    };
    return { nLabeled: body.n_labeled, total: body.totals.total };
  }
}
