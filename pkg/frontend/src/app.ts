/**
 * Keyboard-first annotation UI. One task on screen at a time; keys 1-4
 * (or the buttons) submit Bokmål / Nynorsk / Dialect / Mixed. The server
 * must acknowledge a submission before the next task is fetched - there
 * is deliberately no optimistic advance, and a failed request keeps the
 * current task on screen behind a retry banner. Suggestions are displayed
 * as a ranked score list and never preselected.
 */

import {
  ApiClient,
  AgreementSummary,
  LABEL_ORDER,
  LabelName,
  StatsSummary,
  Task,
} from "./api.js";
import { highlightSegments } from "./highlight.js";

export const KEY_TO_LABEL: Record<string, LabelName> = {
  "1": "bokmal",
  "2": "nynorsk",
  "3": "dialect",
  "4": "mixed",
};

const LABEL_TITLES: Record<LabelName, string> = {
  bokmal: "Bokmål",
  nynorsk: "Nynorsk",
  dialect: "Dialect",
  mixed: "Mixed",
};

export type Phase = "loading" | "task" | "empty" | "error";

export interface AppOptions {
  baseUrl?: string;
  annotator?: string;
  fetchImpl?: typeof fetch;
}

export class AnnotationApp {
  readonly api: ApiClient;
  annotator: string;
  phase: Phase = "loading";
  task: Task | null = null;
  inFlight = false;
  errorMessage = "";
  labeledThisSession = 0;
  stats: StatsSummary | null = null;
  agreement: AgreementSummary | null = null;
  private retryAction: (() => Promise<void>) | null = null;
  private readonly doc: Document;

  constructor(private readonly root: HTMLElement, options: AppOptions = {}) {
    this.api = new ApiClient(options.baseUrl ?? "", options.fetchImpl);
    this.doc = root.ownerDocument;
    this.annotator = options.annotator ?? this.storedAnnotator();
  }

  private storedAnnotator(): string {
    const win = this.doc.defaultView;
    let stored: string | null = null;
    try {
      stored = win?.localStorage.getItem("nordial-annotator") ?? null;
    } catch {
      /* storage unavailable */
    }
    if (stored) return stored;
    const generated = `anon-${Math.random().toString(36).slice(2, 8)}`;
    try {
      win?.localStorage.setItem("nordial-annotator", generated);
    } catch {
      /* storage unavailable */
    }
    return generated;
  }

  async start(): Promise<void> {
    this.doc.addEventListener("keydown", (event) => this.handleKey(event));
    this.render();
    await this.refreshDashboard();
    await this.fetchNext();
  }

  handleKey(event: KeyboardEvent): void {
    const label = KEY_TO_LABEL[event.key];
    if (!label) return;
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    void this.submit(label);
  }

  async submit(label: LabelName): Promise<void> {
    if (this.phase !== "task" || !this.task || this.inFlight) return;
    const tweetId = this.task.tweet.id;
    this.inFlight = true;
    this.render();
    try {
      // "accepted" and "duplicate" are both acks; only then advance
      await this.api.submitLabel(tweetId, label, this.annotator);
      this.labeledThisSession += 1;
      this.inFlight = false;
      await this.refreshDashboard();
      await this.fetchNext();
    } catch (error) {
      this.inFlight = false;
      this.phase = "error";
      this.errorMessage = error instanceof Error ? error.message : String(error);
      this.retryAction = () => this.submit(label);
      this.render();
    }
  }

  async fetchNext(): Promise<void> {
    try {
      const task = await this.api.next(this.annotator);
      this.task = task;
      this.phase = task ? "task" : "empty";
      this.retryAction = null;
    } catch (error) {
      this.phase = "error";
      this.errorMessage = error instanceof Error ? error.message : String(error);
      this.retryAction = () => this.fetchNext();
    }
    this.render();
  }

  async refreshDashboard(): Promise<void> {
    try {
      this.stats = await this.api.stats();
      this.agreement = await this.api.agreement();
    } catch {
      // dashboard numbers are best-effort; labeling must not block on them
    }
  }

  async retry(): Promise<void> {
    const action = this.retryAction;
    this.retryAction = null;
    this.phase = this.task ? "task" : "loading";
    this.render();
    if (action) await action();
    else await this.fetchNext();
  }

  render(): void {
    const doc = this.doc;
    this.root.replaceChildren();

    const header = doc.createElement("header");
    const title = doc.createElement("h1");
    title.textContent = "nordial annotation";
    const who = doc.createElement("span");
    who.id = "annotator-name";
    who.textContent = this.annotator;
    header.append(title, who);
    this.root.append(header);

    this.root.append(this.renderDashboard(doc));

    if (this.phase === "error") {
      const banner = doc.createElement("div");
      banner.id = "retry-banner";
      banner.className = "banner";
      const message = doc.createElement("span");
      message.textContent = `Request failed: ${this.errorMessage}`;
      const button = doc.createElement("button");
      button.id = "retry-btn";
      button.textContent = "Retry";
      button.addEventListener("click", () => void this.retry());
      banner.append(message, button);
      this.root.append(banner);
    }

    if (this.phase === "empty") {
      const empty = doc.createElement("div");
      empty.id = "empty-state";
      empty.className = "card";
      const note = doc.createElement("p");
      note.textContent = "Queue empty - every candidate assigned to you is labeled.";
      const link = doc.createElement("a");
      link.href = this.api.baseUrl + "/api/export";
      link.textContent = "Download the labeled corpus";
      empty.append(note, link);
      this.root.append(empty);
      return;
    }

    if ((this.phase === "task" || this.phase === "error") && this.task) {
      this.root.append(this.renderTask(doc, this.task));
    } else if (this.phase === "loading") {
      const loading = doc.createElement("p");
      loading.id = "loading-state";
      loading.textContent = "Loading…";
      this.root.append(loading);
    }
  }

  private renderDashboard(doc: Document): HTMLElement {
    const bar = doc.createElement("div");
    bar.id = "dashboard";
    const session = doc.createElement("span");
    session.id = "session-count";
    session.textContent = `session: ${this.labeledThisSession}`;
    bar.append(session);
    if (this.stats) {
      const progress = doc.createElement("span");
      progress.id = "labeled-count";
      progress.textContent = `labeled: ${this.stats.nLabeled} / ${this.stats.total}`;
      bar.append(progress);
    }
    const kappa = doc.createElement("span");
    kappa.id = "kappa";
    if (this.agreement && this.agreement.status === "ok" && this.agreement.kappa !== null) {
      kappa.textContent = `κ ${this.agreement.kappa.toFixed(2)} (n=${this.agreement.n_doubly_annotated})`;
    } else {
      kappa.textContent = "κ –";
    }
    bar.append(kappa);
    return bar;
  }

  private renderTask(doc: Document, task: Task): HTMLElement {
    const card = doc.createElement("div");
    card.id = "task-card";
    card.className = "card";

    const text = doc.createElement("p");
    text.id = "tweet-text";
    for (const segment of highlightSegments(task.tweet.text, task.tweet.matched_terms)) {
      if (segment.marked) {
        const mark = doc.createElement("mark");
        mark.textContent = segment.text;
        text.append(mark);
      } else {
        text.append(doc.createTextNode(segment.text));
      }
    }
    card.append(text);

    if (task.suggestion) {
      card.append(this.renderSuggestion(doc, task.suggestion));
    }

    const buttons = doc.createElement("div");
    buttons.id = "label-buttons";
    for (const [key, label] of Object.entries(KEY_TO_LABEL)) {
      const button = doc.createElement("button");
      button.dataset.label = label;
      button.disabled = this.inFlight;
      button.textContent = `${key} · ${LABEL_TITLES[label]}`;
      button.addEventListener("click", () => void this.submit(label));
      buttons.append(button);
    }
    card.append(buttons);
    return card;
  }

  private renderSuggestion(doc: Document, suggestion: {
    label: LabelName;
    scores: Record<LabelName, number | null>;
  }): HTMLElement {
    const panel = doc.createElement("div");
    panel.id = "suggestion-panel";
    const heading = doc.createElement("p");
    heading.textContent = `model suggests: ${LABEL_TITLES[suggestion.label]}`;
    panel.append(heading);
    const list = doc.createElement("ol");
    const ranked = LABEL_ORDER
      .map((label) => ({ label, score: suggestion.scores[label] }))
      .filter((entry): entry is { label: LabelName; score: number } => entry.score !== null)
      .sort((a, b) => b.score - a.score);
    for (const { label, score } of ranked) {
      const item = doc.createElement("li");
      item.dataset.label = label;
      item.textContent = `${LABEL_TITLES[label]}: ${score.toFixed(3)}`;
      list.append(item);
    }
    panel.append(list);
    return panel;
  }
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): AnnotationApp {
  const app = new AnnotationApp(root, options);
  void app.start();
  return app;
}
