/**
 * Page controller: register a repository, watch its indexing status,
 * submit queries, and render ranked result panels.
 */

import { ApiClient, HttpError } from "./api.js";
import { renderPanels } from "./panels.js";
import { pollUntilTerminal } from "./poll.js";
import type { RepoStatus, StatusResponse } from "./types.js";

export interface AppElements {
  sourceInput: HTMLInputElement;
  registerButton: HTMLButtonElement;
  statusChip: HTMLElement;
  banner: HTMLElement;
  bannerRetry: HTMLButtonElement;
  queryInput: HTMLInputElement;
  searchButton: HTMLButtonElement;
  queryHint: HTMLElement;
  results: HTMLElement;
}

export function resolveBaseUrl(win: Window): string {
  const fromQuery = new URL(win.location.href).searchParams.get("api");
  if (fromQuery) {
    return fromQuery;
  }
  const injected = (win as unknown as { CODESCOUT_API?: string }).CODESCOUT_API;
  return injected ?? win.location.origin;
}

export class App {
  repoId: string | null = null;
  repoStatus: RepoStatus | null = null;
  private inFlight: AbortController | null = null;
  private lastAction: (() => void) | null = null;

  constructor(
    private readonly ui: AppElements,
    private readonly client: ApiClient,
    private readonly pollIntervalMs = 500,
  ) {
    ui.registerButton.addEventListener("click", () => void this.register());
    ui.searchButton.addEventListener("click", () => void this.search());
    ui.bannerRetry.addEventListener("click", () => {
      this.clearBanner();
      this.lastAction?.();
    });
    this.updateControls();
  }

  private setChip(text: string, state: string): void {
    this.ui.statusChip.textContent = text;
    this.ui.statusChip.dataset.state = state;
  }

  private showBanner(message: string): void {
    this.ui.banner.textContent = message;
    this.ui.banner.hidden = false;
    this.ui.bannerRetry.hidden = false;
  }

  private clearBanner(): void {
    this.ui.banner.textContent = "";
    this.ui.banner.hidden = true;
    this.ui.bannerRetry.hidden = true;
  }

  private updateControls(): void {
    const ready = this.repoStatus === "ready";
    this.ui.searchButton.disabled = !ready;
    this.ui.queryHint.textContent = ready
      ? ""
      : "Search is available once the repository is ready.";
  }

  async register(): Promise<void> {
    const source = this.ui.sourceInput.value.trim();
    if (!source) {
      this.setChip("enter a repository source", "empty");
      return;
    }
    this.lastAction = () => void this.register();
    this.clearBanner();
    this.repoStatus = null;
    this.updateControls();
    this.setChip("registering...", "pending");
    try {
      const { id } = await this.client.register(source);
      this.repoId = id;
      const terminal = await pollUntilTerminal(this.client, id, {
        intervalMs: this.pollIntervalMs,
        onUpdate: (status: StatusResponse) => {
          this.setChip(status.status, status.status);
        },
      });
      this.repoStatus = terminal.status;
      if (terminal.status === "failed") {
        this.setChip(`failed: ${terminal.reason ?? "unknown reason"}`, "failed");
      } else {
        const pools =
          terminal.functions !== undefined
            ? ` (${terminal.functions} functions, ${terminal.classes} classes)`
            : "";
        this.setChip(`ready${pools}`, "ready");
      }
    } catch (error) {
      this.setChip("error", "error");
      this.showBanner(
        error instanceof HttpError
          ? `registration failed: ${error.message}`
          : "network error while registering; retry when the server is reachable",
      );
    }
    this.updateControls();
  }

  async search(): Promise<void> {
    const query = this.ui.queryInput.value;
    if (!query.trim()) {
      this.ui.queryHint.textContent = "Enter a query first.";
      return;
    }
    if (!this.repoId || this.repoStatus !== "ready") {
      this.ui.queryHint.textContent = "Search is available once the repository is ready.";
      return;
    }
    this.lastAction = () => void this.search();
    this.clearBanner();
    this.ui.queryHint.textContent = "";

    this.inFlight?.abort(); // one in-flight search per repo view
    const controller = new AbortController();
    this.inFlight = controller;
    this.ui.results.dataset.loading = "true";
    try {
      const response = await this.client.search(this.repoId, query, {}, controller.signal);
      if (controller.signal.aborted) {
        return;
      }
      renderPanels(this.ui.results, response.results);
    } catch (error) {
      if (controller.signal.aborted) {
        return; // superseded by a newer submission
      }
      if (error instanceof HttpError && error.code === 422) {
        this.ui.queryHint.textContent = error.message;
      } else if (error instanceof HttpError) {
        this.showBanner(`search failed: ${error.message}`);
      } else {
        this.showBanner("network error while searching; retry");
      }
    } finally {
      if (this.inFlight === controller) {
        this.inFlight = null;
        delete this.ui.results.dataset.loading;
      }
    }
  }
}

export function mount(doc: Document, client?: ApiClient): App {
  const get = <T extends HTMLElement>(id: string): T => {
    const node = doc.getElementById(id);
    if (!node) {
      throw new Error(`missing element #${id}`);
    }
    return node as T;
  };
  const ui: AppElements = {
    sourceInput: get<HTMLInputElement>("source-input"),
    registerButton: get<HTMLButtonElement>("register-button"),
    statusChip: get("status-chip"),
    banner: get("banner"),
    bannerRetry: get<HTMLButtonElement>("banner-retry"),
    queryInput: get<HTMLInputElement>("query-input"),
    searchButton: get<HTMLButtonElement>("search-button"),
    queryHint: get("query-hint"),
    results: get("results"),
  };
  const win = doc.defaultView as Window;
  return new App(ui, client ?? new ApiClient(resolveBaseUrl(win)));
}

declare global {
  interface Window {
    CODESCOUT_API?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("results")) {
  mount(document);
}
