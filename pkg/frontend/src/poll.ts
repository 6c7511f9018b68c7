/** Status polling that stops on the first terminal state. */

import type { ApiClient } from "./api.js";
import type { StatusResponse } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  onUpdate?: (status: StatusResponse) => void;
  signal?: AbortSignal;
}

const TERMINAL = new Set(["ready", "failed"]);

function sleep(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => resolve(), ms);
    signal?.addEventListener(
      "abort",
      () => {
        clearTimeout(timer);
        reject(new DOMException("polling aborted", "AbortError"));
      },
      { once: true },
    );
  });
}

/**
 * Poll a repository's status until it reaches ready or failed.
 * Status updates stream through onUpdate; the terminal status is returned
 * and no further requests are made after it.
 */
export async function pollUntilTerminal(
  client: ApiClient,
  repoId: string,
  { intervalMs = 500, onUpdate, signal }: PollOptions = {},
): Promise<StatusResponse> {
  for (;;) {
    if (signal?.aborted) {
      throw new DOMException("polling aborted", "AbortError");
    }
    const status = await client.status(repoId);
    onUpdate?.(status);
    if (TERMINAL.has(status.status)) {
      return status;
    }
    await sleep(intervalMs, signal);
  }
}
