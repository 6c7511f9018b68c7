// End-to-end loop against a real local server: register the fixture repo,
// wait for ready, search, and render panels. Runs in the node environment
// with an explicit DOM window, so requests use node's real fetch. Requires
// the Python package (`codescout` on PATH); set CODESCOUT_SKIP_INTEGRATION=1
// to skip.

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { Window } from "happy-dom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, type AppElements } from "../src/app.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const PLANTED = path.resolve(HERE, "../../tests/fixtures/planted");
const MINIUTIL = path.resolve(HERE, "../../tests/fixtures/miniutil");
const SKIP = process.env.CODESCOUT_SKIP_INTEGRATION === "1";

interface Server {
  proc: ChildProcess;
  base: string;
  dataDir: string;
}

async function startServer(extraArgs: string[] = []): Promise<Server> {
  const port = 20000 + Math.floor(Math.random() * 20000);
  const dataDir = mkdtempSync(path.join(tmpdir(), "codescout-web-"));
  const proc = spawn(
    "codescout",
    ["--data-dir", dataDir, ...extraArgs, "serve", "--port", String(port)],
    { stdio: "ignore" },
  );
  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) {
        break;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error("server did not come up in time");
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  return { proc, base, dataDir };
}

function stopServer(server: Server | undefined): void {
  if (!server) {
    return;
  }
  server.proc.kill("SIGTERM");
  rmSync(server.dataDir, { recursive: true, force: true });
}

function buildDom(): { ui: AppElements; results: HTMLElement } {
  const window = new Window();
  const document = window.document as unknown as Document;
  document.body.innerHTML = `
    <input id="source-input" type="text" />
    <button id="register-button"></button>
    <span id="status-chip"></span>
    <div id="banner" hidden></div>
    <button id="banner-retry" hidden></button>
    <input id="query-input" type="text" />
    <button id="search-button"></button>
    <div id="query-hint"></div>
    <section id="results"></section>
  `;
  const ui: AppElements = {
    sourceInput: document.getElementById("source-input") as HTMLInputElement,
    registerButton: document.getElementById("register-button") as HTMLButtonElement,
    statusChip: document.getElementById("status-chip") as HTMLElement,
    banner: document.getElementById("banner") as HTMLElement,
    bannerRetry: document.getElementById("banner-retry") as HTMLButtonElement,
    queryInput: document.getElementById("query-input") as HTMLInputElement,
    searchButton: document.getElementById("search-button") as HTMLButtonElement,
    queryHint: document.getElementById("query-hint") as HTMLElement,
    results: document.getElementById("results") as HTMLElement,
  };
  return { ui, results: ui.results };
}

describe.skipIf(SKIP)("against a live server", () => {
  let server: Server;
  let limited: Server;

  beforeAll(async () => {
    [server, limited] = await Promise.all([
      startServer(),
      startServer(["--limit-bytes", "10"]),
    ]);
  }, 60_000);

  afterAll(() => {
    stopServer(server);
    stopServer(limited);
  });

  it(
    "registers, reaches ready, and renders panels in API order",
    async () => {
      const client = new ApiClient(server.base, (url, init) => fetch(url, init));
      const { ui, results } = buildDom();
      const app = new App(ui, client, 100);

      ui.sourceInput.value = PLANTED;
      await app.register();
      expect(ui.statusChip.textContent).toContain("ready");
      expect(ui.statusChip.textContent).toContain("13 functions");

      const query = "clip polygon edges to a viewport";
      ui.queryInput.value = query;
      await app.search();

      const apiOrder = (await client.search(app.repoId!, query)).results.map(
        (r) => r.qualified_name,
      );
      const panelOrder = [...results.querySelectorAll(".panel-name")].map(
        (node) => node.textContent,
      );
      expect(panelOrder).toEqual(apiOrder);
      expect(panelOrder[0]).toBe("geometry.clip_polygon");

      const location = results.querySelector(".panel-location")?.textContent;
      expect(location).toMatch(/^geometry\.py:\d+-\d+$/);
      expect(results.querySelectorAll(".badge").length).toBeGreaterThan(0);
    },
    60_000,
  );

  it(
    "renders the failure reason for an oversized source",
    async () => {
      const client = new ApiClient(limited.base, (url, init) => fetch(url, init));
      const { ui } = buildDom();
      const app = new App(ui, client, 100);
      ui.sourceInput.value = MINIUTIL;
      await app.register();
      expect(ui.statusChip.textContent).toContain("failed: size limit");
      expect(ui.searchButton.disabled).toBe(true);
    },
    60_000,
  );
});
