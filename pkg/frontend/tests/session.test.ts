// Scripted playground session against the real service: edits the source,
// drags the width slider across five values, checks slider clamping below
// min-content, and verifies the exported SVG is byte-equal to the service's
// response.

import assert from "node:assert/strict";
import { spawn, ChildProcess } from "node:child_process";
import { after, before, test } from "node:test";

import { LayoutClient } from "../src/api.js";
import { Playground } from "../src/playground.js";
import { recordingEffects } from "./helpers.js";

let server: ChildProcess | null = null;
let endpoint = "";

before(async () => {
  server = spawn("python3", ["-m", "railyard.cli", "serve", "--port", "0"], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  endpoint = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start")), 15000);
    let buffer = "";
    server!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/http:\/\/127\.0\.0\.1:(\d+)\//);
      if (match) {
        clearTimeout(timer);
        resolve(`http://127.0.0.1:${match[1]}/layout`);
      }
    });
    server!.on("exit", () => reject(new Error("service exited early")));
  });
});

after(() => {
  server?.kill();
});

test("scripted session: edit, drag, clamp, export", async () => {
  const { effects, log } = recordingEffects();
  const app = new Playground(new LayoutClient(endpoint), effects, 10);

  // edit the source and render once
  app.setSource('("fetch" (+ () "eagerly") "rows")');
  await app.settle();
  assert.equal(app.responsesRendered, 1);
  const minContent = app.state.sliderMin;
  assert.ok(minContent > 0);

  // drag the width slider across five values: exactly five responses
  const before_ = app.responsesRendered;
  for (const w of [700, 650, 600, 550, 500]) {
    app.setWidth(w);
    await app.settle();
  }
  assert.equal(app.responsesRendered - before_, 5);
  for (const svg of log.svgs.slice(-5)) {
    assert.ok(svg.startsWith("<svg"));
  }
  // each rendered width matches the requested target exactly
  const widths = log.svgs.slice(-5).map((svg) => {
    const m = svg.match(/width="([0-9.]+)"/);
    return Number(m![1]);
  });
  assert.deepEqual(widths, [700, 650, 600, 550, 500]);

  // a width below min-content clamps (no 422 storm once the bound is known)
  app.setWidth(Math.floor(minContent / 2));
  await app.settle();
  assert.equal(app.state.targetWidth, minContent);

  // the 422 path: a new source resets the bound, a narrow width snaps up
  app.setSource('("quite" "a" "lot" "of" "terminal" "stations" "here")');
  app.setWidth(60);
  await app.settle();
  assert.ok(app.state.sliderMin > 60);
  assert.equal(app.state.targetWidth, app.state.sliderMin);
  assert.ok(log.errors.some((e) => e && e.includes("clamped")));
  assert.ok(log.svgs.at(-1)!.startsWith("<svg")); // re-rendered at the clamp

  // exported SVG is byte-equal to the service's response for these params
  const exported = app.exportSvg();
  assert.ok(exported);
  const direct = await fetch(endpoint, {
    method: "POST",
    body: JSON.stringify({
      source: app.state.source,
      input_kind: app.state.inputKind,
      params: {
        target_width: app.state.targetWidth,
        wrap_mode: app.state.wrapMode,
        align_items: app.state.alignItems,
        justify_content: app.state.justifyContent,
        flex_absorb: app.state.flexAbsorb,
        gap: app.state.gap,
      },
    }),
  });
  assert.equal(direct.status, 200);
  const body = (await direct.json()) as { svg: string };
  assert.equal(exported.data, body.svg);

  // the copyable CLI command reproduces the same SVG byte for byte
  const command = app.exportCliCommand();
  assert.ok(command.startsWith("railyard "));
  const { execSync } = await import("node:child_process");
  const cliSvg = execSync(command, { encoding: "utf8" });
  assert.equal(cliSvg, exported.data);
  console.log("ACCEPTANCE ui-session: PASS");
});

test("rapid drag storms coalesce into one request", async () => {
  const { effects } = recordingEffects();
  const app = new Playground(new LayoutClient(endpoint), effects, 25);
  app.setSource('"one"');
  await app.settle();
  const before_ = app.responsesRendered;
  for (let w = 600; w >= 400; w -= 10) app.setWidth(w); // 21 moves, no pause
  await app.settle();
  assert.equal(app.responsesRendered - before_, 1);
});
