import assert from "node:assert/strict";
import { test } from "node:test";

import { buildRequest, clampWidth, cliCommand, formatStats, initialState } from "../src/state.js";

test("request body uses the service's snake_case fields", () => {
  const state = initialState();
  state.source = '"a"';
  state.targetWidth = 340;
  state.justifyContent = "space-between";
  const request = buildRequest(state);
  assert.deepEqual(request, {
    source: '"a"',
    input_kind: "diagram",
    params: {
      target_width: 340,
      wrap_mode: "local",
      align_items: "baseline",
      justify_content: "space-between",
      flex_absorb: 0.5,
      gap: 0,
    },
  });
});

test("width clamps to the last reported min-content", () => {
  const state = initialState();
  state.sliderMin = 214;
  assert.equal(clampWidth(state, 120), 214);
  assert.equal(clampWidth(state, 500), 500);
});

test("cli command reproduces every parameter", () => {
  const state = initialState();
  state.source = '("a" "b")';
  state.inputKind = "diagram";
  state.targetWidth = 275;
  state.wrapMode = "global";
  state.alignItems = "center";
  state.justifyContent = "space-evenly";
  state.flexAbsorb = 0.25;
  state.gap = 4;
  assert.equal(
    cliCommand(state),
    "railyard '(\"a\" \"b\")' --input-kind diagram --width 275 --wrap global " +
      "--align center --justify space-evenly --flex-absorb 0.25 --gap 4",
  );
});

test("cli command shell-quotes single quotes in the source", () => {
  const state = initialState();
  state.source = "it's";
  assert.ok(cliCommand(state).startsWith("railyard 'it'\\''s'"));
});

test("stats panel shows the optimization metrics", () => {
  const text = formatStats({
    svg: "<svg/>",
    diagnostics: [],
    stats: {
      min_content: 138,
      max_content: 178,
      chosen_content: 160,
      height: 54,
      wrap_penalty: 2,
      elapsed_ms: 12.3,
      degraded: false,
    },
  });
  for (const needle of ["min-content: 138.0", "chosen content: 160.0", "wrap penalty: 2", "degraded: no"]) {
    assert.ok(text.includes(needle), needle);
  }
});
