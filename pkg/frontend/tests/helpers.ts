import type { Effects } from "../src/playground.js";

export interface EffectLog {
  svgs: string[];
  stats: string[];
  errors: (string | null)[];
  sliderMins: number[];
  sliderValues: number[];
  exportEnabled: boolean[];
  cli: string[];
  diagnostics: string[][];
}

export function recordingEffects(): { effects: Effects; log: EffectLog } {
  const log: EffectLog = {
    svgs: [],
    stats: [],
    errors: [],
    sliderMins: [],
    sliderValues: [],
    exportEnabled: [],
    cli: [],
    diagnostics: [],
  };
  const effects: Effects = {
    renderSvg: (svg) => void log.svgs.push(svg),
    renderStats: (text) => void log.stats.push(text),
    renderDiagnostics: (lines) => void log.diagnostics.push(lines),
    showError: (message) => void log.errors.push(message),
    setSliderMin: (min) => void log.sliderMins.push(min),
    setSliderValue: (value) => void log.sliderValues.push(value),
    setExportEnabled: (enabled) => void log.exportEnabled.push(enabled),
    setCliCommand: (text) => void log.cli.push(text),
  };
  return { effects, log };
}
