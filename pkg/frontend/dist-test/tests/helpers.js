export function recordingEffects() {
    const log = {
        svgs: [],
        stats: [],
        errors: [],
        sliderMins: [],
        sliderValues: [],
        exportEnabled: [],
        cli: [],
        diagnostics: [],
    };
    const effects = {
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
