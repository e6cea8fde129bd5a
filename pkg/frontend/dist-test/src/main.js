import { LayoutClient } from "./api.js";
import { Playground } from "./playground.js";
import { GALLERY } from "./state.js";
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
const source = el("source");
const inputKind = el("input-kind");
const widthSlider = el("width");
const widthReadout = el("width-value");
const wrapMode = el("wrap");
const alignItems = el("align");
const justifyContent = el("justify");
const flexAbsorb = el("flex-absorb");
const flexReadout = el("flex-absorb-value");
const gap = el("gap");
const svgHost = el("svg-host");
const statsPanel = el("stats");
const diagnosticsPanel = el("diagnostics");
const banner = el("error");
const exportButton = el("export-svg");
const cliReadout = el("cli");
const copyCli = el("copy-cli");
const gallery = el("gallery");
const effects = {
    renderSvg(svg) {
        svgHost.innerHTML = svg;
    },
    renderStats(text) {
        statsPanel.textContent = text;
    },
    renderDiagnostics(lines) {
        diagnosticsPanel.textContent = lines.join("\n");
        diagnosticsPanel.hidden = lines.length === 0;
    },
    showError(message) {
        banner.hidden = message === null;
        banner.textContent = message ?? "";
    },
    setSliderMin(min) {
        widthSlider.min = String(Math.ceil(min));
    },
    setSliderValue(value) {
        widthSlider.value = String(Math.round(value));
        widthReadout.textContent = widthSlider.value;
    },
    setExportEnabled(enabled) {
        exportButton.disabled = !enabled;
    },
    setCliCommand(text) {
        cliReadout.textContent = text;
    },
};
const client = new LayoutClient("/layout");
const app = new Playground(client, effects);
for (const example of GALLERY) {
    const option = document.createElement("option");
    option.value = example.name;
    option.textContent = example.name;
    gallery.appendChild(option);
}
function loadExample(name) {
    const example = GALLERY.find((g) => g.name === name) ?? GALLERY[0];
    source.value = example.source;
    inputKind.value = example.inputKind;
    app.setInputKind(example.inputKind);
    app.setSource(example.source);
}
gallery.addEventListener("change", () => loadExample(gallery.value));
source.addEventListener("input", () => app.setSource(source.value));
inputKind.addEventListener("change", () => app.setInputKind(inputKind.value));
widthSlider.addEventListener("input", () => {
    widthReadout.textContent = widthSlider.value;
    app.setWidth(Number(widthSlider.value));
});
wrapMode.addEventListener("change", () => app.setWrapMode(wrapMode.value));
alignItems.addEventListener("change", () => app.setAlignItems(alignItems.value));
justifyContent.addEventListener("change", () => app.setJustifyContent(justifyContent.value));
flexAbsorb.addEventListener("input", () => {
    flexReadout.textContent = flexAbsorb.value;
    app.setFlexAbsorb(Number(flexAbsorb.value));
});
gap.addEventListener("input", () => app.setGap(Number(gap.value)));
exportButton.addEventListener("click", () => {
    const payload = app.exportSvg();
    if (!payload)
        return;
    const blob = new Blob([payload.data], { type: "image/svg+xml" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = payload.filename;
    a.click();
    URL.revokeObjectURL(url);
});
copyCli.addEventListener("click", () => {
    void navigator.clipboard.writeText(app.exportCliCommand());
});
// first render
source.value = app.state.source;
inputKind.value = app.state.inputKind;
widthSlider.value = String(app.state.targetWidth);
widthReadout.textContent = widthSlider.value;
app.setWidth(app.state.targetWidth);
