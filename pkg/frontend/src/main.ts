import { LayoutClient } from "./api.js";
import { Effects, Playground } from "./playground.js";
import { GALLERY } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const source = el<HTMLTextAreaElement>("source");
const inputKind = el<HTMLSelectElement>("input-kind");
const widthSlider = el<HTMLInputElement>("width");
const widthReadout = el<HTMLElement>("width-value");
const wrapMode = el<HTMLSelectElement>("wrap");
const alignItems = el<HTMLSelectElement>("align");
const justifyContent = el<HTMLSelectElement>("justify");
const flexAbsorb = el<HTMLInputElement>("flex-absorb");
const flexReadout = el<HTMLElement>("flex-absorb-value");
const gap = el<HTMLInputElement>("gap");
const svgHost = el<HTMLElement>("svg-host");
const statsPanel = el<HTMLElement>("stats");
const diagnosticsPanel = el<HTMLElement>("diagnostics");
const banner = el<HTMLElement>("error");
const exportButton = el<HTMLButtonElement>("export-svg");
const cliReadout = el<HTMLElement>("cli");
const copyCli = el<HTMLButtonElement>("copy-cli");
const gallery = el<HTMLSelectElement>("gallery");

const effects: Effects = {
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

function loadExample(name: string): void {
  const example = GALLERY.find((g) => g.name === name) ?? GALLERY[0]!;
  source.value = example.source;
  inputKind.value = example.inputKind;
  app.setInputKind(example.inputKind);
  app.setSource(example.source);
}

gallery.addEventListener("change", () => loadExample(gallery.value));
source.addEventListener("input", () => app.setSource(source.value));
inputKind.addEventListener("change", () =>
  app.setInputKind(inputKind.value as never),
);
widthSlider.addEventListener("input", () => {
  widthReadout.textContent = widthSlider.value;
  app.setWidth(Number(widthSlider.value));
});
wrapMode.addEventListener("change", () => app.setWrapMode(wrapMode.value as never));
alignItems.addEventListener("change", () => app.setAlignItems(alignItems.value as never));
justifyContent.addEventListener("change", () =>
  app.setJustifyContent(justifyContent.value as never),
);
flexAbsorb.addEventListener("input", () => {
  flexReadout.textContent = flexAbsorb.value;
  app.setFlexAbsorb(Number(flexAbsorb.value));
});
gap.addEventListener("input", () => app.setGap(Number(gap.value)));

exportButton.addEventListener("click", () => {
  const payload = app.exportSvg();
  if (!payload) return;
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
