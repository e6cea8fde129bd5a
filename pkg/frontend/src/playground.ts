import { LayoutClient, LayoutResult } from "./api.js";
import { debounce } from "./debounce.js";
import {
  UiState,
  buildRequest,
  clampWidth,
  cliCommand,
  formatStats,
  initialState,
} from "./state.js";

/** Everything the controller does to the page, as plain functions. */
export interface Effects {
  renderSvg(svg: string): void;
  renderStats(text: string): void;
  renderDiagnostics(lines: string[]): void;
  showError(message: string | null): void;
  setSliderMin(min: number): void;
  setSliderValue(value: number): void;
  setExportEnabled(enabled: boolean): void;
  setCliCommand(text: string): void;
}

/**
 * The playground controller.  All layout logic stays server-side; this
 * only debounces edits (one request per quiescent burst), lets a newer
 * request supersede an older one, and applies responses to the view.
 */
export class Playground {
  readonly state: UiState;
  /** Count of successful layout responses applied to the view. */
  responsesRendered = 0;

  private readonly pending: {
    schedule: () => void;
    flush: () => void;
    cancel: () => void;
    isPending: () => boolean;
  };
  private readonly active = new Set<Promise<void>>();

  constructor(
    private readonly client: LayoutClient,
    private readonly effects: Effects,
    debounceMs = 150,
  ) {
    this.state = initialState();
    this.pending = debounce(() => this.launch(), debounceMs);
    this.effects.setExportEnabled(false);
    this.effects.setCliCommand(cliCommand(this.state));
  }

  setSource(text: string): void {
    this.state.source = text;
    // a new source invalidates the old feasibility bound
    this.state.sliderMin = 0;
    this.effects.setSliderMin(0);
    this.touch();
  }

  setInputKind(kind: UiState["inputKind"]): void {
    this.state.inputKind = kind;
    this.state.sliderMin = 0;
    this.effects.setSliderMin(0);
    this.touch();
  }

  /** Width changes clamp to the last reported min-content. */
  setWidth(requested: number): void {
    const clamped = clampWidth(this.state, requested);
    this.state.targetWidth = clamped;
    if (clamped !== requested) this.effects.setSliderValue(clamped);
    this.touch();
  }

  setWrapMode(mode: UiState["wrapMode"]): void {
    this.state.wrapMode = mode;
    this.touch();
  }

  setAlignItems(policy: UiState["alignItems"]): void {
    this.state.alignItems = policy;
    this.touch();
  }

  setJustifyContent(policy: UiState["justifyContent"]): void {
    this.state.justifyContent = policy;
    this.touch();
  }

  setFlexAbsorb(value: number): void {
    this.state.flexAbsorb = value;
    this.touch();
  }

  setGap(value: number): void {
    this.state.gap = value;
    this.touch();
  }

  /** Run any pending request now and wait until no work remains. */
  async settle(): Promise<void> {
    for (;;) {
      this.pending.flush();
      if (this.active.size === 0 && !this.pending.isPending()) return;
      await Promise.all([...this.active]);
    }
  }

  /** The SVG download payload; null before the first successful render. */
  exportSvg(): { filename: string; data: string } | null {
    const response = this.state.lastResponse;
    if (!response) return null;
    return { filename: "railyard.svg", data: response.svg };
  }

  exportCliCommand(): string {
    return cliCommand(this.state);
  }

  private touch(): void {
    this.effects.setCliCommand(cliCommand(this.state));
    this.pending.schedule();
  }

  // Requests launch immediately; the client aborts any older in-flight one.
  private launch(): void {
    const request = this.send();
    this.active.add(request);
    void request.finally(() => this.active.delete(request));
  }

  private async send(): Promise<void> {
    const result = await this.client.post(buildRequest(this.state));
    this.apply(result);
  }

  private apply(result: LayoutResult): void {
    switch (result.kind) {
      case "ok": {
        const body = result.body;
        if (!body.svg && body.diagnostics.length > 0) {
          // well-formedness diagnostics for layout input
          this.effects.renderDiagnostics(body.diagnostics);
          this.effects.showError("layout is ill-formed");
          return;
        }
        this.state.lastResponse = body;
        this.state.error = null;
        if (body.stats) {
          this.state.sliderMin = body.stats.min_content;
          this.effects.setSliderMin(body.stats.min_content);
        }
        this.effects.renderSvg(body.svg);
        this.effects.renderStats(formatStats(body));
        this.effects.renderDiagnostics(body.diagnostics);
        this.effects.showError(null);
        this.effects.setExportEnabled(true);
        this.responsesRendered += 1;
        return;
      }
      case "too_narrow": {
        // snap the slider to the feasible minimum and retry there
        this.state.sliderMin = result.minContent;
        this.state.targetWidth = result.minContent;
        this.effects.setSliderMin(result.minContent);
        this.effects.setSliderValue(result.minContent);
        this.effects.showError(`width clamped to min-content ${result.minContent}`);
        this.pending.schedule();
        return;
      }
      case "bad_request": {
        this.state.error = result.message;
        this.effects.showError(result.message);
        return; // previous render stays
      }
      case "network": {
        this.state.error = result.message;
        this.effects.showError(`service unreachable: ${result.message}`);
        return;
      }
      case "superseded":
        return;
    }
  }
}
