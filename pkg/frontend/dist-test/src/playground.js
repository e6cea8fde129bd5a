import { debounce } from "./debounce.js";
import { buildRequest, clampWidth, cliCommand, formatStats, initialState, } from "./state.js";
/**
 * The playground controller.  All layout logic stays server-side; this
 * only debounces edits (one request per quiescent burst), lets a newer
 * request supersede an older one, and applies responses to the view.
 */
export class Playground {
    client;
    effects;
    state;
    /** Count of successful layout responses applied to the view. */
    responsesRendered = 0;
    pending;
    active = new Set();
    constructor(client, effects, debounceMs = 150) {
        this.client = client;
        this.effects = effects;
        this.state = initialState();
        this.pending = debounce(() => this.launch(), debounceMs);
        this.effects.setExportEnabled(false);
        this.effects.setCliCommand(cliCommand(this.state));
    }
    setSource(text) {
        this.state.source = text;
        // a new source invalidates the old feasibility bound
        this.state.sliderMin = 0;
        this.effects.setSliderMin(0);
        this.touch();
    }
    setInputKind(kind) {
        this.state.inputKind = kind;
        this.state.sliderMin = 0;
        this.effects.setSliderMin(0);
        this.touch();
    }
    /** Width changes clamp to the last reported min-content. */
    setWidth(requested) {
        const clamped = clampWidth(this.state, requested);
        this.state.targetWidth = clamped;
        if (clamped !== requested)
            this.effects.setSliderValue(clamped);
        this.touch();
    }
    setWrapMode(mode) {
        this.state.wrapMode = mode;
        this.touch();
    }
    setAlignItems(policy) {
        this.state.alignItems = policy;
        this.touch();
    }
    setJustifyContent(policy) {
        this.state.justifyContent = policy;
        this.touch();
    }
    setFlexAbsorb(value) {
        this.state.flexAbsorb = value;
        this.touch();
    }
    setGap(value) {
        this.state.gap = value;
        this.touch();
    }
    /** Run any pending request now and wait until no work remains. */
    async settle() {
        for (;;) {
            this.pending.flush();
            if (this.active.size === 0 && !this.pending.isPending())
                return;
            await Promise.all([...this.active]);
        }
    }
    /** The SVG download payload; null before the first successful render. */
    exportSvg() {
        const response = this.state.lastResponse;
        if (!response)
            return null;
        return { filename: "railyard.svg", data: response.svg };
    }
    exportCliCommand() {
        return cliCommand(this.state);
    }
    touch() {
        this.effects.setCliCommand(cliCommand(this.state));
        this.pending.schedule();
    }
    // Requests launch immediately; the client aborts any older in-flight one.
    launch() {
        const request = this.send();
        this.active.add(request);
        void request.finally(() => this.active.delete(request));
    }
    async send() {
        const result = await this.client.post(buildRequest(this.state));
        this.apply(result);
    }
    apply(result) {
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
