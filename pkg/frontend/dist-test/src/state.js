export const GALLERY = [
    {
        name: "json value",
        inputKind: "diagram",
        source: '(+ [object] (+ [array] (+ [string] (+ [number] (+ "true" (+ "false" "null"))))))',
    },
    {
        name: "json list (bnf)",
        inputKind: "bnf",
        source: "items :=\n       | <item>\n       | <item> , <items>",
    },
    {
        name: "create table",
        inputKind: "diagram",
        source: '("CREATE" (+ () "TEMP") "TABLE" (+ ("IF" "NOT" "EXISTS") ()) [table-name])',
    },
    {
        name: "identifier (regex)",
        inputKind: "regex",
        source: "letter (letter | digit)*",
    },
];
export function initialState() {
    const seed = GALLERY[0];
    return {
        source: seed.source,
        inputKind: seed.inputKind,
        targetWidth: 600,
        wrapMode: "local",
        alignItems: "baseline",
        justifyContent: "start",
        flexAbsorb: 0.5,
        gap: 0,
        sliderMin: 0,
        lastResponse: null,
        error: null,
    };
}
export function buildRequest(state) {
    return {
        source: state.source,
        input_kind: state.inputKind,
        params: {
            target_width: state.targetWidth,
            wrap_mode: state.wrapMode,
            align_items: state.alignItems,
            justify_content: state.justifyContent,
            flex_absorb: state.flexAbsorb,
            gap: state.gap,
        },
    };
}
/** Clamp a requested slider width to the known feasible minimum. */
export function clampWidth(state, requested) {
    return Math.max(requested, state.sliderMin);
}
function shellQuote(text) {
    return "'" + text.replace(/'/g, "'\\''") + "'";
}
/** A CLI command line reproducing the current parameters exactly. */
export function cliCommand(state) {
    const parts = [
        "railyard",
        shellQuote(state.source),
        "--input-kind",
        state.inputKind,
        "--width",
        String(state.targetWidth),
        "--wrap",
        state.wrapMode,
        "--align",
        state.alignItems,
        "--justify",
        state.justifyContent,
        "--flex-absorb",
        String(state.flexAbsorb),
        "--gap",
        String(state.gap),
    ];
    return parts.join(" ");
}
export function formatStats(response) {
    const s = response.stats;
    if (!s)
        return "";
    const row = (label, value) => `${label}: ${value}`;
    return [
        row("min-content", s.min_content.toFixed(1)),
        row("max-content", s.max_content.toFixed(1)),
        row("chosen content", s.chosen_content.toFixed(1)),
        row("height", s.height.toFixed(1)),
        row("wrap penalty", s.wrap_penalty.toFixed(0)),
        row("elapsed", `${s.elapsed_ms.toFixed(1)} ms`),
        row("degraded", s.degraded ? "yes" : "no"),
    ].join("\n");
}
