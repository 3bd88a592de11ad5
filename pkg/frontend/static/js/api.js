/** Shapes of the backend JSON contracts and raw-text helpers. */
const P_ABOVE_LITERAL = /"p_above"\s*:\s*([0-9eE+.-]+)/g;
/**
 * Pull every `p_above` number literal out of the raw response text, in
 * order. The UI displays these bytes verbatim instead of re-formatting
 * parsed floats, so no probability math ever happens client-side.
 */
export function extractRawProbabilities(rawJson) {
    const out = [];
    for (const match of rawJson.matchAll(P_ABOVE_LITERAL)) {
        out.push(match[1]);
    }
    return out;
}
export function parseWhatif(rawJson) {
    const parsed = JSON.parse(rawJson);
    const raws = extractRawProbabilities(rawJson);
    if (raws.length !== parsed.recommendations.length) {
        throw new Error("probability literals do not align with recommendations");
    }
    return parsed.recommendations.map((rec, i) => ({ ...rec, pAboveRaw: raws[i] }));
}
export function escapeHtml(text) {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
