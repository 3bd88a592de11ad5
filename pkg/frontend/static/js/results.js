/** Ranked recommendation bars and the model metrics table. */
import { escapeHtml, parseWhatif } from "./api.js";
export function barWidthPercent(pAbove) {
    const clamped = Math.min(Math.max(pAbove, 0), 1);
    return Math.round(clamped * 1000) / 10;
}
export function renderRecommendationRow(entry) {
    const top = entry.rank === 1 ? " top-rank" : "";
    return (`<div class="package-row${top}" data-package="${escapeHtml(entry.package_id)}">` +
        `<span class="rank-badge">${entry.rank}</span>` +
        `<span class="package-name">${escapeHtml(entry.name)}</span>` +
        `<span class="bar-track"><span class="bar-fill" style="width:${barWidthPercent(entry.p_above)}%"></span></span>` +
        `<span class="probability">${entry.pAboveRaw}</span>` +
        `</div>`);
}
/** Render straight from the raw response text so probabilities stay verbatim. */
export function renderRecommendations(rawJson) {
    const entries = parseWhatif(rawJson);
    if (entries.length === 0) {
        return `<div class="empty-state">no packages configured</div>`;
    }
    return (`<div class="recommendations">` +
        entries.map(renderRecommendationRow).join("") +
        `</div>`);
}
export function renderError(message) {
    return `<div class="service-error">${escapeHtml(message)}</div>`;
}
const METRIC_COLUMNS = [
    "Model",
    "Binning",
    "Accuracy",
    "AUC",
    "TP rate",
    "FP rate",
    "H",
];
function cell(value) {
    if (value === null || value === undefined) {
        return "<td>-</td>";
    }
    if (typeof value === "number") {
        return `<td>${value.toFixed(3)}</td>`;
    }
    return `<td>${escapeHtml(value)}</td>`;
}
export function renderMetricsTable(report) {
    const header = METRIC_COLUMNS.map((c) => `<th>${c}</th>`).join("");
    const body = report.rows
        .map((row) => `<tr>${METRIC_COLUMNS.map((c) => cell(row[c])).join("")}</tr>`)
        .join("");
    return (`<table class="metrics"><thead><tr>${header}</tr></thead>` +
        `<tbody>${body}</tbody></table>`);
}
