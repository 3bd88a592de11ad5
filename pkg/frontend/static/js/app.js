/** Browser wiring: fetch the schema, build the form, submit what-ifs. */
import { buildPayload, renderIntakeForm, validateForm } from "./form.js";
import { renderError, renderMetricsTable, renderRecommendations } from "./results.js";
function readValues(form) {
    const values = {};
    for (const element of Array.from(form.elements)) {
        const control = element;
        if (control.name) {
            values[control.name] = control.value;
        }
    }
    return values;
}
function showFieldErrors(errors) {
    for (const span of Array.from(document.querySelectorAll(".field-error"))) {
        span.textContent = "";
    }
    for (const [name, message] of Object.entries(errors)) {
        const span = document.getElementById(`error-${name}`);
        if (span) {
            span.textContent = message;
        }
    }
}
async function submitWhatif(fields, form) {
    const results = document.getElementById("results");
    if (!results) {
        return;
    }
    const values = readValues(form);
    const errors = validateForm(fields, values);
    showFieldErrors(errors);
    if (Object.keys(errors).length > 0) {
        return;
    }
    try {
        const resp = await fetch("/whatif", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(buildPayload(fields, values)),
        });
        const raw = await resp.text();
        if (!resp.ok) {
            const detail = JSON.parse(raw)?.detail ?? resp.statusText;
            results.innerHTML = renderError(`request failed: ${detail}`);
            return;
        }
        results.innerHTML = renderRecommendations(raw);
    }
    catch (err) {
        results.innerHTML = renderError(`service unreachable: ${String(err)}`);
    }
}
async function loadGrid() {
    const target = document.getElementById("metrics");
    if (!target) {
        return;
    }
    try {
        const resp = await fetch("/grid");
        if (!resp.ok) {
            target.innerHTML = renderError("no grid report available");
            return;
        }
        target.innerHTML = renderMetricsTable((await resp.json()));
    }
    catch {
        target.innerHTML = renderError("no grid report available");
    }
}
export async function init() {
    const intake = document.getElementById("intake");
    const results = document.getElementById("results");
    if (!intake || !results) {
        return;
    }
    let fields;
    try {
        const resp = await fetch("/schema");
        if (!resp.ok) {
            throw new Error(`status ${resp.status}`);
        }
        fields = (await resp.json()).fields;
    }
    catch (err) {
        intake.innerHTML = renderError(`cannot load intake schema: ${String(err)}`);
        return;
    }
    intake.innerHTML = renderIntakeForm(fields);
    const form = document.getElementById("intake-form");
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        void submitWhatif(fields, form);
    });
    void loadGrid();
}
if (typeof document !== "undefined" && document.getElementById("intake")) {
    void init();
}
