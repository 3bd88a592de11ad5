/** Schema-driven intake form: pure HTML builders and validation. */

import { SchemaField, escapeHtml } from "./api.js";

/** Fields the clinician fills in; service fields are varied by the engine. */
export function intakeFields(fields: SchemaField[]): SchemaField[] {
  return fields.filter((f) => !f.service_field);
}

export function labelFor(name: string): string {
  const words = name.replace(/_/g, " ");
  return words.charAt(0).toUpperCase() + words.slice(1);
}

function numericControl(field: SchemaField): string {
  return (
    `<input type="text" inputmode="decimal" id="field-${field.name}"` +
    ` name="${field.name}" data-kind="numeric">`
  );
}

function choiceControl(field: SchemaField): string {
  const options = field.categories
    .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
    .join("");
  return (
    `<select id="field-${field.name}" name="${field.name}"` +
    ` data-kind="${field.kind}"><option value=""></option>${options}</select>`
  );
}

export function renderField(field: SchemaField): string {
  const control =
    field.kind === "numeric" ? numericControl(field) : choiceControl(field);
  return (
    `<div class="field" data-field="${field.name}">` +
    `<label for="field-${field.name}">${escapeHtml(labelFor(field.name))}</label>` +
    control +
    `<span class="field-error" id="error-${field.name}"></span>` +
    `</div>`
  );
}

export function renderIntakeForm(fields: SchemaField[]): string {
  const controls = intakeFields(fields).map(renderField).join("");
  return (
    `<form id="intake-form" novalidate>` +
    controls +
    `<button type="submit" id="submit-intake">Score packages</button>` +
    `</form>`
  );
}

/** Local check before any request; empty means "leave missing". */
export function validateValue(field: SchemaField, raw: string): string | null {
  const text = raw.trim();
  if (text === "") {
    return null;
  }
  if (field.kind === "numeric") {
    return Number.isFinite(Number(text)) ? null : "must be a number";
  }
  return field.categories.includes(text) ? null : "unknown category";
}

export function validateForm(
  fields: SchemaField[],
  values: Record<string, string>,
): Record<string, string> {
  const errors: Record<string, string> = {};
  for (const field of intakeFields(fields)) {
    const message = validateValue(field, values[field.name] ?? "");
    if (message !== null) {
      errors[field.name] = message;
    }
  }
  return errors;
}

/**
 * Turn raw control values into the what-if request body. Blank fields are
 * omitted entirely; the server imputes them.
 */
export function buildPayload(
  fields: SchemaField[],
  values: Record<string, string>,
): Record<string, unknown> {
  const payload: Record<string, unknown> = {};
  for (const field of intakeFields(fields)) {
    const text = (values[field.name] ?? "").trim();
    if (text === "") {
      continue;
    }
    payload[field.name] = field.kind === "numeric" ? Number(text) : text;
  }
  return payload;
}
