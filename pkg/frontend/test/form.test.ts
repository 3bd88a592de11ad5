import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SchemaResponse } from "../src/api.js";
import {
  buildPayload,
  intakeFields,
  labelFor,
  renderIntakeForm,
  validateForm,
  validateValue,
} from "../src/form.js";

const schema = JSON.parse(
  readFileSync(new URL("./fixtures/schema.json", import.meta.url), "utf-8"),
) as SchemaResponse;

describe("intake form generation", () => {
  it("renders one control per non-service predictor", () => {
    const expected = intakeFields(schema.fields);
    expect(expected.length).toBe(schema.fields.length - 2);
    const html = renderIntakeForm(schema.fields);
    const controls = html.match(/id="field-/g) ?? [];
    expect(controls.length).toBe(expected.length);
    for (const field of expected) {
      expect(html).toContain(`id="field-${field.name}"`);
      expect(html).toContain(`<label for="field-${field.name}">`);
    }
  });

  it("excludes service fields from the form", () => {
    const html = renderIntakeForm(schema.fields);
    expect(html).not.toContain('name="service_profile"');
    expect(html).not.toContain('name="service_volume"');
  });

  it("uses the control kind matching the field kind", () => {
    const html = renderIntakeForm(schema.fields);
    expect(html).toContain('name="age" data-kind="numeric"');
    expect(html).toContain('name="gender" data-kind="categorical"');
    expect(html).toContain('name="prior_crisis" data-kind="binary"');
  });

  it("offers every category plus a blank missing option", () => {
    const gender = schema.fields.find((f) => f.name === "gender")!;
    const html = renderIntakeForm(schema.fields);
    expect(html).toContain('<option value=""></option>');
    for (const category of gender.categories) {
      expect(html).toContain(`<option value="${category}">`);
    }
  });

  it("prettifies field names for labels", () => {
    expect(labelFor("baseline_carla")).toBe("Baseline carla");
    expect(labelFor("age")).toBe("Age");
  });
});

describe("local validation", () => {
  const age = schema.fields.find((f) => f.name === "age")!;
  const gender = schema.fields.find((f) => f.name === "gender")!;

  it("flags text in a numeric field without sending a request", () => {
    expect(validateValue(age, "not a number")).toBe("must be a number");
    expect(validateValue(age, "35.5")).toBeNull();
  });

  it("treats blanks as missing, never as errors", () => {
    expect(validateValue(age, "")).toBeNull();
    expect(validateValue(gender, "  ")).toBeNull();
  });

  it("rejects values outside the category list", () => {
    expect(validateValue(gender, "unknown")).toBe("unknown category");
    expect(validateValue(gender, "female")).toBeNull();
  });

  it("collects one message per invalid field", () => {
    const errors = validateForm(schema.fields, { age: "abc", gender: "female" });
    expect(errors).toEqual({ age: "must be a number" });
  });
});

describe("payload construction", () => {
  it("submits an empty form as an empty object for server imputation", () => {
    expect(buildPayload(schema.fields, {})).toEqual({});
  });

  it("omits blank fields and converts numerics", () => {
    const payload = buildPayload(schema.fields, {
      age: " 35.5 ",
      gender: "female",
      race: "",
    });
    expect(payload).toEqual({ age: 35.5, gender: "female" });
  });

  it("never includes service fields", () => {
    const payload = buildPayload(schema.fields, {
      age: "35",
      service_profile: "therapy",
      service_volume: "high",
    });
    expect(Object.keys(payload)).toEqual(["age"]);
  });

  it("round-trips unchanged when one field is edited", () => {
    const values = { age: "35", gender: "female", race: "white" };
    const before = buildPayload(schema.fields, values);
    const after = buildPayload(schema.fields, { ...values, age: "36" });
    expect(after.gender).toBe(before.gender);
    expect(after.race).toBe(before.race);
    expect(after.age).toBe(36);
  });
});
