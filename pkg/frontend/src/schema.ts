// Client-side mirror of the server's submission schema so the UI never
// sends a payload the API would reject. The schema file itself is the one
// shipped inside the Python package: one source of truth.
//
// This is a small interpreter for the JSON Schema subset those files use
// (type/enum/pattern/properties/required/items/bounds/propertyNames/$ref).

import submissionSchema from "../../src/wxbits/schemas/submission.json";

type Schema = Record<string, unknown>;

export class SchemaViolation extends Error {
  constructor(message: string, readonly path: string) {
    super(`${path || "<root>"}: ${message}`);
  }
}

function resolveRef(root: Schema, ref: string): Schema {
  if (!ref.startsWith("#/")) throw new Error(`unsupported $ref ${ref}`);
  let node: unknown = root;
  for (const part of ref.slice(2).split("/")) {
    node = (node as Record<string, unknown>)[part];
    if (node === undefined) throw new Error(`dangling $ref ${ref}`);
  }
  return node as Schema;
}

function typeOf(value: unknown): string {
  if (value === null) return "null";
  if (Array.isArray(value)) return "array";
  if (typeof value === "number") return Number.isInteger(value) ? "integer" : "number";
  return typeof value;
}

function check(root: Schema, schema: Schema, value: unknown, path: string): void {
  if (typeof schema.$ref === "string") {
    check(root, resolveRef(root, schema.$ref), value, path);
    return;
  }
  if (Array.isArray(schema.oneOf)) {
    const failures: string[] = [];
    let matches = 0;
    for (const sub of schema.oneOf as Schema[]) {
      try {
        check(root, sub, value, path);
        matches += 1;
      } catch (err) {
        failures.push(String(err));
      }
    }
    if (matches !== 1) {
      throw new SchemaViolation(`expected exactly one branch to match (${failures.join("; ")})`, path);
    }
    return;
  }
  if (typeof schema.type === "string") {
    const actual = typeOf(value);
    const expected = schema.type;
    const ok =
      actual === expected ||
      (expected === "number" && actual === "integer");
    if (!ok) throw new SchemaViolation(`expected ${expected}, got ${actual}`, path);
  }
  if (Array.isArray(schema.enum) && !schema.enum.some((e) => e === value)) {
    throw new SchemaViolation(`value ${JSON.stringify(value)} not in enum`, path);
  }
  if (typeof value === "string") {
    if (typeof schema.pattern === "string" && !new RegExp(schema.pattern).test(value)) {
      throw new SchemaViolation(`does not match ${schema.pattern}`, path);
    }
    if (typeof schema.minLength === "number" && value.length < schema.minLength) {
      throw new SchemaViolation(`shorter than ${schema.minLength}`, path);
    }
  }
  if (typeof value === "number") {
    if (typeof schema.minimum === "number" && value < schema.minimum) {
      throw new SchemaViolation(`below minimum ${schema.minimum}`, path);
    }
    if (typeof schema.maximum === "number" && value > schema.maximum) {
      throw new SchemaViolation(`above maximum ${schema.maximum}`, path);
    }
  }
  if (Array.isArray(value)) {
    if (typeof schema.minItems === "number" && value.length < schema.minItems) {
      throw new SchemaViolation(`fewer than ${schema.minItems} items`, path);
    }
    if (typeof schema.maxItems === "number" && value.length > schema.maxItems) {
      throw new SchemaViolation(`more than ${schema.maxItems} items`, path);
    }
    if (schema.items && typeof schema.items === "object") {
      value.forEach((item, i) => check(root, schema.items as Schema, item, `${path}/${i}`));
    }
  }
  if (value !== null && typeof value === "object" && !Array.isArray(value)) {
    const record = value as Record<string, unknown>;
    const properties = (schema.properties ?? {}) as Record<string, Schema>;
    for (const key of (schema.required as string[] | undefined) ?? []) {
      if (!(key in record)) throw new SchemaViolation(`missing required ${key}`, path);
    }
    if (typeof schema.minProperties === "number" && Object.keys(record).length < schema.minProperties) {
      throw new SchemaViolation(`fewer than ${schema.minProperties} properties`, path);
    }
    for (const [key, item] of Object.entries(record)) {
      if (schema.propertyNames && typeof schema.propertyNames === "object") {
        check(root, schema.propertyNames as Schema, key, `${path}/${key}`);
      }
      if (key in properties) {
        check(root, properties[key], item, `${path}/${key}`);
      } else if (schema.additionalProperties === false) {
        throw new SchemaViolation(`unexpected property ${key}`, path);
      } else if (schema.additionalProperties && typeof schema.additionalProperties === "object") {
        check(root, schema.additionalProperties as Schema, item, `${path}/${key}`);
      }
    }
  }
}

export function validateSubmission(payload: unknown): void {
  const schema = submissionSchema as unknown as Schema;
  check(schema, schema, payload, "");
}

export function isValidSubmission(payload: unknown): boolean {
  try {
    validateSubmission(payload);
    return true;
  } catch {
    return false;
  }
}
