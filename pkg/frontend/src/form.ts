// Schema-driven form model. The client enforces a strict subset of the
// server's validation: anything this model lets through can only fail on
// conflicts or races, never on constraints the client already knew.

import {
  RDF_TYPE,
  XSD_STRING,
  termEquals,
  termText,
  type EntityView,
  type SchemaClass,
  type SchemaProperty,
  type StateItem,
  type TermJson,
} from "./types.js";

export type InputKind = "text" | "entity" | "select";

export interface FormField {
  path: string;
  label: string;
  kind: InputKind;
  minCount: number;
  maxCount: number | null;
  datatype: string | null;
  valueClass: string | null;
  options: TermJson[] | null;
  orderable: boolean;
  values: TermJson[];
}

export interface CarriedStatement {
  predicate: string;
  object: TermJson;
  reason: "hidden" | "unknown";
}

export interface FormModel {
  classIri: string;
  entityIri: string | null;
  baseVersion: number | null;
  types: string[];
  fields: FormField[];
  /** Statements shown read-only and preserved verbatim on submit. */
  carried: CarriedStatement[];
}

function inputKind(prop: SchemaProperty): InputKind {
  if (prop.allowed_values && prop.allowed_values.length > 0) return "select";
  if (prop.value_class) return "entity";
  return "text";
}

function labelFor(prop: SchemaProperty): string {
  if (prop.label) return prop.label;
  const tail = prop.path.split(/[#/]/).filter(Boolean).pop();
  return tail ?? prop.path;
}

/** Order state values for an orderable property using the view's chain. */
function orderedStateValues(values: TermJson[], ordered: string[] | undefined): TermJson[] {
  if (!ordered || ordered.length === 0) return values;
  const byText = new Map(values.map((v) => [termText(v), v]));
  const chain: TermJson[] = [];
  for (const text of ordered) {
    const match = byText.get(text);
    if (match) {
      chain.push(match);
      byText.delete(text);
    }
  }
  return [...chain, ...byText.values()];
}

/** Mandatory fields start with blank inputs to fill, up to min_count. */
function padToMinCount(prop: SchemaProperty, values: TermJson[]): TermJson[] {
  const padded = values.slice();
  while (padded.length < prop.min_count) {
    if (prop.allowed_values && prop.allowed_values.length > 0) {
      padded.push(prop.allowed_values[0]!);
    } else if (prop.value_class) {
      padded.push({ type: "iri", value: "" });
    } else {
      padded.push({ type: "literal", value: "" });
    }
  }
  return padded;
}

export function buildFormModel(schemaClass: SchemaClass, view: EntityView | null): FormModel {
  const state = view?.state ?? [];
  const types = view?.types ?? [schemaClass.iri];
  const known = new Map(schemaClass.properties.map((p) => [p.path, p]));
  const fields: FormField[] = [];
  const carried: CarriedStatement[] = [];

  for (const prop of schemaClass.properties) {
    const values = state.filter((s) => s.predicate === prop.path).map((s) => s.object);
    if (!prop.displayed) {
      for (const object of values) carried.push({ predicate: prop.path, object, reason: "hidden" });
      continue;
    }
    fields.push({
      path: prop.path,
      label: labelFor(prop),
      kind: inputKind(prop),
      minCount: prop.min_count,
      maxCount: prop.max_count,
      datatype: prop.datatype,
      valueClass: prop.value_class,
      options: prop.allowed_values,
      orderable: prop.order_predicate !== null,
      values: padToMinCount(
        prop, orderedStateValues(values, view?.display?.[prop.path]?.ordered)),
    });
  }

  for (const item of state) {
    if (item.predicate === RDF_TYPE || known.has(item.predicate)) continue;
    carried.push({ predicate: item.predicate, object: item.object, reason: "unknown" });
  }

  return {
    classIri: schemaClass.iri,
    entityIri: view?.iri ?? null,
    baseVersion: view?.head_version ?? null,
    types,
    fields,
    carried,
  };
}

// ---- constraint-aware controls ------------------------------------------

export function canAddValue(field: FormField): boolean {
  return field.maxCount === null || field.values.length < field.maxCount;
}

export function canRemoveValue(field: FormField): boolean {
  return field.values.length > field.minCount;
}

/** A mandatory single-valued field renders one fixed input: no add control. */
export function showsAddControl(field: FormField): boolean {
  return field.maxCount === null || field.maxCount > 1;
}

export function addValue(field: FormField, value: TermJson): FormField {
  if (!canAddValue(field)) return field;
  return { ...field, values: [...field.values, value] };
}

export function removeValue(field: FormField, index: number): FormField {
  if (!canRemoveValue(field)) return field;
  return { ...field, values: field.values.filter((_, i) => i !== index) };
}

export function setValue(field: FormField, index: number, value: TermJson): FormField {
  const values = field.values.slice();
  values[index] = value;
  return { ...field, values };
}

export function moveValue(field: FormField, from: number, to: number): FormField {
  if (from === to || from < 0 || to < 0 ||
      from >= field.values.length || to >= field.values.length) {
    return field;
  }
  const values = field.values.slice();
  const moved = values.splice(from, 1)[0]!;
  values.splice(to, 0, moved);
  return { ...field, values };
}

export function replaceField(model: FormModel, field: FormField): FormModel {
  return {
    ...model,
    fields: model.fields.map((f) => (f.path === field.path ? field : f)),
  };
}

// ---- local validation ----------------------------------------------------

export function fieldViolations(field: FormField): string[] {
  const problems: string[] = [];
  const n = field.values.length;
  if (n < field.minCount) {
    problems.push(`${field.label}: at least ${field.minCount} value(s) required`);
  }
  if (field.maxCount !== null && n > field.maxCount) {
    problems.push(`${field.label}: at most ${field.maxCount} value(s) allowed`);
  }
  for (const value of field.values) {
    if (field.options && !field.options.some((o) => termEquals(o, value))) {
      problems.push(`${field.label}: ${termText(value)} is not a permitted value`);
    }
    if (field.kind === "entity" && (value.type !== "iri" || !value.value.includes(":"))) {
      problems.push(`${field.label}: value must reference an entity IRI`);
    }
    if (field.kind === "text" && value.type === "literal" && value.value === "") {
      problems.push(`${field.label}: empty value`);
    }
  }
  return problems;
}

export function isSubmittable(model: FormModel): boolean {
  return model.fields.every((f) => fieldViolations(f).length === 0);
}

/** Literal term for a text field, honoring a datatype constraint. */
export function textTerm(field: FormField, text: string): TermJson {
  if (field.datatype && field.datatype !== XSD_STRING) {
    return { type: "literal", value: text, datatype: field.datatype };
  }
  return { type: "literal", value: text };
}

/** Full replacement state: every edit submits the complete new state. */
export function toStateItems(model: FormModel): StateItem[] {
  const items: StateItem[] = [];
  for (const type of model.types) {
    items.push({ predicate: RDF_TYPE, object: { type: "iri", value: type } });
  }
  for (const field of model.fields) {
    for (const object of field.values) items.push({ predicate: field.path, object });
  }
  for (const { predicate, object } of model.carried) {
    items.push({ predicate, object });
  }
  return items;
}
