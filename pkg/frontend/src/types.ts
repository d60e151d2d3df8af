// Wire types for the curatrace JSON API.

export type TermJson =
  | { type: "iri"; value: string }
  | { type: "literal"; value: string; datatype?: string; language?: string }
  | { type: "bnode"; value: string };

export interface StateItem {
  predicate: string;
  object: TermJson;
}

export interface SchemaProperty {
  path: string;
  label: string | null;
  displayed: boolean;
  order_predicate: string | null;
  value_query: boolean;
  min_count: number;
  max_count: number | null;
  datatype: string | null;
  value_class: string | null;
  allowed_values: TermJson[] | null;
}

export interface SchemaClass {
  iri: string;
  label: string | null;
  properties: SchemaProperty[];
}

export interface SchemaResponse {
  classes: SchemaClass[];
}

export interface ClassInfo {
  iri: string;
  label: string | null;
  count: number;
}

export interface EntityPage {
  class: string;
  offset: number;
  limit: number;
  entities: string[];
}

export interface DisplayEntry {
  label: string | null;
  values: string[];
  ordered?: string[];
}

export interface EntityView {
  iri: string;
  head_version: number | null;
  deleted: boolean;
  types: string[];
  state: StateItem[];
  display: Record<string, DisplayEntry>;
}

export interface VersionView {
  iri: string;
  version: number;
  state: StateItem[];
}

export interface SnapshotJson {
  number: number;
  snapshot_iri: string;
  entity: string;
  generated_at: string;
  agent: TermJson;
  invalidated_at: string | null;
  primary_source: string | null;
  derived_from: string | null;
  update_query: string | null;
  warnings?: string[];
}

export interface TimelineEntryJson {
  number: number;
  snapshot_iri: string;
  generated_at: string;
  invalidated_at: string | null;
  agent: TermJson;
  primary_source: string | null;
  added_count: number;
  deleted_count: number;
}

export interface ViolationJson {
  focus: string;
  path: string;
  kind: string;
  message: string;
}

export interface ApiErrorBody {
  code: number;
  message: string;
  violations?: ViolationJson[];
}

export const RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
export const XSD_STRING = "http://www.w3.org/2001/XMLSchema#string";

/** N-Triples-style surface text used for display and value identity. */
export function termText(term: TermJson): string {
  if (term.type === "iri") return `<${term.value}>`;
  if (term.type === "bnode") return `_:${term.value}`;
  const quoted = `"${term.value.replace(/\\/g, "\\\\").replace(/"/g, '\\"')}"`;
  if (term.language) return `${quoted}@${term.language}`;
  if (term.datatype && term.datatype !== XSD_STRING) return `${quoted}^^<${term.datatype}>`;
  return quoted;
}

export function termEquals(a: TermJson, b: TermJson): boolean {
  return termText(a) === termText(b);
}
