import type { EntityView, SchemaClass, TimelineEntryJson } from "../src/types.js";

export const EX = "http://example.org/";
export const TITLE = "http://purl.org/dc/terms/title";
export const STATUS = `${EX}status`;
export const AUTHOR = `${EX}author`;
export const NEXT = `${EX}next`;
export const BOOK = "http://purl.org/spar/fabio/Book";
export const RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

export const bookSchema: SchemaClass = {
  iri: BOOK,
  label: "Book",
  properties: [
    {
      path: TITLE,
      label: "Title",
      displayed: true,
      order_predicate: null,
      value_query: false,
      min_count: 1,
      max_count: 1,
      datatype: "http://www.w3.org/2001/XMLSchema#string",
      value_class: null,
      allowed_values: null,
    },
    {
      path: STATUS,
      label: "Status",
      displayed: true,
      order_predicate: null,
      value_query: false,
      min_count: 0,
      max_count: 1,
      datatype: null,
      value_class: null,
      allowed_values: [
        { type: "literal", value: "draft" },
        { type: "literal", value: "published" },
      ],
    },
    {
      path: AUTHOR,
      label: "Authors",
      displayed: true,
      order_predicate: NEXT,
      value_query: false,
      min_count: 0,
      max_count: null,
      datatype: null,
      value_class: `${EX}Person`,
      allowed_values: null,
    },
  ],
};

export function bookView(title: string, authors: string[] = []): EntityView {
  return {
    iri: `${EX}book/1`,
    head_version: 1,
    deleted: false,
    types: [BOOK],
    state: [
      { predicate: RDF_TYPE, object: { type: "iri", value: BOOK } },
      { predicate: TITLE, object: { type: "literal", value: title } },
      ...authors.map((a) => ({
        predicate: AUTHOR,
        object: { type: "iri" as const, value: a },
      })),
    ],
    display: {
      [AUTHOR]: {
        label: "Authors",
        values: authors.map((a) => `<${a}>`),
        ordered: authors.map((a) => `<${a}>`),
      },
    },
  };
}

export function timelineFixture(entity: string): TimelineEntryJson[] {
  const agent = { type: "literal" as const, value: "curator" };
  const snapshot = (n: number) => `${entity}/prov/se/${n}`;
  return [1, 2, 3, 4, 5].map((n) => ({
    number: n,
    snapshot_iri: snapshot(n),
    generated_at: `2024-01-31T10:0${n}:00Z`,
    invalidated_at: n < 5 ? `2024-01-31T10:0${n + 1}:00Z` : null,
    agent,
    primary_source: n === 5 ? snapshot(1) : null,
    added_count: n === 1 ? 2 : 1,
    deleted_count: n === 1 ? 0 : 1,
  }));
}
