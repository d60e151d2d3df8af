import { describe, expect, it } from "vitest";

import {
  addValue,
  buildFormModel,
  canAddValue,
  canRemoveValue,
  fieldViolations,
  isSubmittable,
  moveValue,
  removeValue,
  replaceField,
  setValue,
  showsAddControl,
  toStateItems,
} from "../src/form.js";
import { AUTHOR, BOOK, EX, RDF_TYPE, STATUS, TITLE, bookSchema, bookView } from "./fixtures.js";

function fieldByPath(model: ReturnType<typeof buildFormModel>, path: string) {
  const field = model.fields.find((f) => f.path === path);
  if (!field) throw new Error(`no field for ${path}`);
  return field;
}

describe("buildFormModel", () => {
  it("maps constraint kinds to input kinds", () => {
    const model = buildFormModel(bookSchema, bookView("T"));
    expect(fieldByPath(model, TITLE).kind).toBe("text");
    expect(fieldByPath(model, STATUS).kind).toBe("select");
    expect(fieldByPath(model, AUTHOR).kind).toBe("entity");
  });

  it("select offers exactly the permitted options", () => {
    const model = buildFormModel(bookSchema, null);
    const status = fieldByPath(model, STATUS);
    expect(status.options?.map((o) => o.value)).toEqual(["draft", "published"]);
  });

  it("orders author values along the chain from the view", () => {
    const authors = [`${EX}p/b`, `${EX}p/a`, `${EX}p/c`];
    const model = buildFormModel(bookSchema, bookView("T", authors));
    expect(fieldByPath(model, AUTHOR).values.map((v) => v.value)).toEqual(authors);
    expect(fieldByPath(model, AUTHOR).orderable).toBe(true);
  });

  it("keeps unknown statements read-only instead of dropping them", () => {
    const view = bookView("T");
    view.state.push({ predicate: `${EX}mystery`, object: { type: "literal", value: "?" } });
    const model = buildFormModel(bookSchema, view);
    expect(model.carried).toEqual([
      { predicate: `${EX}mystery`, object: { type: "literal", value: "?" }, reason: "unknown" },
    ]);
    const submitted = toStateItems(model);
    expect(submitted).toContainEqual(
      { predicate: `${EX}mystery`, object: { type: "literal", value: "?" } });
  });
});

describe("constraint-aware controls", () => {
  it("mandatory single title: one input, no add control, remove locked", () => {
    const model = buildFormModel(bookSchema, bookView("T"));
    const title = fieldByPath(model, TITLE);
    expect(title.values).toHaveLength(1);
    expect(showsAddControl(title)).toBe(false);
    expect(canAddValue(title)).toBe(false);
    expect(canRemoveValue(title)).toBe(false);
  });

  it("add control disabled exactly at max_count", () => {
    const model = buildFormModel(bookSchema, null);
    let status = fieldByPath(model, STATUS);
    expect(canAddValue(status)).toBe(true);
    status = addValue(status, { type: "literal", value: "draft" });
    expect(canAddValue(status)).toBe(false);
    expect(addValue(status, { type: "literal", value: "published" })).toBe(status);
  });

  it("remove control disabled exactly at min_count", () => {
    const model = buildFormModel(bookSchema, bookView("T"));
    const title = fieldByPath(model, TITLE);
    expect(removeValue(title, 0)).toBe(title);
    const authors = fieldByPath(model, AUTHOR);
    expect(canRemoveValue({ ...authors, values: [{ type: "iri", value: `${EX}p/a` }] })).toBe(true);
  });

  it("reorder emits the full new order", () => {
    const authors = [`${EX}p/a`, `${EX}p/b`, `${EX}p/c`];
    const model = buildFormModel(bookSchema, bookView("T", authors));
    const moved = moveValue(fieldByPath(model, AUTHOR), 2, 0);
    expect(moved.values.map((v) => v.value)).toEqual([`${EX}p/c`, `${EX}p/a`, `${EX}p/b`]);
    const state = toStateItems(replaceField(model, moved));
    const submitted = state.filter((s) => s.predicate === AUTHOR).map((s) => s.object.value);
    expect(submitted).toEqual([`${EX}p/c`, `${EX}p/a`, `${EX}p/b`]);
  });
});

describe("local validation", () => {
  it("fresh form pre-materializes the mandatory title as one blank input", () => {
    const model = buildFormModel(bookSchema, null);
    const title = fieldByPath(model, TITLE);
    expect(title.values).toEqual([{ type: "literal", value: "" }]);
    expect(isSubmittable(model)).toBe(false);
    expect(fieldViolations(title)[0]).toMatch(/empty/);
  });

  it("blanking the title blocks submit", () => {
    let model = buildFormModel(bookSchema, bookView("T"));
    model = replaceField(model, setValue(fieldByPath(model, TITLE), 0,
                                         { type: "literal", value: "" }));
    expect(isSubmittable(model)).toBe(false);
  });

  it("value outside the permitted list blocks submit", () => {
    let model = buildFormModel(bookSchema, bookView("T"));
    model = replaceField(model, addValue(fieldByPath(model, STATUS),
                                         { type: "literal", value: "bogus" }));
    expect(isSubmittable(model)).toBe(false);
    const withOption = replaceField(model,
      setValue(fieldByPath(model, STATUS), 0, { type: "literal", value: "draft" }));
    expect(isSubmittable(withOption)).toBe(true);
  });

  it("valid filled form is submittable and serializes with its type", () => {
    let model = buildFormModel(bookSchema, null);
    model = replaceField(model, setValue(fieldByPath(model, TITLE), 0,
                                         { type: "literal", value: "Commedia" }));
    expect(isSubmittable(model)).toBe(true);
    const items = toStateItems(model);
    expect(items).toContainEqual(
      { predicate: RDF_TYPE, object: { type: "iri", value: BOOK } });
  });
});
