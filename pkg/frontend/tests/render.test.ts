// @vitest-environment happy-dom

import { describe, expect, it } from "vitest";

import { compareStates } from "../src/diff.js";
import {
  addValue,
  buildFormModel,
  replaceField,
  type FormField,
  type FormModel,
} from "../src/form.js";
import {
  attachServerViolations,
  renderComparison,
  renderForm,
  renderTimeline,
  type FormHandlers,
} from "../src/render.js";
import { buildTimeline } from "../src/timeline.js";
import { AUTHOR, EX, STATUS, TITLE, bookSchema, bookView, timelineFixture } from "./fixtures.js";

const noop: FormHandlers = {
  onInput: () => {},
  onAdd: () => {},
  onRemove: () => {},
  onMove: () => {},
  onSubmit: () => {},
};

function group(form: HTMLElement, path: string): HTMLElement {
  const node = form.querySelector(`fieldset[data-path="${path}"]`);
  if (!node) throw new Error(`no field group for ${path}`);
  return node as HTMLElement;
}

describe("renderForm (seeded book schema)", () => {
  it("mandatory single title renders one text input and no add control", () => {
    const form = renderForm(buildFormModel(bookSchema, bookView("T")), noop);
    const title = group(form, TITLE);
    expect(title.querySelectorAll("input").length).toBe(1);
    expect(title.querySelector("button.add-value")).toBeNull();
    const remove = title.querySelector("button.remove-value") as HTMLButtonElement;
    expect(remove.disabled).toBe(true);
  });

  it("sh:in property renders a select with exactly the two options", () => {
    let model = buildFormModel(bookSchema, bookView("T"));
    const status = model.fields.find((f) => f.path === STATUS) as FormField;
    model = replaceField(model, addValue(status, { type: "literal", value: "draft" }));
    const form = renderForm(model, noop);
    const options = group(form, STATUS).querySelectorAll("option");
    expect([...options].map((o) => (o as HTMLOptionElement).value)).toEqual(
      ["draft", "published"]);
  });

  it("ordered author list renders in chain order with reorder controls", () => {
    const authors = [`${EX}p/b`, `${EX}p/a`, `${EX}p/c`];
    const form = renderForm(buildFormModel(bookSchema, bookView("T", authors)), noop);
    const rows = group(form, AUTHOR).querySelectorAll(".value-row");
    expect([...rows].map((r) => (r.querySelector("input") as HTMLInputElement).value))
      .toEqual(authors);
    expect(group(form, AUTHOR).querySelectorAll("button.move-up").length).toBe(3);
  });

  it("submit is disabled while the form violates a constraint", () => {
    const invalid = buildFormModel(bookSchema, null);
    const form = renderForm(invalid, noop);
    const submit = form.querySelector("button.submit") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
  });

  it("submit handler never fires from a violating form", () => {
    let fired = 0;
    const invalid: FormModel = buildFormModel(bookSchema, null);
    const form = renderForm(invalid, { ...noop, onSubmit: () => { fired += 1; } });
    (form.querySelector("button.submit") as HTMLButtonElement).click();
    expect(fired).toBe(0);
  });

  it("server violations anchor on their field group", () => {
    const form = renderForm(buildFormModel(bookSchema, bookView("T")), noop);
    attachServerViolations(form, [
      { focus: "f", path: TITLE, kind: "MinCount", message: "missing title" }]);
    expect(group(form, TITLE).querySelector(".server-violation")?.textContent)
      .toBe("missing title");
  });
});

describe("renderTimeline", () => {
  const entity = `${EX}book/1`;

  it("five cards in order, restore absent on the head card", () => {
    const cards = buildTimeline(entity, timelineFixture(entity));
    const list = renderTimeline(cards, { onRestore: () => {}, onCompare: () => {}, onView: () => {} });
    const items = list.querySelectorAll("li.card");
    expect(items.length).toBe(5);
    expect([...items].map((i) => i.getAttribute("data-number"))).toEqual(
      ["1", "2", "3", "4", "5"]);
    expect(items[4]!.querySelector("button.restore")).toBeNull();
    expect(items[0]!.querySelector("button.restore")).not.toBeNull();
  });

  it("head card links its restore provenance", () => {
    const cards = buildTimeline(entity, timelineFixture(entity));
    const list = renderTimeline(cards, { onRestore: () => {}, onCompare: () => {}, onView: () => {} });
    const link = list.querySelectorAll("li.card")[4]!.querySelector("a.restored-from");
    expect(link?.textContent).toBe("restored from #1");
  });
});

describe("renderComparison", () => {
  it("shows removed and added statement lists", () => {
    const diff = compareStates(
      [{ predicate: TITLE, object: { type: "literal", value: "A" } }],
      [{ predicate: TITLE, object: { type: "literal", value: "B" } }]);
    const box = renderComparison(diff, "#1 -> #2");
    expect(box.querySelector(".removed")?.textContent).toContain('"A"');
    expect(box.querySelector(".added")?.textContent).toContain('"B"');
  });
});
