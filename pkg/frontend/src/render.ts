// DOM rendering. Pure builders: state in, elements out, behavior via
// callbacks. No framework, no templates.

import {
  canRemoveValue,
  canAddValue,
  fieldViolations,
  isSubmittable,
  showsAddControl,
  type FormField,
  type FormModel,
} from "./form.js";
import type { StatementDiff } from "./diff.js";
import type { TimelineCard } from "./timeline.js";
import { termText, type ClassInfo, type StateItem, type TermJson, type ViolationJson } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (name === "class") node.className = value;
    else node.setAttribute(name, value);
  }
  node.append(...children);
  return node;
}

export function shortIri(iri: string): string {
  const tail = iri.split(/[#/]/).filter(Boolean).pop();
  return tail ?? iri;
}

function termInputValue(term: TermJson): string {
  return term.value;
}

// ---- browse views ---------------------------------------------------------

export function renderClassList(classes: ClassInfo[],
                                onOpen: (iri: string) => void): HTMLElement {
  const list = el("ul", { class: "class-list" });
  for (const c of classes) {
    const link = el("a", { href: `#/class/${encodeURIComponent(c.iri)}` },
                    `${c.label ?? shortIri(c.iri)} (${c.count})`);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      onOpen(c.iri);
    });
    list.append(el("li", {}, link));
  }
  return classes.length ? list : el("p", { class: "empty" }, "No classes yet.");
}

export function renderEntityList(entities: string[],
                                 onOpen: (iri: string) => void): HTMLElement {
  const list = el("ul", { class: "entity-list" });
  for (const iri of entities) {
    const link = el("a", { href: `#/entity/${encodeURIComponent(iri)}` }, iri);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      onOpen(iri);
    });
    list.append(el("li", {}, link));
  }
  return entities.length ? list : el("p", { class: "empty" }, "No entities of this class.");
}

// ---- form -----------------------------------------------------------------

export interface FormHandlers {
  onInput: (field: FormField, index: number, text: string) => void;
  onAdd: (field: FormField) => void;
  onRemove: (field: FormField, index: number) => void;
  onMove: (field: FormField, from: number, to: number) => void;
  onSubmit: () => void;
}

function renderValueControl(field: FormField, index: number, value: TermJson,
                            handlers: FormHandlers): HTMLElement {
  if (field.kind === "select") {
    const select = el("select", { "data-path": field.path }) as HTMLSelectElement;
    for (const option of field.options ?? []) {
      const item = el("option", { value: option.value }, termText(option));
      if (termText(option) === termText(value)) item.setAttribute("selected", "selected");
      select.append(item);
    }
    select.addEventListener("change", () => handlers.onInput(field, index, select.value));
    return select;
  }
  const input = el("input", {
    type: "text",
    value: termInputValue(value),
    "data-path": field.path,
    placeholder: field.kind === "entity" ? "entity IRI" : "",
  }) as HTMLInputElement;
  input.addEventListener("input", () => handlers.onInput(field, index, input.value));
  return input;
}

function renderFieldGroup(field: FormField, handlers: FormHandlers): HTMLElement {
  const group = el("fieldset", { class: `field kind-${field.kind}`, "data-path": field.path });
  group.append(el("legend", {}, field.label));
  const rows = el("div", { class: "values" });
  field.values.forEach((value, index) => {
    const row = el("div", { class: "value-row" });
    row.append(renderValueControl(field, index, value, handlers));
    if (field.orderable) {
      const up = el("button", { type: "button", class: "move-up", title: "move up" }, "↑");
      const down = el("button", { type: "button", class: "move-down", title: "move down" }, "↓");
      if (index === 0) up.setAttribute("disabled", "disabled");
      if (index === field.values.length - 1) down.setAttribute("disabled", "disabled");
      up.addEventListener("click", () => handlers.onMove(field, index, index - 1));
      down.addEventListener("click", () => handlers.onMove(field, index, index + 1));
      row.append(up, down);
    }
    const remove = el("button", { type: "button", class: "remove-value" }, "−");
    if (!canRemoveValue(field)) remove.setAttribute("disabled", "disabled");
    remove.addEventListener("click", () => handlers.onRemove(field, index));
    row.append(remove);
    rows.append(row);
  });
  group.append(rows);
  if (showsAddControl(field)) {
    const add = el("button", { type: "button", class: "add-value" }, "+ add");
    if (!canAddValue(field)) add.setAttribute("disabled", "disabled");
    add.addEventListener("click", () => handlers.onAdd(field));
    group.append(add);
  }
  const problems = fieldViolations(field);
  if (problems.length) {
    group.append(el("ul", { class: "field-problems" },
                    ...problems.map((p) => el("li", {}, p))));
  }
  return group;
}

export function renderForm(model: FormModel, handlers: FormHandlers): HTMLElement {
  const form = el("form", { class: "entity-form" });
  form.addEventListener("submit", (event) => event.preventDefault());
  for (const field of model.fields) {
    form.append(renderFieldGroup(field, handlers));
  }
  if (model.carried.length) {
    const aside = el("aside", { class: "carried" },
                     el("h3", {}, "Other statements (kept as-is)"));
    const list = el("ul", {});
    for (const item of model.carried) {
      list.append(el("li", {}, `${shortIri(item.predicate)} ${termText(item.object)}`));
    }
    aside.append(list);
    form.append(aside);
  }
  const submit = el("button", { type: "button", class: "submit" },
                    model.entityIri ? "Save" : "Create");
  if (!isSubmittable(model)) submit.setAttribute("disabled", "disabled");
  submit.addEventListener("click", () => {
    if (isSubmittable(model)) handlers.onSubmit();
  });
  form.append(submit);
  return form;
}

export function attachServerViolations(form: HTMLElement,
                                       violations: ViolationJson[]): void {
  for (const violation of violations) {
    const group = form.querySelector(`fieldset[data-path="${violation.path}"]`);
    const target = group ?? form;
    target.append(el("p", { class: "server-violation" }, violation.message));
  }
}

// ---- timeline and comparison ----------------------------------------------

export interface TimelineHandlers {
  onRestore: (card: TimelineCard) => void;
  onCompare: (older: number, newer: number) => void;
  onView: (n: number) => void;
}

export function renderTimeline(cards: TimelineCard[],
                               handlers: TimelineHandlers): HTMLElement {
  const container = el("ol", { class: "timeline" });
  for (const card of cards) {
    const item = el("li", { class: card.isHead ? "card head" : "card", "data-number": String(card.number) });
    item.append(el("h3", {}, `#${card.number}`),
                el("p", { class: "meta" },
                   `${card.generatedAt} · ${card.agent}`),
                el("p", { class: "counts" },
                   el("span", { class: "chip added" }, `+${card.addedCount}`),
                   " ",
                   el("span", { class: "chip deleted" }, `−${card.deletedCount}`)));
    if (card.restoredFrom !== null) {
      const link = el("a", {
        class: "restored-from",
        href: `#/entity-version/${card.restoredFrom}`,
      }, `restored from #${card.restoredFrom}`);
      link.addEventListener("click", (event) => {
        event.preventDefault();
        handlers.onView(card.restoredFrom!);
      });
      item.append(el("p", {}, link));
    } else if (card.primarySource) {
      item.append(el("p", { class: "primary-source" },
                     `source: ${card.primarySource}`));
    }
    const view = el("button", { type: "button", class: "view-version" }, "view");
    view.addEventListener("click", () => handlers.onView(card.number));
    item.append(view);
    if (card.canRestore) {
      const restore = el("button", { type: "button", class: "restore" }, "restore");
      restore.addEventListener("click", () => handlers.onRestore(card));
      item.append(restore);
    }
    if (!card.isHead) {
      const compare = el("button", { type: "button", class: "compare" }, "compare with head");
      compare.addEventListener("click", () =>
        handlers.onCompare(card.number, cards[cards.length - 1]!.number));
      item.append(compare);
    }
    container.append(item);
  }
  return container;
}

function statementLine(item: StateItem): string {
  return `${shortIri(item.predicate)} ${termText(item.object)}`;
}

export function renderComparison(diff: StatementDiff, heading: string): HTMLElement {
  const box = el("section", { class: "comparison" }, el("h3", {}, heading));
  const added = el("ul", { class: "added-statements" },
                   ...diff.added.map((i) => el("li", { class: "added" }, `+ ${statementLine(i)}`)));
  const removed = el("ul", { class: "removed-statements" },
                     ...diff.removed.map((i) => el("li", { class: "removed" }, `− ${statementLine(i)}`)));
  if (!diff.added.length && !diff.removed.length) {
    box.append(el("p", { class: "empty" }, "No differences."));
  } else {
    box.append(removed, added);
  }
  return box;
}

export function renderConflictBanner(onReload: () => void): HTMLElement {
  const banner = el("div", { class: "banner conflict", role: "alert" },
                    "Someone else edited this entity while you were working. ",
                    "The latest version has been reloaded; please reapply your change. ");
  const reload = el("button", { type: "button" }, "ok");
  reload.addEventListener("click", onReload);
  banner.append(reload);
  return banner;
}

export function renderError(message: string): HTMLElement {
  return el("div", { class: "banner error", role: "alert" }, message);
}
