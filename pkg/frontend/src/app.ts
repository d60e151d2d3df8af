// Application wiring: hash routing, data loading, and the edit/restore
// flows. Deep links: #/, #/class/<iri>, #/entity/<iri>, #/entity/<iri>/timeline.

import { ApiClient, ApiError } from "./api.js";
import { compareStates } from "./diff.js";
import {
  addValue,
  buildFormModel,
  moveValue,
  removeValue,
  replaceField,
  setValue,
  textTerm,
  toStateItems,
  type FormField,
  type FormModel,
} from "./form.js";
import {
  attachServerViolations,
  el,
  renderClassList,
  renderComparison,
  renderConflictBanner,
  renderEntityList,
  renderError,
  renderForm,
  renderTimeline,
  shortIri,
} from "./render.js";
import { buildTimeline, type TimelineCard } from "./timeline.js";
import type { EntityView, SchemaClass, SchemaResponse, TermJson } from "./types.js";

type Route =
  | { view: "classes" }
  | { view: "class"; iri: string }
  | { view: "entity"; iri: string }
  | { view: "timeline"; iri: string };

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").map(decodeURIComponent);
  if (parts[0] === "class" && parts[1]) return { view: "class", iri: parts[1] };
  if (parts[0] === "entity" && parts[1]) {
    if (parts[2] === "timeline") return { view: "timeline", iri: parts[1] };
    return { view: "entity", iri: parts[1] };
  }
  return { view: "classes" };
}

export class App {
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private schema: SchemaResponse = { classes: [] };
  private model: FormModel | null = null;
  private banner: HTMLElement | null = null;

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
  }

  async start(): Promise<void> {
    this.schema = await this.api.getSchema();
    window.addEventListener("hashchange", () => void this.route());
    await this.route();
  }

  private schemaClassFor(view: EntityView | null, fallback?: string): SchemaClass {
    const types = view?.types ?? (fallback ? [fallback] : []);
    for (const type of types) {
      const match = this.schema.classes.find((c) => c.iri === type);
      if (match) return match;
    }
    return { iri: types[0] ?? "", label: null, properties: [] };
  }

  private swap(...content: (HTMLElement | string)[]): void {
    this.root.replaceChildren(...content);
    if (this.banner) {
      this.root.prepend(this.banner);
      this.banner = null;
    }
  }

  async route(): Promise<void> {
    const route = parseRoute(window.location.hash);
    try {
      if (route.view === "classes") await this.showClasses();
      else if (route.view === "class") await this.showClass(route.iri);
      else if (route.view === "entity") await this.showEntity(route.iri);
      else await this.showTimeline(route.iri);
    } catch (error) {
      this.swap(renderError(error instanceof Error ? error.message : String(error)));
    }
  }

  private async showClasses(): Promise<void> {
    const classes = await this.api.getClasses();
    this.swap(el("h2", {}, "Collections"),
              renderClassList(classes, (iri) => this.open(`#/class/${encodeURIComponent(iri)}`)));
  }

  private async showClass(classIri: string): Promise<void> {
    const page = await this.api.getEntities(classIri);
    const schemaClass = this.schemaClassFor(null, classIri);
    const header = el("h2", {}, schemaClass.label ?? shortIri(classIri));
    const newButton = el("button", { type: "button", class: "new-entity" }, "+ new");
    newButton.addEventListener("click", () => {
      this.model = buildFormModel(schemaClass, null);
      this.renderEditor(null);
    });
    this.swap(header, newButton,
              renderEntityList(page.entities,
                               (iri) => this.open(`#/entity/${encodeURIComponent(iri)}`)));
  }

  private async showEntity(iri: string): Promise<void> {
    const view = await this.api.getEntity(iri);
    this.model = buildFormModel(this.schemaClassFor(view), view);
    this.renderEditor(view);
  }

  private renderEditor(view: EntityView | null): void {
    if (!this.model) return;
    const model = this.model;
    const handlers = {
      onInput: (field: FormField, index: number, text: string) => {
        const value: TermJson = field.kind === "entity"
          ? { type: "iri", value: text }
          : field.kind === "select"
            ? (field.options ?? []).find((o) => o.value === text) ?? { type: "literal", value: text }
            : textTerm(field, text);
        this.model = replaceField(model, setValue(field, index, value));
        this.renderEditor(view);
      },
      onAdd: (field: FormField) => {
        const blank: TermJson = field.kind === "select" && field.options?.length
          ? field.options[0]!
          : field.kind === "entity"
            ? { type: "iri", value: "http://" }
            : textTerm(field, "");
        this.model = replaceField(model, addValue(field, blank));
        this.renderEditor(view);
      },
      onRemove: (field: FormField, index: number) => {
        this.model = replaceField(model, removeValue(field, index));
        this.renderEditor(view);
      },
      onMove: (field: FormField, from: number, to: number) => {
        this.model = replaceField(model, moveValue(field, from, to));
        this.renderEditor(view);
      },
      onSubmit: () => void this.submit(view),
    };
    const title = view
      ? el("h2", {}, `${view.iri} (v${view.head_version ?? "?"})`)
      : el("h2", {}, "New entity");
    const form = renderForm(model, handlers);
    const nav = view
      ? el("p", {}, this.link(`#/entity/${encodeURIComponent(view.iri)}/timeline`, "history"))
      : el("p", {});
    this.swap(title, nav, form);
  }

  private async submit(view: EntityView | null): Promise<void> {
    if (!this.model) return;
    const state = toStateItems(this.model);
    try {
      if (view && this.model.entityIri && this.model.baseVersion !== null) {
        await this.api.submitEdit(this.model.entityIri, this.model.baseVersion, state);
        await this.showEntity(this.model.entityIri);
      } else {
        const snapshot = await this.api.createEntity(this.model.classIri, state);
        this.open(`#/entity/${encodeURIComponent(snapshot.entity)}`);
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409 && view) {
        this.banner = renderConflictBanner(() => void this.showEntity(view.iri));
        await this.showEntity(view.iri);
      } else if (error instanceof ApiError && error.status === 422) {
        const form = this.root.querySelector("form.entity-form");
        if (form) attachServerViolations(form as HTMLElement, error.violations);
      } else {
        this.root.prepend(renderError(error instanceof Error ? error.message : String(error)));
      }
    }
  }

  private async showTimeline(iri: string): Promise<void> {
    const entries = await this.api.getTimeline(iri);
    const cards = buildTimeline(iri, entries);
    const handlers = {
      onRestore: (card: TimelineCard) => void this.confirmRestore(iri, card),
      onCompare: (older: number, newer: number) => void this.showComparison(iri, older, newer),
      onView: (n: number) => void this.showVersion(iri, n),
    };
    this.swap(el("h2", {}, `History of ${iri}`),
              el("p", {}, this.link(`#/entity/${encodeURIComponent(iri)}`, "back to entity")),
              renderTimeline(cards, handlers),
              el("section", { class: "detail" }));
  }

  private detailPane(): HTMLElement {
    return this.root.querySelector("section.detail") ?? this.root;
  }

  private async showVersion(iri: string, n: number): Promise<void> {
    const version = await this.api.getVersion(iri, n);
    const pane = this.detailPane();
    pane.replaceChildren(
      el("h3", {}, `Version ${n}`),
      el("ul", {}, ...version.state.map((item) =>
        el("li", {}, `${shortIri(item.predicate)} ${item.object.value}`))),
    );
  }

  private async showComparison(iri: string, older: number, newer: number): Promise<void> {
    const [before, after] = await Promise.all([
      this.api.getVersion(iri, older),
      this.api.getVersion(iri, newer),
    ]);
    this.detailPane().replaceChildren(
      renderComparison(compareStates(before.state, after.state),
                       `#${older} → #${newer}`));
  }

  private async confirmRestore(iri: string, card: TimelineCard): Promise<void> {
    const [current, target] = await Promise.all([
      this.api.getEntity(iri),
      this.api.getVersion(iri, card.number),
    ]);
    const diff = compareStates(current.state, target.state);
    const pane = this.detailPane();
    const confirm = el("button", { type: "button", class: "confirm-restore" },
                       `restore #${card.number}`);
    confirm.addEventListener("click", async () => {
      try {
        await this.api.restore(iri, card.number);
        await this.showTimeline(iri);
      } catch (error) {
        pane.append(renderError(error instanceof Error ? error.message : String(error)));
      }
    });
    pane.replaceChildren(
      renderComparison(diff, `Restoring #${card.number} would apply:`),
      confirm);
  }

  private link(href: string, text: string): HTMLElement {
    const anchor = el("a", { href }, text);
    anchor.addEventListener("click", (event) => {
      event.preventDefault();
      this.open(href);
    });
    return anchor;
  }

  private open(hash: string): void {
    if (window.location.hash === hash) {
      void this.route();
    } else {
      window.location.hash = hash;
    }
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const api = new ApiClient(
    (window as unknown as { CURATRACE_API?: string }).CURATRACE_API ?? "");
  api.curator = window.localStorage.getItem("curator");
  void new App(root, api).start();
}
