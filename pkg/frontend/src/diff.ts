// Version comparison as added/removed statement lists. Curators see
// statements, not SPARQL.

import { termText, type StateItem } from "./types.js";

export interface StatementDiff {
  added: StateItem[];
  removed: StateItem[];
}

function key(item: StateItem): string {
  return `${item.predicate} ${termText(item.object)}`;
}

function sortItems(items: StateItem[]): StateItem[] {
  return [...items].sort((a, b) => key(a).localeCompare(key(b)));
}

export function compareStates(older: StateItem[], newer: StateItem[]): StatementDiff {
  const olderKeys = new Set(older.map(key));
  const newerKeys = new Set(newer.map(key));
  return {
    added: sortItems(newer.filter((item) => !olderKeys.has(key(item)))),
    removed: sortItems(older.filter((item) => !newerKeys.has(key(item)))),
  };
}

export function sameState(a: StateItem[], b: StateItem[]): boolean {
  const diff = compareStates(a, b);
  return diff.added.length === 0 && diff.removed.length === 0;
}
