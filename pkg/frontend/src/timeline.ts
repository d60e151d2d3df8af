// Timeline view model: ordered snapshot cards with restore affordances.

import type { TermJson, TimelineEntryJson } from "./types.js";

export interface TimelineCard {
  number: number;
  snapshotIri: string;
  generatedAt: string;
  invalidatedAt: string | null;
  agent: string;
  addedCount: number;
  deletedCount: number;
  primarySource: string | null;
  /** Set when the primary source is an earlier snapshot of this entity. */
  restoredFrom: number | null;
  isHead: boolean;
  /** Restore is never offered on the head card. */
  canRestore: boolean;
}

function agentText(agent: TermJson): string {
  return agent.value;
}

export function snapshotNumberOf(entityIri: string, source: string | null): number | null {
  if (!source) return null;
  const prefix = `${entityIri}/prov/se/`;
  if (!source.startsWith(prefix)) return null;
  const tail = source.slice(prefix.length);
  return /^[1-9][0-9]*$/.test(tail) ? Number(tail) : null;
}

export function buildTimeline(entityIri: string, entries: TimelineEntryJson[]): TimelineCard[] {
  const ordered = [...entries].sort((a, b) => a.number - b.number);
  const headNumber = ordered.length > 0 ? ordered[ordered.length - 1]!.number : 0;
  return ordered.map((entry) => {
    const isHead = entry.number === headNumber;
    return {
      number: entry.number,
      snapshotIri: entry.snapshot_iri,
      generatedAt: entry.generated_at,
      invalidatedAt: entry.invalidated_at,
      agent: agentText(entry.agent),
      addedCount: entry.added_count,
      deletedCount: entry.deleted_count,
      primarySource: entry.primary_source,
      restoredFrom: snapshotNumberOf(entityIri, entry.primary_source),
      isHead,
      canRestore: !isHead,
    };
  });
}

export interface ComparePair {
  older: number;
  newer: number;
}

/** Normalize a user-picked pair so comparison always reads old -> new. */
export function normalizePair(a: number, b: number): ComparePair | null {
  if (a === b) return null;
  return a < b ? { older: a, newer: b } : { older: b, newer: a };
}
