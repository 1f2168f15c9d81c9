/** Local edit buffer for nugget lists.
 *
 * Client-side validation is a strict subset of the server's rules, so a
 * buffer that passes here always produces an accepted payload: at most 20
 * nuggets, every one labeled, non-empty, no exact duplicates.
 */

import type { Importance, NuggetSubmission, NuggetView } from "./types.js";

export const NUGGET_CAP = 20;

export interface EditEntry {
  text: string;
  importance: Importance | null;
}

export class NuggetEditBuffer {
  private entries: EditEntry[];
  dirty = false;

  constructor(drafts: string[] = [], saved?: NuggetView[]) {
    if (saved && saved.length > 0) {
      // Revisiting a finalized task: start from what was submitted.
      this.entries = saved.map((n) => ({
        text: n.text,
        importance: n.importance === "vital" || n.importance === "okay"
          ? n.importance
          : null,
      }));
    } else {
      this.entries = drafts.map((text) => ({ text, importance: null }));
    }
  }

  get size(): number {
    return this.entries.length;
  }

  list(): readonly EditEntry[] {
    return this.entries;
  }

  add(text = ""): void {
    this.entries.push({ text, importance: null });
    this.dirty = true;
  }

  remove(index: number): void {
    this.entries.splice(index, 1);
    this.dirty = true;
  }

  /** Combine two drafts into one editable nugget, replacing both. */
  merge(first: number, second: number): void {
    if (first === second) return;
    const [lo, hi] = first < second ? [first, second] : [second, first];
    const a = this.entries[lo];
    const b = this.entries[hi];
    if (!a || !b) return;
    const merged: EditEntry = {
      text: `${a.text}; ${b.text}`,
      importance: a.importance === b.importance ? a.importance : null,
    };
    this.entries.splice(hi, 1);
    this.entries.splice(lo, 1, merged);
    this.dirty = true;
  }

  move(index: number, delta: -1 | 1): void {
    const target = index + delta;
    if (index < 0 || index >= this.entries.length) return;
    if (target < 0 || target >= this.entries.length) return;
    const [entry] = this.entries.splice(index, 1);
    this.entries.splice(target, 0, entry!);
    this.dirty = true;
  }

  setText(index: number, text: string): void {
    const entry = this.entries[index];
    if (!entry) return;
    entry.text = text;
    this.dirty = true;
  }

  setImportance(index: number, importance: Importance): void {
    const entry = this.entries[index];
    if (!entry) return;
    entry.importance = importance;
    this.dirty = true;
  }

  /** Everything blocking submission, in display order. */
  problems(): string[] {
    const found: string[] = [];
    if (this.entries.length === 0) {
      found.push("at least one nugget is required");
    }
    if (this.entries.length > NUGGET_CAP) {
      found.push(`${this.entries.length} nuggets exceed the cap of ${NUGGET_CAP}`);
    }
    const unlabeled = this.entries.filter((e) => e.importance === null).length;
    if (unlabeled > 0) {
      found.push(`${unlabeled} nugget(s) still need a vital/okay label`);
    }
    if (this.entries.some((e) => e.text.trim() === "")) {
      found.push("empty nugget text");
    }
    const seen = new Set<string>();
    for (const entry of this.entries) {
      const text = entry.text.trim();
      if (text && seen.has(text)) {
        found.push(`duplicate nugget text: "${text}"`);
      }
      seen.add(text);
    }
    return found;
  }

  get canSubmit(): boolean {
    return this.problems().length === 0;
  }

  /** Payload for the service; only call when canSubmit holds. */
  submission(): NuggetSubmission[] {
    if (!this.canSubmit) {
      throw new Error("buffer fails validation; fix problems() first");
    }
    return this.entries.map((e) => ({
      text: e.text.trim(),
      importance: e.importance as Importance,
    }));
  }
}
