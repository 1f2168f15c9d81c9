/** Local state for the manual assignment screen.
 *
 * Labels start empty: the screen never shows anything the assessor did not
 * choose (completed tasks reopen read-only with their recorded labels).
 * Submission is possible only once every nugget is labeled.
 */

import type { AssignmentLabelValue, NuggetView } from "./types.js";

export const KEY_TO_LABEL: Record<string, AssignmentLabelValue> = {
  "1": "support",
  "2": "partial_support",
  "3": "not_support",
};

export class AssignmentBoard {
  readonly nuggets: readonly NuggetView[];
  readonly readOnly: boolean;
  private labels: (AssignmentLabelValue | null)[];
  cursor = 0;

  constructor(nuggets: NuggetView[], savedLabels?: AssignmentLabelValue[]) {
    this.nuggets = nuggets;
    if (savedLabels) {
      if (savedLabels.length !== nuggets.length) {
        throw new Error(
          `saved labels (${savedLabels.length}) do not match nuggets (${nuggets.length})`,
        );
      }
      this.labels = [...savedLabels];
      this.readOnly = true;
    } else {
      this.labels = nuggets.map(() => null);
      this.readOnly = false;
    }
  }

  label(index: number): AssignmentLabelValue | null {
    return this.labels[index] ?? null;
  }

  setLabel(index: number, value: AssignmentLabelValue): void {
    if (this.readOnly) return;
    if (index < 0 || index >= this.labels.length) return;
    this.labels[index] = value;
  }

  /** Keyboard flow: label the focused nugget and advance to the next. */
  labelCurrent(value: AssignmentLabelValue): void {
    this.setLabel(this.cursor, value);
    this.moveCursor(1);
  }

  moveCursor(delta: -1 | 1): void {
    const next = this.cursor + delta;
    if (next >= 0 && next < this.nuggets.length) {
      this.cursor = next;
    }
  }

  get labeledCount(): number {
    return this.labels.filter((l) => l !== null).length;
  }

  get complete(): boolean {
    return this.nuggets.length > 0 && this.labeledCount === this.nuggets.length;
  }

  get canSubmit(): boolean {
    return this.complete && !this.readOnly;
  }

  submission(): AssignmentLabelValue[] {
    if (!this.complete) {
      throw new Error(
        `only ${this.labeledCount} of ${this.nuggets.length} nuggets labeled`,
      );
    }
    return this.labels.map((l) => l as AssignmentLabelValue);
  }
}
