/** Keyboard-first labeling: 1/2/3 pick a label for the focused nugget and
 * advance; arrows or j/k move focus. Labeling hundreds of (answer, nugget)
 * pairs is the bulk of assessor work, so hands stay off the mouse. */

import { AssignmentBoard, KEY_TO_LABEL } from "./assignment.js";

export function attachAssignmentKeys(
  board: AssignmentBoard,
  target: EventTarget,
  onChange: () => void,
): () => void {
  const handler = (event: Event) => {
    const key = (event as KeyboardEvent).key;
    const element = event.target as HTMLElement | null;
    if (element && (element.tagName === "INPUT" || element.tagName === "TEXTAREA")) {
      return;
    }
    const label = KEY_TO_LABEL[key];
    if (label) {
      event.preventDefault();
      board.labelCurrent(label);
      onChange();
      return;
    }
    switch (key) {
      case "ArrowDown":
      case "j":
        event.preventDefault();
        board.moveCursor(1);
        onChange();
        break;
      case "ArrowUp":
      case "k":
        event.preventDefault();
        board.moveCursor(-1);
        onChange();
        break;
    }
  };
  target.addEventListener("keydown", handler);
  return () => target.removeEventListener("keydown", handler);
}
