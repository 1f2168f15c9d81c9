/** DOM views: task queue, nugget editor, assignment screen.
 *
 * Views render from local state only. The assignment screen reflects the
 * board, which starts unlabeled for open tasks, so no pathway can surface a
 * label the assessor did not pick (completed tasks render their recorded
 * labels read-only).
 */

import { AssignmentBoard } from "./assignment.js";
import { el } from "./dom.js";
import { NUGGET_CAP, NuggetEditBuffer } from "./editor.js";
import { ASSIGNMENT_LABELS, type TaskPayload, type TaskSummary } from "./types.js";

const KIND_TITLES: Record<string, string> = {
  edit_nuggets: "Post-edit drafted nuggets",
  create_nuggets: "Author nuggets from scratch",
  assign: "Assign nuggets to answers",
};

export function errorBanner(message: string, onRetry: () => void): HTMLElement {
  return el(
    "div",
    { class: "banner banner-error", role: "alert" },
    `Service unreachable: ${message} `,
    el("button", { class: "retry", onclick: onRetry }, "Retry"),
  );
}

export function taskListView(
  tasks: TaskSummary[],
  onOpen: (taskId: string) => void,
): HTMLElement {
  const root = el("div", { class: "task-list" });
  if (tasks.length === 0) {
    root.append(el("p", { class: "empty-state" }, "No tasks - everything is done."));
    return root;
  }
  const byKind = new Map<string, TaskSummary[]>();
  for (const task of tasks) {
    const bucket = byKind.get(task.kind) ?? [];
    bucket.push(task);
    byKind.set(task.kind, bucket);
  }
  for (const [kind, bucket] of byKind) {
    root.append(el("h2", {}, KIND_TITLES[kind] ?? kind));
    const list = el("ul", { class: "tasks" });
    for (const task of bucket) {
      const label = task.run_id
        ? `${task.topic_id} / ${task.run_id}`
        : task.topic_id;
      list.append(
        el(
          "li",
          { class: `task task-${task.status}`, "data-task-id": task.task_id },
          el(
            "button",
            { class: "open-task", onclick: () => onOpen(task.task_id) },
            `${label} - ${task.query} [${task.status}]`,
          ),
        ),
      );
    }
    root.append(list);
  }
  return root;
}

function segmentPanel(payload: TaskPayload): HTMLElement {
  const panel = el("details", { class: "segments" });
  panel.append(
    el("summary", {}, `Relevant segments (${payload.segments.length})`),
  );
  for (const segment of payload.segments) {
    panel.append(
      el(
        "blockquote",
        { class: "segment", "data-segment-id": segment.segment_id },
        el("strong", {}, segment.title ?? segment.segment_id),
        el("p", {}, segment.text),
      ),
    );
  }
  return panel;
}

export interface EditorHandlers {
  onChange: () => void;
  onSubmit: () => void;
}

export function editorView(
  payload: TaskPayload,
  buffer: NuggetEditBuffer,
  handlers: EditorHandlers,
): HTMLElement {
  const root = el("div", { class: "editor" });
  root.append(el("h1", {}, payload.query), segmentPanel(payload));

  const rows = el("ol", { class: "nugget-rows" });
  buffer.list().forEach((entry, index) => {
    const textInput = el("input", {
      type: "text",
      value: entry.text,
      class: "nugget-text",
      oninput: (event: Event) => {
        buffer.setText(index, (event.target as HTMLInputElement).value);
        handlers.onChange();
      },
    }) as HTMLInputElement;
    textInput.value = entry.text;

    const importanceButtons = (["vital", "okay"] as const).map((value) =>
      el(
        "button",
        {
          class: `importance ${entry.importance === value ? "selected" : ""}`,
          "data-importance": value,
          onclick: () => {
            buffer.setImportance(index, value);
            handlers.onChange();
          },
        },
        value,
      ),
    );
    rows.append(
      el(
        "li",
        { class: "nugget-row" },
        textInput,
        ...importanceButtons,
        el("button", {
          class: "merge-next",
          title: "Merge with the next nugget",
          onclick: () => {
            buffer.merge(index, index + 1);
            handlers.onChange();
          },
        }, "merge ↓"),
        el("button", {
          class: "move-up",
          onclick: () => {
            buffer.move(index, -1);
            handlers.onChange();
          },
        }, "↑"),
        el("button", {
          class: "move-down",
          onclick: () => {
            buffer.move(index, 1);
            handlers.onChange();
          },
        }, "↓"),
        el("button", {
          class: "delete",
          onclick: () => {
            buffer.remove(index);
            handlers.onChange();
          },
        }, "delete"),
      ),
    );
  });
  root.append(rows);

  root.append(
    el("button", {
      class: "add-nugget",
      onclick: () => {
        buffer.add();
        handlers.onChange();
      },
    }, "Add nugget"),
  );

  const overCap = buffer.size > NUGGET_CAP;
  root.append(
    el(
      "p",
      { class: `counter ${overCap ? "over-cap" : ""}` },
      `${buffer.size} / ${NUGGET_CAP} nuggets`,
    ),
  );

  const problems = buffer.problems();
  if (problems.length > 0) {
    root.append(
      el(
        "ul",
        { class: "problems" },
        ...problems.map((p) => el("li", {}, p)),
      ),
    );
  }

  const submit = el(
    "button",
    { class: "submit", onclick: handlers.onSubmit },
    "Submit nugget list",
  ) as HTMLButtonElement;
  submit.disabled = !buffer.canSubmit;
  root.append(submit);
  return root;
}

export interface AssignmentHandlers {
  onChange: () => void;
  onSubmit: () => void;
}

export function assignmentView(
  payload: TaskPayload,
  board: AssignmentBoard,
  handlers: AssignmentHandlers,
): HTMLElement {
  const root = el("div", { class: "assignment" });
  root.append(
    el("h1", {}, payload.query),
    el(
      "section",
      { class: "answer" },
      el("h2", {}, `Answer from ${payload.answer?.run_id ?? "?"}`),
      el("p", {}, payload.answer?.text ?? ""),
    ),
    el(
      "p",
      { class: "hint" },
      board.readOnly
        ? "Recorded labels (read-only)."
        : "Keys: 1 = support, 2 = partial_support, 3 = not_support; j/k move.",
    ),
  );

  const rows = el("ol", { class: "assignment-rows" });
  board.nuggets.forEach((nugget, index) => {
    const selected = board.label(index);
    const buttons = ASSIGNMENT_LABELS.map((value) => {
      const button = el(
        "button",
        {
          class: `label ${selected === value ? "selected" : ""}`,
          "data-label": value,
          onclick: () => {
            board.setLabel(index, value);
            handlers.onChange();
          },
        },
        value,
      ) as HTMLButtonElement;
      button.disabled = board.readOnly;
      return button;
    });
    rows.append(
      el(
        "li",
        {
          class: `assignment-row ${index === board.cursor ? "focused" : ""}`,
          "data-selected": selected ?? "",
        },
        el("span", { class: "nugget-text" }, nugget.text),
        el("span", { class: "importance-tag" }, `(${nugget.importance})`),
        ...buttons,
      ),
    );
  });
  root.append(rows);

  root.append(
    el(
      "p",
      { class: "progress" },
      `${board.labeledCount} / ${board.nuggets.length} labeled`,
    ),
  );
  const submit = el(
    "button",
    { class: "submit", onclick: handlers.onSubmit },
    "Submit assignment",
  ) as HTMLButtonElement;
  submit.disabled = !board.canSubmit;
  root.append(submit);
  return root;
}
