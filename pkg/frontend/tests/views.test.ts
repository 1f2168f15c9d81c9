import { describe, expect, it } from "vitest";

import { AssignmentBoard } from "../src/assignment.js";
import { NuggetEditBuffer } from "../src/editor.js";
import {
  assignmentView,
  editorView,
  errorBanner,
  taskListView,
} from "../src/views.js";
import type { TaskPayload, TaskSummary } from "../src/types.js";

const summary = (overrides: Partial<TaskSummary> = {}): TaskSummary => ({
  task_id: "edit:t1",
  kind: "edit_nuggets",
  topic_id: "t1",
  query: "how do geysers erupt",
  status: "open",
  assessor_id: null,
  version: 0,
  ...overrides,
});

const editPayload = (drafts: string[]): TaskPayload => ({
  ...summary(),
  segments: [{ segment_id: "s1", title: null, text: "passage text" }],
  drafts,
});

const assignPayload = (n: number, saved?: TaskPayload["saved_labels"]): TaskPayload => ({
  ...summary({ task_id: "assign:r1:t1", kind: "assign", run_id: "r1" }),
  segments: [],
  nuggets: Array.from({ length: n }, (_, i) => ({
    text: `fact ${i}`,
    importance: i % 2 ? "okay" : "vital",
  })),
  answer: { run_id: "r1", text: "the answer text" },
  ...(saved ? { saved_labels: saved } : {}),
});

describe("taskListView", () => {
  it("renders one row per task grouped by kind", () => {
    const view = taskListView(
      [
        summary(),
        summary({ task_id: "edit:t2", topic_id: "t2" }),
        summary({ task_id: "assign:r1:t1", kind: "assign", run_id: "r1" }),
      ],
      () => {},
    );
    expect(view.querySelectorAll("li.task").length).toBe(3);
    expect(view.querySelectorAll("h2").length).toBe(2);
  });

  it("shows an empty state when everything is done", () => {
    const view = taskListView([], () => {});
    expect(view.textContent).toContain("No tasks");
  });

  it("opens a task on click", () => {
    let opened = "";
    const view = taskListView([summary()], (id) => (opened = id));
    (view.querySelector("button.open-task") as HTMLButtonElement).click();
    expect(opened).toBe("edit:t1");
  });
});

describe("errorBanner", () => {
  it("offers a retry without losing anything", () => {
    let retried = 0;
    const banner = errorBanner("connection refused", () => retried++);
    expect(banner.textContent).toContain("Service unreachable");
    (banner.querySelector("button.retry") as HTMLButtonElement).click();
    expect(retried).toBe(1);
  });
});

describe("editorView", () => {
  it("shows drafts, live counter, and a disabled submit", () => {
    const buffer = new NuggetEditBuffer(Array.from({ length: 30 }, (_, i) => `d${i}`));
    const view = editorView(editPayload([]), buffer, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelectorAll("li.nugget-row").length).toBe(30);
    expect(view.querySelector(".counter")?.textContent).toBe("30 / 20 nuggets");
    expect(view.querySelector(".counter")?.className).toContain("over-cap");
    expect((view.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(true);
  });

  it("enables submit once the buffer validates", () => {
    const buffer = new NuggetEditBuffer(["a", "b"]);
    buffer.setImportance(0, "vital");
    buffer.setImportance(1, "okay");
    const view = editorView(editPayload(["a", "b"]), buffer, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect((view.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(false);
  });

  it("lists blocking problems inline", () => {
    const buffer = new NuggetEditBuffer(["a", "a"]);
    const view = editorView(editPayload(["a", "a"]), buffer, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelector(".problems")?.textContent).toContain("duplicate");
  });

  it("shows the relevant segments for consultation", () => {
    const buffer = new NuggetEditBuffer(["a"]);
    const view = editorView(editPayload(["a"]), buffer, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelector(".segments")?.textContent).toContain("passage text");
  });
});

describe("assignmentView", () => {
  it("renders the answer and one selector row per nugget, none selected", () => {
    const board = new AssignmentBoard(assignPayload(14).nuggets!);
    const view = assignmentView(assignPayload(14), board, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelector(".answer")?.textContent).toContain("the answer text");
    expect(view.querySelectorAll("li.assignment-row").length).toBe(14);
    // No automatic labels anywhere: nothing is pre-selected on an open task.
    expect(view.querySelectorAll("button.label.selected").length).toBe(0);
    expect(
      [...view.querySelectorAll("li.assignment-row")].every(
        (row) => row.getAttribute("data-selected") === "",
      ),
    ).toBe(true);
    expect((view.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(true);
  });

  it("submit stays disabled at 13 of 14 labels", () => {
    const payload = assignPayload(14);
    const board = new AssignmentBoard(payload.nuggets!);
    for (let i = 0; i < 13; i++) board.setLabel(i, "support");
    const view = assignmentView(payload, board, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelector(".progress")?.textContent).toBe("13 / 14 labeled");
    expect((view.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(true);
  });

  it("revisiting a done task is read-only with recorded labels", () => {
    const payload = assignPayload(2, ["support", "not_support"]);
    const board = new AssignmentBoard(payload.nuggets!, payload.saved_labels);
    const view = assignmentView(payload, board, {
      onChange: () => {},
      onSubmit: () => {},
    });
    const selected = [...view.querySelectorAll("button.label.selected")];
    expect(selected.map((b) => b.getAttribute("data-label"))).toEqual([
      "support",
      "not_support",
    ]);
    expect(
      [...view.querySelectorAll("button.label")].every(
        (b) => (b as HTMLButtonElement).disabled,
      ),
    ).toBe(true);
    expect((view.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(true);
  });

  it("clicking a label selects it", () => {
    const payload = assignPayload(2);
    const board = new AssignmentBoard(payload.nuggets!);
    let rerenders = 0;
    const view = assignmentView(payload, board, {
      onChange: () => rerenders++,
      onSubmit: () => {},
    });
    const firstRowSupport = view.querySelector(
      'li.assignment-row button[data-label="support"]',
    ) as HTMLButtonElement;
    firstRowSupport.click();
    expect(board.label(0)).toBe("support");
    expect(rerenders).toBe(1);
  });
});
