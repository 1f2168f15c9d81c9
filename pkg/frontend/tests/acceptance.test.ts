/**
 * End-to-end acceptance against the real annotation service.
 *
 * A throwaway service instance is spawned as a subprocess; the UI's state
 * objects and API client drive it over HTTP exactly as the browser would.
 * Afterwards the produced files are scored by the evaluation pipeline in a
 * Python subprocess, proving the round trip needs no transformation.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AnnotationApi, ApiError } from "../src/api.js";
import { AssignmentBoard } from "../src/assignment.js";
import { NuggetEditBuffer } from "../src/editor.js";
import { assignmentView } from "../src/views.js";
import type { TaskPayload } from "../src/types.js";

const execFileAsync = promisify(execFile);

const PORT = 8099 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;

let workspace: string;
let server: ChildProcess;
const api = new AnnotationApi(BASE);

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/tasks`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  workspace = mkdtempSync(join(tmpdir(), "nugget-ui-acceptance-"));
  server = spawn(
    "python3",
    [join(__dirname, "fixtures", "serve_annotation.py"), workspace, String(PORT)],
    { stdio: "inherit" },
  );
  await waitForService();
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("UI round trip through the live service", () => {
  it("edits 30 drafts down to 14 labeled nuggets the pipeline can score", async () => {
    const tasks = await api.listTasks({ status: "open" });
    expect(tasks.map((t) => t.task_id)).toContain("edit:q1");

    const payload = await api.getTask("edit:q1");
    expect(payload.drafts).toHaveLength(30);

    const buffer = new NuggetEditBuffer(payload.drafts ?? []);
    while (buffer.size > 14) buffer.remove(buffer.size - 1);
    buffer.list().forEach((_, i) => {
      buffer.setText(i, `final fact ${i}`);
      buffer.setImportance(i, i < 9 ? "vital" : "okay");
    });
    expect(buffer.canSubmit).toBe(true);

    const saved = await api.putNuggets("edit:q1", "casey", buffer.submission());
    expect(saved.version).toBe(1);

    // The workspace file is scored by the real pipeline, untransformed:
    // all 9 vital facts supported, the 5 okay ones not.
    const probe = [
      "import sys",
      "from nuggeteval import formats",
      "from nuggeteval.model import AssignmentLabel, AssignmentRecord, Assigner",
      "from nuggeteval.scorer import score_strict",
      `sets, queries = formats.read_nugget_sets(r'${workspace}/nuggets.jsonl')`,
      "assert len(sets) == 1 and len(sets[0].nuggets) == 14",
      "labels = [AssignmentLabel.SUPPORT] * 9 + [AssignmentLabel.NOT_SUPPORT] * 5",
      "record = AssignmentRecord('sys-a', 'q1', tuple(labels), Assigner.MANUAL)",
      "scores = score_strict(sets[0], record)",
      "assert abs(scores.a_strict - 9 / 14) < 1e-12, scores",
      "assert scores.v_strict == 1.0, scores",
      "print('scored', scores.a_strict, scores.v_strict)",
    ].join("\n");
    const { stdout } = await execFileAsync("python3", ["-c", probe]);
    expect(stdout).toContain("scored");
  }, 30000);

  it("cannot submit an assignment with 13 of 14 labels", async () => {
    const payload: TaskPayload = await api.getTask("assign:sys-a:q1");
    expect(payload.nuggets).toHaveLength(14);

    const board = new AssignmentBoard(payload.nuggets ?? []);
    for (let i = 0; i < 13; i++) board.setLabel(i, "support");
    // Client-side: the submit button is disabled and submission() throws.
    expect(board.canSubmit).toBe(false);
    expect(() => board.submission()).toThrow();

    // Server-side: a forced 13-label request is rejected with 422.
    await expect(
      api.putAssignment("assign:sys-a:q1", "casey", Array(13).fill("support")),
    ).rejects.toMatchObject({ status: 422 });
  });

  it("renders no automatic labels on the manual assignment screen", async () => {
    const payload = await api.getTask("assign:sys-a:q1");
    // The service payload for an open task carries no labels at all.
    expect(payload.saved_labels).toBeUndefined();
    expect(JSON.stringify(payload)).not.toContain('"labels"');

    const board = new AssignmentBoard(payload.nuggets ?? []);
    const view = assignmentView(payload, board, {
      onChange: () => {},
      onSubmit: () => {},
    });
    expect(view.querySelectorAll("button.label.selected").length).toBe(0);
  });

  it("submits a complete assignment and the service records it as manual", async () => {
    const payload = await api.getTask("assign:sys-a:q1");
    const board = new AssignmentBoard(payload.nuggets ?? []);
    for (let i = 0; i < 14; i++) {
      board.setLabel(i, i < 9 ? "support" : "not_support");
    }
    expect(board.canSubmit).toBe(true);
    const saved = await api.putAssignment(
      "assign:sys-a:q1",
      "casey",
      board.submission(),
    );
    expect(saved.version).toBe(1);

    const probe = [
      "from nuggeteval import formats",
      `records = formats.read_assignments(r'${workspace}/assignments.jsonl')`,
      "assert len(records) == 1",
      "assert records[0].assigner.value == 'manual'",
      "assert len(records[0].labels) == 14",
      "print('recorded manual assignment')",
    ].join("\n");
    const { stdout } = await execFileAsync("python3", ["-c", probe]);
    expect(stdout).toContain("recorded manual assignment");
  }, 30000);

  it("enforces assessor continuity over HTTP", async () => {
    await expect(
      api.putAssignment("assign:sys-a:q1", "someone-else", Array(14).fill("support")),
    ).rejects.toMatchObject({ status: 403 });
  });
});
