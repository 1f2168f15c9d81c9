/** Application shell: assessor sign-in, task queue, and task routing. */

import { AnnotationApi, ApiError } from "./api.js";
import { AssignmentBoard } from "./assignment.js";
import { el } from "./dom.js";
import { NuggetEditBuffer } from "./editor.js";
import { attachAssignmentKeys } from "./keyboard.js";
import {
  assignmentView,
  editorView,
  errorBanner,
  taskListView,
} from "./views.js";
import type { TaskPayload } from "./types.js";

const ASSESSOR_KEY = "nuggeteval.assessor";

export class App {
  private detachKeys: (() => void) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AnnotationApi = new AnnotationApi(),
  ) {}

  get assessorId(): string {
    return localStorage.getItem(ASSESSOR_KEY) ?? "";
  }

  async start(): Promise<void> {
    if (!this.assessorId) {
      this.renderSignIn();
    } else {
      await this.showQueue();
    }
  }

  private renderSignIn(): void {
    const input = el("input", {
      type: "text",
      placeholder: "assessor id",
      class: "assessor-input",
    }) as HTMLInputElement;
    const go = async () => {
      if (!input.value.trim()) return;
      localStorage.setItem(ASSESSOR_KEY, input.value.trim());
      await this.showQueue();
    };
    this.swap(
      el(
        "div",
        { class: "sign-in" },
        el("h1", {}, "Nugget annotation"),
        input,
        el("button", { class: "sign-in-go", onclick: go }, "Start"),
      ),
    );
  }

  async showQueue(): Promise<void> {
    try {
      const tasks = await this.api.listTasks({ assessor: this.assessorId });
      this.swap(taskListView(tasks, (taskId) => void this.openTask(taskId)));
    } catch (error) {
      this.swap(errorBanner(describe(error), () => void this.showQueue()));
    }
  }

  async openTask(taskId: string): Promise<void> {
    let payload: TaskPayload;
    try {
      payload = await this.api.getTask(taskId);
    } catch (error) {
      this.swap(errorBanner(describe(error), () => void this.openTask(taskId)));
      return;
    }
    if (payload.kind === "assign") {
      this.renderAssignment(payload);
    } else {
      this.renderEditor(payload);
    }
  }

  private renderEditor(payload: TaskPayload): void {
    const buffer = new NuggetEditBuffer(payload.drafts ?? [], payload.saved_nuggets);
    const rerender = () => {
      this.swap(
        this.withNav(
          editorView(payload, buffer, {
            onChange: rerender,
            onSubmit: () => void submit(),
          }),
        ),
      );
    };
    const submit = async () => {
      if (!buffer.canSubmit) return;
      try {
        await this.api.putNuggets(payload.task_id, this.assessorId, buffer.submission());
        await this.showQueue();
      } catch (error) {
        rerender();
        this.root.prepend(inlineProblem(error));
      }
    };
    rerender();
  }

  private renderAssignment(payload: TaskPayload): void {
    const board = new AssignmentBoard(payload.nuggets ?? [], payload.saved_labels);
    const rerender = () => {
      this.swap(
        this.withNav(
          assignmentView(payload, board, {
            onChange: rerender,
            onSubmit: () => void submit(),
          }),
        ),
      );
    };
    const submit = async () => {
      if (!board.canSubmit) return;
      try {
        await this.api.putAssignment(
          payload.task_id,
          this.assessorId,
          board.submission(),
        );
        await this.showQueue();
      } catch (error) {
        rerender();
        this.root.prepend(inlineProblem(error));
      }
    };
    this.detachKeys?.();
    this.detachKeys = attachAssignmentKeys(board, document, rerender);
    rerender();
  }

  private withNav(view: HTMLElement): HTMLElement {
    return el(
      "div",
      {},
      el(
        "nav",
        {},
        el("button", {
          class: "back",
          onclick: () => {
            this.detachKeys?.();
            this.detachKeys = null;
            void this.showQueue();
          },
        }, "← Task queue"),
        el("span", { class: "who" }, ` signed in as ${this.assessorId}`),
      ),
      view,
    );
  }

  private swap(view: HTMLElement): void {
    this.root.replaceChildren(view);
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

function inlineProblem(error: unknown): HTMLElement {
  const detail =
    error instanceof ApiError ? JSON.stringify(error.detail) : describe(error);
  return el("div", { class: "banner banner-reject", role: "alert" }, detail);
}

export function boot(): void {
  const root = document.getElementById("app");
  if (root) {
    void new App(root).start();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
