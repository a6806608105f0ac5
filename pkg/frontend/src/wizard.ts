/**
 * Four-page survey wizard: consent, interaction listing (Task 1),
 * pair-rating matrix (Task 2), respondent profile, then a thanks page.
 *
 * Pages advance only on a successful server acknowledgment. Every control
 * is bounded to the published schema, so the client cannot produce a
 * payload the collector would reject; validation failures surface inline.
 */

import { ApiError, CollectorApi, Task1EntryPayload, Task2CellPayload } from "./api.js";
import { Bounds, FALLBACK_BOUNDS, boundsFromSchema, checkCell, checkEntry, checkProfile } from "./constraints.js";
import { FlowState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function cellKey(row: number, col: number): string {
  return `${row}:${col}`;
}

export class SurveyWizard {
  bounds: Bounds = FALLBACK_BOUNDS;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: CollectorApi,
    readonly state: FlowState,
  ) {}

  /** Resume the stored session if one exists, else start a fresh one. */
  async start(storyId: string): Promise<void> {
    try {
      this.bounds = boundsFromSchema(await this.api.getSchema());
    } catch {
      // keep the fallback bounds; the server still enforces its own
    }
    const saved = this.state.savedToken();
    if (saved !== null) {
      try {
        const session = await this.api.getSession(saved);
        this.state.beginSession(saved, session.storyId, session.characters, session.stage);
        this.render();
        return;
      } catch {
        // stale token; fall through to a new session
      }
    }
    const session = await this.api.createSession(storyId);
    this.state.beginSession(session.token, session.storyId, session.characters, session.stage);
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    switch (this.state.page) {
      case "consent":
        this.renderConsent();
        break;
      case "task1":
        this.renderTask1();
        break;
      case "task2":
        this.renderTask2();
        break;
      case "profile":
        this.renderProfile();
        break;
      case "thanks":
        this.renderThanks();
        break;
    }
  }

  private setError(container: HTMLElement, message: string | null): void {
    container.textContent = message ?? "";
    container.hidden = message === null;
  }

  /** Re-read the server's stage after a conflict and realign the page. */
  private async resync(): Promise<void> {
    const session = await this.api.getSession(this.state.token);
    this.state.acknowledge(session.stage);
    this.render();
  }

  private async submitGuarded(container: HTMLElement, send: () => Promise<{ stage: string }>): Promise<void> {
    try {
      const ack = await send();
      this.state.acknowledge(ack.stage as Parameters<FlowState["acknowledge"]>[0]);
      this.render();
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 409) {
          await this.resync();
          return;
        }
        this.setError(container, err.firstMessage());
        return;
      }
      throw err;
    }
  }

  // --- consent -----------------------------------------------------------

  private renderConsent(): void {
    const checkbox = el("input", { type: "checkbox", id: "consent-checkbox" });
    const error = el("div", { class: "error", id: "consent-error" });
    error.hidden = true;
    const button = el("button", { id: "consent-submit", disabled: "" }, "Begin the survey");
    checkbox.addEventListener("change", () => {
      button.disabled = !checkbox.checked;
    });
    button.addEventListener("click", () => {
      void this.submitGuarded(error, () => this.api.submitConsent(this.state.token));
    });
    this.root.append(
      el("section", { id: "consent-page" },
        el("h2", {}, "Consent"),
        el("p", {},
          "You will read a short story and answer questions about which " +
          "characters interact and how important those interactions are. " +
          "Your answers are stored anonymously; an email address is optional " +
          "and kept separate from your answers."),
        el("label", {}, checkbox, " I agree to take part"),
        error,
        button,
      ),
    );
  }

  // --- task 1: interaction listing ----------------------------------------

  private characterSelect(id: string): HTMLSelectElement {
    const select = el("select", { id });
    select.append(el("option", { value: "" }, "choose..."));
    for (const name of this.state.characters) {
      select.append(el("option", { value: name }, name));
    }
    return select;
  }

  private renderTask1(): void {
    const selectA = this.characterSelect("entry-a");
    const selectB = this.characterSelect("entry-b");
    const slider = el("input", {
      type: "range",
      id: "entry-importance",
      min: String(this.bounds.task1Min),
      max: String(this.bounds.task1Max),
      step: "1",
      value: String(this.bounds.task1Min),
    });
    const sliderValue = el("span", { id: "importance-value" }, slider.value);
    slider.addEventListener("input", () => {
      sliderValue.textContent = slider.value;
    });
    const entryError = el("div", { class: "error", id: "entry-error" });
    entryError.hidden = true;
    const submitError = el("div", { class: "error", id: "task1-error" });
    submitError.hidden = true;
    const list = el("ol", { id: "entry-list" });

    const redrawList = () => {
      list.replaceChildren();
      this.state.drafts.task1.forEach((entry, index) => {
        const remove = el("button", { class: "remove-entry", type: "button" }, "remove");
        remove.addEventListener("click", () => {
          this.state.drafts.task1.splice(index, 1);
          this.state.saveDrafts();
          redrawList();
        });
        list.append(
          el("li", {}, `${entry.a} and ${entry.b}: importance ${entry.importance} `, remove),
        );
      });
    };
    redrawList();

    const addButton = el("button", { id: "add-entry", type: "button" }, "Add interaction");
    addButton.addEventListener("click", () => {
      const importance = Number(slider.value);
      const problem = checkEntry(selectA.value, selectB.value, importance, this.bounds);
      this.setError(entryError, problem);
      if (problem !== null) return;
      this.state.drafts.task1.push({ a: selectA.value, b: selectB.value, importance });
      this.state.saveDrafts();
      redrawList();
    });

    const submit = el("button", { id: "submit-task1" }, "Submit interactions");
    submit.addEventListener("click", () => {
      const entries: Task1EntryPayload[] = this.state.drafts.task1.map((entry, index) => ({
        pair: [entry.a, entry.b],
        importance: entry.importance,
        entry_order: index,
      }));
      void this.submitGuarded(submitError, () => this.api.submitTask1(this.state.token, entries));
    });

    this.root.append(
      el("section", { id: "task1-page" },
        el("h2", {}, "Task 1: list the interactions"),
        el("p", {},
          "Work through the story in reading order. For every interaction " +
          "you recognized, add the two characters involved and how important " +
          "the interaction is to the story. The same pair may appear more " +
          "than once."),
        el("div", {},
          selectA, selectB,
          el("label", { for: "entry-importance" }, " importance: "),
          slider, sliderValue, " ", addButton),
        entryError,
        list,
        submitError,
        submit,
      ),
    );
  }

  // --- task 2: rating matrix ----------------------------------------------

  private renderTask2(): void {
    const names = this.state.characters;
    const cellError = el("div", { class: "error", id: "cell-error" });
    cellError.hidden = true;
    const submitError = el("div", { class: "error", id: "task2-error" });
    submitError.hidden = true;

    const table = el("table", { id: "task2-matrix" });
    const header = el("tr", {}, el("th", {}));
    for (let col = 0; col < names.length - 1; col += 1) {
      header.append(el("th", {}, names[col]));
    }
    table.append(header);

    // strict lower triangle: an input exists only where row > column
    for (let row = 1; row < names.length; row += 1) {
      const tr = el("tr", {}, el("th", {}, names[row]));
      for (let col = 0; col < names.length - 1; col += 1) {
        if (col >= row) {
          tr.append(el("td", { class: "void" }));
          continue;
        }
        const input = el("input", {
          type: "number",
          class: "cell",
          min: String(this.bounds.task2Min),
          max: String(this.bounds.task2Max),
          step: "1",
          "data-row": String(row),
          "data-col": String(col),
        });
        const key = cellKey(row, col);
        if (key in this.state.drafts.task2) {
          input.value = String(this.state.drafts.task2[key]);
        }
        input.addEventListener("input", () => {
          if (input.value === "") {
            delete this.state.drafts.task2[key];
            input.classList.remove("invalid");
            this.setError(cellError, null);
            this.state.saveDrafts();
            return;
          }
          const problem = checkCell(Number(input.value), this.bounds);
          this.setError(cellError, problem);
          input.classList.toggle("invalid", problem !== null);
          if (problem === null) {
            this.state.drafts.task2[key] = Number(input.value);
            this.state.saveDrafts();
          }
        });
        tr.append(el("td", {}, input));
      }
      table.append(tr);
    }

    const submit = el("button", { id: "submit-task2" }, "Submit ratings");
    submit.addEventListener("click", () => {
      const cells: Task2CellPayload[] = [];
      let blocked = false;
      table.querySelectorAll<HTMLInputElement>("input.cell").forEach((input) => {
        if (input.value === "") return; // blank submits as 0 by omission
        const value = Number(input.value);
        const problem = checkCell(value, this.bounds);
        if (problem !== null) {
          this.setError(cellError, problem);
          input.classList.add("invalid");
          blocked = true;
          return;
        }
        const row = Number(input.dataset.row);
        const col = Number(input.dataset.col);
        cells.push({ pair: [names[row], names[col]], value });
      });
      if (blocked) return;
      void this.submitGuarded(submitError, () => this.api.submitTask2(this.state.token, cells));
    });

    this.root.append(
      el("section", { id: "task2-page" },
        el("h2", {}, "Task 2: rate every pair"),
        el("p", {},
          "Rate how connected each pair of characters is, from " +
          `${this.bounds.task2Min} (no connection) to ${this.bounds.task2Max}. ` +
          "Leave a cell blank for no connection."),
        table,
        cellError,
        submitError,
        submit,
      ),
    );
  }

  // --- profile -------------------------------------------------------------

  private renderProfile(): void {
    const gender = el("input", { type: "text", id: "profile-gender" });
    const age = el("input", {
      type: "number",
      id: "profile-age",
      min: String(this.bounds.ageMin),
      max: String(this.bounds.ageMax),
      step: "1",
    });
    const education = el("input", { type: "text", id: "profile-education" });
    const background = el("select", { id: "profile-background" });
    for (const value of this.bounds.backgrounds) {
      background.append(el("option", { value }, value.replace(/_/g, " ")));
    }
    const email = el("input", { type: "email", id: "profile-email" });
    const error = el("div", { class: "error", id: "profile-error" });
    error.hidden = true;

    const submit = el("button", { id: "submit-profile" }, "Finish");
    submit.addEventListener("click", () => {
      const draft = {
        gender: gender.value,
        age: Number(age.value),
        educationLevel: education.value,
        academicBackground: background.value,
        contactEmail: email.value,
      };
      const problem = checkProfile(draft, this.bounds);
      this.setError(error, problem);
      if (problem !== null) return;
      void this.submitGuarded(error, () => this.api.submitProfile(this.state.token, {
        gender: draft.gender,
        age: draft.age,
        education_level: draft.educationLevel,
        academic_background: draft.academicBackground,
        ...(draft.contactEmail ? { contact_email: draft.contactEmail } : {}),
      }));
    });

    this.root.append(
      el("section", { id: "profile-page" },
        el("h2", {}, "About you"),
        el("label", {}, "Gender ", gender),
        el("label", {}, "Age ", age),
        el("label", {}, "Highest education level ", education),
        el("label", {}, "Academic background ", background),
        el("label", {}, "Email (optional, for the draw) ", email),
        error,
        submit,
      ),
    );
  }

  // --- thanks ---------------------------------------------------------------

  private renderThanks(): void {
    this.root.append(
      el("section", { id: "thanks-page" },
        el("h2", {}, "Thank you"),
        el("p", {}, "Your answers were recorded. You can close this page."),
      ),
    );
  }
}
