/**
 * Wizard flow state: which page is showing, and draft persistence.
 *
 * The server's stage machine is the single source of truth for progress;
 * the client never moves forward except on a successful acknowledgment,
 * and on load it re-reads the session stage rather than trusting whatever
 * page was last shown. Drafts (unsubmitted rows and cells) live in
 * localStorage keyed by session token so a refresh mid-task loses nothing.
 */

import type { Stage } from "./api.js";

export type Page = "consent" | "task1" | "task2" | "profile" | "thanks";

export interface DraftEntry {
  a: string;
  b: string;
  importance: number;
}

export interface Drafts {
  /** Task 1 rows in reading order; index is the entry order. */
  task1: DraftEntry[];
  /** Task 2 cells keyed "row:col" by character index; blank cells absent. */
  task2: Record<string, number>;
}

const TOKEN_KEY = "castnet:token";

function draftsKey(token: string): string {
  return `castnet:drafts:${token}`;
}

export function pageForStage(stage: Stage): Page {
  return stage === "done" ? "thanks" : stage;
}

export function emptyDrafts(): Drafts {
  return { task1: [], task2: {} };
}

export class FlowState {
  page: Page = "consent";
  token = "";
  storyId = "";
  characters: string[] = [];
  drafts: Drafts = emptyDrafts();

  constructor(private readonly storage: Storage) {}

  /** Token of a previously started session, if one is stored. */
  savedToken(): string | null {
    return this.storage.getItem(TOKEN_KEY);
  }

  beginSession(token: string, storyId: string, characters: string[], stage: Stage): void {
    this.token = token;
    this.storyId = storyId;
    this.characters = characters;
    this.page = pageForStage(stage);
    this.storage.setItem(TOKEN_KEY, token);
    this.loadDrafts();
  }

  /** Move to the page for a server-acknowledged stage. */
  acknowledge(stage: Stage): void {
    this.page = pageForStage(stage);
    if (stage === "done") {
      this.storage.removeItem(TOKEN_KEY);
      this.storage.removeItem(draftsKey(this.token));
      this.drafts = emptyDrafts();
    }
  }

  saveDrafts(): void {
    if (!this.token) return;
    this.storage.setItem(draftsKey(this.token), JSON.stringify(this.drafts));
  }

  loadDrafts(): void {
    this.drafts = emptyDrafts();
    if (!this.token) return;
    const raw = this.storage.getItem(draftsKey(this.token));
    if (raw === null) return;
    try {
      const parsed = JSON.parse(raw) as Partial<Drafts>;
      if (Array.isArray(parsed.task1)) this.drafts.task1 = parsed.task1;
      if (parsed.task2 && typeof parsed.task2 === "object") {
        this.drafts.task2 = parsed.task2;
      }
    } catch {
      // corrupt draft; starting clean is the only safe option
    }
  }
}
