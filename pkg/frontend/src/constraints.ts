/**
 * Client-side validation bounds.
 *
 * The server publishes its bounds at /v1/schema; the client applies the
 * same limits before submitting, so a payload the UI lets through is one
 * the collector accepts. FALLBACK_BOUNDS mirrors the server defaults for
 * the brief window before the schema has loaded.
 */

import type { SchemaDoc } from "./api.js";

export interface Bounds {
  task1Min: number;
  task1Max: number;
  task2Min: number;
  task2Max: number;
  ageMin: number;
  ageMax: number;
  backgrounds: string[];
}

export const FALLBACK_BOUNDS: Bounds = {
  task1Min: 1,
  task1Max: 10,
  task2Min: 0,
  task2Max: 10,
  ageMin: 10,
  ageMax: 120,
  backgrounds: ["arts_humanities", "social_science", "science_medical", "other"],
};

export function boundsFromSchema(doc: SchemaDoc): Bounds {
  return {
    task1Min: doc.task1.min,
    task1Max: doc.task1.max,
    task2Min: doc.task2.min,
    task2Max: doc.task2.max,
    ageMin: doc.profile.age_min,
    ageMax: doc.profile.age_max,
    backgrounds: [...doc.academic_backgrounds],
  };
}

/** Error message for a Task 1 row, or null when the row is acceptable. */
export function checkEntry(
  a: string,
  b: string,
  importance: number,
  bounds: Bounds,
): string | null {
  if (!a || !b) return "pick both characters";
  if (a === b) return "pick two different characters";
  if (!Number.isInteger(importance)) return "importance must be a whole number";
  if (importance < bounds.task1Min || importance > bounds.task1Max) {
    return `importance must be between ${bounds.task1Min} and ${bounds.task1Max}`;
  }
  return null;
}

/** Error message for a Task 2 cell, or null. Blank cells never reach here. */
export function checkCell(value: number, bounds: Bounds): string | null {
  if (!Number.isFinite(value) || !Number.isInteger(value)) {
    return "cells take whole numbers only";
  }
  if (value < bounds.task2Min || value > bounds.task2Max) {
    return `cells must be between ${bounds.task2Min} and ${bounds.task2Max}`;
  }
  return null;
}

export interface ProfileDraft {
  gender: string;
  age: number;
  educationLevel: string;
  academicBackground: string;
  contactEmail: string;
}

/** Error message for the profile form, or null. */
export function checkProfile(draft: ProfileDraft, bounds: Bounds): string | null {
  if (!draft.gender.trim()) return "gender is required";
  if (!Number.isInteger(draft.age)) return "age must be a whole number";
  if (draft.age < bounds.ageMin || draft.age > bounds.ageMax) {
    return `age must be between ${bounds.ageMin} and ${bounds.ageMax}`;
  }
  if (!draft.educationLevel.trim()) return "education level is required";
  if (!bounds.backgrounds.includes(draft.academicBackground)) {
    return "pick an academic background from the list";
  }
  return null;
}
