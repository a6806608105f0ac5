/** Entry point: wire the wizard to the page and the same-origin collector. */

import { CollectorApi } from "./api.js";
import { FlowState } from "./state.js";
import { SurveyWizard } from "./wizard.js";

const DEFAULT_STORY = "the-teacher";

export async function boot(root: HTMLElement): Promise<SurveyWizard> {
  const params = new URLSearchParams(window.location.search);
  const storyId = params.get("story") ?? DEFAULT_STORY;
  const wizard = new SurveyWizard(root, new CollectorApi(""), new FlowState(window.localStorage));
  await wizard.start(storyId);
  return wizard;
}

const root = document.getElementById("app");
if (root !== null) {
  boot(root).catch((err) => {
    root.textContent = `The survey could not start: ${String(err)}`;
  });
}
