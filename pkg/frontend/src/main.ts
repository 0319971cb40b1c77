// Browser wiring: one container, rerendered from state on every change,
// with a single delegated click/input handler.

import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { PlacementTestUi } from "./state.js";

const api = new ApiClient("");
const ui = new PlacementTestUi(api);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

function rerender(): void {
  const focused = document.activeElement instanceof HTMLElement ? document.activeElement.id : "";
  root!.innerHTML = renderApp(ui.getState());
  if (focused) document.getElementById(focused)?.focus();
}

ui.subscribe(rerender);

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-action],[data-choice]");
  if (!(target instanceof HTMLElement)) return;
  const choice = target.dataset.choice;
  if (choice) {
    ui.select(choice);
    return;
  }
  switch (target.dataset.action) {
    case "start":
      void ui.start();
      break;
    case "submit":
      void ui.submit();
      break;
    case "retry":
      void ui.retry();
      break;
    case "again":
      window.location.reload();
      break;
  }
});

root.addEventListener("input", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "learner") {
    ui.setLearner((target as HTMLInputElement).value);
  } else if (target.id === "competence") {
    ui.setCompetence((target as HTMLSelectElement).value);
  }
});

rerender();
void ui.loadCompetences();
