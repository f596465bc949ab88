/**
 * Browser bootstrap: mount the store onto the page and wire DOM events to
 * store methods. All behavior lives in the store and the pure modules; this
 * file is deliberately the thinnest layer.
 */

import { ApiClient } from "./api.js";
import { selectionToHighlight } from "./canvas.js";
import {
  renderCanvas,
  renderConditionPicker,
  renderPendingTray,
  renderPreview,
  renderRunPanel,
} from "./render.js";
import { SessionStore } from "./state.js";

interface Mount {
  canvas: HTMLElement;
  controls: HTMLElement;
  preview: HTMLElement;
  run: HTMLElement;
  tray: HTMLElement;
}

export async function boot(baseUrl: string, workspaceId: string, mount: Mount) {
  const store = new SessionStore(new ApiClient(baseUrl), workspaceId);

  store.onChange((state) => {
    mount.canvas.innerHTML = renderCanvas(state.optimistic, store.canvasLayout);
    mount.controls.innerHTML =
      renderConditionPicker(store.conditions, state.condition) +
      `<button id="run-now">summarize &amp; grade</button>`;
    mount.preview.innerHTML = renderPreview(state.preview);
    mount.run.innerHTML = renderRunPanel(state.lastRun);
    mount.tray.innerHTML = renderPendingTray(state);
  });

  // Drag: remember the grab offset, let the drop position decide semantics.
  let grabbed: { docId: string; dx: number; dy: number } | null = null;
  mount.canvas.addEventListener("dragstart", (event) => {
    const card = (event.target as HTMLElement).closest<HTMLElement>("[data-doc]");
    if (!card) return;
    const rect = card.getBoundingClientRect();
    grabbed = {
      docId: card.dataset["doc"]!,
      dx: event.clientX - rect.left,
      dy: event.clientY - rect.top,
    };
  });
  mount.canvas.addEventListener("dragover", (event) => event.preventDefault());
  mount.canvas.addEventListener("drop", (event) => {
    event.preventDefault();
    if (!grabbed) return;
    const canvasRect = mount.canvas.getBoundingClientRect();
    void store.dragCardTo(grabbed.docId, {
      x: event.clientX - canvasRect.left - grabbed.dx,
      y: event.clientY - canvasRect.top - grabbed.dy,
    });
    grabbed = null;
  });

  // Selection-based highlighting: mouseup over a card with a live selection
  // becomes an add_highlight whose offsets we compute against the body.
  mount.canvas.addEventListener("mouseup", () => {
    const selection = window.getSelection();
    if (!selection || selection.isCollapsed) return;
    const card = selection.anchorNode?.parentElement?.closest<HTMLElement>("[data-doc]");
    if (!card) return;
    const docId = card.dataset["doc"]!;
    const doc = store.state.optimistic.documents.find((d) => d.id === docId);
    if (!doc) return;
    const text = selection.toString();
    const start = doc.body.indexOf(text);
    if (start < 0) return;
    const edit = selectionToHighlight(store.state.optimistic, docId, start, start + text.length);
    if (edit) void store.submitEdit(edit);
    selection.removeAllRanges();
  });

  mount.controls.addEventListener("change", (event) => {
    const target = event.target as HTMLSelectElement;
    if (target.id === "condition") void store.refreshPreview(target.value);
  });

  document.addEventListener("click", (event) => {
    const id = (event.target as HTMLElement).id;
    if (id === "run-now") void store.runAndDisplay();
    if (id === "retry-run") void store.runAndDisplay();
    if (id === "retry-flush") void store.retryFlush();
  });

  await store.load();
  await store.refreshPreview(store.state.condition);
  return store;
}
