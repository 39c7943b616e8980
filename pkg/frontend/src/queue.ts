/**
 * Relabel queue workbench: filterable entry list with reason badges, a
 * per-entry open action routing to the editor, and an export trigger.
 */
import { QueueFilter } from "./state.js";
import { Queue, QueueEntry } from "./types.js";

export interface QueueHandlers {
  onOpen?: (entry: QueueEntry) => void;
  onExport?: () => void;
}

export function applyFilter(entries: QueueEntry[], filter: QueueFilter): QueueEntry[] {
  if (filter === "all") return entries;
  return entries.filter((entry) => entry.status === filter);
}

export function renderQueue(
  container: HTMLElement,
  queue: Queue,
  filter: QueueFilter,
  handlers: QueueHandlers = {},
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const toolbar = doc.createElement("div");
  toolbar.className = "queue-toolbar";
  const count = doc.createElement("span");
  const pending = queue.entries.filter((e) => e.status === "Pending").length;
  count.textContent = `${pending} pending of ${queue.entries.length}`;
  const exportButton = doc.createElement("button");
  exportButton.className = "queue-export";
  exportButton.textContent = "Export reviewed";
  if (handlers.onExport) exportButton.addEventListener("click", () => handlers.onExport?.());
  toolbar.append(count, exportButton);

  const list = doc.createElement("ul");
  list.className = "queue-list";
  for (const entry of applyFilter(queue.entries, filter)) {
    const item = doc.createElement("li");
    item.className = "queue-entry";
    item.dataset.frameId = entry.frame_id;
    item.dataset.status = entry.status;

    const reason = doc.createElement("span");
    reason.className = `badge reason-${entry.reason.toLowerCase()}`;
    reason.textContent = entry.reason;
    const label = doc.createElement("span");
    label.textContent = `${entry.video_id} / ${entry.frame_id}`;
    const status = doc.createElement("span");
    status.className = "badge status";
    status.textContent = entry.status;
    item.append(reason, label, status);
    if (handlers.onOpen) item.addEventListener("click", () => handlers.onOpen?.(entry));
    list.appendChild(item);
  }

  container.append(toolbar, list);
}
