/**
 * Study dashboard: the 14-location color grid, two columns of seven
 * (left lung L1-L7 = locations 1-7, right lung R1-R7 = locations 8-14).
 * Cell colors come verbatim from the report payload.
 */
import { COLOR_HEX, Report } from "./types.js";

export interface DashboardHandlers {
  onSelectLocation?: (location: number) => void;
}

function cellLabel(location: number): string {
  return location <= 7 ? `L${location}` : `R${location - 7}`;
}

export function renderDashboard(
  container: HTMLElement,
  report: Report,
  handlers: DashboardHandlers = {},
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const grid = doc.createElement("div");
  grid.className = "dashboard-grid";

  for (let row = 1; row <= 7; row += 1) {
    for (const location of [row, row + 7]) {
      const result = report.locations[String(location)];
      if (!result) throw new Error(`report is missing location ${location}`);
      const cell = doc.createElement("div");
      cell.className = "dashboard-cell";
      cell.dataset.location = String(location);
      cell.dataset.color = result.color;
      cell.style.backgroundColor = COLOR_HEX[result.color];
      cell.title =
        result.video_severity === null
          ? `${cellLabel(location)}: unscanned`
          : `${cellLabel(location)}: severity ${result.video_severity}`;
      const label = doc.createElement("span");
      label.textContent = cellLabel(location);
      cell.appendChild(label);
      if (handlers.onSelectLocation) {
        cell.addEventListener("click", () => handlers.onSelectLocation?.(location));
      }
      grid.appendChild(cell);
    }
  }
  container.appendChild(grid);
}
