/**
 * Fixed overlay color per landmark class. Severity-bearing classes reuse
 * the report color of the severity they indicate, so a box and the
 * dashboard agree; structural classes get their own hues.
 */
import { COLOR_HEX, LandmarkClass } from "./types.js";

export const CLASS_COLORS: Record<LandmarkClass, string> = {
  ALines: COLOR_HEX.Green,
  BLines: COLOR_HEX.YellowGreen,
  BPatch: COLOR_HEX.Yellow,
  Consolidation: COLOR_HEX.Orange,
  AirBronchogram: COLOR_HEX.Red,
  Pleura: "#1f77b4",
  Rib: "#8c564b",
  Shadow: "#7f7f7f",
};
