/**
 * Figure presets: which CSV columns become which plot series.
 *
 * Rendering is strictly file-based; nothing here recomputes physics.
 */

import { InputError, Table, column, loadTable } from "./csv.js";
import { PlotSpec, Series, renderSvg } from "./svg.js";

export const FIGURE_IDS = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

function levelSeries(table: Table): Series[] {
  const phi = column(table, "phi");
  const levels = table.columns.filter((c) => c.startsWith("level_"));
  if (levels.length === 0) {
    throw new InputError(`${table.name}: required column 'level_0' not found`);
  }
  return levels.map((name) => ({
    label: name,
    x: phi,
    y: column(table, name),
    color: "#1f77b4",
  }));
}

function trajectorySeries(table: Table, names: [string, string][]): Series[] {
  const phi = column(table, "phi");
  return names.map(([name, label], i) => ({
    label,
    x: phi,
    y: column(table, name),
    dashed: i === 1,
  }));
}

function groupedSeries(table: Table, groupBy: string): Series[] {
  const keys = column(table, groupBy);
  const x = column(table, "gamma");
  const y = column(table, "peak_fidelity");
  const uniq = [...new Set(keys)];
  return uniq.map((kv) => ({
    label: `${groupBy}=${kv}`,
    x: x.filter((_, i) => keys[i] === kv),
    y: y.filter((_, i) => keys[i] === kv),
  }));
}

export function buildFigure(figure: FigureId, inDir: string): PlotSpec {
  switch (figure) {
    case "fig1": {
      const t = loadTable(inDir, "spectrum.csv");
      return {
        title: "Energy levels vs hopping phase (symmetric sector)",
        xLabel: "phase (rad)",
        yLabel: "energy (units of J)",
        series: levelSeries(t),
        legend: false,
      };
    }
    case "fig2": {
      const t = loadTable(inDir, "trajectory.csv");
      return {
        title: "Negativities along the preparation passage",
        xLabel: "phase (rad)",
        yLabel: "negativity",
        series: trajectorySeries(t, [
          ["N_G", "global (a|b)"],
          ["N_a1a2_b1b2", "two cavities (a1a2|b1b2)"],
          ["N_a1a2", "bipartite a1-a2"],
        ]),
      };
    }
    case "fig3": {
      const t = loadTable(inDir, "trajectory.csv");
      return {
        title: "Tripartite measures along the passage",
        xLabel: "phase (rad)",
        yLabel: "tangle",
        series: trajectorySeries(t, [
          ["pi_tangle", "residual tangle (pi)"],
          ["geo_mean_tangle", "geometric mean"],
        ]),
      };
    }
    case "fig4":
    case "fig5": {
      const t = loadTable(inDir, "robustness.csv");
      const x = column(t, "t");
      return {
        title:
          figure === "fig4"
            ? "Fidelity decay: independent vs paired photon loss"
            : "Fidelity under dephasing: independent vs paired channel",
        xLabel: "time (1/J)",
        yLabel: "fidelity",
        series: [
          { label: "standard reservoir", x, y: column(t, "fidelity_standard") },
          { label: "engineered reservoir", x, y: column(t, "fidelity_coupled"), dashed: true },
        ],
      };
    }
    case "fig6": {
      const t = loadTable(inDir, "fidelity_vs_gamma.csv");
      const spec: PlotSpec = {
        title: "Peak fidelity vs loss rate",
        xLabel: "loss rate (units of J)",
        yLabel: "peak fidelity",
        series: groupedSeries(t, "k"),
      };
      let inset: Table | null = null;
      try {
        inset = loadTable(inDir, "fidelity_vs_gamma_inset.csv");
      } catch {
        inset = null; // the inset file is optional
      }
      if (inset) {
        spec.inset = {
          series: groupedSeries(inset, "alpha"),
          xLabel: "loss rate",
          yLabel: "peak F",
        };
      }
      return spec;
    }
  }
}

export function renderFigure(figure: FigureId, inDir: string): string {
  return renderSvg(buildFigure(figure, inDir));
}
