/** Matrix-pattern demo page: mean-aggregated covers + foreshortened strips. */

import { DemoApp } from "./demo.js";

const app = new DemoApp({
  canvasId: "piling-canvas",
  statusId: "status",
  panelId: "panel",
  fixtureUrl: "../fixtures/matrix_state.json",
  bridgeUrl: "http://127.0.0.1:8900",
  renderOptions: {
    aggregateMatrixCover: true,
    foreshortenedStrips: true,
    log: (message) => console.warn(message),
  },
  controls: [
    { name: "columns", kind: "slider", min: 2, max: 16, step: 1, label: "columns" },
    { name: "pileBorderSize", kind: "slider", min: 0, max: 6, step: 1, label: "border" },
    {
      name: "groupCluster",
      kind: "action",
      label: "group by cluster",
      action: { op: "groupBy", args: { type: "cluster" } },
    },
    {
      name: "arrangeIndex",
      kind: "action",
      label: "arrange by index",
      action: { op: "arrangeBy", args: { type: "index" } },
    },
  ],
});

app.boot();
