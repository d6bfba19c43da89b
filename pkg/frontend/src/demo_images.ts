/** Image-grid grouping demo page: gallery covers over a 2D data arrangement. */

import { DemoApp } from "./demo.js";

const app = new DemoApp({
  canvasId: "piling-canvas",
  statusId: "status",
  panelId: "panel",
  fixtureUrl: "../fixtures/images_state.json",
  bridgeUrl: "http://127.0.0.1:8900",
  renderOptions: {
    gallery: true,
    log: (message) => console.warn(message),
  },
  controls: [
    { name: "columns", kind: "slider", min: 2, max: 12, step: 1, label: "columns" },
    { name: "padding", kind: "slider", min: 0, max: 20, step: 1, label: "padding" },
    {
      name: "groupGrid",
      kind: "action",
      label: "group by grid",
      action: { op: "groupBy", args: { type: "grid" } },
    },
    {
      name: "groupCategory",
      kind: "action",
      label: "group by family",
      action: { op: "groupBy", args: { type: "category", objective: "family" } },
    },
    {
      name: "arrangeData",
      kind: "action",
      label: "arrange by family/size",
      action: {
        op: "arrangeBy",
        args: { type: "data", objective: ["familyIndex", "size"] },
      },
    },
  ],
});

app.boot();
