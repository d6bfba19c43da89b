import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, test } from "vitest";

import { GestureCapture } from "../src/gestures.js";
import { RecordingTransport } from "../src/transport.js";
import type { SessionDoc } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

function fixture(): SessionDoc {
  return JSON.parse(
    readFileSync(join(HERE, "..", "fixtures", "images_state.json"), "utf-8"),
  ) as SessionDoc;
}

describe("gesture capture (instrumented session)", () => {
  test("drag-and-drop forwards down/move/up as engine gestures", async () => {
    const transport = new RecordingTransport(fixture());
    const capture = new GestureCapture(transport);
    capture.handle({ kind: "down", x: 100, y: 120, timeMs: 10 });
    capture.handle({ kind: "move", x: 260, y: 300, timeMs: 20 });
    capture.handle({ kind: "up", x: 260, y: 300, timeMs: 30 });
    await capture.flush();

    const ops = transport.ops();
    expect(ops.map((o) => o.args.kind)).toEqual([
      "pointerDown",
      "pointerMove",
      "pointerUp",
    ]);
    expect(ops[0].args).toMatchObject({ x: 100, y: 120, timeMs: 10 });
    expect(ops[2].args).toMatchObject({ x: 260, y: 300, timeMs: 30 });
  });

  test("lasso path is forwarded 1:1 in order", async () => {
    const transport = new RecordingTransport(fixture());
    const capture = new GestureCapture(transport);
    capture.handle({ kind: "down", x: 10, y: 10, timeMs: 0 });   // empty canvas: arms
    capture.handle({ kind: "down", x: 12, y: 12, timeMs: 50 });  // inside circle: starts
    const path: [number, number][] = [[200, 12], [200, 200], [12, 200]];
    path.forEach(([x, y], i) =>
      capture.handle({ kind: "move", x, y, timeMs: 60 + i }),
    );
    capture.handle({ kind: "up", x: 12, y: 200, timeMs: 100 });
    await capture.flush();

    const kinds = transport.ops().map((o) => o.args.kind);
    expect(kinds).toEqual([
      "pointerDown", "pointerDown",
      "pointerMove", "pointerMove", "pointerMove",
      "pointerUp",
    ]);
  });

  test("double-click and context menu map to their gestures", async () => {
    const transport = new RecordingTransport(fixture());
    const capture = new GestureCapture(transport);
    capture.handle({ kind: "dblclick", x: 80, y: 90, timeMs: 5 });
    capture.handle({ kind: "contextmenu", x: 80, y: 90, timeMs: 8 });
    capture.leaveLayer(12);
    await capture.flush();

    const ops = transport.ops();
    expect(ops[0].args.kind).toBe("doubleClick");
    expect(ops[1].args).toMatchObject({
      kind: "contextAction",
      action: "browseSeparately",
    });
    expect(ops[2].args).toMatchObject({ kind: "contextAction", action: "leave" });
  });

  test("wheel events become multiplicative zooms about the cursor", async () => {
    const transport = new RecordingTransport(fixture());
    const capture = new GestureCapture(transport);
    capture.handle({ kind: "wheel", x: 400, y: 300, timeMs: 1, deltaY: -120 });
    capture.handle({ kind: "wheel", x: 400, y: 300, timeMs: 2, deltaY: 120 });
    await capture.flush();

    const [zoomIn, zoomOut] = transport.ops();
    expect(zoomIn.args.kind).toBe("wheelZoom");
    expect(zoomIn.args.factor as number).toBeGreaterThan(1);
    expect(zoomOut.args.factor as number).toBeLessThan(1);
    expect(zoomIn.args).toMatchObject({ x: 400, y: 300 });
  });

  test("ordering survives slow async transports", async () => {
    const transport = new RecordingTransport(fixture(), {
      // earlier ops complete slower: only queueing keeps the order
      delayMs: (op) => (op.args.kind === "pointerDown" ? 25 : 1),
    });
    const capture = new GestureCapture(transport);
    capture.handle({ kind: "down", x: 1, y: 1, timeMs: 0 });
    capture.handle({ kind: "move", x: 2, y: 2, timeMs: 1 });
    capture.handle({ kind: "up", x: 3, y: 3, timeMs: 2 });
    await capture.flush();

    expect(transport.ops().map((o) => o.args.kind)).toEqual([
      "pointerDown",
      "pointerMove",
      "pointerUp",
    ]);
  });

  test("rejections surface through the error hook without breaking the stream", async () => {
    const errors: string[] = [];
    const transport = new RecordingTransport(fixture(), {
      reject: (op) => (op.args.kind === "pointerMove" ? "nope" : null),
    });
    const capture = new GestureCapture(transport, undefined, (e) => errors.push(e.message));
    capture.handle({ kind: "down", x: 1, y: 1, timeMs: 0 });
    capture.handle({ kind: "move", x: 2, y: 2, timeMs: 1 });
    capture.handle({ kind: "up", x: 3, y: 3, timeMs: 2 });
    await capture.flush();

    expect(errors).toEqual(["nope"]);
    expect(transport.ops()).toHaveLength(3);
  });
});
