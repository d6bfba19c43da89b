import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, test } from "vitest";

import { renderSessionToBuffer } from "../src/demo.js";
import type { RenderOptions } from "../src/render2d.js";
import type { SessionDoc } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

// Pinned frame fingerprints for the two demo fixtures. Regenerate only after
// a deliberate renderer change (print the hashes from this test).
const MATRIX_GOLDEN = "2211453374ac7e7d";
const IMAGES_GOLDEN = "770ca6032b3d6fa1";

const MATRIX_OPTIONS: RenderOptions = {
  aggregateMatrixCover: true,
  foreshortenedStrips: true,
};
const IMAGES_OPTIONS: RenderOptions = { gallery: true };

function loadFixture(name: string): SessionDoc {
  const raw = readFileSync(join(HERE, "..", "fixtures", name), "utf-8");
  return JSON.parse(raw) as SessionDoc;
}

describe("golden frames", () => {
  test("matrix demo renders the pinned reference frame", () => {
    const surface = renderSessionToBuffer(loadFixture("matrix_state.json"), MATRIX_OPTIONS);
    expect(surface.frameHash()).toBe(MATRIX_GOLDEN);
  });

  test("image-grid demo renders the pinned reference frame", () => {
    const surface = renderSessionToBuffer(loadFixture("images_state.json"), IMAGES_OPTIONS);
    expect(surface.frameHash()).toBe(IMAGES_GOLDEN);
  });

  test("re-attaching to the same serialized state reproduces the frame", () => {
    // parse twice: a fresh UI attached to the same engine state must produce
    // a pixel-identical frame (the UI holds no piling state of its own)
    const first = renderSessionToBuffer(loadFixture("matrix_state.json"), MATRIX_OPTIONS);
    const second = renderSessionToBuffer(loadFixture("matrix_state.json"), MATRIX_OPTIONS);
    expect(
      Buffer.compare(Buffer.from(second.pixels), Buffer.from(first.pixels)),
    ).toBe(0);
  });

  test("empty state clears the surface", () => {
    const empty: SessionDoc = {
      state: {
        version: "1",
        seed: 0,
        canvas: { width: 64, height: 48, columns: 4, cellAspect: 1, padding: 0 },
        items: [],
        piles: [],
        viewConfig: {},
        epoch: 0,
        zoom: { scale: 1, tx: 0, ty: 0 },
        hover: null,
      },
      styles: {},
      activeDepth: 0,
    };
    const surface = renderSessionToBuffer(empty, { background: "#ffffff" });
    // uniform background everywhere
    for (let i = 0; i < surface.pixels.length; i += 4) {
      expect(surface.pixels[i]).toBe(255);
      expect(surface.pixels[i + 1]).toBe(255);
      expect(surface.pixels[i + 2]).toBe(255);
    }
  });

  test("unknown src draws a placeholder and logs", () => {
    const messages: string[] = [];
    const session: SessionDoc = {
      state: {
        version: "1",
        seed: 0,
        canvas: { width: 64, height: 64, columns: 2, cellAspect: 1, padding: 0 },
        items: [
          { id: "0", src: { kind: "video" }, features: null, metadata: {}, anchor: null },
        ],
        piles: [
          {
            id: 0, itemIds: ["0"], x: 32, y: 32, z: 0, layer: 0,
            dispersed: false, dispersedOffsets: null,
          },
        ],
        viewConfig: {},
        epoch: 0,
        zoom: { scale: 1, tx: 0, ty: 0 },
        hover: null,
      },
      styles: {
        "0": {
          scale: 1, borderSize: 0, borderColor: "#888888", label: "", badges: null,
          offsetMode: "orderly", offsets: [[0, 0, 0]],
          brightness: [0], opacity: [1], tint: ["#ffffff"],
        },
      },
      activeDepth: 0,
    };
    const surface = renderSessionToBuffer(session, { log: (m) => messages.push(m) });
    expect(messages).toHaveLength(1);
    expect(messages[0]).toContain("missing texture");
    expect(surface.frameHash()).not.toBe("");
  });
});
