/**
 * A render snapshot is the draw list for one frame, derived purely from the
 * engine's serialized state + resolved styles. It carries no UI-side piling
 * state, so re-attaching to the same serialized session reproduces the same
 * frame bit for bit.
 */

import type { EngineStateDoc, ItemDoc, PileDoc, SessionDoc, StyleDoc } from "./types.js";

export interface PileSprite {
  pile: PileDoc;
  style: StyleDoc;
  /** item draw order, bottom to top, with any hovered item raised */
  renderOrder: string[];
  /** offsets aligned with pile.itemIds (the engine's logical order) */
  offsets: [number, number, number][];
}

export interface RenderSnapshot {
  epoch: number;
  width: number;
  height: number;
  itemWidth: number;
  itemHeight: number;
  items: Map<string, ItemDoc>;
  /** visible piles in ascending z */
  piles: PileSprite[];
}

const FALLBACK_STYLE: StyleDoc = {
  scale: 1,
  borderSize: 1,
  borderColor: "#888888",
  label: "",
  badges: null,
  offsetMode: "orderly",
  offsets: [],
  brightness: [],
  opacity: [],
  tint: [],
};

function renderOrderFor(state: EngineStateDoc, pile: PileDoc): string[] {
  const hover = state.hover;
  if (!hover || hover[0] !== pile.id) return [...pile.itemIds];
  const raised = hover[1];
  return [...pile.itemIds.filter((i) => i !== raised), raised];
}

export function buildRenderSnapshot(session: SessionDoc): RenderSnapshot {
  const { state, styles, activeDepth } = session;
  const canvas = state.canvas;
  const cellWidth = canvas.width / canvas.columns;
  const cellHeight = cellWidth / canvas.cellAspect;
  const items = new Map(state.items.map((item) => [item.id, item]));

  const visible = state.piles
    .filter((p) => p.layer === activeDepth)
    .sort((a, b) => (a.z - b.z) || (a.id - b.id));

  const piles: PileSprite[] = visible.map((pile) => {
    const style = styles[String(pile.id)] ?? FALLBACK_STYLE;
    const offsets =
      pile.dispersed && pile.dispersedOffsets
        ? pile.dispersedOffsets.map(([dx, dy]) => [dx, dy, 0] as [number, number, number])
        : style.offsets.length === pile.itemIds.length
          ? style.offsets
          : pile.itemIds.map(() => [0, 0, 0] as [number, number, number]);
    return { pile, style, renderOrder: renderOrderFor(state, pile), offsets };
  });

  return {
    epoch: state.epoch,
    width: canvas.width,
    height: canvas.height,
    itemWidth: Math.max(cellWidth - canvas.padding, 1),
    itemHeight: Math.max(cellHeight - canvas.padding, 1),
    items,
    piles,
  };
}
