/**
 * Canvas-2D renderer for engine snapshots.
 *
 * Piles draw in ascending z. Every item in a pile draws at its resolved
 * offset (bottom to top in render order, so partial previews peek out under
 * the cover), then the cover decorations follow: border, badges, label bar.
 * Matrix payloads render as exact-grid heatmaps, swatch payloads as solid
 * fills; anything else gets a placeholder tile and a log entry.
 *
 * Optional regimes per demo: cell-wise mean covers and foreshortened strips
 * above the cover for matrix piles, gallery tiles for multi-item piles.
 */

import type { Canvas2DLike } from "./canvas2d.js";
import type { RenderSnapshot, PileSprite } from "./snapshot.js";
import type { ItemDoc, MatrixSrc } from "./types.js";
import { isMatrixSrc, isSwatchSrc } from "./types.js";

export interface RenderOptions {
  background?: string;
  /** replace multi-item matrix-pile covers with the cell-wise mean */
  aggregateMatrixCover?: boolean;
  /** draw one foreshortened strip per non-cover item above the cover */
  foreshortenedStrips?: boolean;
  /** draw multi-item piles as gallery tiles instead of offset previews */
  gallery?: boolean;
  log?: (message: string) => void;
}

export const GALLERY_SIZES = [1, 2, 3, 4, 6, 8, 9] as const;

/** Integer edges that split `total` into `parts`, remainder in the last. */
function edges(total: number, parts: number): number[] {
  const cuts: number[] = [];
  for (let i = 0; i < parts; i++) cuts.push(Math.floor((total * i) / parts));
  cuts.push(total);
  return cuts;
}

/** Slot rectangles (x, y, w, h) tiling a cover exactly; k must be supported. */
export function galleryLayout(
  k: number,
  width: number,
  height: number,
): [number, number, number, number][] {
  if (!GALLERY_SIZES.includes(k as (typeof GALLERY_SIZES)[number])) {
    throw new Error(`unsupported gallery size ${k}`);
  }
  if (k === 1) return [[0, 0, width, height]];
  if (k === 3) {
    const leftW = Math.floor((width * 2) / 3);
    const ys = edges(height, 2);
    return [
      [0, 0, leftW, height],
      [leftW, ys[0], width - leftW, ys[1] - ys[0]],
      [leftW, ys[1], width - leftW, ys[2] - ys[1]],
    ];
  }
  const shape: Record<number, [number, number]> = {
    2: [1, 2],
    4: [2, 2],
    6: [2, 3],
    8: [2, 4],
    9: [3, 3],
  };
  const [rows, cols] = shape[k];
  const xs = edges(width, cols);
  const ys = edges(height, rows);
  const slots: [number, number, number, number][] = [];
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      slots.push([xs[c], ys[r], xs[c + 1] - xs[c], ys[r + 1] - ys[r]]);
    }
  }
  return slots;
}

export function largestSupportedGallery(n: number): number {
  let best = 1;
  for (const k of GALLERY_SIZES) {
    if (k <= n) best = k;
  }
  return best;
}

const MATRIX_VALUE_CEIL = 1.5;

function matrixGray(value: number): string {
  const level = Math.max(0, Math.min(1, value / MATRIX_VALUE_CEIL));
  const channel = Math.round(255 * (1 - level));
  const hex = channel.toString(16).padStart(2, "0");
  return `#${hex}${hex}${hex}`;
}

function meanMatrix(matrices: MatrixSrc[]): MatrixSrc {
  const { rows, cols } = matrices[0];
  const sums = new Array<number>(rows * cols).fill(0);
  for (const m of matrices) {
    for (let i = 0; i < sums.length; i++) sums[i] += m.values[i];
  }
  return {
    kind: "matrix",
    rows,
    cols,
    values: sums.map((v) => v / matrices.length),
  };
}

function drawMatrix(
  ctx: Canvas2DLike,
  src: MatrixSrc,
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  const xs = edges(Math.round(w), src.cols);
  const ys = edges(Math.round(h), src.rows);
  for (let r = 0; r < src.rows; r++) {
    for (let c = 0; c < src.cols; c++) {
      ctx.fillStyle = matrixGray(src.values[r * src.cols + c]);
      ctx.fillRect(
        Math.round(x) + xs[c],
        Math.round(y) + ys[r],
        xs[c + 1] - xs[c],
        ys[r + 1] - ys[r],
      );
    }
  }
}

function drawItemContent(
  ctx: Canvas2DLike,
  item: ItemDoc | undefined,
  x: number,
  y: number,
  w: number,
  h: number,
  options: RenderOptions,
): void {
  if (item && isMatrixSrc(item.src)) {
    drawMatrix(ctx, item.src, x, y, w, h);
    return;
  }
  if (item && isSwatchSrc(item.src)) {
    const { hue, lightness } = item.src;
    ctx.fillStyle = `hsl(${Math.round(hue)}, 70%, ${Math.round(lightness * 100)}%)`;
    ctx.fillRect(x, y, w, h);
    return;
  }
  ctx.fillStyle = "#cccccc";
  ctx.fillRect(x, y, w, h);
  ctx.fillStyle = "#aaaaaa";
  ctx.fillRect(x, y, w / 2, h / 2);
  ctx.fillRect(x + w / 2, y + h / 2, w / 2, h / 2);
  options.log?.(`missing texture for item ${item ? item.id : "<unknown>"}`);
}

function applyItemAdjustments(
  ctx: Canvas2DLike,
  sprite: PileSprite,
  logicalIndex: number,
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  const brightness = sprite.style.brightness[logicalIndex] ?? 0;
  if (brightness !== 0) {
    ctx.fillStyle = brightness > 0 ? "#ffffff" : "#000000";
    const keep = ctx.globalAlpha;
    ctx.globalAlpha = keep * Math.min(1, Math.abs(brightness));
    ctx.fillRect(x, y, w, h);
    ctx.globalAlpha = keep;
  }
  const tint = sprite.style.tint[logicalIndex] ?? "#ffffff";
  if (tint.toLowerCase() !== "#ffffff") {
    ctx.fillStyle = tint;
    const keep = ctx.globalAlpha;
    ctx.globalAlpha = keep * 0.35;
    ctx.fillRect(x, y, w, h);
    ctx.globalAlpha = keep;
  }
}

const BADGE_PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2"];

function badgeColor(key: string): string {
  let hash = 0;
  for (let i = 0; i < key.length; i++) hash = (hash * 31 + key.charCodeAt(i)) >>> 0;
  return BADGE_PALETTE[hash % BADGE_PALETTE.length];
}

function drawBadges(
  ctx: Canvas2DLike,
  badges: Record<string, number>,
  x: number,
  y: number,
  w: number,
): void {
  const total = Object.values(badges).reduce((a, b) => a + b, 0);
  if (total <= 0) return;
  let cursor = x;
  const keys = Object.keys(badges).sort();
  for (const key of keys) {
    const segment = (badges[key] / total) * w;
    ctx.fillStyle = badgeColor(key);
    ctx.fillRect(cursor, y, segment, 6);
    cursor += segment;
  }
}

function drawPile(
  ctx: Canvas2DLike,
  snapshot: RenderSnapshot,
  sprite: PileSprite,
  options: RenderOptions,
): void {
  const { pile, style } = sprite;
  const w = snapshot.itemWidth * style.scale;
  const h = snapshot.itemHeight * style.scale;
  const coverX = pile.x - w / 2;
  const coverY = pile.y - h / 2;
  const logicalIndex = new Map(pile.itemIds.map((id, i) => [id, i]));

  const matrices = pile.itemIds
    .map((id) => snapshot.items.get(id)?.src)
    .filter(isMatrixSrc);
  const allMatrices = matrices.length === pile.itemIds.length;

  const useGallery =
    options.gallery && pile.itemIds.length > 1 && !pile.dispersed;

  if (useGallery) {
    const k = largestSupportedGallery(pile.itemIds.length);
    const slots = galleryLayout(k, Math.round(w), Math.round(h));
    for (let s = 0; s < k; s++) {
      const itemId = pile.itemIds[pile.itemIds.length - 1 - s];
      const item = snapshot.items.get(itemId);
      const [sx, sy, sw, sh] = slots[s];
      ctx.globalAlpha = style.opacity[logicalIndex.get(itemId) ?? 0] ?? 1;
      drawItemContent(ctx, item, coverX + sx, coverY + sy, sw, sh, options);
      applyItemAdjustments(
        ctx, sprite, logicalIndex.get(itemId) ?? 0, coverX + sx, coverY + sy, sw, sh,
      );
    }
    ctx.globalAlpha = 1;
  } else {
    for (const itemId of sprite.renderOrder) {
      const index = logicalIndex.get(itemId) ?? 0;
      const [dx, dy] = sprite.offsets[index] ?? [0, 0, 0];
      const x = pile.x + dx * style.scale - w / 2;
      const y = pile.y + dy * style.scale - h / 2;
      const item = snapshot.items.get(itemId);
      const isCover = itemId === sprite.renderOrder[sprite.renderOrder.length - 1];

      ctx.globalAlpha = style.opacity[index] ?? 1;
      if (
        isCover &&
        options.aggregateMatrixCover &&
        allMatrices &&
        matrices.length > 1 &&
        !pile.dispersed
      ) {
        drawMatrix(ctx, meanMatrix(matrices), x, y, w, h);
      } else {
        drawItemContent(ctx, item, x, y, w, h, options);
      }
      applyItemAdjustments(ctx, sprite, index, x, y, w, h);
    }
    ctx.globalAlpha = 1;

    if (options.foreshortenedStrips && allMatrices && pile.itemIds.length > 1 && !pile.dispersed) {
      const previews = pile.itemIds.slice(0, -1);
      const stripH = Math.max(2, Math.floor(h / Math.max(8, previews.length + 1)));
      previews.forEach((itemId, order) => {
        const src = snapshot.items.get(itemId)?.src;
        if (!isMatrixSrc(src)) return;
        const columnMeans: number[] = [];
        for (let c = 0; c < src.cols; c++) {
          let sum = 0;
          for (let r = 0; r < src.rows; r++) sum += src.values[r * src.cols + c];
          columnMeans.push(sum / src.rows);
        }
        const stripY = coverY - (order + 1) * (stripH + 1);
        const xs = edges(Math.round(w), src.cols);
        for (let c = 0; c < src.cols; c++) {
          ctx.fillStyle = matrixGray(columnMeans[c]);
          ctx.fillRect(Math.round(coverX) + xs[c], stripY, xs[c + 1] - xs[c], stripH);
        }
      });
    }
  }

  if (style.borderSize > 0) {
    ctx.lineWidth = style.borderSize;
    ctx.strokeStyle = style.borderColor;
    ctx.strokeRect(coverX, coverY, w, h);
  }
  if (style.badges) {
    drawBadges(ctx, style.badges, coverX, coverY + h + 2, w);
  }
  if (style.label) {
    ctx.fillStyle = "#333333";
    ctx.fillRect(coverX, coverY + h + 10, Math.min(w, 6 * style.label.length), 3);
  }
}

/** Draw one full frame. An empty snapshot just clears the surface. */
export function render(
  snapshot: RenderSnapshot,
  ctx: Canvas2DLike,
  options: RenderOptions = {},
): void {
  ctx.clearRect(0, 0, snapshot.width, snapshot.height);
  ctx.globalAlpha = 1;
  ctx.fillStyle = options.background ?? "#fafafa";
  ctx.fillRect(0, 0, snapshot.width, snapshot.height);
  for (const sprite of snapshot.piles) {
    drawPile(ctx, snapshot, sprite, options);
  }
}
