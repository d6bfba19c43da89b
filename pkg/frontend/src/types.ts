/**
 * Wire types for the engine boundary: the serialized state document, resolved
 * styles, and the per-transaction delta. These mirror the engine's JSON
 * schema exactly; the frontend never derives piling state on its own.
 */

export type Scalar = string | number | boolean;

export interface ItemDoc {
  id: string;
  src: unknown;
  features: number[] | null;
  metadata: Record<string, Scalar>;
  anchor: [number, number] | null;
}

export interface PileDoc {
  id: number;
  itemIds: string[];
  x: number;
  y: number;
  z: number;
  layer: number;
  dispersed: boolean;
  dispersedOffsets: [number, number][] | null;
}

export interface CanvasDoc {
  width: number;
  height: number;
  columns: number;
  cellAspect: number;
  padding: number;
}

export interface EngineStateDoc {
  version: string;
  seed: number;
  canvas: CanvasDoc;
  items: ItemDoc[];
  piles: PileDoc[];
  viewConfig: Record<string, unknown>;
  epoch: number;
  zoom: { scale: number; tx: number; ty: number };
  hover: [number, string] | null;
  [extra: string]: unknown;
}

export interface StyleDoc {
  scale: number;
  borderSize: number;
  borderColor: string;
  label: string;
  badges: Record<string, number> | null;
  offsetMode: string;
  offsets: [number, number, number][];
  brightness: number[];
  opacity: number[];
  tint: string[];
}

/** What /state returns and what the demo fixtures store. */
export interface SessionDoc {
  state: EngineStateDoc;
  styles: Record<string, StyleDoc>;
  activeDepth: number;
}

export interface KeyframeDoc {
  start: [number, number];
  end: [number, number];
  startScale: number;
  endScale: number;
}

export interface AnimationPlanDoc {
  durationMs: number;
  easing: string;
  epoch: number;
  keyframes: Record<string, KeyframeDoc>;
}

export interface DeltaDoc {
  epoch: number;
  changedPiles: PileDoc[];
  removedPiles: number[];
  animationPlan: AnimationPlanDoc | null;
}

/** Operation envelope accepted by the bridge's /op endpoint. */
export interface EngineOp {
  op: string;
  args: Record<string, unknown>;
}

export interface OpResult {
  delta: DeltaDoc;
  styles: Record<string, StyleDoc>;
  activeDepth: number;
}

/** Matrix payload convention used by the built-in matrix renderer. */
export interface MatrixSrc {
  kind: "matrix";
  rows: number;
  cols: number;
  values: number[];
}

/** Color-swatch payload convention used by the image-grid demo. */
export interface SwatchSrc {
  kind: "swatch";
  hue: number;
  lightness: number;
  label: string;
}

export function isMatrixSrc(src: unknown): src is MatrixSrc {
  return (
    typeof src === "object" && src !== null && (src as MatrixSrc).kind === "matrix"
  );
}

export function isSwatchSrc(src: unknown): src is SwatchSrc {
  return (
    typeof src === "object" && src !== null && (src as SwatchSrc).kind === "swatch"
  );
}
