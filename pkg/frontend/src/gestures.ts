/**
 * Maps pointer activity 1:1 onto engine gesture transactions, preserving
 * order even when the transport completes asynchronously (operations are
 * chained, never raced). The engine owns all gesture interpretation: this
 * layer never hit-tests or mutates piles itself.
 */

import type { EngineTransport } from "./transport.js";
import type { OpResult } from "./types.js";

export interface PointerEventLike {
  kind: "down" | "move" | "up" | "dblclick" | "contextmenu" | "wheel";
  x: number;
  y: number;
  timeMs: number;
  /** wheel only: positive scrolls away (zoom out) */
  deltaY?: number;
}

const WHEEL_ZOOM_STEP = 1.1;

export class GestureCapture {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly transport: EngineTransport,
    private readonly onResult?: (result: OpResult) => void,
    private readonly onError?: (error: Error) => void,
  ) {}

  /** Feed one pointer event; unknown kinds are dropped silently. */
  handle(event: PointerEventLike): Promise<void> {
    const args = this.translate(event);
    if (args === null) return this.queue.then(() => undefined);
    return this.submit({ op: "gesture", args });
  }

  /** The context menu's "leave layer" entry. */
  leaveLayer(timeMs: number): Promise<void> {
    return this.submit({
      op: "gesture",
      args: { kind: "contextAction", action: "leave", timeMs },
    });
  }

  private translate(event: PointerEventLike): Record<string, unknown> | null {
    const base = { x: event.x, y: event.y, timeMs: event.timeMs };
    switch (event.kind) {
      case "down":
        return { kind: "pointerDown", ...base };
      case "move":
        return { kind: "pointerMove", ...base };
      case "up":
        return { kind: "pointerUp", ...base };
      case "dblclick":
        return { kind: "doubleClick", ...base };
      case "contextmenu":
        return { kind: "contextAction", action: "browseSeparately", ...base };
      case "wheel": {
        const factor =
          (event.deltaY ?? 0) > 0 ? 1 / WHEEL_ZOOM_STEP : WHEEL_ZOOM_STEP;
        return { kind: "wheelZoom", factor, ...base };
      }
      default:
        return null;
    }
  }

  private submit(op: { op: string; args: Record<string, unknown> }): Promise<void> {
    const next = this.queue.then(async () => {
      try {
        const result = await this.transport.apply(op);
        this.onResult?.(result);
      } catch (error) {
        this.onError?.(error as Error);
      }
    });
    this.queue = next;
    return next;
  }

  /** Resolves once every submitted gesture has been confirmed or rejected. */
  flush(): Promise<unknown> {
    return this.queue;
  }
}

/** Wire a real canvas element's mouse events into a GestureCapture. */
export function attachToCanvas(canvas: HTMLCanvasElement, capture: GestureCapture): void {
  const position = (ev: MouseEvent): { x: number; y: number } => {
    const rect = canvas.getBoundingClientRect();
    return {
      x: ((ev.clientX - rect.left) / rect.width) * canvas.width,
      y: ((ev.clientY - rect.top) / rect.height) * canvas.height,
    };
  };
  canvas.addEventListener("mousedown", (ev) => {
    if (ev.button !== 0) return;
    capture.handle({ kind: "down", ...position(ev), timeMs: ev.timeStamp });
  });
  canvas.addEventListener("mousemove", (ev) => {
    capture.handle({ kind: "move", ...position(ev), timeMs: ev.timeStamp });
  });
  canvas.addEventListener("mouseup", (ev) => {
    if (ev.button !== 0) return;
    capture.handle({ kind: "up", ...position(ev), timeMs: ev.timeStamp });
  });
  canvas.addEventListener("dblclick", (ev) => {
    capture.handle({ kind: "dblclick", ...position(ev), timeMs: ev.timeStamp });
  });
  canvas.addEventListener("contextmenu", (ev) => {
    ev.preventDefault();
    capture.handle({ kind: "contextmenu", ...position(ev), timeMs: ev.timeStamp });
  });
  canvas.addEventListener(
    "wheel",
    (ev) => {
      ev.preventDefault();
      capture.handle({
        kind: "wheel",
        ...position(ev),
        timeMs: ev.timeStamp,
        deltaY: ev.deltaY,
      });
    },
    { passive: false },
  );
}
