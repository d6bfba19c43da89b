/**
 * Shared page wiring for the demo pages: boot from a static fixture or the
 * live HTTP bridge, render frames (with animation-plan tweening), forward
 * gestures, and host the parameter panel.
 */

import { SoftwareCanvas, type Canvas2DLike } from "./canvas2d.js";
import { GestureCapture, attachToCanvas } from "./gestures.js";
import { Panel, type PanelControlSpec } from "./panel.js";
import { render, type RenderOptions } from "./render2d.js";
import { buildRenderSnapshot, type RenderSnapshot } from "./snapshot.js";
import {
  EngineRejection,
  HttpTransport,
  type EngineTransport,
} from "./transport.js";
import type { AnimationPlanDoc, DeltaDoc, OpResult, SessionDoc } from "./types.js";

export function easeCubicInOut(t: number): number {
  if (t < 0.5) return 4 * t * t * t;
  const u = 2 * t - 2;
  return 0.5 * u * u * u + 1;
}

export function applyDelta(session: SessionDoc, result: OpResult): void {
  const delta: DeltaDoc = result.delta;
  const removed = new Set(delta.removedPiles);
  const byId = new Map(session.state.piles.map((p) => [p.id, p]));
  for (const id of removed) byId.delete(id);
  for (const pile of delta.changedPiles) byId.set(pile.id, pile);
  session.state.piles = [...byId.values()].sort((a, b) => a.id - b.id);
  session.state.epoch = delta.epoch;
  session.styles = result.styles;
  session.activeDepth = result.activeDepth;
}

/** Read-only transport over a fixture file: gestures are rejected. */
export class FixtureTransport implements EngineTransport {
  constructor(private readonly session: SessionDoc) {}

  async fetchState(): Promise<SessionDoc> {
    return this.session;
  }

  async apply(): Promise<OpResult> {
    throw new EngineRejection(
      "static fixture is read-only; start the bridge (demo script --serve) for live piling",
    );
  }
}

export interface DemoConfig {
  canvasId: string;
  statusId: string;
  panelId: string;
  fixtureUrl: string;
  bridgeUrl: string;
  renderOptions: RenderOptions;
  controls: PanelControlSpec[];
}

export class DemoApp {
  private session: SessionDoc | null = null;
  private snapshot: RenderSnapshot | null = null;
  private ctx!: CanvasRenderingContext2D;
  private canvas!: HTMLCanvasElement;
  private status!: HTMLElement;
  private animationToken = 0;

  constructor(private readonly config: DemoConfig) {}

  async boot(): Promise<void> {
    this.canvas = document.getElementById(this.config.canvasId) as HTMLCanvasElement;
    this.status = document.getElementById(this.config.statusId) as HTMLElement;
    this.ctx = this.canvas.getContext("2d")!;

    let transport: EngineTransport;
    try {
      transport = new HttpTransport(this.config.bridgeUrl);
      this.session = await transport.fetchState();
      this.note(`live engine at ${this.config.bridgeUrl}`);
    } catch {
      const response = await fetch(this.config.fixtureUrl);
      this.session = (await response.json()) as SessionDoc;
      transport = new FixtureTransport(this.session);
      this.note("static fixture (read-only); start the bridge for live piling");
    }

    this.canvas.width = this.session.state.canvas.width;
    this.canvas.height = this.session.state.canvas.height;

    const capture = new GestureCapture(
      transport,
      (result) => this.onResult(result),
      (error) => this.note(error.message),
    );
    attachToCanvas(this.canvas, capture);
    window.addEventListener("keydown", (ev) => {
      if (ev.key === "Escape") capture.leaveLayer(ev.timeStamp);
    });

    const panel = new Panel(transport, this.config.controls, (session) => {
      this.session = session;
      this.redraw();
    });
    await panel.refresh();
    this.mountPanel(panel);
    this.redraw();
  }

  private onResult(result: OpResult): void {
    if (!this.session) return;
    const plan = result.delta.animationPlan;
    applyDelta(this.session, result);
    if (plan) {
      this.animate(plan);
    } else {
      this.redraw();
    }
  }

  private animate(plan: AnimationPlanDoc): void {
    const token = ++this.animationToken;
    const started = performance.now();
    const step = (): void => {
      if (token !== this.animationToken || !this.session) return;
      const t = Math.min(1, (performance.now() - started) / plan.durationMs);
      const shaped = plan.easing === "linear" ? t : easeCubicInOut(t);
      this.redraw((pileId) => {
        const frame = plan.keyframes[String(pileId)];
        if (!frame) return null;
        return [
          frame.start[0] + (frame.end[0] - frame.start[0]) * shaped,
          frame.start[1] + (frame.end[1] - frame.start[1]) * shaped,
        ];
      });
      if (t < 1) requestAnimationFrame(step);
    };
    requestAnimationFrame(step);
  }

  private redraw(
    positionOverride?: (pileId: number) => [number, number] | null,
  ): void {
    if (!this.session) return;
    this.snapshot = buildRenderSnapshot(this.session);
    if (positionOverride) {
      for (const sprite of this.snapshot.piles) {
        const moved = positionOverride(sprite.pile.id);
        if (moved) {
          sprite.pile = { ...sprite.pile, x: moved[0], y: moved[1] };
        }
      }
    }
    // CanvasRenderingContext2D satisfies Canvas2DLike for the calls we make,
    // but its fillStyle union needs the assertion
    render(
      this.snapshot,
      this.ctx as unknown as Canvas2DLike,
      this.config.renderOptions,
    );
  }

  private note(message: string): void {
    this.status.textContent = message;
  }

  private mountPanel(panel: Panel): void {
    const host = document.getElementById(this.config.panelId)!;
    host.innerHTML = "";
    for (const control of panel.controls.values()) {
      const row = document.createElement("div");
      row.className = "control";
      const label = document.createElement("label");
      label.textContent = control.spec.label ?? control.spec.name;
      row.appendChild(label);

      const error = document.createElement("span");
      error.className = "error";

      if (control.spec.kind === "action") {
        const button = document.createElement("button");
        button.textContent = control.spec.label ?? control.spec.name;
        button.onclick = () => {
          panel.trigger(control.spec.name).then(() => {
            error.textContent = panel.state(control.spec.name).error ?? "";
          });
        };
        row.appendChild(button);
      } else if (control.spec.kind === "select") {
        const select = document.createElement("select");
        for (const option of control.spec.options ?? []) {
          const el = document.createElement("option");
          el.value = String(option);
          el.textContent = String(option);
          select.appendChild(el);
        }
        select.value = String(control.value ?? "");
        select.onchange = () => {
          panel.change(control.spec.name, select.value).then(() => {
            const state = panel.state(control.spec.name);
            error.textContent = state.error ?? "";
            select.value = String(state.value ?? select.value);
          });
        };
        row.appendChild(select);
      } else {
        const input = document.createElement("input");
        input.type = control.spec.kind === "toggle" ? "checkbox" : "range";
        if (control.spec.kind === "slider") {
          input.min = String(control.spec.min ?? 0);
          input.max = String(control.spec.max ?? 100);
          input.step = String(control.spec.step ?? 1);
          input.value = String(control.value ?? control.spec.min ?? 0);
        }
        input.onchange = () => {
          const value =
            control.spec.kind === "toggle" ? input.checked : Number(input.value);
          panel.change(control.spec.name, value).then(() => {
            const state = panel.state(control.spec.name);
            error.textContent = state.error ?? "";
            if (control.spec.kind === "slider" && state.value !== undefined) {
              input.value = String(state.value);
            }
          });
        };
        row.appendChild(input);
      }
      row.appendChild(error);
      host.appendChild(row);
    }
  }
}

/** Render a fixture into a software canvas; powers the golden-frame tests. */
export function renderSessionToBuffer(
  session: SessionDoc,
  options: RenderOptions,
): SoftwareCanvas {
  const snapshot = buildRenderSnapshot(session);
  const surface = new SoftwareCanvas(
    Math.round(snapshot.width),
    Math.round(snapshot.height),
  );
  render(snapshot, surface, options);
  return surface;
}
