/**
 * Parameter panel model: controls bound to view properties or engine actions.
 * Strictly round-trip: a change is sent to the engine, and the displayed
 * value comes from the engine's confirmed state afterwards, never from the
 * control itself. Rejections surface as inline per-control errors.
 */

import { EngineRejection, type EngineTransport } from "./transport.js";
import type { EngineOp, SessionDoc } from "./types.js";

export type ControlKind = "toggle" | "select" | "slider" | "action";

export interface PanelControlSpec {
  name: string;
  kind: ControlKind;
  label?: string;
  options?: (string | number)[];
  min?: number;
  max?: number;
  step?: number;
  /** action controls fire this operation instead of setting a property */
  action?: EngineOp;
}

export interface PanelControlState {
  spec: PanelControlSpec;
  value: unknown;
  error: string | null;
}

const CANVAS_PROPERTIES: Record<string, keyof SessionDoc["state"]["canvas"]> = {
  columns: "columns",
  cellAspect: "cellAspect",
  padding: "padding",
};

function confirmedValue(session: SessionDoc, name: string): unknown {
  if (name in CANVAS_PROPERTIES) {
    return session.state.canvas[CANVAS_PROPERTIES[name]];
  }
  return session.state.viewConfig[name];
}

export class Panel {
  readonly controls: Map<string, PanelControlState> = new Map();

  constructor(
    private readonly transport: EngineTransport,
    specs: PanelControlSpec[],
    private readonly onSession?: (session: SessionDoc) => void,
  ) {
    for (const spec of specs) {
      this.controls.set(spec.name, { spec, value: undefined, error: null });
    }
  }

  /** Pull the engine-confirmed values into every bound control. */
  async refresh(): Promise<SessionDoc> {
    const session = await this.transport.fetchState();
    for (const control of this.controls.values()) {
      if (control.spec.kind !== "action") {
        control.value = confirmedValue(session, control.spec.name);
      }
    }
    this.onSession?.(session);
    return session;
  }

  /** Change a property; the stored value is whatever the engine confirms. */
  async change(name: string, value: unknown): Promise<void> {
    const control = this.controls.get(name);
    if (!control) throw new Error(`no control bound to ${name}`);
    control.error = null;
    try {
      await this.transport.apply({ op: "set", args: { name, value } });
    } catch (error) {
      if (error instanceof EngineRejection) {
        control.error = error.message;
        return;
      }
      throw error;
    }
    await this.refresh();
  }

  /** Fire an action control (groupBy, arrangeBy, ...). */
  async trigger(name: string): Promise<void> {
    const control = this.controls.get(name);
    if (!control || !control.spec.action) throw new Error(`no action bound to ${name}`);
    control.error = null;
    try {
      await this.transport.apply(control.spec.action);
    } catch (error) {
      if (error instanceof EngineRejection) {
        control.error = error.message;
        return;
      }
      throw error;
    }
    await this.refresh();
  }

  state(name: string): PanelControlState {
    const control = this.controls.get(name);
    if (!control) throw new Error(`no control bound to ${name}`);
    return control;
  }
}
