/**
 * Transports carry operations to the engine and hand back confirmed results.
 * The UI never mutates piling state locally: it renders whatever the engine
 * confirms, so a transport is the only write path.
 */

import type { EngineOp, OpResult, SessionDoc } from "./types.js";

export class EngineRejection extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EngineRejection";
  }
}

export interface EngineTransport {
  fetchState(): Promise<SessionDoc>;
  apply(op: EngineOp): Promise<OpResult>;
}

/** Talks to the pilecore HTTP bridge. */
export class HttpTransport implements EngineTransport {
  constructor(private readonly baseUrl: string) {}

  async fetchState(): Promise<SessionDoc> {
    const response = await fetch(`${this.baseUrl}/state`);
    if (!response.ok) {
      throw new EngineRejection(`state fetch failed: ${response.status}`);
    }
    return (await response.json()) as SessionDoc;
  }

  async apply(op: EngineOp): Promise<OpResult> {
    const response = await fetch(`${this.baseUrl}/op`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(op),
    });
    if (response.status === 422) {
      const body = (await response.json()) as { detail?: string };
      throw new EngineRejection(body.detail ?? "rejected");
    }
    if (!response.ok) {
      throw new EngineRejection(`operation failed: ${response.status}`);
    }
    return (await response.json()) as OpResult;
  }
}

export interface RecordedOp {
  op: EngineOp;
  sequence: number;
}

/**
 * Instrumented stand-in for tests: records every operation in arrival order
 * and answers with canned results. A rejector can simulate engine-side
 * validation failures; a delay function exercises ordering under async
 * completion.
 */
export class RecordingTransport implements EngineTransport {
  readonly recorded: RecordedOp[] = [];
  private sequence = 0;
  private epoch: number;

  constructor(
    private readonly session: SessionDoc,
    private readonly options: {
      reject?: (op: EngineOp) => string | null;
      delayMs?: (op: EngineOp) => number;
    } = {},
  ) {
    this.epoch = session.state.epoch;
  }

  async fetchState(): Promise<SessionDoc> {
    return this.session;
  }

  async apply(op: EngineOp): Promise<OpResult> {
    const delay = this.options.delayMs?.(op) ?? 0;
    if (delay > 0) {
      await new Promise((resolve) => setTimeout(resolve, delay));
    }
    const reason = this.options.reject?.(op) ?? null;
    this.recorded.push({ op, sequence: this.sequence++ });
    if (reason !== null) {
      throw new EngineRejection(reason);
    }
    this.epoch += 1;
    return {
      delta: {
        epoch: this.epoch,
        changedPiles: [],
        removedPiles: [],
        animationPlan: null,
      },
      styles: this.session.styles,
      activeDepth: this.session.activeDepth,
    };
  }

  ops(): EngineOp[] {
    return this.recorded.map((r) => r.op);
  }
}
