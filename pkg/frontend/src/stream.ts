// Frame intake with reconnect bookkeeping.
//
// The gateway guarantees frames arrive with strictly increasing seq when a
// client resumes from its last seen seq; this ledger verifies that on the
// client side, drops duplicates, and flags any gap so a reconnect can
// rewind instead of silently losing chat messages.

import type { EventFrame } from "./types.js";

export type FrameOutcome = "applied" | "duplicate" | "gap";

export class FrameLedger {
  frames: EventFrame[] = [];
  gaps: { expected: number; got: number }[] = [];

  get lastSeq(): number {
    return this.frames.length ? this.frames[this.frames.length - 1].seq : 0;
  }

  accept(frame: EventFrame): FrameOutcome {
    const expected = this.lastSeq + 1;
    if (frame.seq <= this.lastSeq) return "duplicate";
    if (frame.seq !== expected) {
      this.gaps.push({ expected, got: frame.seq });
      return "gap";
    }
    this.frames.push(frame);
    return "applied";
  }
}

export interface FrameSocket {
  onFrame(handler: (frame: EventFrame) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export type SocketFactory = (sinceSeq: number) => FrameSocket;

// Keeps one live subscription against the gateway, reconnecting from the
// last applied seq whenever the socket drops. Gap frames trigger an
// immediate reconnect from the ledger's own position, so the stitched
// stream equals an uninterrupted one.
export class ResumingStream {
  readonly ledger = new FrameLedger();
  private socket: FrameSocket | null = null;
  private stopped = false;

  constructor(
    private connect: SocketFactory,
    private onApplied: (frame: EventFrame) => void,
  ) {}

  start(): void {
    this.open();
  }

  private open(): void {
    if (this.stopped) return;
    const socket = this.connect(this.ledger.lastSeq);
    this.socket = socket;
    // close first: a synchronously pumping socket may drop mid-onFrame
    socket.onClose(() => {
      if (!this.stopped && this.ledger.frames.at(-1)?.kind !== "run_completed") {
        this.open();
      }
    });
    socket.onFrame((frame) => {
      const outcome = this.ledger.accept(frame);
      if (outcome === "applied") {
        this.onApplied(frame);
      } else if (outcome === "gap") {
        socket.close();
        this.open();
      }
    });
  }

  stop(): void {
    this.stopped = true;
    this.socket?.close();
  }
}
