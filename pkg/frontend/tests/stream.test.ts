import { describe, expect, it } from "vitest";

import { FrameLedger, ResumingStream, type FrameSocket } from "../src/stream.js";
import type { EventFrame } from "../src/types.js";

function frame(seq: number, kind: EventFrame["kind"] = "milestone"): EventFrame {
  return { seq, tick: seq, kind, payload: { text: `t${seq}` } };
}

describe("FrameLedger", () => {
  it("applies strictly increasing seqs", () => {
    const ledger = new FrameLedger();
    expect(ledger.accept(frame(1))).toBe("applied");
    expect(ledger.accept(frame(2))).toBe("applied");
    expect(ledger.lastSeq).toBe(2);
  });

  it("drops duplicates and flags gaps", () => {
    const ledger = new FrameLedger();
    ledger.accept(frame(1));
    expect(ledger.accept(frame(1))).toBe("duplicate");
    expect(ledger.accept(frame(3))).toBe("gap");
    expect(ledger.frames.map((f) => f.seq)).toEqual([1]);
    expect(ledger.gaps).toEqual([{ expected: 2, got: 3 }]);
  });
});

// a scripted server: hands out sockets that replay from `since` and can be
// told to drop the connection part-way through
class FakeServer {
  frames: EventFrame[] = [];
  sockets: FakeSocket[] = [];
  dropAfter: number | null = null;

  connect = (since: number): FrameSocket => {
    const socket = new FakeSocket(this, since);
    this.sockets.push(socket);
    return socket;
  };

  publish(f: EventFrame): void {
    this.frames.push(f);
    this.sockets.at(-1)?.pump();
  }
}

class FakeSocket implements FrameSocket {
  private frameHandler: ((f: EventFrame) => void) | null = null;
  private closeHandler: (() => void) | null = null;
  private cursor: number;
  closed = false;
  delivered = 0;

  constructor(private server: FakeServer, since: number) {
    this.cursor = since;
  }

  onFrame(handler: (f: EventFrame) => void): void {
    this.frameHandler = handler;
    this.pump();
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  pump(): void {
    while (!this.closed && this.frameHandler) {
      const next = this.server.frames.find((f) => f.seq === this.cursor + 1);
      if (!next) return;
      if (this.server.dropAfter !== null && this.delivered >= this.server.dropAfter) {
        this.server.dropAfter = null;
        this.close();
        this.closeHandler?.();
        return;
      }
      this.cursor = next.seq;
      this.delivered += 1;
      this.frameHandler(next);
    }
  }

  close(): void {
    this.closed = true;
  }
}

describe("ResumingStream", () => {
  it("stitches dropped connections into a gapless stream", () => {
    const server = new FakeServer();
    for (let seq = 1; seq <= 5; seq++) server.publish(frame(seq));
    const seen: number[] = [];
    server.dropAfter = 2; // connection dies after two frames
    const stream = new ResumingStream(server.connect, (f) => seen.push(f.seq));
    stream.start();
    for (let seq = 6; seq <= 9; seq++) server.publish(frame(seq));
    server.publish(frame(10, "run_completed"));
    expect(seen).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
    // second socket resumed from the ledger's last applied seq
    expect(server.sockets.length).toBe(2);
    stream.stop();
  });

  it("equals an uninterrupted session after reconnects", () => {
    const publishAll = (server: FakeServer) => {
      for (let seq = 1; seq <= 19; seq++) server.publish(frame(seq));
      server.publish(frame(20, "run_completed"));
    };
    const smooth = new FakeServer();
    const smoothSeen: EventFrame[] = [];
    new ResumingStream(smooth.connect, (f) => smoothSeen.push(f)).start();
    publishAll(smooth);

    const choppy = new FakeServer();
    const choppySeen: EventFrame[] = [];
    choppy.dropAfter = 3;
    const stream = new ResumingStream(choppy.connect, (f) => {
      choppySeen.push(f);
      if (choppySeen.length === 9) choppy.dropAfter = 2; // drop again mid-run
    });
    stream.start();
    publishAll(choppy);
    expect(choppySeen).toEqual(smoothSeen);
    expect(choppy.sockets.length).toBeGreaterThan(1);
  });
});
