// Agent chat room state: every message the run produced, in seq order,
// with an optional per-agent filter and a queue of unread milestones for
// the notification area.

import type { EnvelopeView, EventFrame } from "./types.js";

export interface ChatEntry {
  seq: number;
  tick: number;
  sender: string;
  recipient: string;
  msgType: string;
  performative: string;
  summary: string;
}

function summarize(envelope: EnvelopeView): string {
  const p = envelope.payload ?? {};
  switch (envelope.msg_type) {
    case "TransportOrder":
      return `${(p.orders ?? []).length} order(s) submitted`;
    case "RoutePlan":
      return `${(p.tasks ?? []).length} task(s) assigned`;
    case "TransportTask":
      return `route of ${Math.max(0, (p.task?.route?.length ?? 1) - 1)} blocks`;
    case "NoticeOfArrival":
      return `arrived at ${p.marker} for ${p.order_id}`;
    case "ConfirmationOfReceipt":
      return `receipt of ${p.order_id} confirmed`;
    case "DepotArrival":
      return `back at depot (marker ${p.marker})`;
    case "SegmentClaim":
      return `using single-track ${p.segment}`;
    case "SegmentRelease":
      return `freed single-track ${p.segment}`;
    case "FulfilmentComplete":
      return p.truck ? `task ${p.task_id} done` : `carrier ${p.carrier} done`;
    case "DistanceReport":
      return `${p.pre_total} -> ${p.post_total} blocks`;
    case "Error":
      return String(p.error ?? "error");
    default:
      return envelope.msg_type;
  }
}

export class ChatViewModel {
  entries: ChatEntry[] = [];
  unreadMilestones: string[] = [];
  filterAgent: string | null = null;

  apply(frame: EventFrame): void {
    if (frame.kind === "message_sent") {
      const env = frame.payload.envelope as EnvelopeView;
      this.entries.push({
        seq: frame.seq,
        tick: frame.tick,
        sender: env.sender,
        recipient: env.recipient,
        msgType: env.msg_type,
        performative: env.performative,
        summary: summarize(env),
      });
    } else if (frame.kind === "milestone") {
      this.unreadMilestones.push(String(frame.payload.text ?? ""));
    }
  }

  // filtering selects, never reorders
  visible(): ChatEntry[] {
    if (this.filterAgent === null) return [...this.entries];
    const agent = this.filterAgent;
    return this.entries.filter((e) => e.sender === agent || e.recipient === agent);
  }

  agents(): string[] {
    const names = new Set<string>();
    for (const entry of this.entries) {
      names.add(entry.sender);
      names.add(entry.recipient);
    }
    return [...names].sort();
  }

  takeMilestones(): string[] {
    const taken = this.unreadMilestones;
    this.unreadMilestones = [];
    return taken;
  }
}
