// Shapes of the gateway's wire objects, as consumed by the dashboard.

export interface EventFrame {
  seq: number;
  tick: number;
  kind: "truck_moved" | "message_sent" | "delivery_completed" | "milestone" | "run_completed";
  payload: Record<string, any>;
}

export interface EnvelopeView {
  msg_id: string;
  correlation_id: string | null;
  sender: string;
  recipient: string;
  performative: string;
  msg_type: string;
  payload: Record<string, any>;
  sim_tick: number;
}

export interface TourView {
  route: number[];
  stops: [number, string][];
  blocks: number;
}

export interface PlanView {
  total_blocks: number;
  tours: Record<string, TourView>;
}

export interface RunSummary {
  run_id: string;
  status: string;
  plan_pre: PlanView | null;
  plan_post: PlanView | null;
  reduction: {
    pre_total: number;
    post_total: number;
    reduction: number;
    relative_reduction: number;
  } | null;
  frame_count: number;
}

export interface TruckStateView {
  at: number;
  phase: string;
  cargo: number;
}

export interface SnapshotView {
  seq: number;
  tick: number;
  status: string;
  trucks: Record<string, TruckStateView>;
  deliveries: { order_id: string; customer: string; truck: string }[];
  milestones: string[];
}

export interface ScenarioView {
  grid: { width: number; height: number; single_track?: number[][][] };
  depots: { label: string; marker: number; trucks: { alias: string }[] }[];
  customers: { label: string; marker: number; carrier: string }[];
}
