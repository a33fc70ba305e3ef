// The digital map: grid nodes, depot/customer labels colored by owning
// truck, dashed pre-collaboration and solid post-collaboration routes,
// live truck markers with motion trails, and clickable layer toggles.
// Rendering is plain SVG produced as a string.

import type { EventFrame, PlanView, ScenarioView } from "./types.js";

export const TRUCK_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

export interface NodeBadge {
  marker: number;
  label: string;
  kind: "depot" | "customer" | "plain";
  color: string;
}

export interface LegendState {
  preRoutes: boolean;
  postRoutes: boolean;
  trails: boolean;
}

export class MapViewModel {
  width: number;
  height: number;
  badges: NodeBadge[] = [];
  truckColor: Record<string, string> = {};
  planPre: PlanView | null = null;
  planPost: PlanView | null = null;
  positions: Record<string, number> = {};
  phases: Record<string, string> = {};
  trails: Record<string, number[]> = {};
  legend: LegendState = { preRoutes: true, postRoutes: true, trails: true };

  constructor(scenario: ScenarioView) {
    this.width = scenario.grid.width;
    this.height = scenario.grid.height;
    const trucksOf: Record<string, string> = {};
    scenario.depots.forEach((depot, i) => {
      const color = TRUCK_COLORS[i % TRUCK_COLORS.length];
      for (const truck of depot.trucks) {
        this.truckColor[truck.alias] = color;
        trucksOf[depot.label] = truck.alias;
      }
      this.badges.push({ marker: depot.marker, label: depot.label, kind: "depot", color });
      for (const truck of depot.trucks) {
        this.positions[truck.alias] = depot.marker;
        this.phases[truck.alias] = "parked";
        this.trails[truck.alias] = [depot.marker];
      }
    });
    const depotColor = Object.fromEntries(
      this.badges.map((badge) => [badge.label, badge.color]),
    );
    for (const customer of scenario.customers) {
      this.badges.push({
        marker: customer.marker,
        label: customer.label,
        kind: "customer",
        color: depotColor[customer.carrier] ?? "#666",
      });
    }
  }

  get nodeCount(): number {
    return this.width * this.height;
  }

  setPlans(pre: PlanView | null, post: PlanView | null): void {
    this.planPre = pre;
    this.planPost = post;
  }

  apply(frame: EventFrame): void {
    if (frame.kind !== "truck_moved") return;
    const truck = String(frame.payload.truck);
    const at = Number(frame.payload.at);
    if (this.positions[truck] !== at) {
      (this.trails[truck] ??= []).push(at);
    }
    this.positions[truck] = at;
    this.phases[truck] = String(frame.payload.phase);
  }

  toggle(layer: keyof LegendState): void {
    this.legend[layer] = !this.legend[layer];
  }

  coord(marker: number): { x: number; y: number } {
    return { x: Math.floor(marker / this.height), y: marker % this.height };
  }
}

const CELL = 90;
const PAD = 50;

function pixel(model: MapViewModel, marker: number): { px: number; py: number } {
  const { x, y } = model.coord(marker);
  // y grows north; SVG y grows down, so flip
  return { px: PAD + x * CELL, py: PAD + (model.height - 1 - y) * CELL };
}

function polyline(model: MapViewModel, route: number[]): string {
  return route
    .map((marker) => {
      const { px, py } = pixel(model, marker);
      return `${px},${py}`;
    })
    .join(" ");
}

function routeLayer(
  model: MapViewModel,
  plan: PlanView,
  dashed: boolean,
  cls: string,
): string {
  const parts: string[] = [];
  for (const [truck, tour] of Object.entries(plan.tours)) {
    if (tour.route.length < 2) continue;
    const color = model.truckColor[truck] ?? "#666";
    const dash = dashed ? ' stroke-dasharray="8 6"' : "";
    parts.push(
      `<polyline class="${cls}" data-truck="${truck}" points="${polyline(model, tour.route)}" ` +
        `fill="none" stroke="${color}" stroke-width="${dashed ? 2 : 4}"` +
        `${dash} opacity="${dashed ? 0.55 : 0.8}"/>`,
    );
  }
  return parts.join("\n");
}

export function renderMapSvg(model: MapViewModel): string {
  const w = PAD * 2 + (model.width - 1) * CELL;
  const h = PAD * 2 + (model.height - 1) * CELL;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${w} ${h}" class="digital-map">`,
  ];
  // grid nodes
  for (let marker = 0; marker < model.nodeCount; marker++) {
    const { px, py } = pixel(model, marker);
    parts.push(
      `<circle class="node" data-marker="${marker}" cx="${px}" cy="${py}" r="5" fill="#bbb"/>`,
      `<text class="node-id" x="${px + 8}" y="${py - 8}" font-size="11" fill="#999">${marker}</text>`,
    );
  }
  if (model.planPre && model.legend.preRoutes) {
    parts.push(routeLayer(model, model.planPre, true, "route-pre"));
  }
  if (model.planPost && model.legend.postRoutes) {
    parts.push(routeLayer(model, model.planPost, false, "route-post"));
  }
  if (!model.planPre && !model.planPost) {
    parts.push(
      `<text class="placeholder" x="${w / 2}" y="${h / 2}" text-anchor="middle" fill="#888">` +
        "waiting for route plans</text>",
    );
  }
  if (model.legend.trails) {
    for (const [truck, trail] of Object.entries(model.trails)) {
      if (trail.length < 2) continue;
      parts.push(
        `<polyline class="trail" data-truck="${truck}" points="${polyline(model, trail)}" ` +
          `fill="none" stroke="${model.truckColor[truck]}" stroke-width="8" opacity="0.18"/>`,
      );
    }
  }
  // labels over routes
  for (const badge of model.badges) {
    const { px, py } = pixel(model, badge.marker);
    const shape =
      badge.kind === "depot"
        ? `<rect class="badge depot" x="${px - 14}" y="${py - 14}" width="28" height="28" fill="${badge.color}" opacity="0.9"/>`
        : `<circle class="badge customer" cx="${px}" cy="${py}" r="12" fill="${badge.color}" opacity="0.75"/>`;
    parts.push(
      shape,
      `<text class="badge-label" x="${px}" y="${py + 4}" text-anchor="middle" font-size="11" fill="#fff">${badge.label}</text>`,
    );
  }
  // live truck markers
  for (const [truck, marker] of Object.entries(model.positions)) {
    const { px, py } = pixel(model, marker);
    parts.push(
      `<circle class="truck" data-truck="${truck}" data-phase="${model.phases[truck]}" ` +
        `cx="${px}" cy="${py - 18}" r="9" fill="${model.truckColor[truck]}" stroke="#222"/>`,
      `<text class="truck-label" x="${px}" y="${py - 14}" text-anchor="middle" font-size="9" fill="#fff">${truck}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}
