import { describe, expect, it } from "vitest";

import { MapViewModel, renderMapSvg } from "../src/mapview.js";
import type { PlanView, ScenarioView } from "../src/types.js";

const scenario: ScenarioView = {
  grid: { width: 5, height: 5 },
  depots: [
    { label: "D1", marker: 0, trucks: [{ alias: "T1" }] },
    { label: "D2", marker: 20, trucks: [{ alias: "T2" }] },
    { label: "D3", marker: 24, trucks: [{ alias: "T3" }] },
  ],
  customers: [
    { label: "C5", marker: 6, carrier: "D1" },
    { label: "C4", marker: 22, carrier: "D2" },
  ],
};

const plans: { pre: PlanView; post: PlanView } = {
  pre: {
    total_blocks: 4,
    tours: { T1: { route: [0, 5, 6, 5, 0], stops: [[6, "order-C5"]], blocks: 4 } },
  },
  post: {
    total_blocks: 4,
    tours: { T1: { route: [0, 1, 6, 1, 0], stops: [[6, "order-C5"]], blocks: 4 } },
  },
};

describe("MapViewModel", () => {
  it("renders width*height nodes", () => {
    const model = new MapViewModel(scenario);
    expect(model.nodeCount).toBe(25);
    const svg = renderMapSvg(model);
    expect(svg.match(/class="node"/g)?.length).toBe(25);
  });

  it("places trucks at their depots initially", () => {
    const model = new MapViewModel(scenario);
    expect(model.positions).toEqual({ T1: 0, T2: 20, T3: 24 });
    expect(Object.values(model.phases).every((p) => p === "parked")).toBe(true);
  });

  it("colors customer badges by their carrier's truck", () => {
    const model = new MapViewModel(scenario);
    const d2 = model.badges.find((b) => b.label === "D2")!;
    const c4 = model.badges.find((b) => b.label === "C4")!;
    expect(c4.color).toBe(d2.color);
    expect(c4.color).toBe(model.truckColor["T2"]);
  });

  it("draws dashed pre-routes and solid post-routes when plans exist", () => {
    const model = new MapViewModel(scenario);
    model.setPlans(plans.pre, plans.post);
    const svg = renderMapSvg(model);
    const pre = svg.split("\n").find((line) => line.includes('class="route-pre"'))!;
    const post = svg.split("\n").find((line) => line.includes('class="route-post"'))!;
    expect(pre).toContain("stroke-dasharray");
    expect(post).not.toContain("stroke-dasharray");
  });

  it("shows a placeholder until plans arrive", () => {
    const model = new MapViewModel(scenario);
    expect(renderMapSvg(model)).toContain("waiting for route plans");
    model.setPlans(plans.pre, plans.post);
    expect(renderMapSvg(model)).not.toContain("waiting for route plans");
  });

  it("legend toggles hide route layers", () => {
    const model = new MapViewModel(scenario);
    model.setPlans(plans.pre, plans.post);
    model.toggle("preRoutes");
    const svg = renderMapSvg(model);
    expect(svg).not.toContain('class="route-pre"');
    expect(svg).toContain('class="route-post"');
    model.toggle("preRoutes");
    expect(renderMapSvg(model)).toContain('class="route-pre"');
  });

  it("advances truck markers and grows trails on truck_moved", () => {
    const model = new MapViewModel(scenario);
    model.apply({ seq: 1, tick: 1, kind: "truck_moved", payload: { truck: "T1", at: 5, phase: "en_route" } });
    model.apply({ seq: 2, tick: 2, kind: "truck_moved", payload: { truck: "T1", at: 6, phase: "serving" } });
    expect(model.positions["T1"]).toBe(6);
    expect(model.phases["T1"]).toBe("serving");
    expect(model.trails["T1"]).toEqual([0, 5, 6]);
    const svg = renderMapSvg(model);
    expect(svg).toContain('data-truck="T1" data-phase="serving"');
  });

  it("phase-only updates do not grow the trail", () => {
    const model = new MapViewModel(scenario);
    model.apply({ seq: 1, tick: 1, kind: "truck_moved", payload: { truck: "T1", at: 0, phase: "done" } });
    expect(model.trails["T1"]).toEqual([0]);
  });

  it("maps markers column-major with south-west origin", () => {
    const model = new MapViewModel(scenario);
    expect(model.coord(0)).toEqual({ x: 0, y: 0 });
    expect(model.coord(24)).toEqual({ x: 4, y: 4 });
    expect(model.coord(11)).toEqual({ x: 2, y: 1 });
  });
});
