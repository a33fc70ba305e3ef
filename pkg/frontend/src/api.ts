// Thin fetch client for the gateway's control API.

import type { RunSummary, ScenarioView, SnapshotView } from "./types.js";

export class GatewayError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function expectJson(response: Response): Promise<any> {
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      // leave the bare status
    }
    throw new GatewayError(response.status, detail);
  }
  if (response.status === 204) return null;
  return response.json();
}

export class GatewayClient {
  constructor(private base: string = "") {}

  async startRun(body: { builtin?: string; scenario?: object; tick_delay_s?: number }) {
    const response = await fetch(`${this.base}/api/runs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return expectJson(response) as Promise<{ run_id: string }>;
  }

  async listRuns(): Promise<RunSummary[]> {
    return (await expectJson(await fetch(`${this.base}/api/runs`))).runs;
  }

  async runSummary(runId: string): Promise<RunSummary> {
    return expectJson(await fetch(`${this.base}/api/runs/${runId}`));
  }

  async runState(runId: string): Promise<SnapshotView> {
    return expectJson(await fetch(`${this.base}/api/runs/${runId}/state`));
  }

  async scenario(name: string): Promise<ScenarioView> {
    return expectJson(await fetch(`${this.base}/api/scenarios/${name}`));
  }

  async setNdsConfig(address: string, nickname = "ns-main"): Promise<void> {
    await expectJson(
      await fetch(`${this.base}/api/nds-config`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ address, nickname }),
      }),
    );
  }

  async getNdsConfig(): Promise<Record<string, string>> {
    return (await expectJson(await fetch(`${this.base}/api/nds-config`))).entries;
  }

  streamUrl(runId: string, since: number): string {
    const root = this.base || (typeof location !== "undefined" ? location.origin : "");
    return `${root.replace(/^http/, "ws")}/ws/runs/${runId}?since=${since}`;
  }
}
