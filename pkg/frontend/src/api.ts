/** Thin typed client for the workbench JSON API. */

import { Conflict, ExportedRecord, FieldError, Item, RecordPayload } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public fieldErrors: FieldError[],
    message?: string,
  ) {
    super(message ?? `request failed with status ${status}`);
  }
}

export class NetworkError extends Error {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    return response;
  }

  async listItems(): Promise<Item[]> {
    const response = await this.request("/api/items");
    if (!response.ok) throw new ApiError(response.status, []);
    return response.json();
  }

  async getItem(id: string): Promise<Item> {
    const response = await this.request(`/api/items/${encodeURIComponent(id)}`);
    if (!response.ok) throw new ApiError(response.status, []);
    return response.json();
  }

  async submitRecord(itemId: string, payload: RecordPayload): Promise<{ seq: number }> {
    const response = await this.request(
      `/api/items/${encodeURIComponent(itemId)}/records`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      },
    );
    if (response.status === 201) {
      return response.json();
    }
    if (response.status === 422) {
      const body = await response.json();
      const fields: FieldError[] = (body.detail ?? []).map(
        (d: { loc: string[]; msg: string }) => ({
          field: d.loc[d.loc.length - 1],
          message: d.msg,
        }),
      );
      throw new ApiError(422, fields);
    }
    throw new ApiError(response.status, []);
  }

  async exportRecords(): Promise<ExportedRecord[]> {
    const response = await this.request("/api/export");
    if (!response.ok) throw new ApiError(response.status, []);
    return (await response.json()).records;
  }

  async conflicts(): Promise<Conflict[]> {
    const response = await this.request("/api/conflicts");
    if (!response.ok) throw new ApiError(response.status, []);
    return (await response.json()).conflicts;
  }
}
