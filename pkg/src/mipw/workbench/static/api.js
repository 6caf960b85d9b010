/** Thin typed client for the workbench JSON API. */
export class ApiError extends Error {
    constructor(status, fieldErrors, message) {
        super(message ?? `request failed with status ${status}`);
        this.status = status;
        this.fieldErrors = fieldErrors;
    }
}
export class NetworkError extends Error {
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchFn(this.baseUrl + path, init);
        }
        catch (err) {
            throw new NetworkError(String(err));
        }
        return response;
    }
    async listItems() {
        const response = await this.request("/api/items");
        if (!response.ok)
            throw new ApiError(response.status, []);
        return response.json();
    }
    async getItem(id) {
        const response = await this.request(`/api/items/${encodeURIComponent(id)}`);
        if (!response.ok)
            throw new ApiError(response.status, []);
        return response.json();
    }
    async submitRecord(itemId, payload) {
        const response = await this.request(`/api/items/${encodeURIComponent(itemId)}/records`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
        if (response.status === 201) {
            return response.json();
        }
        if (response.status === 422) {
            const body = await response.json();
            const fields = (body.detail ?? []).map((d) => ({
                field: d.loc[d.loc.length - 1],
                message: d.msg,
            }));
            throw new ApiError(422, fields);
        }
        throw new ApiError(response.status, []);
    }
    async exportRecords() {
        const response = await this.request("/api/export");
        if (!response.ok)
            throw new ApiError(response.status, []);
        return (await response.json()).records;
    }
    async conflicts() {
        const response = await this.request("/api/conflicts");
        if (!response.ok)
            throw new ApiError(response.status, []);
        return (await response.json()).conflicts;
    }
}
