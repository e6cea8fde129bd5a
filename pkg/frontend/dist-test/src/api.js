// Types mirroring the service's POST /layout contract, and a client that
// keeps at most one request in flight (a newer request aborts the older).
export class LayoutClient {
    endpoint;
    fetcher;
    inflight = null;
    constructor(endpoint, fetcher = (url, init) => fetch(url, init)) {
        this.endpoint = endpoint;
        this.fetcher = fetcher;
    }
    /** POST the request; an older in-flight request is aborted. */
    async post(request) {
        this.inflight?.abort();
        const controller = new AbortController();
        this.inflight = controller;
        let status;
        let text;
        try {
            const response = await this.fetcher(this.endpoint, {
                method: "POST",
                body: JSON.stringify(request),
                signal: controller.signal,
            });
            status = response.status;
            text = await response.text();
        }
        catch (err) {
            if (controller.signal.aborted)
                return { kind: "superseded" };
            return { kind: "network", message: String(err) };
        }
        finally {
            if (this.inflight === controller)
                this.inflight = null;
        }
        if (controller.signal.aborted)
            return { kind: "superseded" };
        let body;
        try {
            body = JSON.parse(text);
        }
        catch {
            return { kind: "network", message: `unparseable response (${status})` };
        }
        if (status === 200)
            return { kind: "ok", body: body };
        const error = body;
        if (status === 422 && typeof error.min_content === "number") {
            return { kind: "too_narrow", minContent: error.min_content, message: error.error };
        }
        return { kind: "bad_request", message: error.error ?? `status ${status}` };
    }
}
