// Types mirroring the service's POST /layout contract, and a client that
// keeps at most one request in flight (a newer request aborts the older).

export type InputKind = "diagram" | "regex" | "bnf" | "layout";
export type WrapMode = "local" | "global";
export type AlignItems = "top" | "center" | "bottom" | "baseline";
export type JustifyContent =
  | "start"
  | "end"
  | "center"
  | "space-between"
  | "space-around"
  | "space-evenly";

export interface LayoutRequestParams {
  target_width: number;
  wrap_mode: WrapMode;
  align_items: AlignItems;
  justify_content: JustifyContent;
  flex_absorb: number;
  gap: number;
}

export interface LayoutRequest {
  source: string;
  input_kind: InputKind;
  params: LayoutRequestParams;
}

export interface LayoutStats {
  min_content: number;
  max_content: number;
  chosen_content: number;
  height: number;
  wrap_penalty: number;
  elapsed_ms: number;
  degraded: boolean;
}

export interface LayoutResponse {
  svg: string;
  stats: LayoutStats | null;
  diagnostics: string[];
}

export interface ErrorResponse {
  error: string;
  min_content?: number;
}

export type LayoutResult =
  | { kind: "ok"; body: LayoutResponse }
  | { kind: "too_narrow"; minContent: number; message: string }
  | { kind: "bad_request"; message: string }
  | { kind: "network"; message: string }
  | { kind: "superseded" };

export type Fetcher = (
  url: string,
  init: { method: string; body: string; signal?: AbortSignal },
) => Promise<{ status: number; text(): Promise<string> }>;

export class LayoutClient {
  private inflight: AbortController | null = null;

  constructor(
    private readonly endpoint: string,
    private readonly fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  /** POST the request; an older in-flight request is aborted. */
  async post(request: LayoutRequest): Promise<LayoutResult> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    let status: number;
    let text: string;
    try {
      const response = await this.fetcher(this.endpoint, {
        method: "POST",
        body: JSON.stringify(request),
        signal: controller.signal,
      });
      status = response.status;
      text = await response.text();
    } catch (err) {
      if (controller.signal.aborted) return { kind: "superseded" };
      return { kind: "network", message: String(err) };
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
    if (controller.signal.aborted) return { kind: "superseded" };
    let body: unknown;
    try {
      body = JSON.parse(text);
    } catch {
      return { kind: "network", message: `unparseable response (${status})` };
    }
    if (status === 200) return { kind: "ok", body: body as LayoutResponse };
    const error = body as ErrorResponse;
    if (status === 422 && typeof error.min_content === "number") {
      return { kind: "too_narrow", minContent: error.min_content, message: error.error };
    }
    return { kind: "bad_request", message: error.error ?? `status ${status}` };
  }
}
