/** Typed client for the inpaintkit service HTTP API. */

export type PointLabel = 'positive' | 'negative';

export interface ClickPoint {
  x: number;
  y: number;
  label: PointLabel;
}

export interface BBoxView {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

export interface CandidateView {
  index: number;
  score: number;
  area: number;
  bbox: BBoxView;
  mask_png: string; // base64 single-channel PNG, 0/255
}

export interface UploadView {
  session_id: string;
  width: number;
  height: number;
}

export type EditMode = 'remove' | 'fill' | 'replace';

export interface ExecuteBody {
  mode: EditMode;
  mask_index?: number;
  mask_png?: string;
  prompt?: string;
  config?: Record<string, number>;
}

export interface JobResultView {
  image_png: string;
  edit_mask_png: string;
  timings_ms: Record<string, number>;
}

export interface JobView {
  job_id: string;
  session_id: string;
  mode: EditMode;
  status: 'queued' | 'running' | 'done' | 'failed';
  error?: { error: string; detail: string };
  result?: JobResultView;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface PollOptions {
  intervalMs?: number;
  maxIntervalMs?: number;
  timeoutMs?: number;
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'HttpError';
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) code = body.error;
    if (body.detail) detail = String(body.detail);
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, detail);
}

export class Client {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string = '',
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  uploadImage(file: Blob, name = 'upload.png'): Promise<UploadView> {
    const form = new FormData();
    form.append('file', file, name);
    return this.request<UploadView>('/api/sessions', { method: 'POST', body: form });
  }

  segment(sessionId: string, points: ClickPoint[]): Promise<{ candidates: CandidateView[] }> {
    return this.request(`/api/sessions/${sessionId}/segment`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ points }),
    });
  }

  execute(sessionId: string, body: ExecuteBody): Promise<{ job_id: string }> {
    return this.request(`/api/sessions/${sessionId}/execute`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getJob(jobId: string): Promise<JobView> {
    return this.request(`/api/jobs/${jobId}`);
  }

  health(): Promise<{ status: string }> {
    return this.request('/api/health');
  }

  /**
   * Poll a job until it leaves the queue: 1 s interval by default, backing
   * off by 1.5x up to a cap.  Resolves with the terminal job view; a failed
   * job rejects with ApiError carrying the typed error name.
   */
  async pollJob(jobId: string, options: PollOptions = {}): Promise<JobView> {
    const start = Date.now();
    let interval = options.intervalMs ?? 1000;
    const cap = options.maxIntervalMs ?? 5000;
    const timeout = options.timeoutMs ?? 300_000;
    for (;;) {
      const view = await this.getJob(jobId);
      if (view.status === 'done') {
        return view;
      }
      if (view.status === 'failed') {
        throw new ApiError(200, view.error?.error ?? 'JobFailed', view.error?.detail ?? 'job failed');
      }
      if (Date.now() - start > timeout) {
        throw new ApiError(0, 'PollTimeout', `job ${jobId} still ${view.status} after ${timeout}ms`);
      }
      await new Promise((resolve) => setTimeout(resolve, interval));
      interval = Math.min(cap, interval * 1.5);
    }
  }
}
