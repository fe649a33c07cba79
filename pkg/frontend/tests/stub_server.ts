/** In-memory stand-in for the service: a FetchLike that records requests. */

import type { ClickPoint, FetchLike } from '../src/api.js';

export interface RecordedSegment {
  sessionId: string;
  points: ClickPoint[];
}

// 1x1 white single-channel PNG is not enough: candidate masks must match the
// image dimensions, so the stub is handed a pre-encoded mask per size.
export interface StubOptions {
  width: number;
  height: number;
  maskPngBase64: string;
}

export class StubServer {
  readonly segments: RecordedSegment[] = [];
  readonly executes: unknown[] = [];

  constructor(private readonly options: StubOptions) {}

  get fetch(): FetchLike {
    return async (input, init) => {
      const url = new URL(input, 'http://stub');
      const path = url.pathname;
      if (path === '/api/sessions' && init?.method === 'POST') {
        return json(201, {
          session_id: 'stub-session',
          width: this.options.width,
          height: this.options.height,
        });
      }
      const segmentMatch = path.match(/^\/api\/sessions\/(.+)\/segment$/);
      if (segmentMatch) {
        const body = JSON.parse(String(init?.body)) as { points: ClickPoint[] };
        this.segments.push({ sessionId: segmentMatch[1]!, points: body.points });
        return json(200, {
          candidates: [
            {
              index: 0,
              score: 1.0,
              area: 42,
              bbox: { x0: 0, y0: 0, w: 2, h: 2 },
              mask_png: this.options.maskPngBase64,
            },
          ],
        });
      }
      if (path.match(/^\/api\/sessions\/(.+)\/execute$/)) {
        this.executes.push(JSON.parse(String(init?.body)));
        return json(202, { job_id: 'stub-job' });
      }
      if (path.startsWith('/api/jobs/')) {
        return json(200, {
          job_id: 'stub-job',
          session_id: 'stub-session',
          mode: 'remove',
          status: 'done',
          result: { image_png: '', edit_mask_png: '', timings_ms: {} },
        });
      }
      return json(404, { error: 'UnknownRoute', detail: path });
    };
  }
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}
