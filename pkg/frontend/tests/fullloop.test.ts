/** Full loop against the real service (mock backends): upload -> click ->
 * mask overlay -> fill with a prompt -> result rendered. */

import { spawn, type ChildProcess } from 'node:child_process';
import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { Client } from '../src/api.js';
import { UISession } from '../src/session.js';
import { base64ToBytes, isPng, pngDimensions } from '../src/png.js';

const PORT = 8000 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;
const SCENE = readFileSync(join(__dirname, 'fixtures', 'scene.png'));

let server: ChildProcess;

async function waitForHealth(client: Client, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const health = await client.health();
      if (health.status === 'ok') {
        return;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error('service did not become healthy');
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
}

beforeAll(async () => {
  server = spawn('python3', ['-m', 'inpaintkit.service', '--port', String(PORT)], {
    stdio: ['ignore', 'pipe', 'pipe'],
  });
  server.stderr?.on('data', () => undefined); // keep the pipe drained
  server.stdout?.on('data', () => undefined);
  await waitForHealth(new Client(BASE));
});

afterAll(() => {
  server?.kill();
});

describe('full loop against the live service', () => {
  it('upload -> click -> overlay -> fill -> rendered result', async () => {
    const client = new Client(BASE);
    const session = new UISession(client);

    // Upload the 128x128 fixture into a half-size viewport (scale 0.5).
    await session.upload(new Blob([new Uint8Array(SCENE)]), 64, 64, 'scene.png');
    expect(session.state.phase).toBe('ready');
    expect(session.state.sessionId).toBeTruthy();
    expect(session.state.imageWidth).toBe(128);
    expect(session.state.imageHeight).toBe(128);
    expect(session.state.displayScale).toBeCloseTo(0.5, 12);

    // Click the square's centre in display space: image (64, 60).
    await session.clickAt(32, 30);
    expect(session.state.phase).toBe('masked');
    expect(session.state.candidates.length).toBeGreaterThanOrEqual(1);

    // The overlay mask decodes to a PNG matching the image dimensions and
    // the reported area of the 20x20 fixture square.
    const candidate = session.selectedCandidate!;
    expect(candidate.score).toBe(1);
    expect(candidate.area).toBe(400);
    expect(candidate.bbox).toEqual({ x0: 54, y0: 50, w: 20, h: 20 });
    const maskBytes = base64ToBytes(candidate.mask_png);
    expect(isPng(maskBytes)).toBe(true);
    expect(pngDimensions(maskBytes)).toEqual({ width: 128, height: 128 });

    // Run fill with a prompt; poll fast for the test.
    const view = await session.run('fill', 'a teddy bear on a bench', 7, {
      intervalMs: 25,
      maxIntervalMs: 100,
      timeoutMs: 30_000,
    });
    expect(view?.status).toBe('done');
    expect(session.state.phase).toBe('done');

    // Rendered result: a decodable PNG of the original dimensions, plus the
    // edit mask and per-stage timings.
    const result = session.state.result!;
    const outBytes = base64ToBytes(result.imagePng);
    expect(isPng(outBytes)).toBe(true);
    expect(pngDimensions(outBytes)).toEqual({ width: 128, height: 128 });
    const editBytes = base64ToBytes(result.editMaskPng);
    expect(pngDimensions(editBytes)).toEqual({ width: 128, height: 128 });
    expect(Object.keys(result.timingsMs)).toContain('backend');
  });

  it('rerunning with a new prompt reuses the session and mask', async () => {
    const client = new Client(BASE);
    const session = new UISession(client);
    await session.upload(new Blob([new Uint8Array(SCENE)]), 128, 128, 'scene.png');
    await session.clickAt(64, 60);
    const sid = session.state.sessionId;

    const first = await session.run('fill', 'a teddy bear on a bench', 7, { intervalMs: 25 });
    const second = await session.run('fill', 'a sports car on a road', 7, { intervalMs: 25 });
    expect(first?.status).toBe('done');
    expect(second?.status).toBe('done');
    expect(session.state.sessionId).toBe(sid);
    expect(first!.job_id).not.toBe(second!.job_id);
  });

  it('surfaces typed job errors inline instead of crashing', async () => {
    const client = new Client(BASE);
    const session = new UISession(client);
    await session.upload(new Blob([new Uint8Array(SCENE)]), 128, 128, 'scene.png');

    // A background click grows the whole field; hole filling closes the
    // square, so removal works on a full-frame hole with no boundary left
    // to fill from and the job fails with a typed error.
    await session.clickAt(5, 5);
    expect(session.state.phase).toBe('masked');
    const view = await session.run('remove', '', undefined, { intervalMs: 25 });
    expect(view).toBeNull();
    expect(session.state.phase).toBe('failed');
    expect(session.state.error?.code).toBe('BackendFailure');
  });
});
