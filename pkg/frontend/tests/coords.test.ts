import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import { describe, expect, it } from 'vitest';

import { Client } from '../src/api.js';
import { displayToImage, fitScale } from '../src/coords.js';
import { UISession } from '../src/session.js';
import { StubServer } from './stub_server.js';

const IMAGE_W = 128;
const IMAGE_H = 96;
const MASK_B64 = readFileSync(join(__dirname, 'fixtures', 'mask_128x96.png')).toString('base64');

function makeSession(): { session: UISession; stub: StubServer } {
  const stub = new StubServer({ width: IMAGE_W, height: IMAGE_H, maskPngBase64: MASK_B64 });
  const client = new Client('http://stub', stub.fetch);
  return { session: new UISession(client), stub };
}

async function uploadAtScale(session: UISession, scale: number): Promise<void> {
  // Viewport sized so fitScale lands exactly on the requested scale.
  await session.upload(new Blob([new Uint8Array([1])]), IMAGE_W * scale, IMAGE_H * scale);
  expect(session.state.displayScale).toBeCloseTo(scale, 12);
}

describe('displayToImage', () => {
  it('rounds to the nearest image pixel and drops out-of-bounds clicks', () => {
    expect(displayToImage(10, 20, 1, 100, 100)).toEqual({ x: 10, y: 20 });
    expect(displayToImage(10.6, 20.4, 1, 100, 100)).toEqual({ x: 11, y: 20 });
    expect(displayToImage(-3, 5, 1, 100, 100)).toBeNull();
    expect(displayToImage(99.6, 0, 1, 100, 100)).toBeNull(); // rounds to 100
  });

  it('fitScale fits both axes and may upscale', () => {
    expect(fitScale(128, 96, 64, 48)).toBe(0.5);
    expect(fitScale(128, 96, 256, 192)).toBe(2);
    expect(fitScale(128, 96, 256, 96)).toBe(1);
  });
});

describe('click coordinate round trip against the stub server', () => {
  for (const scale of [0.25, 0.5, 1, 2]) {
    it(`sends image coordinates round(u/s) at display scale ${scale}`, async () => {
      const { session, stub } = makeSession();
      await uploadAtScale(session, scale);

      // A click in the middle of the displayed image.
      const u = 50 * scale;
      const v = 40 * scale;
      await session.clickAt(u, v);

      expect(stub.segments).toHaveLength(1);
      expect(stub.segments[0]!.points).toEqual([
        { x: Math.round(u / scale), y: Math.round(v / scale), label: 'positive' },
      ]);
      expect(stub.segments[0]!.points[0]).toEqual({ x: 50, y: 40, label: 'positive' });
    });

    it(`drops clicks outside the image at display scale ${scale}`, async () => {
      const { session, stub } = makeSession();
      await uploadAtScale(session, scale);

      await session.clickAt(IMAGE_W * scale + 2, 5); // right of the image
      await session.clickAt(5, -scale); // one image pixel above it
      expect(stub.segments).toHaveLength(0);
      expect(session.state.points).toHaveLength(0);
    });
  }

  it('shift-click adds a negative point and re-requests with all points', async () => {
    const { session, stub } = makeSession();
    await uploadAtScale(session, 0.5);

    await session.clickAt(25, 20); // image (50, 40) positive
    await session.clickAt(30, 22, true); // image (60, 44) negative
    expect(stub.segments).toHaveLength(2);
    expect(stub.segments[1]!.points).toEqual([
      { x: 50, y: 40, label: 'positive' },
      { x: 60, y: 44, label: 'negative' },
    ]);
  });

  it('a lone negative point does not hit the server', async () => {
    const { session, stub } = makeSession();
    await uploadAtScale(session, 1);
    await session.clickAt(10, 10, true);
    expect(stub.segments).toHaveLength(0);
  });

  it('switching candidates is client-side only', async () => {
    const { session, stub } = makeSession();
    await uploadAtScale(session, 1);
    await session.clickAt(50, 40);
    const requests = stub.segments.length;
    session.selectCandidate(0);
    expect(stub.segments.length).toBe(requests);
  });

  it('fill cannot run until the prompt is non-empty', async () => {
    const { session } = makeSession();
    await uploadAtScale(session, 1);
    await session.clickAt(50, 40);
    expect(session.state.phase).toBe('masked');
    expect(session.canRun('fill', '')).toBe(false);
    expect(session.canRun('fill', '   ')).toBe(false);
    expect(session.canRun('fill', 'a teddy bear on a bench')).toBe(true);
    expect(session.canRun('remove', '')).toBe(true);
  });
});
