/** Page wiring: canvas rendering, overlays, and controls.
 *
 * All state lives in UISession; this module draws it and forwards events.
 */

import { Client } from './api.js';
import type { EditMode } from './api.js';
import { UISession } from './session.js';
import type { SessionState } from './session.js';

const OVERLAY_COLOUR = 'rgba(66, 133, 244, 0.45)';
const POINT_COLOURS = { positive: '#22c55e', negative: '#ef4444' } as const;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function dataUrl(pngBase64: string): string {
  return `data:image/png;base64,${pngBase64}`;
}

async function loadBitmap(pngBase64: string): Promise<ImageBitmap> {
  const response = await fetch(dataUrl(pngBase64));
  return createImageBitmap(await response.blob());
}

class Page {
  private readonly client = new Client('');
  private readonly session = new UISession(this.client, (state) => void this.render(state));

  private readonly fileInput = el<HTMLInputElement>('file');
  private readonly canvas = el<HTMLCanvasElement>('canvas');
  private readonly banner = el<HTMLDivElement>('banner');
  private readonly switcher = el<HTMLDivElement>('switcher');
  private readonly promptInput = el<HTMLInputElement>('prompt');
  private readonly seedInput = el<HTMLInputElement>('seed');
  private readonly runButton = el<HTMLButtonElement>('run');
  private readonly clearButton = el<HTMLButtonElement>('clear');
  private readonly resultPane = el<HTMLDivElement>('result');
  private readonly beforeImg = el<HTMLImageElement>('before');
  private readonly afterImg = el<HTMLImageElement>('after');
  private readonly download = el<HTMLAnchorElement>('download');
  private readonly status = el<HTMLSpanElement>('status');

  private sourceBitmap: ImageBitmap | null = null;
  private uploadPng: string | null = null;

  constructor() {
    this.fileInput.addEventListener('change', () => void this.onFile());
    this.canvas.addEventListener('click', (event) => void this.onClick(event));
    this.runButton.addEventListener('click', () => void this.onRun());
    this.clearButton.addEventListener('click', () => this.session.clearPoints());
    this.promptInput.addEventListener('input', () => this.syncRunButton());
    for (const radio of document.querySelectorAll<HTMLInputElement>('input[name=mode]')) {
      radio.addEventListener('change', () => this.syncRunButton());
    }
  }

  private mode(): EditMode {
    const checked = document.querySelector<HTMLInputElement>('input[name=mode]:checked');
    return (checked?.value ?? 'remove') as EditMode;
  }

  private async onFile(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file) {
      return;
    }
    const stage = el<HTMLDivElement>('stage');
    const viewportW = Math.max(stage.clientWidth, 64);
    const viewportH = Math.max(window.innerHeight * 0.6, 64);
    const buf = new Uint8Array(await file.arrayBuffer());
    this.uploadPng = btoa(String.fromCharCode(...buf));
    this.sourceBitmap = null;
    await this.session.upload(file, viewportW, viewportH, file.name);
    if (this.session.state.sessionId && this.uploadPng) {
      this.sourceBitmap = await loadBitmap(this.uploadPng);
      await this.render(this.session.state);
    }
  }

  private async onClick(event: MouseEvent): Promise<void> {
    const rect = this.canvas.getBoundingClientRect();
    await this.session.clickAt(event.clientX - rect.left, event.clientY - rect.top, event.shiftKey);
  }

  private async onRun(): Promise<void> {
    const seedRaw = this.seedInput.value.trim();
    const seed = seedRaw === '' ? undefined : Number(seedRaw);
    await this.session.run(this.mode(), this.promptInput.value, seed);
  }

  private syncRunButton(): void {
    this.runButton.disabled = !this.session.canRun(this.mode(), this.promptInput.value);
  }

  private async render(state: SessionState): Promise<void> {
    this.status.textContent = state.phase;
    this.banner.textContent = state.error ? `${state.error.code}: ${state.error.detail}` : '';
    this.banner.hidden = !state.error;
    this.syncRunButton();

    if (this.sourceBitmap && state.imageWidth > 0) {
      await this.drawStage(state);
    }
    this.renderSwitcher(state);
    await this.renderResult(state);
  }

  private async drawStage(state: SessionState): Promise<void> {
    const scale = state.displayScale;
    this.canvas.width = Math.round(state.imageWidth * scale);
    this.canvas.height = Math.round(state.imageHeight * scale);
    const ctx = this.canvas.getContext('2d');
    if (!ctx || !this.sourceBitmap) {
      return;
    }
    ctx.imageSmoothingEnabled = true;
    ctx.drawImage(this.sourceBitmap, 0, 0, this.canvas.width, this.canvas.height);

    const candidate = this.session.selectedCandidate;
    if (candidate) {
      const mask = await loadBitmap(candidate.mask_png);
      // Tint the mask: draw it, keep only its white pixels, colour them.
      const overlay = document.createElement('canvas');
      overlay.width = this.canvas.width;
      overlay.height = this.canvas.height;
      const octx = overlay.getContext('2d');
      if (octx) {
        octx.drawImage(mask, 0, 0, overlay.width, overlay.height);
        octx.globalCompositeOperation = 'multiply';
        octx.fillStyle = OVERLAY_COLOUR;
        octx.fillRect(0, 0, overlay.width, overlay.height);
        octx.globalCompositeOperation = 'destination-in';
        octx.drawImage(mask, 0, 0, overlay.width, overlay.height);
        ctx.globalAlpha = 0.45;
        ctx.drawImage(overlay, 0, 0);
        ctx.globalAlpha = 1;
      }
    }

    for (const point of state.points) {
      ctx.beginPath();
      ctx.arc(point.x * scale, point.y * scale, 4, 0, 2 * Math.PI);
      ctx.fillStyle = POINT_COLOURS[point.label];
      ctx.fill();
      ctx.strokeStyle = '#ffffff';
      ctx.stroke();
    }
  }

  private renderSwitcher(state: SessionState): void {
    this.switcher.replaceChildren();
    state.candidates.forEach((candidate, index) => {
      const button = document.createElement('button');
      button.textContent = `#${index} score ${candidate.score.toFixed(2)} area ${candidate.area}`;
      button.classList.toggle('selected', index === state.selectedIndex);
      button.addEventListener('click', () => this.session.selectCandidate(index));
      this.switcher.appendChild(button);
    });
  }

  private async renderResult(state: SessionState): Promise<void> {
    if (state.phase !== 'done' || !state.result || !this.uploadPng) {
      this.resultPane.hidden = true;
      return;
    }
    this.resultPane.hidden = false;
    this.beforeImg.src = dataUrl(this.uploadPng);
    this.afterImg.src = dataUrl(state.result.imagePng);
    this.download.href = dataUrl(state.result.imagePng);
    this.download.download = `inpaintkit-${this.mode()}.png`;
  }
}

new Page();
