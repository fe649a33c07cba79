/** UI session state machine, independent of the DOM.
 *
 * Owns everything the page renders: the uploaded image, accumulated click
 * points, cached segmentation candidates, the selected overlay, and the
 * lifecycle of the one in-flight job.  The rendering layer (main.ts) only
 * reads this state and calls the methods; it never mutates image data
 * itself, so every edited pixel comes back from the service.
 */

import { ApiError, Client } from './api.js';
import type { CandidateView, ClickPoint, EditMode, JobView, PollOptions } from './api.js';
import { displayToImage, fitScale } from './coords.js';
import { base64ToBytes, pngDimensions } from './png.js';

export type Phase =
  | 'empty'
  | 'ready' // image uploaded, no mask yet
  | 'segmenting'
  | 'masked' // candidates available, one selected
  | 'running'
  | 'done'
  | 'failed';

export interface SessionState {
  phase: Phase;
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  /** Display pixels per image pixel. */
  displayScale: number;
  points: ClickPoint[];
  candidates: CandidateView[];
  selectedIndex: number;
  lastJobId: string | null;
  result: { imagePng: string; editMaskPng: string; timingsMs: Record<string, number> } | null;
  /** Typed error name and message for inline display, if any. */
  error: { code: string; detail: string } | null;
}

function initialState(): SessionState {
  return {
    phase: 'empty',
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    displayScale: 1,
    points: [],
    candidates: [],
    selectedIndex: 0,
    lastJobId: null,
    result: null,
    error: null,
  };
}

export class UISession {
  readonly state: SessionState = initialState();
  private onChange: (state: SessionState) => void;
  private segmentInFlight = false;
  private segmentQueued = false;
  private jobInFlight = false;

  constructor(
    private readonly client: Client,
    onChange?: (state: SessionState) => void,
  ) {
    this.onChange = onChange ?? (() => undefined);
  }

  private emit(): void {
    this.onChange(this.state);
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError) {
      this.state.error = { code: error.code, detail: error.message };
    } else {
      this.state.error = { code: 'ClientError', detail: String(error) };
    }
    this.emit();
  }

  /** Upload a file and fit it to the viewport; replaces any previous session. */
  async upload(file: Blob, viewportWidth: number, viewportHeight: number, name = 'upload.png'): Promise<void> {
    Object.assign(this.state, initialState());
    this.emit();
    try {
      const view = await this.client.uploadImage(file, name);
      this.state.sessionId = view.session_id;
      this.state.imageWidth = view.width;
      this.state.imageHeight = view.height;
      this.state.displayScale = fitScale(view.width, view.height, viewportWidth, viewportHeight);
      this.state.phase = 'ready';
      this.state.error = null;
    } catch (error) {
      this.state.phase = 'empty';
      this.fail(error);
      return;
    }
    this.emit();
  }

  /**
   * Handle a canvas click in display coordinates.  Out-of-bounds clicks are
   * ignored; in-bounds ones accumulate (shift adds a negative point) and
   * trigger a segmentation request, merged while one is already in flight.
   */
  async clickAt(u: number, v: number, negative = false): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    const point = displayToImage(
      u,
      v,
      this.state.displayScale,
      this.state.imageWidth,
      this.state.imageHeight,
    );
    if (point === null) {
      return;
    }
    this.state.points.push({ ...point, label: negative ? 'negative' : 'positive' });
    await this.requestSegmentation();
  }

  clearPoints(): void {
    this.state.points = [];
    this.state.candidates = [];
    this.state.selectedIndex = 0;
    if (this.state.phase === 'masked' || this.state.phase === 'segmenting') {
      this.state.phase = 'ready';
    }
    this.emit();
  }

  private async requestSegmentation(): Promise<void> {
    if (!this.state.points.some((p) => p.label === 'positive')) {
      return; // the server requires at least one positive point
    }
    if (this.segmentInFlight) {
      this.segmentQueued = true; // debounce: re-request once with the latest points
      return;
    }
    this.segmentInFlight = true;
    this.state.phase = 'segmenting';
    this.state.error = null;
    this.emit();
    try {
      const sessionId = this.state.sessionId;
      if (!sessionId) {
        return;
      }
      const { candidates } = await this.client.segment(sessionId, [...this.state.points]);
      this.validateCandidates(candidates);
      this.state.candidates = candidates;
      this.state.selectedIndex = 0;
      this.state.phase = 'masked';
      this.emit();
    } catch (error) {
      this.state.phase = this.state.candidates.length > 0 ? 'masked' : 'ready';
      this.fail(error);
    } finally {
      this.segmentInFlight = false;
      if (this.segmentQueued) {
        this.segmentQueued = false;
        await this.requestSegmentation();
      }
    }
  }

  private validateCandidates(candidates: CandidateView[]): void {
    for (const candidate of candidates) {
      const dims = pngDimensions(base64ToBytes(candidate.mask_png));
      if (!dims || dims.width !== this.state.imageWidth || dims.height !== this.state.imageHeight) {
        throw new ApiError(0, 'BadMask', 'candidate mask does not match the image dimensions');
      }
    }
  }

  /** Swap the rendered overlay; pure client-side, no request. */
  selectCandidate(index: number): void {
    if (index >= 0 && index < this.state.candidates.length) {
      this.state.selectedIndex = index;
      this.emit();
    }
  }

  get selectedCandidate(): CandidateView | null {
    return this.state.candidates[this.state.selectedIndex] ?? null;
  }

  /** Fill and replace need a prompt; remove is always runnable on a mask. */
  canRun(mode: EditMode, prompt: string): boolean {
    if (this.state.phase !== 'masked' && this.state.phase !== 'done' && this.state.phase !== 'failed') {
      return false;
    }
    if (this.state.candidates.length === 0 || this.jobInFlight) {
      return false;
    }
    if (mode === 'fill' || mode === 'replace') {
      return prompt.trim().length > 0;
    }
    return true;
  }

  /**
   * Execute the selected candidate in the given mode and poll to completion.
   * At most one job is in flight per session; reruns reuse the session and
   * mask with a new prompt or seed.
   */
  async run(mode: EditMode, prompt = '', seed?: number, poll?: PollOptions): Promise<JobView | null> {
    if (!this.state.sessionId || !this.canRun(mode, prompt)) {
      return null;
    }
    this.jobInFlight = true;
    this.state.phase = 'running';
    this.state.error = null;
    this.state.result = null;
    this.emit();
    try {
      const body = {
        mode,
        mask_index: this.state.selectedIndex,
        ...(mode === 'remove' ? {} : { prompt }),
        ...(seed !== undefined ? { config: { seed } } : {}),
      };
      const { job_id } = await this.client.execute(this.state.sessionId, body);
      this.state.lastJobId = job_id;
      this.emit();
      const view = await this.client.pollJob(job_id, poll);
      const result = view.result;
      if (!result) {
        throw new ApiError(0, 'EmptyResultView', 'done job carried no result payload');
      }
      this.state.result = {
        imagePng: result.image_png,
        editMaskPng: result.edit_mask_png,
        timingsMs: result.timings_ms,
      };
      this.state.phase = 'done';
      this.emit();
      return view;
    } catch (error) {
      this.state.phase = 'failed';
      this.fail(error);
      return null;
    } finally {
      this.jobInFlight = false;
    }
  }
}
