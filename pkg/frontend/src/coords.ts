/** Display <-> image coordinate mapping.
 *
 * The canvas shows the image at a uniform display scale s (display pixels
 * per image pixel).  Every click is converted back to image pixel space
 * before it reaches the server; clicks that land outside the image after
 * rounding are dropped.
 */

export interface ImagePoint {
  x: number;
  y: number;
}

/** Uniform scale that fits an image inside a viewport (may exceed 1). */
export function fitScale(
  imageWidth: number,
  imageHeight: number,
  viewportWidth: number,
  viewportHeight: number,
): number {
  return Math.min(viewportWidth / imageWidth, viewportHeight / imageHeight);
}

/** Map a display-space click to image coordinates, or null if it falls
 * outside the image after rounding. */
export function displayToImage(
  u: number,
  v: number,
  scale: number,
  imageWidth: number,
  imageHeight: number,
): ImagePoint | null {
  const x = Math.round(u / scale);
  const y = Math.round(v / scale);
  if (x < 0 || y < 0 || x >= imageWidth || y >= imageHeight) {
    return null;
  }
  return { x, y };
}

/** Map image coordinates to the display-space centre of that pixel. */
export function imageToDisplay(x: number, y: number, scale: number): { u: number; v: number } {
  return { u: x * scale, v: y * scale };
}
