// Canvas state: where each sample marker sits, in normalized sheet units.
//
// Coordinates are unit-square fractions of the tablecloth with the origin at
// the BOTTOM-left corner (y grows upward, like the paper sheets the data
// model mirrors); the DOM layer flips y when converting to and from screen
// pixels.  A marker is either unplaced (still in the tray) or placed at a
// clamped position inside the rectangle.

import type { SessionMeta, SubmissionPayload } from "./api.js";

export interface UnitPoint {
  x: number;
  y: number;
}

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

/** Screen pixel -> unit square, relative to the tablecloth rectangle.
 * This is the documented transform: x = (clientX - left) / width,
 * y = 1 - (clientY - top) / height.  It depends only on the rectangle, so
 * the payload is independent of window size. */
export function pixelToUnit(rect: Rect, clientX: number, clientY: number): UnitPoint {
  return {
    x: clamp01((clientX - rect.left) / rect.width),
    y: clamp01(1 - (clientY - rect.top) / rect.height),
  };
}

/** Unit square -> CSS percentages for absolute positioning (top is flipped). */
export function unitToPercent(p: UnitPoint): { left: string; top: string } {
  return { left: `${p.x * 100}%`, top: `${(1 - p.y) * 100}%` };
}

export class CanvasState {
  readonly markers = new Map<string, UnitPoint | null>();
  dirty = false;

  constructor(
    readonly session: SessionMeta,
    readonly assessorId: string,
  ) {
    for (const name of session.sample_names) {
      this.markers.set(name, null);
    }
  }

  place(sample: string, point: UnitPoint): void {
    if (!this.markers.has(sample)) {
      throw new Error(`unknown sample ${sample}`);
    }
    this.markers.set(sample, { x: clamp01(point.x), y: clamp01(point.y) });
    this.dirty = true;
  }

  positionOf(sample: string): UnitPoint | null {
    return this.markers.get(sample) ?? null;
  }

  allPlaced(): boolean {
    for (const p of this.markers.values()) {
      if (p === null) return false;
    }
    return true;
  }

  unplacedSamples(): string[] {
    return [...this.markers.entries()].filter(([, p]) => p === null).map(([n]) => n);
  }

  payload(): SubmissionPayload {
    if (!this.allPlaced()) {
      throw new Error("cannot submit before every sample is placed");
    }
    return {
      assessor_id: this.assessorId,
      placements: this.session.sample_names.map((name) => {
        const p = this.markers.get(name)!;
        return { sample: name, x: p.x, y: p.y };
      }),
    };
  }
}
