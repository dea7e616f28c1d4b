// DOM layer: tray of unplaced markers, the tablecloth rectangle, drag
// wiring, and the submit flow.  All placement math lives in state.ts; this
// file only moves pixels.  The tablecloth rectangle is measured through an
// injectable provider so tests can run without a real layout engine.

import { ApiClient } from "./api.js";
import { CanvasState, pixelToUnit, unitToPercent, type Rect } from "./state.js";

export type RectProvider = (el: Element) => Rect;

export interface BoardOptions {
  rectProvider?: RectProvider;
}

const IMAGE_NAME = /\.(png|jpe?g|gif|webp|svg)$/i;

function looksLikeImage(name: string): boolean {
  return IMAGE_NAME.test(name) || /^https?:\/\//.test(name);
}

export class Board {
  readonly root: HTMLElement;
  readonly boardEl: HTMLElement;
  readonly trayEl: HTMLElement;
  readonly submitButton: HTMLButtonElement;
  readonly statusEl: HTMLElement;
  private readonly markerEls = new Map<string, HTMLElement>();
  private readonly rectOf: RectProvider;
  private dragging: string | null = null;

  constructor(
    root: HTMLElement,
    readonly state: CanvasState,
    readonly api: ApiClient,
    options: BoardOptions = {},
  ) {
    this.root = root;
    this.rectOf = options.rectProvider ?? ((el) => el.getBoundingClientRect());

    const doc = root.ownerDocument;
    const sheet = state.session.sheet;

    const title = doc.createElement("h1");
    title.textContent = `Place the ${state.session.sample_names.length} samples`;
    const hint = doc.createElement("p");
    hint.className = "hint";
    hint.textContent =
      "Drag every sample onto the tablecloth: similar samples close together, " +
      "different samples far apart, by your own judgement.";

    this.trayEl = doc.createElement("div");
    this.trayEl.className = "tray";
    this.trayEl.setAttribute("aria-label", "unplaced samples");

    this.boardEl = doc.createElement("div");
    this.boardEl.className = "tablecloth";
    this.boardEl.setAttribute("aria-label", "tablecloth");
    // keep the on-screen rectangle in the sheet's proportions (3:2 default)
    this.boardEl.style.aspectRatio = `${sheet.width} / ${sheet.height}`;

    this.submitButton = doc.createElement("button");
    this.submitButton.className = "submit";
    this.submitButton.textContent = "Submit placement";
    this.submitButton.addEventListener("click", () => void this.submit());

    this.statusEl = doc.createElement("div");
    this.statusEl.className = "status";

    root.append(title, hint, this.trayEl, this.boardEl, this.submitButton, this.statusEl);

    for (const name of state.session.sample_names) {
      const marker = this.buildMarker(name);
      this.markerEls.set(name, marker);
      this.trayEl.appendChild(marker);
    }
    this.refresh();
  }

  private buildMarker(name: string): HTMLElement {
    const doc = this.root.ownerDocument;
    const el = doc.createElement("div");
    el.className = "marker";
    el.dataset.sample = name;
    if (looksLikeImage(name)) {
      const img = doc.createElement("img");
      img.src = name;
      img.alt = name;
      img.draggable = false;
      el.appendChild(img);
    } else {
      el.textContent = name;
    }
    el.addEventListener("pointerdown", (ev) => this.startDrag(name, ev as PointerEvent));
    return el;
  }

  private startDrag(name: string, ev: PointerEvent): void {
    ev.preventDefault();
    this.dragging = name;
    const el = this.markerEls.get(name)!;
    // capture is a nicety in real browsers; jsdom has no implementation
    (el as { setPointerCapture?: (id: number) => void }).setPointerCapture?.(ev.pointerId);
    const doc = this.root.ownerDocument;
    const move = (e: Event) => this.dragTo(e as PointerEvent);
    const up = () => {
      this.dragging = null;
      doc.removeEventListener("pointermove", move);
      doc.removeEventListener("pointerup", up);
    };
    doc.addEventListener("pointermove", move);
    doc.addEventListener("pointerup", up);
    this.dragTo(ev);
  }

  private dragTo(ev: PointerEvent): void {
    if (this.dragging === null) return;
    const rect = this.rectOf(this.boardEl);
    if (rect.width <= 0 || rect.height <= 0) return;
    const unit = pixelToUnit(rect, ev.clientX, ev.clientY);
    this.state.place(this.dragging, unit);
    this.refresh();
  }

  /** Re-render marker positions and the submit gate from the state. */
  refresh(): void {
    for (const [name, el] of this.markerEls) {
      const pos = this.state.positionOf(name);
      if (pos === null) {
        if (el.parentElement !== this.trayEl) this.trayEl.appendChild(el);
        el.style.position = "";
        el.style.left = "";
        el.style.top = "";
      } else {
        if (el.parentElement !== this.boardEl) this.boardEl.appendChild(el);
        const css = unitToPercent(pos);
        el.style.position = "absolute";
        el.style.left = css.left;
        el.style.top = css.top;
      }
    }
    const missing = this.state.unplacedSamples();
    this.submitButton.disabled = missing.length > 0;
    if (missing.length > 0) {
      this.setStatus(`place ${missing.length} more sample(s) to submit`, "pending");
    } else if (this.state.dirty) {
      this.setStatus("every sample placed; ready to submit", "ready");
    }
  }

  async submit(): Promise<boolean> {
    if (!this.state.allPlaced()) return false;
    this.submitButton.disabled = true;
    this.setStatus("submitting...", "pending");
    try {
      const result = await this.api.submitTablecloth(
        this.state.session.id,
        this.state.payload(),
      );
      this.state.dirty = false;
      const verb = result.status === "replaced" ? "updated" : "saved";
      this.setStatus(`placement ${verb} (tablecloths: ${result.tablecloth_count})`, "saved");
      this.submitButton.disabled = false;
      return true;
    } catch (err) {
      // keep local placements; the button stays live as the retry affordance
      this.submitButton.disabled = false;
      const detail = err instanceof Error ? err.message : String(err);
      this.setStatus(`submission failed: ${detail} — placements kept, retry`, "error");
      return false;
    }
  }

  private setStatus(text: string, kind: "pending" | "ready" | "saved" | "error"): void {
    this.statusEl.textContent = text;
    this.statusEl.dataset.kind = kind;
  }
}

export function showErrorBanner(root: HTMLElement, message: string): void {
  const banner = root.ownerDocument.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  root.appendChild(banner);
}
